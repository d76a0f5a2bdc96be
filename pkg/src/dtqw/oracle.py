"""Exact coined walk in the 2|E|-dimensional arc space.

This is the reference the compiled circuit is checked against. One walk
step applies the node-dependent Grover coin and then the flip-flop shift
``|i>|i->j>  ->  |j>|j->i>``.
"""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .graph import Graph, edge_label

__all__ = [
    "ArcBasis",
    "ArcState",
    "CoinOperator",
    "WalkOperators",
    "build_coin",
    "build_shift",
    "build_walk_operators",
    "initial_state_uniform",
    "single_arc_state",
    "arc_state_from_map",
    "evolve",
    "trajectory",
    "node_probabilities",
]

Arc = tuple[int, int]


class ArcBasis:
    """Directed arcs ordered by edge label, lower endpoint as tail first.

    Arc ``2*l`` is ``u->v`` and arc ``2*l + 1`` is ``v->u`` for edge
    ``l = (u, v)``, so reversal is ``a ^ 1``.
    """

    def __init__(self, g: Graph):
        self.graph = g
        arcs: list[Arc] = []
        for u, v in g.edges:
            arcs.append((u, v))
            arcs.append((v, u))
        self.arcs: tuple[Arc, ...] = tuple(arcs)
        self.tails = np.array([a[0] for a in arcs], dtype=np.intp)
        self.heads = np.array([a[1] for a in arcs], dtype=np.intp)

    def __len__(self) -> int:
        return len(self.arcs)

    def index(self, tail: int, head: int) -> int:
        label = edge_label(self.graph, tail, head)
        return 2 * label + (0 if tail < head else 1)

    @staticmethod
    def reverse(a: int) -> int:
        return a ^ 1

    @cached_property
    def node_arcs(self) -> tuple[np.ndarray, ...]:
        """Arc indices leaving each node, in basis order."""
        order = np.argsort(self.tails, kind="stable")
        bounds = np.searchsorted(self.tails[order], np.arange(self.graph.n + 1))
        return tuple(order[bounds[i]:bounds[i + 1]] for i in range(self.graph.n))


@dataclass(frozen=True)
class ArcState:
    amplitudes: np.ndarray
    basis: ArcBasis = field(repr=False)
    step: int = 0

    def amplitude(self, tail: int, head: int) -> complex:
        return complex(self.amplitudes[self.basis.index(tail, head)])

    def as_dict(self) -> dict[Arc, complex]:
        return {a: complex(x) for a, x in zip(self.basis.arcs, self.amplitudes)}

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _grover_block(k: int) -> np.ndarray:
    return np.full((k, k), 2.0 / k) - np.eye(k)


@dataclass(frozen=True)
class CoinOperator:
    """Block-diagonal Grover coin: ``blocks[i]`` acts on arcs ``groups[i]``."""

    groups: tuple[np.ndarray, ...]
    blocks: tuple[np.ndarray, ...]

    def apply(self, psi: np.ndarray) -> np.ndarray:
        out = np.empty_like(psi)
        for idx, block in zip(self.groups, self.blocks):
            out[idx] = block @ psi[idx]
        return out


@dataclass(frozen=True)
class WalkOperators:
    basis: ArcBasis = field(repr=False)
    coin: CoinOperator
    shift: np.ndarray

    def step(self, psi: np.ndarray) -> np.ndarray:
        return self.coin.apply(psi)[self.shift]


def build_coin(g: Graph, basis: ArcBasis | None = None) -> CoinOperator:
    basis = basis or ArcBasis(g)
    groups = basis.node_arcs
    return CoinOperator(groups, tuple(_grover_block(len(idx)) for idx in groups))


def build_shift(g: Graph, basis: ArcBasis | None = None) -> np.ndarray:
    """Permutation ``p`` with ``p[a] = reverse(a)``; ``psi[p]`` applies the shift."""
    basis = basis or ArcBasis(g)
    return np.arange(len(basis), dtype=np.intp) ^ 1


def build_walk_operators(g: Graph) -> WalkOperators:
    basis = ArcBasis(g)
    return WalkOperators(basis, build_coin(g, basis), build_shift(g, basis))


def initial_state_uniform(g: Graph, basis: ArcBasis | None = None) -> ArcState:
    """Amplitude ``1/sqrt(N k_i)`` on every arc leaving node ``i``."""
    basis = basis or ArcBasis(g)
    deg = np.asarray(g.degrees, dtype=float)
    amps = (1.0 / np.sqrt(g.n * deg[basis.tails])).astype(complex)
    return ArcState(amps, basis)


def single_arc_state(g: Graph, tail: int, head: int, basis: ArcBasis | None = None) -> ArcState:
    basis = basis or ArcBasis(g)
    amps = np.zeros(len(basis), dtype=complex)
    amps[basis.index(tail, head)] = 1.0
    return ArcState(amps, basis)


def arc_state_from_map(g: Graph, amplitudes: Mapping[Arc, complex],
                       basis: ArcBasis | None = None) -> ArcState:
    """State from an ``{(tail, head): amplitude}`` map.

    The map must be normalized to within 1e-9; it is then renormalized exactly.
    """
    basis = basis or ArcBasis(g)
    amps = np.zeros(len(basis), dtype=complex)
    for (i, j), a in amplitudes.items():
        amps[basis.index(i, j)] += a
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("amplitude map has zero norm")
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"amplitude map not normalized (norm {norm:.12g})")
    return ArcState(amps / norm, basis)


def evolve(ops: WalkOperators, state: ArcState, t: int) -> ArcState:
    if t < 0:
        raise ValueError("step count must be non-negative")
    psi = state.amplitudes
    for _ in range(t):
        psi = ops.step(psi)
    return ArcState(psi.copy() if t == 0 else psi, state.basis, state.step + t)


def trajectory(ops: WalkOperators, state: ArcState, t: int) -> list[ArcState]:
    """States after 0..t steps."""
    out = [state]
    for _ in range(t):
        out.append(evolve(ops, out[-1], 1))
    return out


def node_probabilities(g: Graph, state: ArcState) -> np.ndarray:
    p = np.abs(state.amplitudes) ** 2
    return np.bincount(state.basis.tails, weights=p, minlength=g.n)
