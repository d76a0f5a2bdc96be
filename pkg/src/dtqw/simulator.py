"""Dense statevector execution of compiled walk circuits."""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .circuit import (
    DEFAULT_QUBIT_BUDGET,
    MCX,
    Circuit,
    Diffusion,
    Gate,
    RegisterLayout,
    check_gate,
    encode_arc,
    valid_indices,
)
from .errors import CapacityError, CircuitError
from .graph import Graph

__all__ = [
    "Statevector",
    "Uniform",
    "SingleArc",
    "Custom",
    "inject_initial_state",
    "apply_gate",
    "run",
    "node_probabilities_from_sv",
    "validity_report",
    "sample_counts",
]


@dataclass(frozen=True)
class Statevector:
    amplitudes: np.ndarray
    layout: RegisterLayout

    def __post_init__(self):
        if self.amplitudes.shape != (self.layout.dim,):
            raise CircuitError(f"expected {self.layout.dim} amplitudes, got {self.amplitudes.shape}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


# initial-state specs -------------------------------------------------------


@dataclass(frozen=True)
class Uniform:
    """``1/sqrt(N k_i)`` on every arc leaving node ``i``."""


@dataclass(frozen=True)
class SingleArc:
    tail: int
    head: int


@dataclass(frozen=True)
class Custom:
    amplitudes: Mapping[tuple[int, int], complex] = field(default_factory=dict)


InitialSpec = Uniform | SingleArc | Custom


def inject_initial_state(layout: RegisterLayout, g: Graph, spec: InitialSpec,
                         qubit_budget: int = DEFAULT_QUBIT_BUDGET) -> Statevector:
    """Write arc amplitudes straight into the register basis.

    No state-preparation gates are synthesised; every index outside the
    encoded arcs is zero.
    """
    if layout.total > qubit_budget:
        raise CapacityError(f"statevector needs {layout.total} qubits; budget is {qubit_budget}")
    layout.check_fits(g)
    amps = np.zeros(layout.dim, dtype=complex)
    if isinstance(spec, Uniform):
        idx, tails = valid_indices(g, layout)
        deg = np.asarray(g.degrees, dtype=float)
        amps[idx] = 1.0 / np.sqrt(g.n * deg[tails])
    elif isinstance(spec, SingleArc):
        if not g.has_edge(spec.tail, spec.head):
            raise ValueError(f"({spec.tail}, {spec.head}) is not an arc of the graph")
        amps[encode_arc(g, layout, spec.tail, spec.head)] = 1.0
    elif isinstance(spec, Custom):
        for (i, j), a in spec.amplitudes.items():
            if not g.has_edge(i, j):
                raise ValueError(f"({i}, {j}) is not an arc of the graph")
            amps[encode_arc(g, layout, i, j)] = a
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("custom amplitudes have zero norm")
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"custom amplitudes not normalized (norm {norm:.12g})")
        amps /= norm
    else:
        raise TypeError(f"unknown initial state spec {spec!r}")
    return Statevector(amps, layout)


# gate kernels --------------------------------------------------------------


def _apply_mcx(amps: np.ndarray, gate: MCX, total: int):
    idx = np.arange(1 << total)
    sel = np.ones(idx.shape, dtype=bool)
    for q, pol in gate.controls:
        sel &= ((idx >> q) & 1) == pol
    tmask = 0
    for q in gate.targets:
        tmask |= 1 << q
    # pair each index with its partner once: pick the member whose lowest target bit is 0
    sel &= ((idx >> gate.targets[0]) & 1) == 0
    a = idx[sel]
    b = a ^ tmask
    amps[a], amps[b] = amps[b], amps[a].copy()


def _apply_diffusion(amps: np.ndarray, gate: Diffusion, layout: RegisterLayout):
    block = amps.reshape(1 << layout.q_x, 1 << layout.q_l)
    row = block[gate.node]
    labels = np.asarray(gate.labels)
    vals = row[labels]
    # a'_l = (2/k) sum_m a_m - a_l on the incident labels, identity elsewhere
    row[labels] = (2.0 / len(labels)) * vals.sum() - vals


def _apply_inplace(amps: np.ndarray, gate: Gate, layout: RegisterLayout):
    if isinstance(gate, MCX):
        _apply_mcx(amps, gate, layout.total)
    else:
        _apply_diffusion(amps, gate, layout)


def apply_gate(sv: Statevector, gate: Gate) -> Statevector:
    check_gate(gate, sv.layout)
    amps = sv.amplitudes.copy()
    _apply_inplace(amps, gate, sv.layout)
    return Statevector(amps, sv.layout)


def run(c: Circuit, init: Statevector, snapshots: bool = False):
    """Apply every gate in order.

    With ``snapshots=True`` returns ``(final, [state after 0..steps blocks])``.
    """
    if init.layout != c.layout:
        raise CircuitError(f"layout mismatch: circuit {c.layout}, state {init.layout}")
    amps = init.amplitudes.copy()
    snaps = [Statevector(amps.copy(), c.layout)] if snapshots else None
    block = c.block_size
    for n, gate in enumerate(c.gates, start=1):
        _apply_inplace(amps, gate, c.layout)
        if snapshots and n % block == 0:
            snaps.append(Statevector(amps.copy(), c.layout))
    final = Statevector(amps, c.layout)
    return (final, snaps) if snapshots else final


# readout -------------------------------------------------------------------


def node_probabilities_from_sv(g: Graph, layout: RegisterLayout,
                               sv: Statevector) -> tuple[np.ndarray, float]:
    """Per-node probability over valid incidences, plus the leftover invalid mass."""
    idx, tails = valid_indices(g, layout)
    p = np.abs(sv.amplitudes[idx]) ** 2
    probs = np.bincount(tails, weights=p, minlength=g.n)
    invalid = float(np.sum(np.abs(sv.amplitudes[_invalid_mask(g, layout)]) ** 2))
    return probs, invalid


def _invalid_mask(g: Graph, layout: RegisterLayout) -> np.ndarray:
    mask = np.ones(layout.dim, dtype=bool)
    mask[valid_indices(g, layout)[0]] = False
    return mask


def validity_report(g: Graph, layout: RegisterLayout, sv: Statevector) -> float:
    """Largest amplitude magnitude sitting on an index that encodes no arc."""
    bad = np.abs(sv.amplitudes[_invalid_mask(g, layout)])
    return float(bad.max(initial=0.0))


def sample_counts(sv: Statevector, shots: int, seed: int = 0) -> np.ndarray:
    """Multinomial counts per position-register value (length ``2**q_x``)."""
    p = np.abs(sv.amplitudes) ** 2
    p = p / p.sum()
    draws = np.random.default_rng(seed).multinomial(shots, p)
    layout = sv.layout
    pos = np.arange(layout.dim) >> layout.q_l
    return np.bincount(pos, weights=draws, minlength=1 << layout.q_x).astype(np.int64)
