"""Compile a graph walk into a position/edge-label register circuit.

Layout: the coin register holds the edge label on global qubits
``0..q_l-1`` and the position register holds the node on qubits
``q_l..q_l+q_x-1``; both little-endian, so basis index ``pos * 2**q_l + label``.
Arc ``i->j`` is encoded as ``(pos=i, label=l({i, j}))``.

Each walk step is a coin stage (one controlled reflection per node about
the uniform superposition of its incident labels) followed by a shift stage
(one MCX per edge, controlled on the label, flipping the position bits of
``u XOR v``).
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, CircuitError, ParseError
from .graph import Graph, edge_label, graph_from_dict

__all__ = [
    "DEFAULT_QUBIT_BUDGET",
    "RegisterLayout",
    "MCX",
    "Diffusion",
    "Circuit",
    "compile_walk_circuit",
    "coin_stage",
    "shift_stage",
    "resource_estimate",
    "ResourceEstimate",
    "encode_arc",
    "decode_index",
    "valid_indices",
    "diffusion_matrix",
    "serialize_circuit",
    "deserialize_circuit",
]

DEFAULT_QUBIT_BUDGET = 30


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length()


@dataclass(frozen=True)
class RegisterLayout:
    q_x: int
    q_l: int

    def __post_init__(self):
        if self.q_x < 1 or self.q_l < 1:
            raise CircuitError("both registers need at least one qubit")

    @classmethod
    def for_graph(cls, g: Graph) -> RegisterLayout:
        return cls(max(1, _ceil_log2(g.n)), max(1, _ceil_log2(g.num_edges)))

    @property
    def total(self) -> int:
        return self.q_x + self.q_l

    @property
    def dim(self) -> int:
        return 1 << self.total

    def coin_qubit(self, bit: int) -> int:
        return bit

    def position_qubit(self, bit: int) -> int:
        return self.q_l + bit

    @property
    def coin_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.q_l))

    @property
    def position_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.q_l, self.total))

    def index(self, pos: int, label: int) -> int:
        return (pos << self.q_l) | label

    def split(self, index: int) -> tuple[int, int]:
        return index >> self.q_l, index & ((1 << self.q_l) - 1)

    def check_fits(self, g: Graph):
        if (1 << self.q_x) < g.n or (1 << self.q_l) < g.num_edges:
            raise CircuitError(f"layout q_x={self.q_x}, q_l={self.q_l} too small for "
                               f"N={g.n}, |E|={g.num_edges}")


# ---------------------------------------------------------------------------
# gates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MCX:
    """X on every target when each ``(qubit, polarity)`` control reads ``polarity``."""

    controls: tuple[tuple[int, int], ...]
    targets: tuple[int, ...]

    def __post_init__(self):
        controls = tuple((int(q), int(p)) for q, p in self.controls)
        targets = tuple(int(q) for q in self.targets)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "targets", targets)
        cq = [q for q, _ in controls]
        if any(p not in (0, 1) for _, p in controls):
            raise CircuitError("control polarity must be 0 or 1")
        if len(set(cq)) != len(cq):
            raise CircuitError("duplicate control qubit")
        if not targets or len(set(targets)) != len(targets):
            raise CircuitError("MCX needs distinct, non-empty targets")
        if set(cq) & set(targets):
            raise CircuitError("control and target qubits overlap")
        if any(q < 0 for q in cq + list(targets)):
            raise CircuitError("negative qubit index")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.controls) + self.targets

    def to_dict(self) -> dict:
        return {"kind": "mcx", "controls": [list(c) for c in self.controls],
                "targets": list(self.targets)}


@dataclass(frozen=True)
class Diffusion:
    """Reflection about the uniform superposition of ``labels``, controlled on ``node``.

    Fires when the position register equals ``node`` (zero bits are negative
    controls). On the coin register it applies
    ``I - 2 P_L + 2 |u><u|`` with ``|u> = sum_{l in L} |l> / sqrt(k)``, i.e. the
    Grover coin on span(L) and the identity elsewhere.
    """

    node: int
    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if self.node < 0:
            raise CircuitError("negative node index")
        if not labels or len(set(labels)) != len(labels) or min(labels) < 0:
            raise CircuitError("diffusion labels must be distinct non-negative integers")

    def to_dict(self) -> dict:
        return {"kind": "diffusion", "node": self.node, "labels": list(self.labels)}

    def qubits(self, layout: RegisterLayout) -> tuple[int, ...]:
        return layout.coin_qubits + layout.position_qubits

    def controls(self, layout: RegisterLayout) -> tuple[tuple[int, int], ...]:
        return tuple((layout.position_qubit(b), (self.node >> b) & 1) for b in range(layout.q_x))


Gate = MCX | Diffusion


def diffusion_matrix(gate: Diffusion, q_l: int) -> np.ndarray:
    """Dense ``2**q_l`` square matrix of the coin-register action."""
    R = np.eye(1 << q_l)
    k = len(gate.labels)
    sel = np.ix_(gate.labels, gate.labels)
    R[sel] = np.full((k, k), 2.0 / k) - np.eye(k)
    return R


def check_gate(gate: Gate, layout: RegisterLayout):
    if isinstance(gate, MCX):
        if max(gate.qubits) >= layout.total:
            raise CircuitError(f"MCX qubit out of range for {layout.total} qubits")
    elif isinstance(gate, Diffusion):
        if gate.node >= 1 << layout.q_x:
            raise CircuitError(f"diffusion node {gate.node} exceeds position register")
        if max(gate.labels) >= 1 << layout.q_l:
            raise CircuitError("diffusion label exceeds coin register")
    else:
        raise CircuitError(f"unknown gate {gate!r}")


# ---------------------------------------------------------------------------
# compilation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Circuit:
    graph: Graph = field(repr=False)
    layout: RegisterLayout
    steps: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.steps < 0:
            raise CircuitError("steps must be non-negative")
        self.layout.check_fits(self.graph)
        for g in self.gates:
            check_gate(g, self.layout)
        if self.steps == 0 and self.gates:
            raise CircuitError("a zero-step circuit has no gates")
        if self.steps and len(self.gates) % self.steps:
            raise CircuitError("gate count is not a whole number of steps")

    @property
    def fingerprint(self) -> str:
        return self.graph.fingerprint()

    @property
    def block_size(self) -> int:
        return len(self.gates) // self.steps if self.steps else 0


def coin_stage(g: Graph) -> list[Diffusion]:
    incident: list[list[int]] = [[] for _ in range(g.n)]
    for label, (u, v) in enumerate(g.edges):
        incident[u].append(label)
        incident[v].append(label)
    return [Diffusion(i, tuple(labels)) for i, labels in enumerate(incident)]


def shift_stage(g: Graph, layout: RegisterLayout | None = None) -> list[MCX]:
    layout = layout or RegisterLayout.for_graph(g)
    gates = []
    for label, (u, v) in enumerate(g.edges):
        controls = tuple((layout.coin_qubit(b), (label >> b) & 1) for b in range(layout.q_l))
        mask = u ^ v
        targets = tuple(layout.position_qubit(b) for b in range(layout.q_x) if (mask >> b) & 1)
        gates.append(MCX(controls, targets))
    return gates


def compile_walk_circuit(g: Graph, t: int, qubit_budget: int = DEFAULT_QUBIT_BUDGET) -> Circuit:
    if t < 0:
        raise ValueError("step count must be non-negative")
    layout = RegisterLayout.for_graph(g)
    if layout.total > qubit_budget:
        raise CapacityError(f"walk needs {layout.total} qubits (q_x={layout.q_x}, "
                            f"q_l={layout.q_l}); budget is {qubit_budget}")
    block = [*coin_stage(g), *shift_stage(g, layout)]
    return Circuit(g, layout, t, tuple(block * t))


# ---------------------------------------------------------------------------
# arc <-> basis index
# ---------------------------------------------------------------------------


def encode_arc(g: Graph, layout: RegisterLayout, tail: int, head: int) -> int:
    return layout.index(tail, edge_label(g, tail, head))


def decode_index(g: Graph, layout: RegisterLayout, index: int) -> tuple[int, int] | None:
    """Arc ``(tail, head)`` for a basis index, or ``None`` if it is not a valid incidence."""
    pos, label = layout.split(index)
    if label >= g.num_edges or pos >= g.n:
        return None
    u, v = g.edges[label]
    if pos == u:
        return (u, v)
    if pos == v:
        return (v, u)
    return None


def valid_indices(g: Graph, layout: RegisterLayout) -> tuple[np.ndarray, np.ndarray]:
    """Basis indices of every arc and the arc tails, in arc-basis order."""
    idx, tails = [], []
    for label, (u, v) in enumerate(g.edges):
        idx += [layout.index(u, label), layout.index(v, label)]
        tails += [u, v]
    return np.array(idx, dtype=np.intp), np.array(tails, dtype=np.intp)


# ---------------------------------------------------------------------------
# resources
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResourceEstimate:
    width: int
    depth: int
    counts: dict[str, int]
    formula_width: int
    depth_lower_bound: int

    def to_dict(self) -> dict:
        return {"width": self.width, "depth": self.depth, "counts": dict(self.counts),
                "formula_width": self.formula_width, "depth_lower_bound": self.depth_lower_bound}


def _gate_qubits(gate: Gate, layout: RegisterLayout) -> tuple[int, ...]:
    return gate.qubits if isinstance(gate, MCX) else gate.qubits(layout)


def resource_estimate(c: Circuit) -> ResourceEstimate:
    """Width, ASAP depth and gate counts.

    Depth treats every gate as a single layer occupying its control and
    target qubits; a diffusion occupies the whole coin register plus its
    position controls.
    """
    layout = c.layout
    level = [0] * layout.total
    for gate in c.gates:
        qs = _gate_qubits(gate, layout)
        layer = 1 + max(level[q] for q in qs)
        for q in qs:
            level[q] = layer
    counts = Counter({"mcx": 0, "diffusion": 0})
    counts.update(g.to_dict()["kind"] for g in c.gates)
    g = c.graph
    formula = _ceil_log2(g.n) + _ceil_log2(g.num_edges)
    return ResourceEstimate(
        width=layout.total,
        depth=max(level, default=0),
        counts=dict(sorted(counts.items())),
        formula_width=formula,
        depth_lower_bound=formula * c.steps,
    )


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

FORMAT_VERSION = 1


def circuit_to_dict(c: Circuit) -> dict:
    return {
        "version": FORMAT_VERSION,
        "n": c.graph.n,
        "edges": [list(e) for e in c.graph.edges],
        "q_x": c.layout.q_x,
        "q_l": c.layout.q_l,
        "steps": c.steps,
        "gates": [g.to_dict() for g in c.gates],
    }


def serialize_circuit(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), sort_keys=True, separators=(",", ":")) + "\n"


def _int(value, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise CircuitError(f"{what} must be an integer")
    return value


def _gate_from_dict(d) -> Gate:
    if not isinstance(d, dict) or "kind" not in d:
        raise CircuitError("gate entry must be an object with a 'kind'")
    kind = d["kind"]
    if kind == "mcx":
        if set(d) != {"kind", "controls", "targets"}:
            raise CircuitError("mcx gate needs exactly 'controls' and 'targets'")
        controls = d["controls"]
        if not isinstance(controls, list) or not all(isinstance(c, list) and len(c) == 2 for c in controls):
            raise CircuitError("mcx controls must be [qubit, polarity] pairs")
        if not isinstance(d["targets"], list):
            raise CircuitError("mcx targets must be a list")
        return MCX(tuple((_int(q, "qubit"), _int(p, "polarity")) for q, p in controls),
                   tuple(_int(q, "qubit") for q in d["targets"]))
    if kind == "diffusion":
        if set(d) != {"kind", "node", "labels"}:
            raise CircuitError("diffusion gate needs exactly 'node' and 'labels'")
        if not isinstance(d["labels"], list):
            raise CircuitError("diffusion labels must be a list")
        return Diffusion(_int(d["node"], "node"), tuple(_int(x, "label") for x in d["labels"]))
    raise CircuitError(f"unknown gate kind {kind!r}")


def deserialize_circuit(text: str, graph: Graph | None = None) -> Circuit:
    """Load a circuit; if ``graph`` is given its fingerprint must match the file."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitError(f"invalid circuit JSON: {exc}") from None
    if not isinstance(data, dict):
        raise CircuitError("circuit JSON must be an object")
    required = {"version", "n", "edges", "q_x", "q_l", "steps", "gates"}
    missing = required - set(data)
    if missing:
        raise CircuitError(f"circuit JSON missing {sorted(missing)}")
    if data["version"] != FORMAT_VERSION:
        raise CircuitError(f"unsupported circuit version {data['version']!r}")
    try:
        g = graph_from_dict({"n": data["n"], "edges": data["edges"]})
    except ParseError as exc:
        raise CircuitError(f"embedded graph: {exc}") from None
    if graph is not None and graph.fingerprint() != g.fingerprint():
        raise CircuitError("circuit was compiled for a different graph (fingerprint mismatch)")
    if not isinstance(data["gates"], list):
        raise CircuitError("'gates' must be a list")
    layout = RegisterLayout(_int(data["q_x"], "q_x"), _int(data["q_l"], "q_l"))
    gates = tuple(_gate_from_dict(d) for d in data["gates"])
    return Circuit(g, layout, _int(data["steps"], "steps"), gates)
