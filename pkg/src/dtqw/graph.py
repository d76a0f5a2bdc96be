"""Simple undirected networks with canonical edge labels.

Nodes are ``0..n-1``. Edges are stored as ``(u, v)`` pairs with ``u < v``,
sorted lexicographically; the position of an edge in that list is its
label, which the circuit uses as the coin-register value.
"""
from __future__ import annotations

import hashlib
import json
from collections.abc import Iterable
from dataclasses import dataclass
from functools import cached_property

from .errors import GraphError, ParseError
from .rng import MASK64, Xoshiro256StarStar

__all__ = [
    "Graph",
    "WsParams",
    "generate_ws",
    "ring_lattice",
    "cycle_graph",
    "complete_graph",
    "star_graph",
    "path_graph",
    "parse_edge_list",
    "format_edge_list",
    "edge_label",
    "serialize_graph",
    "deserialize_graph",
]

Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Immutable canonical graph.

    Construct with :meth:`from_edges` unless the edge list is already
    canonical; the plain constructor only validates.
    """

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise GraphError(f"node count must be a positive integer, got {self.n!r}")
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        prev = None
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not u < v:
                raise GraphError(f"edge ({u}, {v}) is not in (min, max) order")
            if u < 0 or v >= self.n:
                raise GraphError(f"edge ({u}, {v}) out of range for n={self.n}")
            if prev is not None and (u, v) <= prev:
                raise GraphError(f"edges not strictly ascending at ({u}, {v})")
            prev = (u, v)
        isolated = [i for i, d in enumerate(self.degrees) if d == 0]
        if isolated:
            raise GraphError(f"isolated node(s) {isolated}: coin undefined for degree 0")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], n: int | None = None) -> Graph:
        """Canonicalize an arbitrary edge iterable; duplicates are an error."""
        seen: set[Edge] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
        if n is None:
            n = max((v for _, v in seen), default=-1) + 1
        return cls(n, tuple(sorted(seen)))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    @cached_property
    def labels(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.labels

    def fingerprint(self) -> str:
        """SHA-256 of the canonical edge list, used to tie circuits to graphs."""
        payload = json.dumps({"n": self.n, "edges": [list(e) for e in self.edges]},
                             separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


def edge_label(g: Graph, u: int, v: int) -> int:
    try:
        return g.labels[(min(u, v), max(u, v))]
    except KeyError:
        raise KeyError(f"({u}, {v}) is not an edge") from None


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WsParams:
    n: int
    k: int
    beta: float
    seed: int = 0

    def __post_init__(self):
        if self.k % 2:
            raise GraphError(f"k must be even, got {self.k}")
        if not 0 < self.k < self.n:
            raise GraphError(f"need 0 < k < n, got k={self.k}, n={self.n}")
        if not 0.0 <= self.beta <= 1.0:
            raise GraphError(f"beta must lie in [0, 1], got {self.beta}")
        if not 0 <= self.seed <= MASK64:
            raise GraphError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def ring_lattice(n: int, k: int) -> Graph:
    """Each node joined to its k/2 nearest neighbours on either side."""
    WsParams(n, k, 0.0)
    return Graph.from_edges(((i, (i + d) % n) for i in range(n) for d in range(1, k // 2 + 1)), n)


def generate_ws(params: WsParams) -> Graph:
    """Watts-Strogatz small-world graph, reproducible from ``params.seed``.

    Starting from :func:`ring_lattice`, nodes ``u`` are scanned in ascending
    order and, for each, offsets ``d = 1..k/2`` in ascending order. The edge
    ``(u, (u+d) % n)`` is rewired when ``rng.random() < beta``: a new far
    endpoint ``w = rng.randbelow(n)`` is drawn, redrawing while ``w == u`` or
    ``{u, w}`` is already an edge. If ``u`` is adjacent to every other node
    the edge is kept and no target is drawn.
    """
    n, k, beta = params.n, params.k, params.beta
    rng = Xoshiro256StarStar(params.seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for d in range(1, k // 2 + 1):
            j = (i + d) % n
            adj[i].add(j)
            adj[j].add(i)
    for u in range(n):
        for d in range(1, k // 2 + 1):
            v = (u + d) % n
            if rng.random() >= beta:
                continue
            if len(adj[u]) >= n - 1:
                continue
            w = rng.randbelow(n)
            while w == u or w in adj[u]:
                w = rng.randbelow(n)
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    return Graph.from_edges(((u, v) for u in range(n) for v in adj[u] if u < v), n)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 nodes")
    return Graph.from_edges(((i, (i + 1) % n) for i in range(n)), n)


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise GraphError("a complete graph needs at least 2 nodes")
    return Graph.from_edges(((i, j) for i in range(n) for j in range(i + 1, n)), n)


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with centre 0."""
    if leaves < 1:
        raise GraphError("a star needs at least one leaf")
    return Graph.from_edges(((0, j) for j in range(1, leaves + 1)), leaves + 1)


def path_graph(n: int) -> Graph:
    if n < 2:
        raise GraphError("a path needs at least 2 nodes")
    return Graph.from_edges(((i, i + 1) for i in range(n - 1)), n)


# ---------------------------------------------------------------------------
# text formats
# ---------------------------------------------------------------------------


def parse_edge_list(text: str) -> Graph:
    """Parse ``u v`` lines; ``#`` starts a comment. Errors name the line."""
    seen: dict[Edge, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v', got {raw.strip()!r}")
        try:
            u, v = (int(p) for p in parts)
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer node id in {raw.strip()!r}") from None
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: negative node id")
        if u == v:
            raise ParseError(f"line {lineno}: self-loop at node {u}")
        e = (min(u, v), max(u, v))
        if e in seen:
            raise ParseError(f"line {lineno}: duplicate edge {e} (first on line {seen[e]})")
        seen[e] = lineno
    if not seen:
        raise ParseError("no edges found")
    n = max(v for _, v in seen) + 1
    mentioned = {x for e in seen for x in e}
    missing = sorted(set(range(n)) - mentioned)
    if missing:
        raise ParseError(f"isolated node(s) {missing}: ids below the maximum {n - 1} never appear")
    return Graph.from_edges(seen, n)


def format_edge_list(g: Graph) -> str:
    lines = [f"# n={g.n} |E|={g.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def serialize_graph(g: Graph) -> str:
    return json.dumps({"edges": [list(e) for e in g.edges], "n": g.n},
                      sort_keys=True, separators=(",", ":")) + "\n"


def deserialize_graph(text: str) -> Graph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return graph_from_dict(data)


def graph_from_dict(data) -> Graph:
    if not isinstance(data, dict):
        raise ParseError("graph JSON must be an object")
    for key in ("n", "edges"):
        if key not in data:
            raise ParseError(f"graph JSON missing {key!r}")
    n, edges = data["n"], data["edges"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError("'n' must be an integer")
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and len(e) == 2
        and all(isinstance(x, int) and not isinstance(x, bool) for x in e)
        for e in edges
    ):
        raise ParseError("'edges' must be a list of [u, v] integer pairs")
    try:
        return Graph.from_edges((tuple(e) for e in edges), n)
    except GraphError as exc:
        raise ParseError(str(exc)) from None
