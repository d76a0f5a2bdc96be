"""Command-line entry point: ``dtqw gen|run|export|info``.

Exit codes: 0 ok, 1 engines disagree beyond tolerance, 2 usage or input
error, 3 qubit budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuit import (
    DEFAULT_QUBIT_BUDGET,
    RegisterLayout,
    compile_walk_circuit,
    resource_estimate,
    serialize_circuit,
)
from .errors import CapacityError, CircuitError, GraphError
from .graph import (
    Graph,
    WsParams,
    complete_graph,
    cycle_graph,
    deserialize_graph,
    format_edge_list,
    generate_ws,
    parse_edge_list,
    path_graph,
    serialize_graph,
    star_graph,
)
from .oracle import arc_state_from_map, build_walk_operators, initial_state_uniform
from .oracle import node_probabilities, single_arc_state, trajectory
from .simulator import (
    Custom,
    SingleArc,
    Uniform,
    inject_initial_state,
    node_probabilities_from_sv,
    run,
    sample_counts,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3

_NAMED = {
    "cycle": cycle_graph,
    "complete": complete_graph,
    "k": complete_graph,
    "star": star_graph,
    "path": path_graph,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    graph: Graph
    source: str
    steps: int
    init: Uniform | SingleArc | Custom
    seed: int = 0
    engine: str = "both"
    tolerance: float = 1e-10
    qubit_budget: int = DEFAULT_QUBIT_BUDGET

    def __post_init__(self):
        if self.steps < 0:
            raise UsageError("steps must be non-negative")


def load_graph(source: str) -> Graph:
    """Named graph (``cycle8``, ``complete4``, ``star3``, ``path5``, ``triangle``) or a file."""
    if source == "triangle":
        return cycle_graph(3)
    m = re.fullmatch(r"([a-z]+)(\d+)", source)
    if m and m.group(1) in _NAMED and not Path(source).exists():
        return _NAMED[m.group(1)](int(m.group(2)))
    path = Path(source)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise UsageError(f"{source}: no such file") from None
    except OSError as exc:
        raise UsageError(f"{source}: {exc.strerror}") from None
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return deserialize_graph(text)
    return parse_edge_list(text)


def _graph_from_args(args) -> tuple[Graph, str]:
    if args.ws is not None:
        params = _ws_params(args.ws, args.seed)
        return generate_ws(params), f"ws:{params.n},{params.k},{params.beta},seed={params.seed}"
    return load_graph(args.graph), args.graph


def _ws_params(values, seed: int) -> WsParams:
    n, k, beta = values
    try:
        return WsParams(int(n), int(k), float(beta), seed)
    except ValueError as exc:
        raise UsageError(f"bad --ws parameters: {exc}") from None


def _init_spec(tokens: list[str] | None) -> Uniform | SingleArc | Custom:
    if not tokens or tokens == ["uniform"]:
        return Uniform()
    kind, rest = tokens[0], tokens[1:]
    if kind == "single-arc" and len(rest) == 2:
        try:
            return SingleArc(int(rest[0]), int(rest[1]))
        except ValueError:
            raise UsageError("single-arc needs two integer node ids") from None
    if kind == "custom" and len(rest) == 1:
        # file: [[tail, head, re] or [tail, head, re, im], ...]
        try:
            rows = json.loads(Path(rest[0]).read_text())
            amps = {(int(r[0]), int(r[1])): complex(*r[2:4]) for r in rows}
        except (OSError, ValueError, TypeError, IndexError) as exc:
            raise UsageError(f"custom initial state {rest[0]}: {exc}") from None
        return Custom(amps)
    raise UsageError("--init takes 'uniform', 'single-arc I J' or 'custom FILE'")


def _fmt(x: float) -> str:
    return repr(float(x))


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    g = generate_ws(_ws_params(args.ws, args.seed))
    fmt = args.format or ("edges" if args.output and not args.output.endswith(".json") else "json")
    _write(serialize_graph(g) if fmt == "json" else format_edge_list(g), args.output)
    return EXIT_OK


def _oracle_probs(cfg: RunConfig) -> list[np.ndarray]:
    g = cfg.graph
    ops = build_walk_operators(g)
    if isinstance(cfg.init, Uniform):
        psi0 = initial_state_uniform(g, ops.basis)
    elif isinstance(cfg.init, SingleArc):
        psi0 = single_arc_state(g, cfg.init.tail, cfg.init.head, ops.basis)
    else:
        psi0 = arc_state_from_map(g, cfg.init.amplitudes, ops.basis)
    return [node_probabilities(g, s) for s in trajectory(ops, psi0, cfg.steps)]


def _circuit_run(cfg: RunConfig):
    c = compile_walk_circuit(cfg.graph, cfg.steps, cfg.qubit_budget)
    sv0 = inject_initial_state(c.layout, cfg.graph, cfg.init, cfg.qubit_budget)
    _, snaps = run(c, sv0, snapshots=True)
    return c.layout, snaps


def simulate(cfg: RunConfig) -> dict:
    """Probabilities per step for the requested engine(s)."""
    result: dict = {}
    if cfg.engine in ("oracle", "both"):
        result["p_oracle"] = _oracle_probs(cfg)
    if cfg.engine in ("circuit", "both"):
        layout, snaps = _circuit_run(cfg)
        probs = [node_probabilities_from_sv(cfg.graph, layout, sv) for sv in snaps]
        result["p_circuit"] = [p for p, _ in probs]
        result["invalid_mass"] = [m for _, m in probs]
        result["snapshots"] = snaps
    if cfg.engine == "both":
        result["max_abs_diff"] = [float(np.max(np.abs(a - b)))
                                  for a, b in zip(result["p_oracle"], result["p_circuit"])]
    return result


def _meta(cfg: RunConfig) -> dict:
    init = cfg.init
    if isinstance(init, SingleArc):
        init_s = f"single-arc {init.tail} {init.head}"
    else:
        init_s = "uniform" if isinstance(init, Uniform) else "custom"
    return {"engine": cfg.engine, "fingerprint": cfg.graph.fingerprint(), "graph": cfg.source,
            "init": init_s, "seed": cfg.seed, "steps": cfg.steps, "tolerance": cfg.tolerance}


def _render_csv(cfg: RunConfig, res: dict) -> str:
    buf = io.StringIO()
    meta = _meta(cfg)
    buf.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    both = cfg.engine == "both"
    w.writerow(["step", "node", "p_oracle", "p_circuit", "abs_diff"] if both
               else ["step", "node", "probability"])
    key = "p_oracle" if cfg.engine == "oracle" else "p_circuit"
    for t in range(cfg.steps + 1):
        for i in range(cfg.graph.n):
            if both:
                a, b = res["p_oracle"][t][i], res["p_circuit"][t][i]
                w.writerow([t, i, _fmt(a), _fmt(b), _fmt(abs(a - b))])
            else:
                w.writerow([t, i, _fmt(res[key][t][i])])
    return buf.getvalue()


def _render_json(cfg: RunConfig, res: dict, shots: int | None) -> str:
    steps = []
    for t in range(cfg.steps + 1):
        row: dict = {"step": t}
        for key in ("p_oracle", "p_circuit"):
            if key in res:
                row[key] = [float(x) for x in res[key][t]]
        if "invalid_mass" in res:
            row["invalid_mass"] = res["invalid_mass"][t]
        if "max_abs_diff" in res:
            row["max_abs_diff"] = res["max_abs_diff"][t]
        if shots:
            row["counts"] = sample_counts(res["snapshots"][t], shots, cfg.seed + t).tolist()
        steps.append(row)
    doc = {"meta": {**_meta(cfg), "shots": shots}, "steps": steps}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _snapshot_json(cfg: RunConfig, layout: RegisterLayout, snaps) -> str:
    g = cfg.graph
    out = []
    for t, sv in enumerate(snaps):
        amps = {}
        for label, (u, v) in enumerate(g.edges):
            for a, b in ((u, v), (v, u)):
                z = sv.amplitudes[layout.index(a, label)]
                amps[f"{a}->{b}"] = [float(z.real), float(z.imag)]
        out.append({"step": t, "amplitudes": amps})
    return json.dumps({"meta": _meta(cfg), "snapshots": out}, sort_keys=True, indent=1) + "\n"


def cmd_run(args) -> int:
    graph, source = _graph_from_args(args)
    cfg = RunConfig(graph, source, args.steps, _init_spec(args.init), args.seed,
                    args.engine, args.tolerance, args.qubit_budget)
    if args.shots and (args.format != "json" or cfg.engine == "oracle"):
        raise UsageError("--shots needs --format json and a circuit engine")
    res = simulate(cfg)
    if args.format == "json":
        text = _render_json(cfg, res, args.shots)
    else:
        text = _render_csv(cfg, res)
    _write(text, args.output)
    if args.snapshots:
        if "snapshots" not in res:
            raise UsageError("--snapshots needs a circuit engine")
        layout = res["snapshots"][0].layout
        Path(args.snapshots).write_text(_snapshot_json(cfg, layout, res["snapshots"]))
    if cfg.engine == "both":
        worst = max(res["max_abs_diff"])
        print(f"max |p_oracle - p_circuit| = {worst:.3e} (tolerance {cfg.tolerance:.1e})",
              file=sys.stderr)
        if not worst <= cfg.tolerance:
            return EXIT_MISMATCH
    return EXIT_OK


def cmd_export(args) -> int:
    graph, _ = _graph_from_args(args)
    c = compile_walk_circuit(graph, args.steps, args.qubit_budget)
    est = resource_estimate(c)
    _write(serialize_circuit(c), args.output)
    summary = [
        f"width={est.width} (ceil(log2 N)+ceil(log2 |E|) = {est.formula_width})",
        f"depth={est.depth} (lower bound {est.depth_lower_bound})",
        "counts " + " ".join(f"{k}={v}" for k, v in est.counts.items()),
    ]
    print("\n".join(summary), file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_info(args) -> int:
    g = load_graph(args.graph)
    layout = RegisterLayout.for_graph(g)
    print(f"N={g.n} |E|={g.num_edges} q_x={layout.q_x} q_l={layout.q_l}")
    hist: dict[int, int] = {}
    for d in g.degrees:
        hist[d] = hist.get(d, 0) + 1
    print("degrees " + " ".join(f"{d}:{c}" for d, c in sorted(hist.items())))
    for label, (u, v) in enumerate(g.edges):
        print(f"label {label:>{len(str(g.num_edges))}} = {label:0{layout.q_l}b}  ({u}, {v})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_source(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("-g", "--graph", help="graph JSON, edge list, or a name like cycle8")
    src.add_argument("--ws", nargs=3, metavar=("N", "K", "BETA"), help="Watts-Strogatz graph")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtqw", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a Watts-Strogatz graph")
    p.add_argument("--ws", nargs=3, metavar=("N", "K", "BETA"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=["json", "edges"])
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="evolve the walk and report node probabilities")
    _add_source(p)
    p.add_argument("-t", "--steps", type=int, required=True)
    p.add_argument("--engine", choices=["circuit", "oracle", "both"], default="both")
    p.add_argument("--init", nargs="+", metavar="SPEC",
                   help="uniform | single-arc I J | custom FILE")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("-o", "--output")
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--qubit-budget", type=int, default=DEFAULT_QUBIT_BUDGET)
    p.add_argument("--snapshots", metavar="PATH", help="write per-step arc amplitudes as JSON")
    p.add_argument("--shots", type=int, help="add sampled position counts (json only)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("export", help="write the compiled circuit as JSON")
    _add_source(p)
    p.add_argument("-t", "--steps", type=int, required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--qubit-budget", type=int, default=DEFAULT_QUBIT_BUDGET)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("info", help="summarize a graph")
    p.add_argument("graph")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"dtqw: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, GraphError, CircuitError, ValueError, OSError) as exc:
        print(f"dtqw: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
