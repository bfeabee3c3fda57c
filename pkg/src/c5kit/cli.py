"""Command-line entry point.

Every subcommand is reproducible: the seed defaults to a fixed constant,
all randomness flows from it, and identical argv produces byte-identical
JSON.  Exit codes: 0 success, 1 assertion or certificate failure, 2 usage
error (unknown flag, missing file, malformed input).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .arithmetic import (
    EquationSpec,
    IntegerSet,
    additive_energy,
    behrend_avoiding,
    count_solutions,
    erdos_turan_sidon,
    greedy_avoider,
    is_sidon,
    mean_equation,
    prop17_constraints,
    read_integer_set,
    sidon_equation,
    write_integer_set,
)
from .certificates import CertificateError, run_counting_suite
from .constructions import gnp, polarity_graph, prop17_graph, tensor_triangle, theta_hypergraph
from .core import Graph, GraphParseError, graph_to_kernel, read_graph, write_graph
from .counting import CountMismatchError, count_cycles, hom_cycle, house_c4_count
from .cutnorm import cut_norm_exact, cut_norm_lower, EXACT_LIMIT
from .hypergraph import berge_girth_leq, has_configuration, read_hypergraph, write_hypergraph
from .regularity import weak_regularity
from .removal import RemovalConfig, sparse_removal_pipeline

DEFAULT_SEED = 12345


def _plain(obj):
    """Convert numpy scalars/arrays and sets so json.dumps is deterministic."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(_plain(v) for v in obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _render(report: dict, fmt: str, out_path: str | None) -> None:
    report = _plain(report)
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["key", "value"])
        def flatten(prefix, value):
            if isinstance(value, dict):
                for k in sorted(value):
                    flatten(f"{prefix}.{k}" if prefix else str(k), value[k])
            elif isinstance(value, list):
                writer.writerow([prefix, json.dumps(value, sort_keys=True)])
            else:
                writer.writerow([prefix, value])
        flatten("", report)
        text = buf.getvalue()
    elif fmt == "text":
        lines = []
        def walk(prefix, value):
            if isinstance(value, dict):
                for k in sorted(value):
                    walk(f"{prefix}.{k}" if prefix else str(k), value[k])
            else:
                lines.append(f"{prefix} = {value}")
        walk("", report)
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for all randomness")
    p.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker budget; execution is deterministic regardless of its value",
    )
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="c5kit",
        description="Sparse-graph regularity, exact short-cycle counting, "
        "removal certificates, and the companion integer-set constructions.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count patterns in a graph")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument(
        "--pattern",
        required=True,
        help="c3, c4, c5, house, or hom-cK for closed-walk counts (e.g. hom-c5)",
    )
    p.add_argument("--cross-check", action="store_true", help="run both engines and compare")
    _add_common(p)

    p = sub.add_parser("cutnorm", help="cut norm of a graph kernel")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=float, default=None, help="density scale (default: edge density)")
    p.add_argument("--centered", action="store_true", help="subtract the kernel mean first")
    p.add_argument("--restarts", type=int, default=32)
    _add_common(p)

    p = sub.add_parser("regularize", help="weak regularity partition of a graph kernel")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--summary", action="store_true", help="omit the block lists")
    _add_common(p)

    p = sub.add_parser("remove", help="certified cycle removal pipeline")
    p.add_argument("--graph", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--K", type=float, default=None, help="density cap (default 8/epsilon)")
    p.add_argument("--C", type=float, default=2.0, help="four-cycle budget constant")
    p.add_argument("--delta", type=float, default=None, help="cleaning accuracy (default epsilon/20)")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--small-part", type=int, default=100)
    p.add_argument("--targets", default="c5", help="comma list from {c3,c5}")
    p.add_argument("--summary", action="store_true", help="elide per-stage edge lists")
    _add_common(p)

    p = sub.add_parser("construct", help="build a named graph/hypergraph")
    p.add_argument(
        "--kind",
        required=True,
        choices=("tensor-triangle", "gnp", "polarity", "theta", "prop17"),
    )
    p.add_argument("--m", type=int, help="tensor power")
    p.add_argument("--n", type=int, help="vertex count / set bound")
    p.add_argument("--p", type=float, help="edge probability")
    p.add_argument("--q", type=int, help="prime field size")
    p.add_argument("--r", type=int, help="hypergraph uniformity")
    p.add_argument("--g", type=int, help="girth target")
    p.add_argument("--set", dest="set_path", help="integer-set file (prop17)")
    _add_common(p)

    p = sub.add_parser("arith", help="integer-set operations")
    p.add_argument(
        "--op",
        required=True,
        choices=("is-sidon", "energy", "count", "erdos-turan", "behrend", "greedy-avoider"),
    )
    p.add_argument("--set", dest="set_path", help="integer-set file")
    p.add_argument("--n", type=int, help="bound for generators")
    p.add_argument("--prime", type=int, help="prime for the Sidon generator")
    p.add_argument("--eq", help="comma-separated coefficients, e.g. 1,1,-1,-1")
    p.add_argument("--filter", default="all", choices=("all", "nontrivial", "distinct-variables"))
    p.add_argument("--cross-check", action="store_true")
    p.add_argument(
        "--constraints",
        default="prop17",
        choices=("prop17", "sidon"),
        help="constraint family for greedy-avoider",
    )
    _add_common(p)

    p = sub.add_parser("verify", help="run a certificate suite")
    p.add_argument("--suite", required=True, choices=("counting-lemma",))
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--max-points", type=int, default=10)
    p.add_argument("--no-chain", action="store_true", help="skip the step-by-step chain checks")
    _add_common(p)

    p = sub.add_parser("girth", help="Berge girth and configuration queries")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--g", type=int, default=5, help="largest cycle length searched")
    p.add_argument("--config", help="v,e pair for configuration search, e.g. 10,5")
    p.add_argument(
        "--require-girth-above",
        type=int,
        default=None,
        help="exit 1 unless the Berge girth exceeds this",
    )
    _add_common(p)

    return parser


def _cmd_count(args) -> tuple[dict, int]:
    g = read_graph(args.graph)
    pattern = args.pattern.lower()
    if pattern in ("c3", "c4", "c5"):
        rep = count_cycles(g, int(pattern[1]), cross_check=args.cross_check)
        return rep.to_json(), 0
    if pattern.startswith("hom-c"):
        k = int(pattern[5:])
        return {"pattern": pattern, "count": hom_cycle(g, k), "method": "trace"}, 0
    if pattern == "house":
        total, extending = house_c4_count(g)
        return {"pattern": "house", "c4_total": total, "c4_extending": extending,
                "method": "enumeration"}, 0
    raise ValueError(f"unsupported pattern {args.pattern!r}")


def _cmd_cutnorm(args) -> tuple[dict, int]:
    g = read_graph(args.graph)
    p = args.p if args.p is not None else max(g.density(), 1.0 / (g.n * g.n))
    kernel = graph_to_kernel(g, p)
    vals = kernel.values - kernel.mean() if args.centered else kernel.values
    w = kernel.space.weights
    if g.n <= EXACT_LIMIT:
        res = cut_norm_exact(vals, w, w)
    else:
        res = cut_norm_lower(vals, w, w, restarts=args.restarts, seed=args.seed)
    return {"p": p, "centered": bool(args.centered), **res.to_json()}, 0


def _cmd_regularize(args) -> tuple[dict, int]:
    g = read_graph(args.graph)
    p = args.p if args.p is not None else max(g.density(), 1.0 / (g.n * g.n))
    kernel = graph_to_kernel(g, p)
    out = weak_regularity(
        kernel, args.epsilon, budget=args.budget, restarts=args.restarts, seed=args.seed
    )
    payload = out.to_json()
    if args.summary:
        payload.pop("parts")
    return payload, 0


def _cmd_remove(args) -> tuple[dict, int]:
    g = read_graph(args.graph)
    cfg = RemovalConfig(
        epsilon=args.epsilon,
        cap=args.K,
        c4_budget=args.C,
        p=args.p,
        delta=args.delta,
        small_part=args.small_part,
        seed=args.seed,
    )
    targets = tuple(t.strip() for t in args.targets.split(",") if t.strip())
    report = sparse_removal_pipeline(g, cfg, targets=targets)
    return report.to_json(summary=args.summary), 0


def _cmd_construct(args) -> tuple[dict, int]:
    if not args.out:
        raise ValueError("construct requires --out for the edge list")
    kind = args.kind
    if kind == "tensor-triangle":
        if args.m is None:
            raise ValueError("tensor-triangle requires --m")
        graph = tensor_triangle(args.m)
        cert = {"kind": kind, "m": args.m, "vertices": graph.n, "edges": graph.num_edges}
    elif kind == "gnp":
        if args.n is None or args.p is None:
            raise ValueError("gnp requires --n and --p")
        graph = gnp(args.n, args.p, seed=args.seed)
        cert = {"kind": kind, "n": args.n, "p": args.p, "seed": args.seed,
                "edges": graph.num_edges}
    elif kind == "polarity":
        if args.q is None:
            raise ValueError("polarity requires --q")
        out = polarity_graph(args.q)
        graph = out.graph
        cert = {"kind": kind, **out.to_json()}
    elif kind == "theta":
        if args.r is None or args.g is None or args.n is None:
            raise ValueError("theta requires --r, --g, --n")
        out = theta_hypergraph(args.r, args.g, args.n)
        write_hypergraph(out.graph, args.out)
        cert = {"kind": kind, **out.to_json()}
        with open(args.out + ".cert.json", "w", encoding="utf-8") as fh:
            json.dump(_plain(cert), fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
        return {"written": args.out, **cert}, 0
    elif kind == "prop17":
        if args.set_path is None or args.n is None:
            raise ValueError("prop17 requires --set and --n")
        xs = read_integer_set(args.set_path, args.n)
        out = prop17_graph(xs, args.n)
        graph = out.graph.to_graph()
        cert = {"kind": kind, **out.to_json()}
    else:
        raise ValueError(f"unknown kind {kind!r}")
    write_graph(graph, args.out)
    with open(args.out + ".cert.json", "w", encoding="utf-8") as fh:
        json.dump(_plain(cert), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    return {"written": args.out, **cert}, 0


def _parse_equation(text: str) -> EquationSpec:
    coeffs = tuple(int(x) for x in text.split(","))
    if coeffs == (1, 1, -1, -1):
        return sidon_equation()
    return EquationSpec(coeffs)


def _cmd_arith(args) -> tuple[dict, int]:
    op = args.op
    if op in ("is-sidon", "energy", "count"):
        if not args.set_path:
            raise ValueError(f"{op} requires --set")
        xs = read_integer_set(args.set_path, args.n)
        if op == "is-sidon":
            return {"op": op, "set_size": len(xs), "is_sidon": is_sidon(xs),
                    "energy": additive_energy(xs)}, 0
        if op == "energy":
            return {"op": op, "set_size": len(xs), "energy": additive_energy(xs)}, 0
        if not args.eq:
            raise ValueError("count requires --eq")
        eq = _parse_equation(args.eq)
        cnt = count_solutions(eq, [xs] * eq.k, args.filter, cross_check=args.cross_check)
        return {"op": op, "equation": eq.to_json(), "filter": args.filter, "count": cnt}, 0
    if op == "erdos-turan":
        if args.prime is None:
            raise ValueError("erdos-turan requires --prime")
        xs = erdos_turan_sidon(args.prime)
    elif op == "behrend":
        if args.n is None:
            raise ValueError("behrend requires --n")
        eq = _parse_equation(args.eq) if args.eq else mean_equation(1, 1, 1, 1)
        xs = behrend_avoiding(args.n, eq)
    elif op == "greedy-avoider":
        if args.n is None:
            raise ValueError("greedy-avoider requires --n")
        cons = (
            prop17_constraints()
            if args.constraints == "prop17"
            else [(sidon_equation(), "nontrivial")]
        )
        xs = greedy_avoider(args.n, cons)
    else:
        raise ValueError(f"unknown op {op!r}")
    if args.out:
        write_integer_set(xs, args.out)
        return {"op": op, "written": args.out, "size": len(xs),
                "elements": list(xs.elements)}, 0
    return {"op": op, "size": len(xs), "elements": list(xs.elements)}, 0


def _cmd_verify(args) -> tuple[dict, int]:
    report = run_counting_suite(
        args.instances, seed=args.seed, max_points=args.max_points, chain=not args.no_chain
    )
    return {"suite": args.suite, **report}, 0


def _cmd_girth(args) -> tuple[dict, int]:
    h = read_hypergraph(args.hypergraph)
    report: dict = {"n": h.n, "r": h.r, "edges": h.num_edges}
    cycle = berge_girth_leq(h, min(args.g, 5))
    report["searched_up_to"] = min(args.g, 5)
    report["shortest_cycle"] = cycle.to_json() if cycle else None
    report["girth_above"] = cycle is None
    exit_code = 0
    if args.config:
        v, e = (int(x) for x in args.config.split(","))
        witness = has_configuration(h, v, e)
        report["configuration"] = {"v": v, "e": e, "witness": list(witness) if witness else None}
    if args.require_girth_above is not None:
        ok = berge_girth_leq(h, min(args.require_girth_above, 5)) is None
        report["required_girth_above"] = args.require_girth_above
        report["requirement_met"] = ok
        if not ok:
            exit_code = 1
    return report, exit_code


_DISPATCH = {
    "count": _cmd_count,
    "cutnorm": _cmd_cutnorm,
    "regularize": _cmd_regularize,
    "remove": _cmd_remove,
    "construct": _cmd_construct,
    "arith": _cmd_arith,
    "verify": _cmd_verify,
    "girth": _cmd_girth,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, exit_code = _DISPATCH[args.command](args)
    except (GraphParseError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"c5kit: input error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"c5kit: usage error: {exc}", file=sys.stderr)
        return 2
    except (CertificateError, CountMismatchError, AssertionError) as exc:
        print(f"c5kit: certificate failure: {exc}", file=sys.stderr)
        return 1
    # construct uses --out for the artifact itself; its report goes to stdout
    out_path = None if args.command == "construct" else args.out
    _render(report, args.format, out_path)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
