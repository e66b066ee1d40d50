"""Command-line entry point.

Every command writes a JSON run manifest (argv echo, version, seed,
timings, battery and sha256 of produced files): to ``--manifest`` when
given, else next to ``--out``, else to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from hamsat import __version__
from hamsat.basegraph import BUILTIN, BaseGraph, resolve_graph, verify_mnh
from hamsat.builder import (
    EXIT_INVALID,
    EXIT_PRECONDITION,
    EXIT_VALID,
    BuildError,
    PreconditionError,
    build_cycle,
    validate_cycle,
    validate_file,
)
from hamsat.family import classify_edge, count_h3
from hamsat.layout import InstanceConfig, read_header, write_sequence, write_text_sequence
from hamsat.nu import mu, mu_star, nu_closed, nu_table
from hamsat.params import run_pipeline, scan_min_n
from hamsat.satlab import MicroHypergraph, SizeCapExceeded, greedy_saturate, ham_cycle_exists, sat_exact

EXIT_USAGE = 64
EXIT_BATTERY = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


class Manifest:
    def __init__(self, argv: Sequence[str], args: argparse.Namespace):
        self.data: dict[str, Any] = {
            "tool": "hamsat",
            "version": __version__,
            "command": args.command,
            "argv": list(argv),
            "seed": getattr(args, "seed", 0),
            "config": {k: v for k, v in sorted(vars(args).items()) if k != "handler"},
            "timings": {},
            "outputs": {},
        }
        self._t0 = time.perf_counter()

    def time(self, label: str, start: float) -> None:
        self.data["timings"][label] = round(time.perf_counter() - start, 6)

    def output(self, path: str | Path, data: bytes | None = None) -> None:
        blob = data if data is not None else Path(path).read_bytes()
        self.data["outputs"][str(path)] = hashlib.sha256(blob).hexdigest()

    def emit(self, args: argparse.Namespace, status: int) -> None:
        self.data["exit_code"] = status
        self.time("total", self._t0)
        text = json.dumps(self.data, indent=2, sort_keys=True, default=str) + "\n"
        target = getattr(args, "manifest", None)
        if target is None and getattr(args, "out", None):
            target = str(args.out) + ".manifest.json"
        if target:
            Path(target).write_text(text)
        else:
            sys.stderr.write(text)


def _print_json(obj: Any) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=str))


def _config(args: argparse.Namespace) -> InstanceConfig:
    try:
        return InstanceConfig(args.k, args.l, args.N, relaxed=args.relaxed, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _graph(args: argparse.Namespace) -> BaseGraph:
    return BaseGraph.load(args.g1_file) if args.g1_file else resolve_graph(args.g1)


def _instance(args: argparse.Namespace, manifest: Manifest):
    config = _config(args)
    graph = _graph(args)
    t = time.perf_counter()
    params, layout, report = run_pipeline(config)
    manifest.time("params", t)
    manifest.data["battery"] = report.to_json()
    if layout is None:
        raise BuildError("the layout is infeasible for this configuration")
    if graph.n != layout.n:
        raise UsageError(f"G1 has {graph.n} vertices but N={config.N} gives n={layout.n} parts")
    return config, graph, params, layout, report


def _read_edge(path: str) -> list[int]:
    return [int(tok) for tok in Path(path).read_text().split()]


# -- commands -------------------------------------------------------------


def cmd_nu(args, manifest: Manifest) -> int:
    try:
        return _nu(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _nu(args) -> int:
    if args.table:
        rows = nu_table(args.k, args.l, args.x_max)
        for x, v in rows:
            print(f"{x}\t{v}")
        return 0
    if args.z is not None:
        from fractions import Fraction

        z = Fraction(args.z)
        _print_json({"z": str(z), "mu": mu(z, args.k, args.l), "mu_star": mu_star(z, args.k, args.l)})
        return 0
    if args.x is None:
        raise UsageError("nu needs --x, --z or the 'table' form")
    print(nu_closed(args.x, args.k, args.l))
    return 0


def cmd_params(args, manifest: Manifest) -> int:
    config = _config(args)
    t = time.perf_counter()
    params, layout, report = run_pipeline(config, n=args.n)
    manifest.time("params", t)
    manifest.data["battery"] = report.to_json()
    out = params.to_json()
    if layout is not None:
        out["layout"] = {"n": layout.n, "sizeA": list(layout.size_a), "sizeB": list(layout.size_b)}
    _print_json(out)
    return 0 if report.passed else EXIT_BATTERY


def cmd_g1(args, manifest: Manifest) -> int:
    graph = _graph(args)
    t = time.perf_counter()
    if args.action == "verify":
        res = verify_mnh(graph, budget=args.budget)
        manifest.time("verify", t)
        _print_json({"status": res.status, "witness": res.witness, "reason": res.reason})
        return 0 if res.ok else EXIT_INVALID
    if args.u is None or args.v is None:
        raise UsageError("g1 hampath needs --u and --v")
    try:
        path = graph.ham_path(args.u, args.v, budget=args.budget)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    manifest.time("hampath", t)
    _print_json({"path": path})
    return 0


def cmd_classify(args, manifest: Manifest) -> int:
    _, graph, params, layout, _ = _instance(args, manifest)
    edge = _read_edge(args.edge_file)
    cls = classify_edge(edge, layout, graph, params.p)
    print(str(cls))
    return 0


def cmd_count_h3(args, manifest: Manifest) -> int:
    _, graph, params, layout, _ = _instance(args, manifest)
    t = time.perf_counter()
    total = count_h3(layout, graph, params.p)
    manifest.time("count", t)
    print(total)
    return 0


def cmd_build_cycle(args, manifest: Manifest) -> int:
    _, graph, params, layout, report = _instance(args, manifest)
    if not report.passed:
        print(f"battery failed: {', '.join(report.failures)}", file=sys.stderr)
        return EXIT_BATTERY
    edge = _read_edge(args.edge_file)
    t = time.perf_counter()
    try:
        seq = build_cycle(edge, layout, graph, params)
    except PreconditionError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PRECONDITION
    manifest.time("build", t)
    if args.text:
        write_text_sequence(args.out, seq.tolist())
        manifest.output(args.out)
    else:
        manifest.output(args.out, write_sequence(args.out, seq, layout.k, layout.ell, layout.N))
    t = time.perf_counter()
    rep = validate_cycle(seq, layout, graph, params.p, edge)
    manifest.time("validate", t)
    manifest.data["report"] = rep.to_json()
    _print_json({"out": str(args.out), "valid": rep.valid, "windows": rep.windows, "edge_classes": dict(rep.edge_classes)})
    return EXIT_VALID if rep.valid else EXIT_INVALID


def cmd_validate(args, manifest: Manifest) -> int:
    k, ell, N = read_header(args.cycle)
    args.k, args.l, args.N = k, ell, N
    _, graph, params, layout, _ = _instance(args, manifest)
    edge = _read_edge(args.edge_file)
    t = time.perf_counter()
    rep = validate_file(args.cycle, layout, graph, params.p, edge)
    manifest.time("validate", t)
    manifest.data["report"] = rep.to_json()
    _print_json(rep.to_json() | {"special": len(rep.special)})
    return EXIT_VALID if rep.valid else EXIT_INVALID


def cmd_satlab(args, manifest: Manifest) -> int:
    t = time.perf_counter()
    try:
        if args.action == "ham":
            if not args.edges_file:
                raise UsageError("satlab ham needs --edges-file")
            edges = json.loads(Path(args.edges_file).read_text())
            H = MicroHypergraph.of(args.N, args.k, edges)
            ok, witness = ham_cycle_exists(H, args.l)
            _print_json({"hamiltonian": ok, "witness": witness})
        elif args.action == "saturate":
            lower = MicroHypergraph.of(args.N, args.k, [])
            H = greedy_saturate(lower, MicroHypergraph.complete(args.N, args.k), args.l)
            _print_json({"size": len(H.edges)} | H.to_json())
        else:
            value, H = sat_exact(args.N, args.k, args.l)
            _print_json({"sat": value} | H.to_json())
    except SizeCapExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    manifest.time(args.action, t)
    return 0


def cmd_scan(args, manifest: Manifest) -> int:
    t = time.perf_counter()
    N = scan_min_n(args.k, args.l, args.n_target)
    manifest.time("scan", t)
    _print_json({"k": args.k, "ell": args.l, "n_target": args.n_target, "N": N})
    return 0 if N is not None else EXIT_BATTERY


# -- parser ------------------------------------------------------------------


def _add_kl(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True, help="overlap ell")


def _add_instance(p: argparse.ArgumentParser, with_n: bool = True) -> None:
    if with_n:
        _add_kl(p)
        p.add_argument("--N", type=int, required=True)
    p.add_argument("--relaxed", action="store_true", help="allow N below 100k^10; the battery decides")
    _add_graph(p)


def _add_graph(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g1-file", help="G1 as text: 'n m' header then 1-based edge lines")
    p.add_argument("--g1", default="petersen", choices=sorted(BUILTIN), help="built-in G1 (default petersen)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hamsat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--manifest", help="write the run manifest here")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("nu", parents=[common], help="nu(x), mu(z), or a nu table")
    p.add_argument("table", nargs="?", choices=["table"])
    _add_kl(p)
    p.add_argument("--x", type=int)
    p.add_argument("--z", help="rational z such as 1234/7, for mu and mu*")
    p.add_argument("--x-max", type=int, default=40)
    p.set_defaults(handler=cmd_nu)

    p = sub.add_parser("params", parents=[common], help="derived parameters and the inequality battery")
    _add_kl(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--relaxed", action="store_true")
    p.add_argument("--n", type=int, help="override the part count")
    p.set_defaults(handler=cmd_params)

    p = sub.add_parser("g1", parents=[common], help="base graph checks")
    p.add_argument("action", choices=["verify", "hampath"])
    _add_graph(p)
    p.add_argument("--u", type=int)
    p.add_argument("--v", type=int)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.set_defaults(handler=cmd_g1)

    p = sub.add_parser("classify", parents=[common], help="family membership of one edge")
    _add_instance(p)
    p.add_argument("--edge-file", required=True)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("count-h3", parents=[common], help="exact |H3|")
    _add_instance(p)
    p.set_defaults(handler=cmd_count_h3)

    p = sub.add_parser("build-cycle", parents=[common], help="hamiltonian cycle in H1 u H2 + e")
    _add_instance(p)
    p.add_argument("--edge-file", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--text", action="store_true", help="one id per line instead of the binary format")
    p.set_defaults(handler=cmd_build_cycle)

    p = sub.add_parser("validate", parents=[common], help="re-check a binary cycle file")
    p.add_argument("--cycle", required=True)
    p.add_argument("--edge-file", required=True)
    _add_instance(p, with_n=False)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("satlab", parents=[common], help="micro-scale exhaustive tools")
    p.add_argument("action", choices=["ham", "saturate", "sat-exact"])
    _add_kl(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--edges-file", help="JSON list of edges, for 'ham'")
    p.set_defaults(handler=cmd_satlab)

    p = sub.add_parser("scan-min-N", parents=[common], help="smallest N passing the battery for n parts")
    _add_kl(p)
    p.add_argument("--n-target", type=int, required=True)
    p.set_defaults(handler=cmd_scan)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    manifest = Manifest(argv, args)
    try:
        status = args.handler(args, manifest)
    except UsageError as exc:
        print(f"hamsat: error: {exc}", file=sys.stderr)
        status = EXIT_USAGE
    except BuildError as exc:
        print(f"hamsat: construction failed: {exc}", file=sys.stderr)
        status = EXIT_INVALID
    manifest.emit(args, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
