"""Batch command line: one subcommand per run, CSV/SVG outputs plus a JSON summary."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import reports
from .errors import DomainError, IncompleteScanError, PoleError, ResolutionError, ToleranceError
from .wheel import SeqId

DOMAIN_ERRORS = (DomainError, ToleranceError, PoleError, IncompleteScanError, ResolutionError,
                 OverflowError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _range(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}")
    if not a < b:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return a, b


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="primewave", description=__doc__)
    p.add_argument("--out", type=Path, default=None,
                   help=f"output directory (default ${reports.OUT_ENV} or .)")
    p.add_argument("--emit", default="csv,svg,json-summary",
                   help="comma list from csv, svg, json-summary (the summary is always written)")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("sieve", help="primes and composite marks up to a limit")
    s.add_argument("--limit", type=int, required=True)
    s.add_argument("--segment-size", type=_positive(int), default=1 << 20)

    a = sub.add_parser("atlas", help="sub-sequence tables and derivation graph")
    a.add_argument("--host", type=int, choices=(1, 2), required=True)
    a.add_argument("--limit", type=_positive(int), required=True)
    a.add_argument("--table", choices=("1", "3", "4", "5", "7"), default=None)
    a.add_argument("--variant", choices=("A", "B", "C"), default=None,
                   help="table 7 variant; defaults to A for host 1 and B for host 2")

    x = sub.add_parser("xray", help="thick/thin line topography and numbering")
    x.add_argument("--t-max", type=_positive(float), required=True)
    x.add_argument("--sigma", type=_range, default=(-1.0, 3.0))
    x.add_argument("--resolution", type=_positive(float), default=0.005,
                   help="t step of the grid; the sigma step is twice this")
    x.add_argument("--workers", type=_positive(int), default=1)

    for name, helptext in (("argand", "zeta along a vertical line in the complex plane"),
                           ("phase", "unwrapped phase of zeta along a vertical line")):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("--sigma", type=float, required=True)
        q.add_argument("--t", type=_range, required=True)
        q.add_argument("--step", type=_positive(float), required=True)

    z = sub.add_parser("zeros", help="critical-line zeros")
    z.add_argument("--t", type=_range, required=True)
    return p


def _cmd_sieve(args, out, emit):
    from .sieve import SET_FORMULA_NOTE, primes_up_to

    res = primes_up_to(args.limit, segment_size=args.segment_size)
    files = []
    if "csv" in emit:
        files.append(reports.write_csv(out / "primes.csv", "primes", reports.prime_rows(res.primes)))
        if res.marks is not None:
            files.append(reports.write_csv(out / "marks.csv", "marks", reports.mark_rows(res.marks)))
    stats = dict(res.stats)
    timings = {k: stats.pop(k) for k in ("sieve_seconds", "seconds")}
    return files, timings, {"prime_count": len(res.primes), **stats, "note": SET_FORMULA_NOTE}


def _cmd_atlas(args, out, emit):
    from .atlas import build_derivation_graph, coverage_check, emit_table

    host = SeqId.SQ1 if args.host == 1 else SeqId.SQ2
    graph = build_derivation_graph(host, args.limit)
    cov = coverage_check(host, args.limit, graph=graph)
    files = []
    results = {
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
        "coverage_ok": cov.ok,
        "uncovered_composites": len(cov.uncovered_composites),
    }
    if "csv" in emit:
        files.append(reports.write_csv(out / "graph.csv", "graph", reports.graph_rows(graph)))
        if args.table:
            variant = args.variant or ("A" if args.host == 1 else "B")
            table = emit_table(args.table, args.limit, variant)
            files.append(reports.write_csv(out / "atlas.csv", "atlas", reports.atlas_rows(table)))
            results["table"] = table.kind
            results["rows"] = len(table.rows)
    return files, {}, results


def _cmd_xray(args, out, emit):
    from .xray import xray_report
    from .zeta import find_zeros

    if args.t_max > 480:
        raise DomainError("t_max above 480 is outside the traced range")
    lo, hi = args.sigma
    rep = xray_report(args.t_max, lo, hi, dsigma=2 * args.resolution, dt=args.resolution,
                      workers=args.workers)
    files = []
    if "csv" in emit:
        files.append(reports.write_csv(out / "xray.csv", "xray", reports.xray_rows(rep)))
    if "svg" in emit:
        zeros = find_zeros(0, args.t_max).zeros
        svg = reports.xray_svg(rep, zeros, (lo, min(hi, 2.0)))
        files.append(reports.write_text(out / "xray.svg", svg))
    results = {
        "labels": len(rep.rows),
        "escaping": rep.escaping_labels,
        "sq3_escaping": rep.labels_in(SeqId.SQ3),
        "landmarks": rep.landmarks,
        "loops_97_113": rep.loops,
        "gaps": len(rep.gaps),
        "violations": rep.numbering.violations,
        "escape_t_sigma6": {str(m): t for m, t in sorted(rep.escape_heights.items())},
        "note": rep.note,
    }
    return files, {}, results


def _cmd_argand(args, out, emit):
    from .zeta import argand_path

    path = argand_path(args.sigma, *args.t, args.step)
    files = []
    if "csv" in emit:
        files.append(reports.write_csv(out / "argand.csv", "argand", reports.argand_rows(path)))
    if "svg" in emit:
        files.append(reports.write_text(out / "argand.svg", reports.argand_svg(path)))
    return files, {}, {"origin_approaches": path.origin_approaches,
                       "approach_t": [t for t, _ in path.approaches]}


def _cmd_phase(args, out, emit):
    from .zeta import phase_trace

    tr = phase_trace(args.sigma, *args.t, args.step)
    files = []
    if "csv" in emit:
        files.append(reports.write_csv(out / "phase.csv", "phase", reports.phase_rows(tr)))
    return files, {}, {"jumps": tr.jumps, "jump_count": len(tr.jumps)}


def _cmd_zeros(args, out, emit):
    from .zeta import find_zeros

    zl = find_zeros(*args.t)
    files = []
    if "csv" in emit:
        files.append(reports.write_csv(out / "zeros.csv", "zeros", reports.zero_rows(zl)))
    return files, {}, {"count": len(zl), "smooth_estimate": zl.estimate}


COMMANDS = {"sieve": _cmd_sieve, "atlas": _cmd_atlas, "xray": _cmd_xray,
            "argand": _cmd_argand, "phase": _cmd_phase, "zeros": _cmd_zeros}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    emit = {e.strip() for e in args.emit.split(",") if e.strip()}
    unknown = emit - {"csv", "svg", "json-summary"}
    if unknown:
        print(f"usage error: unknown emit format(s) {sorted(unknown)}", file=sys.stderr)
        return 2
    out = args.out if args.out is not None else reports.default_out_dir()
    t0 = time.perf_counter()
    try:
        files, timings, results = COMMANDS[args.cmd](args, out, emit)
        status = 0
    except DOMAIN_ERRORS as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        files, timings, results = [], {}, {"error": f"{type(e).__name__}: {e}"}
        status = 1
    timings["total_seconds"] = time.perf_counter() - t0
    inputs = {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(args).items()}
    inputs["out"] = str(out)
    results["files"] = [str(Path(f).name) for f in files]
    results["exit_code"] = status
    try:
        reports.write_summary(out / f"{args.cmd}-summary.json", argv, inputs, timings, results)
    except OSError as e:
        print(f"cannot write summary: {e}", file=sys.stderr)
        return 1
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
