"""The ``folia`` command-line tool.

Subcommands: ``analyze`` (full pipeline, JSON/text report), ``classify``
(membership classes at one point and order), ``transversal`` (transversality
verdict at one point), ``theorems`` (hypothesis reports only), ``eta``
(leafwise metric-density scan along a segment).

Exit codes: 0 success, 1 input could not be parsed, 2 analysis failed,
3 a recheck or consistency violation was detected.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .classify import Status, VerdictLedger, classify_point, classify_strong, classify_weak
from .cones import transversality_at
from .dsl import parse_foliation_file, parse_point_text, parse_slice_text
from .errors import FoliaError, LexError, ParseError, SemanticError
from .eta import MetricContext, continuity_scan
from .pipeline import RunOptions, _lift_candidates, base_model_of, recheck_run, run_pipeline
from .report import build_report, build_scan_report, emit_report

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_ANALYSIS = 2
EXIT_RECHECK = 3


def _build_argparser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="folia",
        description="Exact and numeric analysis of singular foliations "
        "defined by polynomial vector fields.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="run the full pipeline on a file")
    an.add_argument("file")
    an.add_argument("--out", help="write the report here instead of stdout")
    an.add_argument("--recheck", action="store_true",
                    help="re-verify every certificate before emitting")
    an.add_argument("--format", choices=("json", "text"), default="json")
    an.add_argument("--no-eta", action="store_true",
                    help="skip the numeric metric probes")

    cl = sub.add_parser("classify", help="membership classes at one point")
    cl.add_argument("file")
    cl.add_argument("--point", required=True, help='e.g. "(0, 1/2, c)"')
    cl.add_argument("--order", required=True, type=int)
    cl.add_argument("--sigma", help='invariant slice spec, e.g. "x=0, w=0"')

    tr = sub.add_parser("transversal", help="transversality verdict at one point")
    tr.add_argument("file")
    tr.add_argument("--point", required=True)
    tr.add_argument("--arc-exponent", type=int, default=3,
                    help="largest exponent for generated falsification arcs")
    tr.add_argument("--cert-degree", type=int, default=3,
                    help="degree bound for certificate coefficients")

    th = sub.add_parser("theorems", help="hypothesis reports for a file")
    th.add_argument("file")

    et = sub.add_parser("eta", help="metric-density scan along a segment")
    et.add_argument("file")
    et.add_argument("--scan", required=True, help='"(p1,...)->(q1,...)"')
    et.add_argument("--samples", required=True, type=int)
    et.add_argument("--out", help="write the table here instead of stdout")
    et.add_argument("--format", choices=("csv-eta", "json", "text"), default="csv-eta")
    return top


def _load(path: str):
    text = Path(path).read_text(encoding="utf-8")
    return parse_foliation_file(text), text


def _emit(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())


def _cmd_analyze(args) -> int:
    file, text = _load(args.file)
    options = RunOptions(eta_probes=not args.no_eta)
    result = run_pipeline(file, options, source_text=text)
    code = EXIT_OK
    if args.recheck:
        problems = recheck_run(result)
        if problems:
            for p in problems:
                print(f"recheck: {p}", file=sys.stderr)
            code = EXIT_RECHECK
    if result.consistency:
        for v in result.consistency:
            print(f"consistency: {v}", file=sys.stderr)
        code = EXIT_RECHECK
    _emit(emit_report(build_report(result), args.format), args.out)
    return code


def _verdict_line(v) -> str:
    where = f" via {v.sigma}" if v.sigma is not None else ""
    return f"{v.label} at {_fmt_point(v.point)}{where}: {v.status.value} ({v.grade}) {v.reason}"


def _fmt_point(p) -> str:
    from .context import format_point

    return format_point(p)


def _cmd_classify(args) -> int:
    file, _ = _load(args.file)
    _, model = base_model_of(file)
    p = parse_point_text(args.point, model.ctx)
    if args.order < 1:
        raise FoliaError("the order must be at least 1")
    candidates = _lift_candidates(file)
    if args.sigma:
        sigma = parse_slice_text(args.sigma, model.ctx)
        weak = classify_weak(model, p, sigma, args.order, declared=model.declared)
        strong = classify_strong(
            model, p, sigma, args.order, weak=weak, declared=model.declared
        )
        print(_verdict_line(weak))
        print(_verdict_line(strong))
        return EXIT_OK
    ledger = VerdictLedger()
    analysis = classify_point(
        model, p, declared=model.declared, candidates=candidates,
        ledger=ledger, max_order=args.order,
    )
    for v in analysis.verdicts:
        if v.order == args.order or v.klass == "A0":
            print(_verdict_line(v))
    for s in analysis.summaries:
        if s.order != args.order:
            continue
        exh = " (exhaustive)" if s.exhaustive else ""
        print(
            f"summary {s.klass}{s.order}: {s.status.value}{exh}"
            + (f" via {s.witness}" if s.witness is not None else "")
        )
    for note in analysis.notes:
        print(f"note: {note}")
    return EXIT_OK


def _cmd_transversal(args) -> int:
    file, _ = _load(args.file)
    _, model = base_model_of(file)
    p = parse_point_text(args.point, model.ctx)
    v = transversality_at(
        model, p, _lift_candidates(file),
        max_degree=args.cert_degree, max_exponent=args.arc_exponent,
    )
    print(f"transversal at {_fmt_point(p)}: {v.status.value} ({v.grade}) {v.reason}")
    if v.witness is not None:
        print(f"  witness direction {v.witness} inside component {list(v.witness_component)}")
        if v.witness_arc_label:
            print(f"  via {v.witness_arc_label}")
    for c in v.components:
        names = [model.ctx.vars[i] for i in c.free_slots]
        print(f"  component {names}: {c.status.value}")
        for ident in c.identities:
            print(f"    {ident.describe(model.ctx)}")
    return EXIT_OK


def _cmd_theorems(args) -> int:
    file, text = _load(args.file)
    result = run_pipeline(file, RunOptions(eta_probes=False), source_text=text)
    for t in result.theorems:
        print(f"{t.name}: {t.status.value}")
        for h in t.hypotheses:
            print(f"  {h.name}: {h.status.value} {h.detail}")
            for c in h.conditions:
                print(f"    condition: {c}")
        print(f"  conclusion (when certified): {t.conclusion}")
    if result.consistency:
        for v in result.consistency:
            print(f"consistency: {v}", file=sys.stderr)
        return EXIT_RECHECK
    return EXIT_OK


def _scan_endpoints(spec: str, nvars: int) -> tuple[list[complex], list[complex]]:
    if "->" not in spec:
        raise FoliaError('scan spec must look like "(p1,...)->(q1,...)"')
    left, right = spec.split("->", 1)
    return _scan_point(left, nvars), _scan_point(right, nvars)


def _scan_point(text: str, nvars: int) -> list[complex]:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = [s.strip() for s in body.split(",")]
    if len(parts) != nvars:
        raise FoliaError(f"scan point has {len(parts)} coordinates, expected {nvars}")
    return [_scan_coord(s) for s in parts]


def _scan_coord(text: str) -> complex:
    """One coordinate: decimal, rational p/q, or a+bi with either style."""
    s = text.replace(" ", "")
    if not s:
        raise FoliaError("empty scan coordinate")
    try:
        if s.endswith(("i", "j")):
            return complex(s[:-1] + "j") if not _is_rational(s[:-1]) else complex(
                0.0, float(Fraction(s[:-1] or "1"))
            )
        if _is_rational(s):
            return complex(float(Fraction(s)), 0.0)
        return complex(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise FoliaError(f"bad scan coordinate {text!r}: {exc}") from exc


def _is_rational(s: str) -> bool:
    try:
        Fraction(s)
        return True
    except (ValueError, ZeroDivisionError):
        return False


def _cmd_eta(args) -> int:
    file, text = _load(args.file)
    _, model = base_model_of(file)
    if args.samples < 2:
        raise FoliaError("a scan needs at least 2 samples")
    start, end = _scan_endpoints(args.scan, model.ctx.nvars)
    radius = 1.0
    if model.domain.kind == "polydisc":
        radius = float(model.domain.radius)
    rows = continuity_scan(model, MetricContext(radius=radius), start, end, args.samples)
    report = build_scan_report(file.name, text, rows, model.ctx.nvars)
    _emit(emit_report(report, args.format), args.out)
    return EXIT_OK


_COMMANDS = {
    "analyze": _cmd_analyze,
    "classify": _cmd_classify,
    "transversal": _cmd_transversal,
    "theorems": _cmd_theorems,
    "eta": _cmd_eta,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_argparser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (LexError, ParseError, SemanticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except FoliaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
