"""Deterministic report assembly and emission.

`build_report` turns a finished pipeline run into a plain dict with sorted,
stable content: exact scalars as canonical strings, floats only in the
metric sections (12 significant digits), verdicts carrying stable evidence
ids.  `emit_report` serializes that dict as JSON (byte-identical across
runs on identical input), a human-readable text listing, or CSV for metric
scans.
"""

from __future__ import annotations

import hashlib
import io
import json
from typing import Mapping, Sequence

from . import __version__
from .classify import MembershipVerdict, PointAnalysis, Status
from .context import format_point, value_str
from .errors import FoliaError
from .eta import EtaEstimate, ScanRow
from .pipeline import PointRecord, RunResult

SCHEMA = "1"


def _num(v: float) -> float:
    """Floats are rounded to 12 significant digits before emission."""
    return float(f"{v:.12g}")


def _point(p) -> str:
    return format_point(p)


def _estimate(e: EtaEstimate) -> dict:
    return {
        "point": [f"{z.real:.12g}{z.imag:+.12g}i" for z in e.point],
        "lower_bound": _num(e.lower_bound),
        "exact": None if e.exact is None else _num(e.exact),
        "shoot_radius": _num(e.shoot_radius),
        "rays": e.rays,
        "threshold": _num(e.threshold),
        "steps": e.steps,
        "rejected": e.rejected,
        "diverged": e.diverged,
        "grade": e.grade,
        "notes": list(e.notes),
    }


def _verdict(v: MembershipVerdict, vid: str) -> dict:
    return {
        "id": vid,
        "point": _point(v.point),
        "class": v.label,
        "kind": v.klass,
        "order": v.order,
        "slice": None if v.sigma is None else str(v.sigma),
        "status": v.status.value,
        "grade": v.grade,
        "reason": v.reason,
        "certificate": v.cert_dict(),
        "conditions": list(v.conditions),
    }


def _analysis(a: PointAnalysis, ids: Mapping[int, str]) -> dict:
    out: dict = {
        "max_order": a.max_order,
        "summaries": [
            {
                "class": s.klass,
                "order": s.order,
                "status": s.status.value,
                "witness": None if s.witness is None else str(s.witness),
                "exhaustive": s.exhaustive,
                "note": s.note,
            }
            for s in a.summaries
        ],
        "verdict_ids": [ids[id(v)] for v in a.verdicts if id(v) in ids],
        "notes": list(a.notes),
    }
    if a.a0 is not None:
        out["order0"] = {
            "status": a.a0.status.value,
            "id": ids.get(id(a.a0)),
            "reason": a.a0.reason,
        }
    if a.lp is not None:
        out["removability_order"] = {
            "value": a.lp.value,
            "exhausted_over_slices": a.lp.exhausted_over_slices,
            "witness_id": ids.get(id(a.lp.witness)),
        }
    return out


def _type_report(r, ctx) -> dict:
    return {
        "point": _point(r.point),
        "status": r.status.value,
        "reason": r.reason,
        "components": [
            {
                "component": str(c.component),
                "status": c.status.value,
                "identities": [ident.describe(ctx) for ident in c.identities],
                "exceptional": list(c.exceptional),
                "exceptional_finite": c.exceptional_finite.value,
                "reason": c.reason,
            }
            for c in r.components
        ],
    }


def _record(rec: PointRecord, ids: Mapping[int, str], ctx) -> dict:
    out: dict = {
        "point": _point(rec.point),
        "origin": rec.origin,
        "component": None if rec.component is None else str(rec.component),
        "on_singular_set": rec.membership.value,
        "notes": list(rec.notes),
    }
    if rec.analysis is not None:
        out["classification"] = _analysis(rec.analysis, ids)
    if rec.transversality is not None:
        t = rec.transversality
        out["transversality"] = {
            "status": t.status.value,
            "grade": t.grade,
            "reason": t.reason,
            "witness": None if t.witness is None else str(t.witness),
            "witness_arc": t.witness_arc_label or None,
            "components": [
                {
                    "free_slots": [ctx.vars[i] for i in c.free_slots],
                    "status": c.status.value,
                    "identities": [ident.describe(ctx) for ident in c.identities],
                    "reason": c.reason,
                }
                for c in t.components
            ],
        }
    if rec.transversal_type is not None:
        out["transversal_type"] = _type_report(rec.transversal_type, ctx)
    if rec.eta is not None:
        out["eta"] = _estimate(rec.eta)
    return out


def build_report(result: RunResult) -> dict:
    """A plain, JSON-ready dict for a full analysis run."""
    model = result.model
    ctx = model.ctx
    sorted_verdicts = result.ledger.sorted()
    ids = {id(v): f"V{i + 1:03d}" for i, v in enumerate(sorted_verdicts)}

    singular = {
        "slices": [
            {"slice": str(s), "dim": s.dim} for s in model.singular.slices
        ],
        "by_dimension": {
            str(d): [str(s) for s in slices]
            for d, slices in model.singular.components_by_dimension().items()
        },
        "residuals": [str(r) for r in model.singular.residuals],
    }

    theorems = [
        {
            "name": t.name,
            "status": t.status.value,
            "conclusion": t.conclusion,
            "scope": t.scope,
            "points": [_point(p) for p in t.points],
            "hypotheses": [
                {
                    "name": h.name,
                    "status": h.status.value,
                    "detail": h.detail,
                    "conditions": list(h.conditions),
                }
                for h in t.hypotheses
            ],
        }
        for t in result.theorems
    ]

    return {
        "schema": SCHEMA,
        "toolkit_version": __version__,
        "input": {
            "name": result.file.name,
            "sha256": hashlib.sha256(result.source_text.encode()).hexdigest(),
        },
        "model": {
            "vars": list(ctx.vars),
            "params": list(ctx.params),
            "side_conditions": [str(sc) for sc in ctx.side_conditions],
            "field": [str(p) for p in result.base_field.components],
            "common_factor": str(model.common_factor),
            "saturated": [str(p) for p in model.saturated.components],
            "domain": str(model.domain),
            "ncp_assumed": result.file.ncp_assumed,
            "factorizations": [
                {
                    "product": str(f.product),
                    "factors": [str(p) for p in f.declared_polys],
                    "assumptions": list(f.assumptions),
                }
                for f in result.file.factorizations
            ],
        },
        "singular_set": singular,
        "invariants": [
            {
                "polynomial": str(w.f),
                "invariant": w.invariant,
                "quotient": None if w.quotient is None else str(w.quotient),
                "remainder": None if w.remainder is None else str(w.remainder),
            }
            for w in result.invariants
        ],
        "representatives": [
            {"component": str(s), "point": _point(p)}
            for s, p in result.representatives
        ],
        "points": [_record(rec, ids, ctx) for rec in result.records],
        "verdicts": [
            _verdict(v, ids[id(v)]) for v in sorted_verdicts
        ],
        "theorems": theorems,
        "consistency": list(result.consistency),
        "notes": list(result.notes),
    }


def build_scan_report(
    name: str, source_text: str, rows: Sequence[ScanRow], nvars: int
) -> dict:
    """A report for a metric continuity scan along a segment."""
    return {
        "schema": SCHEMA,
        "toolkit_version": __version__,
        "input": {
            "name": name,
            "sha256": hashlib.sha256(source_text.encode()).hexdigest(),
        },
        "eta_scan": {
            "columns": ["s"]
            + [f"x_{k + 1}" for k in range(nvars)]
            + ["lower_bound", "exact", "safe_radius"],
            "rows": [
                {
                    "s": _num(r.s),
                    "point": [f"{z.real:.12g}{z.imag:+.12g}i" for z in r.point],
                    "lower_bound": _num(r.lower_bound),
                    "exact": None if r.exact is None else _num(r.exact),
                    "safe_radius": _num(r.safe_radius),
                }
                for r in rows
            ],
        },
    }


# --- emission -------------------------------------------------------------------


def emit_report(report: Mapping, format: str = "json") -> bytes:
    if format == "json":
        text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)
        return (text + "\n").encode()
    if format == "text":
        return _emit_text(report).encode()
    if format == "csv-eta":
        return _emit_csv_eta(report).encode()
    raise FoliaError(f"unknown report format {format!r}")


def _emit_csv_eta(report: Mapping) -> str:
    scan = report.get("eta_scan")
    if scan is None:
        raise FoliaError("report carries no metric scan; nothing to emit as csv")
    import csv

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(scan["columns"])
    for row in scan["rows"]:
        writer.writerow(
            [row["s"], *row["point"], row["lower_bound"],
             "" if row["exact"] is None else row["exact"], row["safe_radius"]]
        )
    return buf.getvalue()


def _status_mark(status: str) -> str:
    return {
        "certified_yes": "YES",
        "certified_no": "NO",
        "unknown": "?",
    }.get(status, status)


def _emit_text(report: Mapping) -> str:
    lines: list[str] = []
    add = lines.append
    inp = report.get("input", {})
    add(f"foliation report: {inp.get('name', '?')}")
    add(f"toolkit {report.get('toolkit_version', '?')}  schema {report.get('schema', '?')}")
    add(f"input sha256 {inp.get('sha256', '')[:16]}...")
    model = report.get("model", {})
    if model:
        add("")
        add("model")
        add(f"  vars: {', '.join(model['vars'])}")
        if model.get("params"):
            add(f"  params: {', '.join(model['params'])}")
            for sc in model.get("side_conditions", []):
                add(f"    with {sc}")
        add(f"  field: ({', '.join(model['field'])})")
        add(f"  common factor: {model['common_factor']}")
        add(f"  saturated: ({', '.join(model['saturated'])})")
        add(f"  domain: {model['domain']}")
    sing = report.get("singular_set")
    if sing is not None:
        add("")
        add("singular set")
        for entry in sing["slices"]:
            add(f"  dim {entry['dim']}: {entry['slice']}")
        if not sing["slices"]:
            add("  empty")
        for r in sing["residuals"]:
            add(f"  residual: {r}")
    for w in report.get("invariants", []):
        verdict = "invariant" if w["invariant"] else "NOT invariant"
        extra = f" (quotient {w['quotient']})" if w.get("quotient") else ""
        add(f"invariant check: {w['polynomial']} is {verdict}{extra}")

    groups: dict[str, list] = {}
    for v in report.get("verdicts", []):
        groups.setdefault(v["class"], []).append(v)
    if groups:
        add("")
        add("membership verdicts")
        for klass in sorted(groups):
            add(f"  class {klass}")
            for v in groups[klass]:
                where = f" via {v['slice']}" if v["slice"] else ""
                add(
                    f"    [{v['id']}] {v['point']}{where}: "
                    f"{_status_mark(v['status'])} ({v['grade']}) {v['reason']}"
                )
    for rec in report.get("points", []):
        add("")
        add(f"point {rec['point']} ({rec['origin']})")
        add(f"  on singular set: {rec['on_singular_set']}")
        cls = rec.get("classification")
        if cls:
            for s in cls["summaries"]:
                mark = _status_mark(s["status"])
                exh = ", exhaustive" if s["exhaustive"] else ""
                wit = f" via {s['witness']}" if s["witness"] else ""
                add(f"  {s['class']}_{s['order']}: {mark}{wit}{exh}")
            if "order0" in cls:
                o = cls["order0"]
                cite = f" [{o['id']}]" if o.get("id") else ""
                add(f"  A_0: {_status_mark(o['status'])}{cite} {o['reason']}")
            if "removability_order" in cls:
                lp = cls["removability_order"]
                qual = "exact over enumerated slices" if lp["exhausted_over_slices"] else "lower bound"
                add(f"  removability order: {lp['value']} ({qual}) [{lp['witness_id']}]")
        tr = rec.get("transversality")
        if tr:
            add(f"  transversality: {_status_mark(tr['status'])} ({tr['grade']}) {tr['reason']}")
            if tr.get("witness"):
                add(f"    witness direction: {tr['witness']}")
            if tr.get("witness_arc"):
                add(f"    witness arc: {tr['witness_arc']}")
            for c in tr.get("components", []):
                ids = "; ".join(c["identities"])
                add(f"    component {c['free_slots']}: {_status_mark(c['status'])} {ids}")
        tt = rec.get("transversal_type")
        if tt:
            add(f"  transversal type nearby: {_status_mark(tt['status'])} {tt['reason']}")
            for c in tt.get("components", []):
                add(
                    f"    {c['component']}: {_status_mark(c['status'])}"
                    f" exceptional {c['exceptional'] or '[]'} finite: {c['exceptional_finite']}"
                )
        eta = rec.get("eta")
        if eta:
            exact = "" if eta["exact"] is None else f", exact {eta['exact']}"
            add(
                f"  metric density bound: {eta['lower_bound']}"
                f" (disc radius {eta['shoot_radius']}{exact})"
            )
    for t in report.get("theorems", []):
        add("")
        add(f"theorem check: {t['name']} -> {_status_mark(t['status'])}")
        for h in t["hypotheses"]:
            add(f"  {h['name']}: {_status_mark(h['status'])} {h['detail']}")
            for c in h.get("conditions", []):
                add(f"    condition: {c}")
        add(f"  conclusion (when certified): {t['conclusion']}")
        add(f"  scope: {t['scope']}")
    if report.get("consistency"):
        add("")
        add("CONSISTENCY VIOLATIONS")
        for v in report["consistency"]:
            add(f"  {v}")
    if report.get("notes"):
        add("")
        for nline in report["notes"]:
            add(f"note: {nline}")
    scan = report.get("eta_scan")
    if scan:
        add("")
        add("metric scan")
        add("  " + ", ".join(scan["columns"]))
        for row in scan["rows"]:
            exact = "" if row["exact"] is None else str(row["exact"])
            add(
                f"  {row['s']}, {', '.join(row['point'])}, {row['lower_bound']},"
                f" {exact}, {row['safe_radius']}"
            )
    return "\n".join(lines) + "\n"
