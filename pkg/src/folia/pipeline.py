"""End-to-end analysis driver.

Takes a parsed input file through the full sequence: optional linear change
of coordinates, model construction, invariance checks for declared
hypersurfaces, a generic representative point for every singular component,
per-point membership classification, cone checks, hypothesis reports, and
the cross-verdict consistency sweep.  Per-point work may fan out across a
thread pool (capped by FOLIA_THREADS); results are merged in a fixed order
so runs are deterministic.

`recheck_run` independently re-verifies every certificate a run produced.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .classify import (
    PointAnalysis,
    SeparatrixCandidate,
    Status,
    VerdictLedger,
    a0_evidence,
    classify_point,
    classify_strong,
    classify_weak,
)
from .cones import TransversalityVerdict, transversality_at
from .context import (
    Decision,
    ParamValue,
    Point,
    SideCondition,
    VarContext,
    format_point,
    point_is_rational,
    point_key,
)
from .dsl import FoliationFile, Matrix
from .errors import FoliaError, IntegratorDiverged, SemanticError
from .eta import EtaEstimate, MetricContext, ProductLeafDecl, eta_lower_bound_shoot
from .factor import PreparedFactorization
from .foliation import (
    FoliationModel,
    InvariantWitness,
    VectorField,
    build_model,
    is_invariant_hypersurface,
    with_context,
)
from .gaussian import GaussianRational
from .linsolve import invert
from .polynomial import Polynomial
from .theorems import (
    TheoremReport,
    TransversalTypeReport,
    consistency_check,
    continuity_via_mixed,
    continuity_via_strong_order,
    continuity_via_top_order,
    extension_report,
    transversal_type_at,
)
from .variety import Slice, contains_point


@dataclass(frozen=True)
class RunOptions:
    max_order: int | None = None
    max_degree: int = 2
    numeric_probe: bool = True
    eta_probes: bool = True
    representatives: bool = True
    threads: int | None = None  # None: read FOLIA_THREADS, default 1


def _thread_count(options: RunOptions) -> int:
    if options.threads is not None:
        return max(1, options.threads)
    raw = os.environ.get("FOLIA_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class PointRecord:
    """Everything computed at one analyzed point."""

    point: Point
    origin: str  # "query" | "representative"
    component: Slice | None
    membership: Decision
    analysis: PointAnalysis | None = None
    transversality: TransversalityVerdict | None = None
    transversal_type: TransversalTypeReport | None = None
    eta: EtaEstimate | None = None
    notes: tuple[str, ...] = ()


@dataclass
class RunResult:
    file: FoliationFile
    model: FoliationModel
    base_field: VectorField
    candidates: tuple[SeparatrixCandidate, ...]
    invariants: tuple[InvariantWitness, ...]
    representatives: tuple[tuple[Slice, Point], ...]
    records: tuple[PointRecord, ...]
    ledger: VerdictLedger
    theorems: tuple[TheoremReport, ...]
    consistency: tuple[str, ...]
    options: RunOptions
    notes: tuple[str, ...] = ()
    source_text: str = ""

    @property
    def analyses(self) -> list[PointAnalysis]:
        return [r.analysis for r in self.records if r.analysis is not None]


def push_forward(f: VectorField, matrix: Matrix) -> VectorField:
    """The field in coordinates u = M x (exact; M must be invertible)."""
    ctx = f.ctx
    n = ctx.nvars
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise SemanticError(f"change matrix must be {n}x{n}")
    rows = [list(row) for row in matrix]
    try:
        inv = invert(rows)
    except FoliaError as exc:
        raise SemanticError(f"change matrix is not invertible: {exc}") from None
    # x_k = sum_l inv[k][l] * u_l, substituted into each component
    bindings = {}
    for k, name in enumerate(ctx.vars):
        acc = Polynomial.zero(ctx)
        for l, other in enumerate(ctx.vars):
            c = inv[k][l]
            if not c.is_zero:
                acc = acc + Polynomial.variable(ctx, other).scale(c)
        bindings[name] = acc
    composed = [p.substitute(bindings) for p in f.components]
    new_components = []
    for i in range(n):
        acc = Polynomial.zero(ctx)
        for j in range(n):
            c = matrix[i][j]
            if not c.is_zero:
                acc = acc + composed[j].scale(c)
        new_components.append(acc)
    return VectorField(ctx, tuple(new_components))


def _fresh_param_names(
    ctx: VarContext, free_vars: Sequence[str]
) -> dict[str, str]:
    """One generic-coordinate parameter per free variable name."""
    taken = set(ctx.vars) | set(ctx.params)
    out: dict[str, str] = {}
    for v in free_vars:
        name = f"g{v}"
        k = 0
        while name in taken or name == "i":
            name = f"g{v}{k}"
            k += 1
        taken.add(name)
        out[v] = name
    return out


def _representatives(
    model: FoliationModel,
) -> tuple[VarContext, tuple[tuple[Slice, Point], ...]]:
    """A generic point on each singular component: free coordinates become
    fresh nonzero parameters, shared across components by variable name."""
    ctx = model.ctx
    free_needed: list[str] = []
    for s in model.singular.slices:
        for v in s.free_vars:
            if v not in free_needed:
                free_needed.append(v)
    fresh = _fresh_param_names(ctx, free_needed)
    if not fresh:
        return ctx, tuple(
            (s, tuple(s.assignment_map()[v] for v in ctx.vars))
            for s in model.singular.slices
        )
    conditions = tuple(
        SideCondition(name, GaussianRational(0)) for name in fresh.values()
    )
    ext = ctx.extend_params(tuple(fresh.values()), conditions)
    reps = []
    for s in model.singular.slices:
        amap = s.assignment_map()
        point = tuple(
            amap[v] if v in amap else ParamValue(fresh[v]) for v in ctx.vars
        )
        reps.append((s, point))
    return ext, tuple(reps)


def _lift_candidates(
    file: FoliationFile,
) -> tuple[SeparatrixCandidate, ...]:
    out = []
    for idx, s in enumerate(file.separatrices):
        out.append(
            SeparatrixCandidate(
                s.base, s.curve, s.param, label=f"separatrix#{idx} {s}"
            )
        )
    return tuple(out)


def _field_uses_params(f: VectorField) -> bool:
    nv = f.ctx.nvars
    return any(
        any(e[s] for s in range(nv, f.ctx.nslots))
        for p in f.components
        for e in p.terms
    )


def _eta_probe(
    model: FoliationModel, point: Point, options: RunOptions
) -> tuple[EtaEstimate | None, tuple[str, ...]]:
    if not options.eta_probes:
        return None, ()
    if model.domain.kind != "polydisc":
        return None, ()
    if not point_is_rational(point):
        return None, ("eta probe skipped: point has symbolic coordinates",)
    if _field_uses_params(model.saturated):
        return None, ("eta probe skipped: field has symbolic parameters",)
    mctx = MetricContext(radius=float(model.domain.radius))
    decl = None
    live = [i for i, c in enumerate(model.saturated.components) if not c.is_zero]
    if len(live) == 1 and float(model.domain.radius) == 1.0:
        decl = ProductLeafDecl(live[0])
    try:
        est = eta_lower_bound_shoot(point, model, mctx, decl=decl)
    except (IntegratorDiverged, FoliaError) as exc:
        return None, (f"eta probe failed: {exc}",)
    return est, ()


def base_model_of(file: FoliationFile) -> tuple[VectorField, FoliationModel]:
    """The field after declared coordinate changes, and its model."""
    field_now = file.field
    for m in file.changes:
        field_now = push_forward(field_now, m)
    return field_now, build_model(field_now, file.domain, file.factorizations)


def run_pipeline(
    file: FoliationFile,
    options: RunOptions | None = None,
    source_text: str = "",
) -> RunResult:
    options = options or RunOptions()
    notes: list[str] = []

    field_now, base_model = base_model_of(file)
    if file.changes:
        notes.append(
            f"applied {len(file.changes)} linear coordinate change(s) to the"
            " field; declared data is read in the new coordinates"
        )

    # representative points extend the context with generic parameters
    if options.representatives:
        ext_ctx, reps = _representatives(base_model)
    else:
        ext_ctx, reps = base_model.ctx, ()
    if ext_ctx != base_model.ctx:
        lifted = with_context(field_now, ext_ctx)
        declared = tuple(
            r for r in (f.remap(ext_ctx) for f in file.factorizations)
            if r is not None
        )
        model = build_model(lifted, file.domain, declared)
        new = sorted(set(ext_ctx.params) - set(base_model.ctx.params))
        notes.append(
            "generic coordinates " + ", ".join(new)
            + " (each assumed nonzero) represent the singular components"
        )
    else:
        model = base_model

    candidates = _lift_candidates(file)
    invariants = tuple(
        is_invariant_hypersurface(model.field, f.map_context(model.ctx))
        for f in file.invariants
    )

    # queries first, then representatives, deduplicated by point identity
    jobs: list[tuple[Point, str, Slice | None]] = []
    seen: set[tuple] = set()
    for q in file.queries:
        k = point_key(q)
        if k not in seen:
            seen.add(k)
            jobs.append((q, "query", None))
    for s, p in reps:
        k = point_key(p)
        if k not in seen:
            seen.add(k)
            jobs.append((p, "representative", s))

    def analyze(job: tuple[Point, str, Slice | None]) -> tuple[PointRecord, VerdictLedger]:
        point, origin, component = job
        local = VerdictLedger()
        mem = contains_point(model.singular, point)
        rec = PointRecord(point, origin, component, mem.status)
        rec.eta, eta_notes = _eta_probe(model, point, options)
        rec.notes += eta_notes
        if mem.status is Decision.NO:
            rec.notes += ("not on the singular set; membership classes are empty",)
            return rec, local
        rec.analysis = classify_point(
            model, point, model.declared, candidates, local,
            numeric_probe=options.numeric_probe, max_order=options.max_order,
        )
        rec.transversality = transversality_at(
            model, point, candidates, max_degree=options.max_degree
        )
        rec.transversal_type = transversal_type_at(
            model, point, candidates, max_degree=options.max_degree
        )
        return rec, local

    nthreads = _thread_count(options)
    if nthreads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            outcomes = list(pool.map(analyze, jobs))
    else:
        outcomes = [analyze(j) for j in jobs]

    ledger = VerdictLedger()
    records: list[PointRecord] = []
    for rec, local in outcomes:  # merge in job order: deterministic
        records.append(rec)
        ledger.extend(local.verdicts)
        ledger.exhaustive_no |= local.exhaustive_no

    analyses = [r.analysis for r in records if r.analysis is not None]
    generic_no = tuple(
        r.transversality
        for r in records
        if r.origin == "representative" and r.transversality is not None
    )
    t_strong = continuity_via_strong_order(model, analyses, ledger, file.ncp_assumed)
    t_top = continuity_via_top_order(model, analyses, ledger, file.ncp_assumed)
    t_mixed = continuity_via_mixed(model, analyses, ledger, file.ncp_assumed)
    t_ext = extension_report(
        model, (t_strong, t_top, t_mixed), file.ncp_assumed,
        max_degree=options.max_degree,
        generic_falsifications=generic_no,
    )
    consistency = tuple(consistency_check(model, ledger, analyses))

    return RunResult(
        file=file,
        model=model,
        base_field=field_now,
        candidates=candidates,
        invariants=invariants,
        representatives=reps,
        records=tuple(records),
        ledger=ledger,
        theorems=(t_strong, t_top, t_mixed, t_ext),
        consistency=consistency,
        options=options,
        notes=tuple(notes),
        source_text=source_text,
    )


# --- independent re-verification ----------------------------------------------


def recheck_run(result: RunResult) -> list[str]:
    """Re-verify every certificate in a finished run; returns violations."""
    model = result.model
    bad: list[str] = []

    for fac in result.file.factorizations:
        prod = Polynomial.one(fac.product.ctx)
        for f in fac.declared_polys:
            prod = prod * f
        if prod != fac.product:
            bad.append(f"factorization of {fac.product} does not multiply back")

    for w in result.invariants:
        if not w.recheck(model.field):
            bad.append(f"invariance witness for {w.f} failed recheck")

    for v in result.ledger.verdicts:
        if v.status is not Status.CERTIFIED_YES and v.status is not Status.CERTIFIED_NO:
            continue
        if v.grade != "exact":
            continue
        if v.klass == "A" and v.sigma is not None:
            redo = classify_weak(model, v.point, v.sigma, v.order, model.declared)
        elif v.klass == "B" and v.sigma is not None:
            redo = classify_strong(
                model, v.point, v.sigma, v.order, declared=model.declared,
                numeric_probe=False,
            )
        elif v.klass == "A0":
            redo = a0_evidence(model, v.point, result.candidates)
            if redo.status is not v.status:
                bad.append(
                    f"order-0 verdict at {format_point(v.point)} failed recheck"
                )
            continue
        else:
            continue
        if redo.status is not v.status:
            bad.append(
                f"{v.label} at {format_point(v.point)} via {v.sigma}:"
                f" {v.status} became {redo.status} on recheck"
            )

    for rec in result.records:
        if rec.transversality is not None:
            if not rec.transversality.recheck(model):
                bad.append(
                    f"transversality identities at {format_point(rec.point)}"
                    " failed recheck"
                )
        if rec.transversal_type is not None:
            comps = model.saturated.components
            for c in rec.transversal_type.components:
                for ident in c.identities:
                    if not ident.recheck(comps):
                        bad.append(
                            f"component identity on {c.component} failed recheck"
                        )

    for violation in result.consistency:
        bad.append(f"consistency: {violation}")
    return bad
