"""Removable-singularity classification: weak/strong membership at a point
with respect to an invariant coordinate slice, curve-based order-0 evidence,
and the certified removability order.

Everything returns a three-valued verdict carrying a machine-checkable
certificate (CertifiedYes), an explicit witness (CertifiedNo), or a reason
(Unknown).  Numeric evidence never upgrades past Unknown.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .context import (
    AlgebraicValue,
    Decision,
    ParamValue,
    Point,
    PointValue,
    VarContext,
    check_point,
    format_point,
    point_key,
    value_str,
)
from .errors import FoliaError, NoCertifiedB, IntegratorDiverged
from .evaluate import curve_pullback, decide_param_polynomial, poly_eval
from .factor import PreparedFactorization
from .foliation import (
    FoliationModel,
    RestrictedField,
    VectorField,
    is_invariant_slice,
    restrict,
    saturate,
)
from .gaussian import GaussianRational
from .integrate import compile_field, integrate_ode
from .polynomial import Polynomial
from .variety import (
    Slice,
    Variety,
    contains_point,
    merge_assignments,
    slice_membership,
    solve_variety,
)


class Status(enum.Enum):
    CERTIFIED_YES = "certified_yes"
    CERTIFIED_NO = "certified_no"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MembershipVerdict:
    """Three-valued membership verdict for one (point, class, order, sigma)."""

    point: Point
    klass: str  # "A" | "B" | "A0"
    order: int
    sigma: Slice | None
    status: Status
    grade: str  # "exact" | "numeric"
    reason: str = ""
    certificate: tuple[tuple[str, str], ...] = ()
    conditions: tuple[str, ...] = ()

    @property
    def label(self) -> str:
        return "A0" if self.klass == "A0" else f"{self.klass}{self.order}"

    def sort_token(self) -> tuple:
        sig = self.sigma.key() if self.sigma is not None else ()
        return (point_key(self.point), self.klass, self.order, sig, self.status.value)

    def cert_dict(self) -> dict[str, str]:
        return dict(self.certificate)


def _cert(*pairs: tuple[str, str]) -> tuple[tuple[str, str], ...]:
    return tuple(pairs)


class VerdictLedger:
    """Ordered store of verdicts plus exhaustiveness markers."""

    def __init__(self):
        self.verdicts: list[MembershipVerdict] = []
        self.exhaustive_no: set[tuple] = set()

    def add(self, v: MembershipVerdict) -> MembershipVerdict:
        self.verdicts.append(v)
        return v

    def extend(self, vs: Sequence[MembershipVerdict]) -> None:
        self.verdicts.extend(vs)

    def mark_exhaustive_no(self, p: Point, klass: str, order: int) -> None:
        self.exhaustive_no.add((point_key(p), klass, order))

    def is_exhaustive_no(self, p: Point, klass: str, order: int) -> bool:
        return (point_key(p), klass, order) in self.exhaustive_no

    def query(
        self,
        point: Point | None = None,
        klass: str | None = None,
        order: int | None = None,
        status: Status | None = None,
    ) -> list[MembershipVerdict]:
        out = []
        pk = point_key(point) if point is not None else None
        for v in self.verdicts:
            if pk is not None and point_key(v.point) != pk:
                continue
            if klass is not None and v.klass != klass:
                continue
            if order is not None and v.order != order:
                continue
            if status is not None and v.status != status:
                continue
            out.append(v)
        return out

    def sorted(self) -> list[MembershipVerdict]:
        return sorted(self.verdicts, key=MembershipVerdict.sort_token)


# --------------------------------------------------------------------------
# weak membership


def _remap_declared(
    declared: Sequence[PreparedFactorization], ctx: VarContext
) -> tuple[PreparedFactorization, ...]:
    out = []
    for d in declared:
        r = d.remap(ctx)
        if r is not None:
            out.append(r)
    return tuple(out)


def _sigma_cap_singular_dim(
    model: FoliationModel, s: Slice
) -> tuple[Decision, int, tuple[str, ...]]:
    """Largest dimension of (slice ∩ singular-set component), if certain."""
    if model.singular.residuals:
        return Decision.UNKNOWN, -2, ("singular set has residual branches",)
    ctx = model.ctx
    certain = -1
    possible = -1
    notes: list[str] = []
    for comp in model.singular.slices:
        dec, merged, conds = merge_assignments(ctx, s.assignment_map(), comp.assignment_map())
        if dec is Decision.YES:
            certain = max(certain, ctx.nvars - len(merged))
        elif dec is Decision.UNKNOWN:
            possible = max(possible, ctx.nvars - len(comp.assignment_map() | s.assignment_map()))
            notes.extend(conds)
    if possible > certain:
        return Decision.UNKNOWN, certain, tuple(notes)
    return Decision.YES, certain, ()


def classify_weak(
    model: FoliationModel,
    p: Point,
    s: Slice,
    l: int,
    declared: Sequence[PreparedFactorization] = (),
) -> MembershipVerdict:
    """Weak order-l membership of p with respect to the slice s.

    Conditions: p on s, s invariant, dim(s ∩ E) = l, and p regular for the
    saturated restricted subfoliation.
    """
    ctx = model.ctx
    check_point(p, ctx)
    if s.dim != l + 1:
        raise FoliaError(f"slice has dimension {s.dim}, order {l} needs {l + 1}")

    on, conds = slice_membership(s, p)
    if on is Decision.NO:
        return MembershipVerdict(
            p, "A", l, s, Status.CERTIFIED_NO, "exact", "point does not lie on the slice"
        )
    if on is Decision.UNKNOWN:
        return MembershipVerdict(
            p, "A", l, s, Status.UNKNOWN, "exact",
            "point membership in the slice depends on parameters",
            conditions=conds,
        )

    inv = is_invariant_slice(model.saturated, s)
    if not inv.invariant:
        name, res = inv.failures[0]
        return MembershipVerdict(
            p, "A", l, s, Status.CERTIFIED_NO, "exact",
            f"slice is not invariant: component {name} restricts to {res}",
            certificate=_cert(("failing_component", name), ("restriction", str(res))),
        )

    dim_dec, dim, dim_notes = _sigma_cap_singular_dim(model, s)
    if dim_dec is Decision.UNKNOWN:
        return MembershipVerdict(
            p, "A", l, s, Status.UNKNOWN, "exact",
            "dimension of (slice ∩ singular set) undecided", conditions=dim_notes,
        )
    if dim != l:
        return MembershipVerdict(
            p, "A", l, s, Status.CERTIFIED_NO, "exact",
            f"dim(slice ∩ singular set) = {dim}, order {l} required",
            certificate=_cert(("intersection_dim", str(dim))),
        )

    try:
        rf = restrict(model.saturated, s)
    except FoliaError as exc:
        return MembershipVerdict(
            p, "A", l, s, Status.UNKNOWN, "exact", f"restriction unavailable: {exc}"
        )
    common_s, sat_s = saturate(rf.field)
    live = [q for q in sat_s.components if not q.is_zero]
    sub_singular = solve_variety(live, _remap_declared(declared, sat_s.ctx))

    free_point = tuple(p[ctx.slot(v)] for v in rf.free_vars)
    chk = contains_point(sub_singular, free_point)
    cert = _cert(
        ("restricted_field", str(rf.field)),
        ("restricted_common_factor", str(common_s)),
        ("restricted_saturation", str(sat_s)),
        ("restricted_singular_slices", "; ".join(str(x) for x in sub_singular.slices) or "(empty)"),
        ("intersection_dim", str(dim)),
    )
    if chk.status is Decision.YES:
        return MembershipVerdict(
            p, "A", l, s, Status.CERTIFIED_NO, "exact",
            "point is singular for the restricted subfoliation",
            certificate=cert,
        )
    if chk.status is Decision.UNKNOWN:
        return MembershipVerdict(
            p, "A", l, s, Status.UNKNOWN, "exact",
            "membership in the restricted singular set undecided",
            certificate=cert,
            conditions=tuple(n for _, ns in chk.conditional for n in ns) + chk.notes,
        )
    return MembershipVerdict(
        p, "A", l, s, Status.CERTIFIED_YES, "exact",
        "slice invariant, intersection dimension matches, restricted point regular",
        certificate=cert,
    )


# --------------------------------------------------------------------------
# strong membership


def _t_antiderivative(p: Polynomial, t_slot: int) -> Polynomial:
    terms = {}
    for e, c in p.terms.items():
        k = e[t_slot]
        e2 = list(e)
        e2[t_slot] = k + 1
        terms[tuple(e2)] = c / (k + 1)
    return Polynomial(p.ctx, terms)


def _polynomial_flow(
    field: VectorField,
    init: Sequence[Polynomial],
    t_name: str,
    max_iter: int | None = None,
) -> tuple[Polynomial, ...] | None:
    """Exact flow of the field from init by symbolic Picard iteration.

    Stabilizes in at most n steps when the field is nilpotent in the
    triangular sense (each iterate feeds only already-settled coordinates);
    returns None when the flow is not polynomial.
    """
    tctx = init[0].ctx
    t_slot = tctx.slot(t_name)
    names = field.ctx.vars
    if max_iter is None:
        max_iter = len(names) + 2
    cur = list(init)
    for _ in range(max_iter):
        bindings = dict(zip(names, cur))
        rhs = [f.substitute(bindings) for f in field.components]
        nxt = [i + _t_antiderivative(r, t_slot) for i, r in zip(init, rhs)]
        if nxt == cur:
            return tuple(cur)
        cur = nxt
    return None


def _leaf_offsets(
    ctx: VarContext, rf: RestrictedField, flow: Sequence[Polynomial], init: Sequence[Polynomial]
) -> list[Polynomial]:
    """Ambient offsets t -> gamma(t) - gamma(0) for the restricted leaf."""
    free = list(rf.free_vars)
    tctx = flow[0].ctx
    offsets: list[Polynomial] = []
    for name in ctx.vars:
        if name in free:
            i = free.index(name)
            offsets.append(flow[i] - init[i])
        else:
            offsets.append(Polynomial.zero(tctx))
    return offsets


def _nonzero_t_coefficient(
    pb_components: Sequence[Polynomial], t_name: str
) -> tuple[Decision, str]:
    """Search a certified-nonzero t-coefficient among pullback components."""
    some_unknown = False
    for comp in pb_components:
        if comp.is_zero:
            continue
        slot = comp.ctx.slot(t_name)
        for k, coeff in sorted(comp.as_univariate(slot).items()):
            if coeff.is_zero:
                continue
            dec = decide_param_polynomial(coeff)
            if dec is Decision.YES:
                return Decision.YES, f"t^{k} coefficient {coeff} is nonzero"
            some_unknown = True
    return (Decision.UNKNOWN if some_unknown else Decision.NO), ""


def classify_strong(
    model: FoliationModel,
    p: Point,
    s: Slice,
    l: int,
    weak: MembershipVerdict | None = None,
    declared: Sequence[PreparedFactorization] = (),
    numeric_probe: bool = True,
) -> MembershipVerdict:
    """Strong order-l membership: weak conditions plus the restricted leaf
    through p staying inside the singular set."""
    ctx = model.ctx
    if weak is None:
        weak = classify_weak(model, p, s, l, declared)
    if weak.status is not Status.CERTIFIED_YES:
        return MembershipVerdict(
            p, "B", l, s, weak.status, weak.grade,
            f"weak conditions not certified: {weak.reason}",
            certificate=weak.certificate, conditions=weak.conditions,
        )

    rf = restrict(model.saturated, s)
    common_s, sat_s = saturate(rf.field)

    # an algebraic coordinate rides along as the formal symbol _u; the
    # curve pullback reduces it by its minimal polynomial afterwards, so
    # vanishing tests stay exact
    alg = next((v for v in p if isinstance(v, AlgebraicValue)), None)
    extra = ("_t",) if alg is None else ("_t", "_u")
    tctx = VarContext(extra, ctx.params, ctx.side_conditions)
    init: list[Polynomial] = []
    for name in rf.free_vars:
        v = p[ctx.slot(name)]
        if isinstance(v, GaussianRational):
            init.append(Polynomial.constant(tctx, v))
        elif isinstance(v, ParamValue):
            init.append(Polynomial.variable(tctx, v.name))
        else:
            init.append(Polynomial.variable(tctx, "_u"))

    flow = _polynomial_flow(sat_s, init, "_t")
    if flow is not None:
        offsets = _leaf_offsets(ctx, rf, flow, init)
        pullbacks = [curve_pullback(q, p, offsets) for q in model.saturated.components]
        flat = [c for pb in pullbacks for c in pb.components]
        flowstr = "(" + ", ".join(str(f) for f in flow) + ")"
        if all(c.is_zero for c in flat):
            return MembershipVerdict(
                p, "B", l, s, Status.CERTIFIED_YES, "exact",
                "restricted leaf stays inside the singular set",
                certificate=_cert(
                    ("leaf_flow_free", flowstr),
                    ("pullback", "all saturated components vanish along the leaf"),
                ),
            )
        dec, witness = _nonzero_t_coefficient(flat, "_t")
        if dec is Decision.YES:
            return MembershipVerdict(
                p, "B", l, s, Status.CERTIFIED_NO, "exact",
                "restricted leaf escapes the singular set",
                certificate=_cert(("leaf_flow_free", flowstr), ("escape_witness", witness)),
            )
        return MembershipVerdict(
            p, "B", l, s, Status.UNKNOWN, "exact",
            "leaf escape depends on undecided parameters",
        )

    # no polynomial leaf parametrization: exact route ends here
    if any(q.params_present() for q in sat_s.components) or not all(
        isinstance(v, GaussianRational) for v in p
    ):
        return MembershipVerdict(
            p, "B", l, s, Status.UNKNOWN, "exact",
            "restricted leaf has no polynomial parametrization and carries "
            "parameters; no certificate",
        )
    if not numeric_probe:
        return MembershipVerdict(
            p, "B", l, s, Status.UNKNOWN, "exact",
            "restricted leaf is nonlinear; numeric probe disabled",
        )
    return _numeric_leaf_probe(model, p, s, rf, sat_s, l)


def _numeric_leaf_probe(
    model: FoliationModel,
    p: Point,
    s: Slice,
    rf: RestrictedField,
    sat_s: VectorField,
    l: int,
) -> MembershipVerdict:
    """Integrate the restricted leaf numerically and watch the ambient
    saturated generators.  Evidence only; the verdict stays Unknown."""
    ctx = model.ctx
    amap = s.assignment_map()
    frozen_idx = [(i, amap[name]) for i, name in enumerate(ctx.vars) if name in amap]
    free_names = list(rf.free_vars)
    y0 = [p[ctx.slot(n)].to_complex() for n in free_names]

    try:
        f = compile_field(sat_s.components)
        amb = compile_field(model.saturated.components)
    except IntegratorDiverged as exc:
        return MembershipVerdict(
            p, "B", l, s, Status.UNKNOWN, "numeric", f"numeric probe unavailable: {exc}"
        )

    def embed(y: np.ndarray) -> np.ndarray:
        full = np.zeros(ctx.nvars, dtype=complex)
        j = 0
        for i, name in enumerate(ctx.vars):
            if name in amap:
                v = amap[name]
                full[i] = v.to_complex() if isinstance(v, GaussianRational) else 0j
            else:
                full[i] = y[j]
                j += 1
        return full

    worst = 0.0

    def watch(y: np.ndarray) -> bool:
        nonlocal worst
        dev = float(np.max(np.abs(amb(embed(y)))))
        worst = max(worst, dev)
        return True

    try:
        for direction in (1.0, -1.0, 1j, -1j):
            integrate_ode(
                lambda y: direction * f(y), list(y0), 0.25,
                rtol=1e-10, check=watch, max_steps=5000,
            )
    except IntegratorDiverged as exc:
        return MembershipVerdict(
            p, "B", l, s, Status.UNKNOWN, "numeric",
            f"numeric probe diverged: {exc}",
        )
    if worst > 1e-6:
        return MembershipVerdict(
            p, "B", l, s, Status.UNKNOWN, "numeric",
            f"numeric flow leaves the singular set (max generator size {worst:.3e}); "
            "evidence against strong membership, no exact certificate",
        )
    return MembershipVerdict(
        p, "B", l, s, Status.UNKNOWN, "numeric",
        f"numeric flow stays near the singular set (max generator size {worst:.3e}); "
        "no exact certificate",
    )


# --------------------------------------------------------------------------
# order-0 evidence


@dataclass(frozen=True)
class SeparatrixCandidate:
    """A parametrized curve t -> gamma(t) anchored at a point."""

    base: Point
    curve: tuple[Polynomial, ...]  # components over a (t, params) context
    t_name: str = "t"
    label: str = ""

    def curve_ctx(self) -> VarContext:
        return self.curve[0].ctx


def _values_match(poly_at0: Polynomial, want: PointValue) -> bool:
    """Does the t=0 value of a curve component equal the base coordinate?"""
    if isinstance(want, GaussianRational):
        return poly_at0 == Polynomial.constant(poly_at0.ctx, want)
    if isinstance(want, ParamValue):
        if want.name not in poly_at0.ctx.params:
            return False  # a parameter the curve context never saw
        return poly_at0 == Polynomial.variable(poly_at0.ctx, want.name)
    return False  # algebraic anchors unsupported for curve declarations


def a0_evidence(
    model: FoliationModel,
    p: Point,
    candidates: Sequence[SeparatrixCandidate] = (),
    ledger: VerdictLedger | None = None,
    assert_exhaustive_order: int | None = None,
) -> MembershipVerdict:
    """Order-0 evidence at p.

    Route (i): a declared curve through p tangent to the saturated field and
    not contained in the singular set certifies membership.  Route (ii), API
    only: a certified weak order together with a caller-asserted exhaustive
    strong failure at the same order.  Never returns CertifiedNo.
    """
    ctx = model.ctx
    check_point(p, ctx)
    notes: list[str] = []
    for cand in candidates:
        sctx = cand.curve_ctx()
        if len(cand.curve) != ctx.nvars:
            notes.append(f"candidate {cand.label or cand.curve}: wrong arity")
            continue
        t_slot = sctx.slot(cand.t_name)
        at0 = [c.coefficient_in(t_slot, 0) for c in cand.curve]
        if not all(_values_match(a, w) for a, w in zip(at0, p)):
            notes.append(f"candidate {cand.label or 'curve'}: not anchored at the point")
            continue
        if all(c.degree_in(t_slot) <= 0 for c in cand.curve):
            notes.append(f"candidate {cand.label or 'curve'}: constant curve")
            continue
        bindings = {name: cand.curve[i] for i, name in enumerate(ctx.vars)}
        x_on_curve = [q.substitute(bindings) for q in model.saturated.components]
        gamma_dot = [c.partial_derivative(cand.t_name) for c in cand.curve]
        minors_ok = True
        for i in range(ctx.nvars):
            for j in range(i + 1, ctx.nvars):
                m = x_on_curve[i] * gamma_dot[j] - x_on_curve[j] * gamma_dot[i]
                if not m.is_zero:
                    minors_ok = False
                    notes.append(
                        f"candidate {cand.label or 'curve'}: tangency minor ({i},{j}) = {m}"
                    )
                    break
            if not minors_ok:
                break
        if not minors_ok:
            continue
        dec, witness = _nonzero_t_coefficient(x_on_curve, cand.t_name)
        if dec is Decision.NO:
            notes.append(
                f"candidate {cand.label or 'curve'}: curve lies inside the singular set"
            )
            continue
        if dec is Decision.UNKNOWN:
            notes.append(
                f"candidate {cand.label or 'curve'}: escape from the singular set undecided"
            )
            continue
        return MembershipVerdict(
            p, "A0", 0, None, Status.CERTIFIED_YES, "exact",
            "curve through the point is tangent to the field and leaves the singular set",
            certificate=_cert(
                ("curve", "(" + ", ".join(str(c) for c in cand.curve) + ")"),
                ("tangency", "all 2x2 minors of (X, gamma') vanish identically"),
                ("escape", witness),
                ("punctured_leaf", "curve minus the anchor lies in a single leaf"),
            ),
        )
    if ledger is not None and assert_exhaustive_order is not None:
        lq = assert_exhaustive_order
        a_yes = [
            v for v in ledger.query(point=p, klass="A", order=lq, status=Status.CERTIFIED_YES)
        ]
        b_no_exhausted = ledger.is_exhaustive_no(p, "B", lq)
        if a_yes and b_no_exhausted:
            return MembershipVerdict(
                p, "A0", 0, None, Status.CERTIFIED_YES, "exact",
                f"weak order {lq} certified while strong order {lq} fails exhaustively "
                "(caller-asserted exhaustiveness over all admissible slices)",
                certificate=_cert(
                    ("weak_witness", str(a_yes[0].sigma)),
                    ("assumption", "strong failure asserted exhaustive beyond coordinate slices"),
                ),
                conditions=("asserted-exhaustive strong failure",),
            )
    return MembershipVerdict(
        p, "A0", 0, None, Status.UNKNOWN, "exact",
        "; ".join(notes) if notes else "no candidate curve supplied",
    )


# --------------------------------------------------------------------------
# removability order


@dataclass(frozen=True)
class LpResult:
    point: Point
    value: int
    exhausted_over_slices: bool
    witness: MembershipVerdict

    def describe(self) -> str:
        qual = "exact over enumerated slices" if self.exhausted_over_slices else "lower bound"
        return f"l_p = {self.value} ({qual})"


def compute_lp(p: Point, ledger: VerdictLedger) -> LpResult:
    """Largest certified strong order at p; flagged as a lower bound unless
    the next order failed for every enumerated slice."""
    yes = ledger.query(point=p, klass="B", status=Status.CERTIFIED_YES)
    if not yes:
        raise NoCertifiedB(f"no certified strong membership at {format_point(p)}")
    best = max(yes, key=lambda v: v.order)
    # orders above nvars-2 are impossible: the singular set has codim >= 2
    exhausted = best.order >= len(p) - 2 or ledger.is_exhaustive_no(p, "B", best.order + 1)
    return LpResult(p, best.order, exhausted, best)


# --------------------------------------------------------------------------
# whole-point enumeration


@dataclass(frozen=True)
class ExistentialSummary:
    """Does some slice realize the class at this order?"""

    klass: str
    order: int
    status: Status
    witness: Slice | None
    exhaustive: bool
    note: str = ""


@dataclass
class PointAnalysis:
    point: Point
    max_order: int
    verdicts: list[MembershipVerdict]
    summaries: list[ExistentialSummary]
    a0: MembershipVerdict | None = None
    lp: LpResult | None = None
    notes: list[str] = field(default_factory=list)

    def summary_for(self, klass: str, order: int) -> ExistentialSummary | None:
        for s in self.summaries:
            if s.klass == klass and s.order == order:
                return s
        return None


def _coordinate_slices_through(
    ctx: VarContext, p: Point, dim: int
) -> tuple[list[Slice], bool]:
    """All coordinate slices of the given dimension passing through p.

    Freezes N-dim coordinates at the point's values.  Algebraic coordinates
    are skipped (the slice machinery keeps at most one algebraic value per
    branch); the flag reports whether the enumeration stayed complete.
    """
    n = ctx.nvars
    out: list[Slice] = []
    complete = True
    for frozen in combinations(range(n), n - dim):
        vals = [p[i] for i in frozen]
        if any(isinstance(v, AlgebraicValue) for v in vals):
            complete = False
            continue
        out.append(Slice.of(ctx, {ctx.vars[i]: p[i] for i in frozen}))
    return out, complete


def _point_dim_bound(model: FoliationModel, p: Point) -> int | None:
    """Largest dimension of a singular component that could contain p.

    Conservative: components whose membership is left open by side
    conditions count toward the bound. None when residual branches make the
    decomposition incomplete; -1 when the point certainly misses E.
    """
    if model.singular.residuals:
        return None
    chk = contains_point(model.singular, p)
    dims = [s.dim for s in chk.containing]
    dims.extend(s.dim for s, _ in chk.conditional)
    return max(dims, default=-1)


def classify_point(
    model: FoliationModel,
    p: Point,
    declared: Sequence[PreparedFactorization] = (),
    candidates: Sequence[SeparatrixCandidate] = (),
    ledger: VerdictLedger | None = None,
    numeric_probe: bool = True,
    max_order: int | None = None,
) -> PointAnalysis:
    """Run weak/strong classification over every coordinate slice through p
    for each admissible order, then order-0 evidence and the removability
    order when available."""
    ctx = model.ctx
    check_point(p, ctx)
    n = ctx.nvars
    if ledger is None:
        ledger = VerdictLedger()
    top = n - 2 if max_order is None else min(max_order, n - 2)
    p_dim = _point_dim_bound(model, p)

    analysis = PointAnalysis(point=p, max_order=top, verdicts=[], summaries=[])

    for l in range(1, top + 1):
        if p_dim is not None and l > p_dim:
            # no stratum of dimension l passes through p, so neither class
            # can hold at this order -- over curved slices as much as
            # coordinate ones
            reason = (
                "the point lies on no singular component"
                if p_dim < 0
                else f"singular components through the point have dimension at most {p_dim}"
            )
            for klass in ("A", "B"):
                ledger.mark_exhaustive_no(p, klass, l)
                analysis.summaries.append(
                    ExistentialSummary(
                        klass, l, Status.CERTIFIED_NO, None, True, reason,
                    )
                )
            continue
        slices, complete = _coordinate_slices_through(ctx, p, l + 1)
        if not complete:
            analysis.notes.append(
                f"order {l}: slices frozen at algebraic coordinates were skipped"
            )
        a_best: MembershipVerdict | None = None
        b_best: MembershipVerdict | None = None
        for s in slices:
            w = ledger.add(classify_weak(model, p, s, l, declared))
            analysis.verdicts.append(w)
            if a_best is None or _better(w, a_best):
                a_best = w
            st = ledger.add(
                classify_strong(
                    model, p, s, l, weak=w, declared=declared,
                    numeric_probe=numeric_probe,
                )
            )
            analysis.verdicts.append(st)
            if b_best is None or _better(st, b_best):
                b_best = st
        for klass, best in (("A", a_best), ("B", b_best)):
            if best is None:
                continue
            status = best.status
            note = best.reason if status is not Status.CERTIFIED_YES else ""
            if status is Status.CERTIFIED_NO:
                # every enumerated slice is refuted, but membership
                # quantifies over arbitrary local invariant submanifolds;
                # curved slices are outside the search space, so the
                # point-level answer stays open
                status = Status.UNKNOWN
                note = (
                    f"all {len(slices)} coordinate slices refuted; "
                    "non-coordinate invariant slices are not searched"
                )
            analysis.summaries.append(
                ExistentialSummary(
                    klass, l,
                    status,
                    best.sigma if status is Status.CERTIFIED_YES else None,
                    False,
                    note,
                )
            )

    analysis.a0 = ledger.add(a0_evidence(model, p, candidates, ledger))
    analysis.verdicts.append(analysis.a0)
    try:
        analysis.lp = compute_lp(p, ledger)
    except NoCertifiedB:
        analysis.lp = None
    return analysis


_RANK = {Status.CERTIFIED_YES: 2, Status.UNKNOWN: 1, Status.CERTIFIED_NO: 0}


def _better(a: MembershipVerdict, b: MembershipVerdict) -> bool:
    return _RANK[a.status] > _RANK[b.status]
