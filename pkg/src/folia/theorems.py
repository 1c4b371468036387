"""Hypothesis reports for the continuity and extension statements, plus the
cross-verdict consistency checker.

Each report lists its hypotheses with three-valued statuses and an explicit
scope: universal facts (assumptions, component-level certificates) are
separated from facts verified only at the analyzed points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .classify import (
    LpResult,
    MembershipVerdict,
    PointAnalysis,
    Status,
    VerdictLedger,
    compute_lp,
)
from .cones import (
    ComponentTransversality,
    SyzygyIdentity,
    TransversalityVerdict,
    exceptional_is_finite,
    exceptional_set,
    find_syzygy,
    transversality_at,
)
from .context import Decision, ParamValue, Point, VarContext, format_point, point_key
from .errors import FoliaError, NoCertifiedB
from .foliation import FoliationModel, is_invariant_slice
from .variety import Slice, Variety, contains_point, slice_membership

# --------------------------------------------------------------------------
# invariant hyperplanes


def invariant_hyperplanes_through(
    model: FoliationModel, p: Point
) -> tuple[list[Slice], list[str]]:
    """Coordinate hyperplanes {x_i = p_i} that are certified invariant."""
    ctx = model.ctx
    out: list[Slice] = []
    notes: list[str] = []
    for i, name in enumerate(ctx.vars):
        h = Slice.of(ctx, {name: p[i]})
        w = is_invariant_slice(model.saturated, h)
        if w.invariant:
            out.append(h)
        else:
            notes.append(f"{{{name} = {h.assignment_map()[name]}}} is not invariant")
    return out, notes


def _slice_inside_singular(model: FoliationModel, s: Slice) -> Decision:
    """Is the whole slice contained in the singular set?"""
    ctx = model.ctx
    if model.singular.residuals:
        return Decision.UNKNOWN
    best = Decision.NO
    for comp in model.singular.slices:
        # comp constrains a subset of the slice's frozen coordinates
        inside = Decision.YES
        for name, val in comp.assignment_map().items():
            sval = s.assignment_map().get(name)
            if sval is None:
                inside = Decision.NO
                break
            from .context import decide_value_eq

            dec = decide_value_eq(sval, val, ctx)
            if dec is Decision.NO:
                inside = Decision.NO
                break
            if dec is Decision.UNKNOWN:
                inside = Decision.UNKNOWN
        if inside is Decision.YES:
            return Decision.YES
        if inside is Decision.UNKNOWN:
            best = Decision.UNKNOWN
    return best


# --------------------------------------------------------------------------
# properties of singular points


@dataclass(frozen=True)
class PropertyWitness:
    point: Point
    name: str  # "L" | "M"
    status: Status
    hyperplanes: tuple[Slice, ...] = ()
    intersection: Slice | None = None
    order: int | None = None
    reason: str = ""
    conditions: tuple[str, ...] = ()


def property_L(
    model: FoliationModel, p: Point, ledger: VerdictLedger
) -> PropertyWitness:
    """Strong membership at the top certified order, realized by a slice cut
    out by invariant coordinate hyperplanes."""
    ctx = model.ctx
    n = ctx.nvars
    try:
        lp = compute_lp(p, ledger)
    except NoCertifiedB:
        if all(ledger.is_exhaustive_no(p, "B", j) for j in range(1, n - 1)):
            return PropertyWitness(
                p, "L", Status.CERTIFIED_NO,
                reason="no strong membership at any order",
            )
        return PropertyWitness(
            p, "L", Status.UNKNOWN,
            reason="no certified strong membership and no exhaustive failure",
        )
    conds: tuple[str, ...] = ()
    if not lp.exhausted_over_slices:
        conds = (f"order {lp.value + 1} not exhaustively excluded; using the lower bound",)
    hyps, hyp_notes = invariant_hyperplanes_through(model, p)
    inv_names = {next(iter(h.frozen_vars)) for h in hyps}
    for v in ledger.query(point=p, klass="B", order=lp.value, status=Status.CERTIFIED_YES):
        if v.sigma is None:
            continue
        frozen = set(v.sigma.frozen_vars)
        if frozen <= inv_names:
            planes = tuple(
                Slice.of(ctx, {name: v.sigma.assignment_map()[name]}) for name in sorted(frozen)
            )
            return PropertyWitness(
                p, "L", Status.CERTIFIED_YES, planes, v.sigma, lp.value,
                conditions=conds,
            )
    return PropertyWitness(
        p, "L", Status.UNKNOWN, order=lp.value,
        reason="no strong witness slice is an intersection of invariant "
        "coordinate hyperplanes; " + "; ".join(hyp_notes),
        conditions=conds,
    )


def property_M(model: FoliationModel, p: Point) -> PropertyWitness:
    """Invariant coordinate hyperplanes whose intersection passes through the
    point and sits inside the singular set, matching the local dimension."""
    ctx = model.ctx
    n = ctx.nvars
    chk = contains_point(model.singular, p)
    if chk.status is not Decision.YES:
        return PropertyWitness(
            p, "M", Status.UNKNOWN,
            reason="membership of the point in the singular set is not certain",
        )
    k = max(s.dim for s in chk.containing)
    if chk.conditional and any(s.dim > k for s, _ in chk.conditional):
        return PropertyWitness(
            p, "M", Status.UNKNOWN,
            reason="local dimension depends on undecided parameters",
        )
    hyps, hyp_notes = invariant_hyperplanes_through(model, p)
    if len(hyps) < n - k:
        return PropertyWitness(
            p, "M", Status.UNKNOWN,
            reason=f"only {len(hyps)} invariant coordinate hyperplanes through "
            f"the point, {n - k} needed; " + "; ".join(hyp_notes),
        )
    for subset in combinations(hyps, n - k):
        merged: dict = {}
        for h in subset:
            merged.update(h.assignment_map())
        cap = Slice.of(ctx, merged)
        if cap.dim != k:
            continue
        if _slice_inside_singular(model, cap) is Decision.YES:
            return PropertyWitness(p, "M", Status.CERTIFIED_YES, tuple(subset), cap)
    return PropertyWitness(
        p, "M", Status.UNKNOWN,
        reason="no intersection of invariant coordinate hyperplanes of the "
        "right dimension lies inside the singular set",
    )


# --------------------------------------------------------------------------
# transversal type


@dataclass(frozen=True)
class ComponentTypeCheck:
    component: Slice
    status: Status
    identities: tuple[SyzygyIdentity, ...] = ()
    exceptional: tuple[str, ...] = ()
    exceptional_finite: Decision = Decision.UNKNOWN
    reason: str = ""


@dataclass(frozen=True)
class TransversalTypeReport:
    point: Point
    status: Status
    at_point: TransversalityVerdict
    components: tuple[ComponentTypeCheck, ...] = ()
    reason: str = ""


def component_type_check(
    model: FoliationModel, component: Slice, max_degree: int = 2
) -> ComponentTypeCheck:
    """Point-free certificate for one singular component: identities for all
    of its free directions, with the scale's zero locus inside the component
    required to be finite."""
    ctx = model.ctx
    comps = model.saturated.components
    free_slots = sorted(ctx.slot(v) for v in component.free_vars)
    allowed = [j for j in range(ctx.nvars) if j not in free_slots]
    idents: list[SyzygyIdentity] = []
    for i in free_slots:
        ident = find_syzygy(
            comps, i, allowed, point=None, max_degree=max_degree,
            nonzero_on=component.assignment_map(),
        )
        if ident is None:
            return ComponentTypeCheck(
                component, Status.UNKNOWN, tuple(idents),
                reason=f"no identity for direction {ctx.vars[i]} within degree {max_degree}",
            )
        idents.append(ident)
    holder = ComponentTransversality(tuple(free_slots), Status.CERTIFIED_YES, tuple(idents))
    exc = exceptional_set(model, component, holder)
    fin = exceptional_is_finite(exc)
    exc_desc = tuple(str(s) for s in exc.slices) + tuple(
        f"residual: {'; '.join(str(g) for g in r.generators)}" for r in exc.residuals
    )
    if fin is Decision.YES:
        return ComponentTypeCheck(
            component, Status.CERTIFIED_YES, tuple(idents), exc_desc, fin
        )
    return ComponentTypeCheck(
        component, Status.UNKNOWN, tuple(idents), exc_desc, fin,
        reason="scale polynomial vanishes on a positive-dimensional subset "
        "of the component",
    )


def transversal_type_at(
    model: FoliationModel,
    p: Point,
    candidates: Sequence = (),
    max_degree: int = 2,
) -> TransversalTypeReport:
    """Cone condition at the point itself plus, for every singular component
    through it, a component-level certificate valid off a finite set."""
    at_p = transversality_at(model, p, candidates, max_degree=max_degree)
    if at_p.status is Status.CERTIFIED_NO:
        return TransversalTypeReport(
            p, Status.CERTIFIED_NO, at_p,
            reason="cone condition fails at the point itself",
        )
    if at_p.status is Status.UNKNOWN:
        return TransversalTypeReport(
            p, Status.UNKNOWN, at_p,
            reason=f"cone condition at the point undecided: {at_p.reason}",
        )
    checks: list[ComponentTypeCheck] = []
    for comp in model.singular.slices:
        on, _ = slice_membership(comp, p)
        if on is Decision.NO:
            continue
        c = component_type_check(model, comp, max_degree)
        if on is Decision.UNKNOWN and c.status is Status.CERTIFIED_YES:
            c = ComponentTypeCheck(
                comp, c.status, c.identities, c.exceptional, c.exceptional_finite,
                reason="membership of the point in this component is conditional",
            )
        checks.append(c)
    if all(c.status is Status.CERTIFIED_YES for c in checks):
        return TransversalTypeReport(p, Status.CERTIFIED_YES, at_p, tuple(checks))
    return TransversalTypeReport(
        p, Status.UNKNOWN, at_p, tuple(checks),
        reason="; ".join(c.reason for c in checks if c.status is not Status.CERTIFIED_YES),
    )


# --------------------------------------------------------------------------
# theorem reports


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    status: Status
    detail: str = ""
    conditions: tuple[str, ...] = ()


@dataclass(frozen=True)
class TheoremReport:
    name: str
    status: Status
    hypotheses: tuple[HypothesisCheck, ...]
    conclusion: str
    scope: str
    points: tuple[Point, ...] = ()

    def holds(self) -> bool:
        return self.status is Status.CERTIFIED_YES


def _combine(hyps: Sequence[HypothesisCheck]) -> Status:
    if any(h.status is Status.CERTIFIED_NO for h in hyps):
        return Status.CERTIFIED_NO
    if all(h.status is Status.CERTIFIED_YES for h in hyps):
        return Status.CERTIFIED_YES
    return Status.UNKNOWN


def _ncp_hypothesis(ncp_assumed: bool) -> HypothesisCheck:
    if ncp_assumed:
        return HypothesisCheck(
            "uniformizations-normal-on-compacts", Status.CERTIFIED_YES,
            "declared as an assumption",
        )
    return HypothesisCheck(
        "uniformizations-normal-on-compacts", Status.UNKNOWN,
        "not declared; holds for instance on taut domains",
    )


def continuity_via_strong_order(
    model: FoliationModel,
    analyses: Sequence[PointAnalysis],
    ledger: VerdictLedger,
    ncp_assumed: bool,
) -> TheoremReport:
    """Continuity of the leafwise metric density off the singular set from
    strong removability: at every analyzed point, either order-0 membership
    is refuted or a strong witness realized by invariant hyperplanes exists
    at the top certified order."""
    hyps = [_ncp_hypothesis(ncp_assumed)]
    details = []
    any_no = any_unknown = False
    conditions: list[str] = []
    for a in analyses:
        if a.a0 is not None and a.a0.status is Status.CERTIFIED_NO:
            details.append(f"{format_point(a.point)}: not an order-0 point")
            continue
        w = property_L(model, a.point, ledger)
        if w.status is Status.CERTIFIED_YES:
            planes = ", ".join(str(h) for h in w.hyperplanes)
            details.append(
                f"{format_point(a.point)}: strong order {w.order} via {planes}"
            )
            conditions.extend(w.conditions)
        elif w.status is Status.CERTIFIED_NO and a.a0 is not None and (
            a.a0.status is Status.CERTIFIED_YES
        ):
            any_no = True
            details.append(
                f"{format_point(a.point)}: order-0 point without strong membership"
            )
        else:
            any_unknown = True
            details.append(f"{format_point(a.point)}: {w.reason}")
    if any_no:
        status = Status.CERTIFIED_NO
    elif any_unknown or not analyses:
        status = Status.UNKNOWN
    else:
        status = Status.CERTIFIED_YES
    hyps.append(
        HypothesisCheck(
            "order-0-points-strongly-removable", status,
            "; ".join(details) if details else "no points analyzed",
            tuple(conditions),
        )
    )
    return TheoremReport(
        "continuity-from-strong-removability",
        _combine(hyps),
        tuple(hyps),
        "the leafwise metric density is continuous off the singular set",
        "order-0 hypothesis verified at the analyzed points only",
        tuple(a.point for a in analyses),
    )


def continuity_via_top_order(
    model: FoliationModel,
    analyses: Sequence[PointAnalysis],
    ledger: VerdictLedger,
    ncp_assumed: bool,
) -> TheoremReport:
    """Special case: every analyzed point is strongly removable at the
    maximal order (codimension-two bound) unless order-0 membership fails."""
    hyps = [_ncp_hypothesis(ncp_assumed)]
    n = model.ctx.nvars
    details = []
    any_no = any_unknown = False
    for a in analyses:
        a0_yes = a.a0 is not None and a.a0.status is Status.CERTIFIED_YES
        if a.a0 is not None and a.a0.status is Status.CERTIFIED_NO:
            details.append(f"{format_point(a.point)}: not an order-0 point")
            continue
        try:
            lp = compute_lp(a.point, ledger)
        except NoCertifiedB:
            if a0_yes and all(
                ledger.is_exhaustive_no(a.point, "B", j) for j in range(1, n - 1)
            ):
                any_no = True
                details.append(
                    f"{format_point(a.point)}: order-0 point with no strong"
                    " membership over the enumerated slices"
                )
            else:
                any_unknown = True
                details.append(f"{format_point(a.point)}: no certified strong order")
            continue
        if lp.value >= n - 2:
            details.append(f"{format_point(a.point)}: strong order {lp.value}")
        elif a0_yes and lp.exhausted_over_slices:
            any_no = True
            details.append(
                f"{format_point(a.point)}: top strong order {lp.value} < {n - 2}"
                " over the enumerated slices"
            )
        else:
            any_unknown = True
            details.append(
                f"{format_point(a.point)}: top certified strong order is {lp.value}"
            )
    if any_no:
        status = Status.CERTIFIED_NO
    elif any_unknown or not analyses:
        status = Status.UNKNOWN
    else:
        status = Status.CERTIFIED_YES
    hyps.append(
        HypothesisCheck(
            "order-0-points-strong-at-top-order", status,
            "; ".join(details) if details else "no points analyzed",
        )
    )
    return TheoremReport(
        "continuity-from-top-strong-order",
        _combine(hyps),
        tuple(hyps),
        "the leafwise metric density is continuous off the singular set",
        "verified at the analyzed points only",
        tuple(a.point for a in analyses),
    )


def continuity_via_mixed(
    model: FoliationModel,
    analyses: Sequence[PointAnalysis],
    ledger: VerdictLedger,
    ncp_assumed: bool,
) -> TheoremReport:
    """Mixed route: each analyzed point satisfies the strong-witness property
    or the invariant-intersection property, unless order-0 membership fails."""
    hyps = [_ncp_hypothesis(ncp_assumed)]
    details = []
    any_no = any_unknown = False
    if not analyses:
        details.append("no points analyzed")
    conditions: list[str] = []
    for a in analyses:
        if a.a0 is not None and a.a0.status is Status.CERTIFIED_NO:
            details.append(f"{format_point(a.point)}: not an order-0 point")
            continue
        wl = property_L(model, a.point, ledger)
        if wl.status is Status.CERTIFIED_YES:
            details.append(f"{format_point(a.point)}: strong-witness property")
            conditions.extend(wl.conditions)
            continue
        wm = property_M(model, a.point)
        if wm.status is Status.CERTIFIED_YES:
            details.append(f"{format_point(a.point)}: invariant-intersection property")
            continue
        a0_yes = a.a0 is not None and a.a0.status is Status.CERTIFIED_YES
        if a0_yes and wl.status is Status.CERTIFIED_NO and wm.status is Status.CERTIFIED_NO:
            any_no = True
            details.append(
                f"{format_point(a.point)}: order-0 point with neither property"
            )
            continue
        any_unknown = True
        details.append(
            f"{format_point(a.point)}: neither property certified "
            f"({wl.reason or 'no strong witness'}; {wm.reason})"
        )
    if any_no:
        status = Status.CERTIFIED_NO
    elif any_unknown or not analyses:
        status = Status.UNKNOWN
    else:
        status = Status.CERTIFIED_YES
    hyps.append(
        HypothesisCheck(
            "order-0-points-have-L-or-M", status, "; ".join(details), tuple(conditions)
        )
    )
    return TheoremReport(
        "continuity-mixed",
        _combine(hyps),
        tuple(hyps),
        "the leafwise metric density is continuous off the singular set",
        "properties verified at the analyzed points only",
        tuple(a.point for a in analyses),
    )


def extension_report(
    model: FoliationModel,
    continuity: Sequence[TheoremReport],
    ncp_assumed: bool,
    max_degree: int = 2,
    generic_falsifications: Sequence[TransversalityVerdict] = (),
) -> TheoremReport:
    """Continuous extension to the singular set: needs continuity off it and
    component-level cone certificates leaving only finite failure sets.

    A falsified transversality verdict at a parametric component point counts
    against discreteness: it certifies non-transversality on a cofinite
    subset of that component.
    """
    hyps = [_ncp_hypothesis(ncp_assumed)]
    best = next(
        (r for r in continuity if r.status is Status.CERTIFIED_YES),
        None,
    )
    if best is not None:
        hyps.append(
            HypothesisCheck(
                "continuity-off-singular-set", Status.CERTIFIED_YES,
                f"from report {best.name} ({best.scope})",
            )
        )
    else:
        hyps.append(
            HypothesisCheck(
                "continuity-off-singular-set", Status.UNKNOWN,
                "no continuity report is certified",
            )
        )
    generic_no = [
        v for v in generic_falsifications
        if v.status is Status.CERTIFIED_NO
        and any(isinstance(c, ParamValue) for c in v.point)
    ]
    if generic_no:
        where = "; ".join(format_point(v.point) for v in generic_no)
        hyps.append(
            HypothesisCheck(
                "non-transversal-locus-discrete", Status.CERTIFIED_NO,
                f"non-transversality certified at generic component points: {where}",
            )
        )
    elif model.singular.residuals:
        hyps.append(
            HypothesisCheck(
                "non-transversal-locus-discrete", Status.UNKNOWN,
                "singular set has residual branches",
            )
        )
    else:
        checks = [
            component_type_check(model, comp, max_degree)
            for comp in model.singular.slices
        ]
        if all(c.status is Status.CERTIFIED_YES for c in checks):
            exc = [e for c in checks for e in c.exceptional]
            hyps.append(
                HypothesisCheck(
                    "non-transversal-locus-discrete", Status.CERTIFIED_YES,
                    "cone certificates on every component; possible failures "
                    "confined to " + ("; ".join(exc) if exc else "the empty set"),
                )
            )
        else:
            bad = "; ".join(
                f"{c.component}: {c.reason}" for c in checks
                if c.status is not Status.CERTIFIED_YES
            )
            hyps.append(
                HypothesisCheck("non-transversal-locus-discrete", Status.UNKNOWN, bad)
            )
    return TheoremReport(
        "continuous-extension-to-singular-set",
        _combine(hyps),
        tuple(hyps),
        "the leafwise metric density extends continuously to the whole domain",
        "component certificates are global; continuity input carries its own scope",
    )


# --------------------------------------------------------------------------
# consistency checker


def consistency_check(
    model: FoliationModel,
    ledger: VerdictLedger,
    analyses: Sequence[PointAnalysis] = (),
) -> list[str]:
    """Cross-checks between verdicts; returns human-readable violations.

    The inclusion lattice between the classes is used as an oracle: strong
    membership implies weak on the same slice, orders nest downward for the
    weak classes, order-0 contains the weak-minus-strong difference, and every
    member lies in a singular component of dimension at least its order.
    """
    out: list[str] = []
    yes = [v for v in ledger.verdicts if v.status is Status.CERTIFIED_YES]

    for v in yes:
        if v.klass == "B" and v.order == 0:
            out.append(
                f"{format_point(v.point)}: strong order 0 certified, but the "
                "strong class at order 0 is empty"
            )

    for v in yes:
        if v.klass != "B" or v.sigma is None:
            continue
        for w in ledger.verdicts:
            if (
                w.klass == "A"
                and w.order == v.order
                and w.status is Status.CERTIFIED_NO
                and point_key(w.point) == point_key(v.point)
                and w.sigma is not None
                and w.sigma.key() == v.sigma.key()
            ):
                out.append(
                    f"{format_point(v.point)}: strong order {v.order} certified on "
                    f"{v.sigma} while weak is refuted on the same slice"
                )

    for v in yes:
        if v.klass == "A" and v.order >= 2:
            if ledger.is_exhaustive_no(v.point, "A", v.order - 1):
                out.append(
                    f"{format_point(v.point)}: weak order {v.order} certified but "
                    f"order {v.order - 1} exhaustively refuted"
                )

    if not model.singular.residuals:
        for v in yes:
            if v.klass not in ("A", "B") or v.order < 1:
                continue
            chk = contains_point(model.singular, v.point)
            if chk.status is not Decision.YES:
                continue
            top = max(s.dim for s in chk.containing)
            possible = max(
                (s.dim for s, _ in chk.conditional), default=-1
            )
            if max(top, possible) < v.order:
                out.append(
                    f"{format_point(v.point)}: order {v.order} certified but every "
                    f"containing component has dimension at most {max(top, possible)}"
                )

    for a in analyses:
        if a.a0 is None or a.a0.status is not Status.CERTIFIED_NO:
            continue
        for v in ledger.query(point=a.point, klass="A", status=Status.CERTIFIED_YES):
            if v.order >= 1 and ledger.is_exhaustive_no(a.point, "B", v.order):
                out.append(
                    f"{format_point(a.point)}: weak order {v.order} certified, strong "
                    "exhaustively refuted, yet order-0 membership refuted"
                )
    return out
