"""Tangent cones and transversality at singular points.

Two independent routes, deliberately kept apart:

* certify: an exact divisibility identity ``d * P_i = sum_j g_j * P_j`` over
  the coordinates missing from a cone component, which bounds the component's
  leaf directions away from the singular directions wherever ``d`` does not
  vanish;
* falsify: an explicit arc of base points approaching the singular point from
  outside the singular set, along which the field's limit direction lies
  inside the cone of the singular set.

Numeric sampling of nearby leaf directions is available as evidence only and
never upgrades a verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping, Sequence

import numpy as np

from .classify import SeparatrixCandidate, Status, _values_match
from .context import (
    Decision,
    ParamValue,
    Point,
    PointValue,
    VarContext,
    check_point,
    point_is_rational,
)
from .errors import FoliaError
from .evaluate import decide_param_polynomial, poly_eval, vanishes_on_slice
from .foliation import FoliationModel
from .gaussian import GaussianRational
from .linsolve import nullspace
from .polynomial import Polynomial, monomials_up_to
from .variety import ConeAtPoint, Slice, Variety, c4_cone, solve_variety

_ZERO = GaussianRational(0)
_ONE = GaussianRational(1)


# --------------------------------------------------------------------------
# arcs and their limit directions


@dataclass(frozen=True)
class Direction:
    """A tangent direction with entries that are parameter-free polynomials
    or plain scalars; normalized so the first nonzero entry is monic."""

    entries: tuple[Polynomial, ...]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, e in enumerate(self.entries) if not e.is_zero)

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


def arc_limit_direction(
    comps: Sequence[Polynomial], curve: Sequence[Polynomial], t_name: str
) -> Direction | None:
    """Limit direction of the field along the arc as t -> 0.

    Pulls every component back along the curve and takes the coefficient
    vector of the smallest t-power present; the result is rescaled so the
    first nonzero entry is monic when that entry is constant.  Returns None
    when the field vanishes identically along the arc.
    """
    sctx = curve[0].ctx
    slot = sctx.slot(t_name)
    bindings = {name: curve[i] for i, name in enumerate(comps[0].ctx.vars)}
    x_on = [p.substitute(bindings) for p in comps]
    order = None
    for c in x_on:
        for k, coeff in c.as_univariate(slot).items():
            if not coeff.is_zero and (order is None or k < order):
                order = k
    if order is None:
        return None
    entries = [c.coefficient_in(slot, order) for c in x_on]
    lead = next((e for e in entries if not e.is_zero), None)
    if lead is not None and lead.is_constant:
        inv = _ONE / lead.constant_value()
        entries = [e.scale(inv) for e in entries]
    return Direction(tuple(entries))


def _direction_in_component(
    d: Direction, component: frozenset[int]
) -> tuple[Decision, str]:
    """Is the direction a nonzero vector supported inside the component?"""
    nonzero_seen = False
    for i, e in enumerate(d.entries):
        if e.is_zero:
            continue
        dec = decide_param_polynomial(e)
        if i not in component:
            if dec is Decision.YES:
                return Decision.NO, f"entry {i} is nonzero outside the component"
            return Decision.UNKNOWN, f"entry {i} outside the component is undecided"
        if dec is Decision.YES:
            nonzero_seen = True
    if not nonzero_seen:
        return Decision.UNKNOWN, "no entry inside the component is certified nonzero"
    return Decision.YES, ""


# --------------------------------------------------------------------------
# syzygy certificates


@dataclass(frozen=True)
class SyzygyIdentity:
    """Exact identity  scale * P[target] = sum over (j, g) of g * P[j]."""

    target: int
    scale: Polynomial
    combo: tuple[tuple[int, Polynomial], ...]

    def residual(self, comps: Sequence[Polynomial]) -> Polynomial:
        acc = self.scale * comps[self.target]
        for j, g in self.combo:
            acc = acc - g * comps[j]
        return acc

    def recheck(self, comps: Sequence[Polynomial]) -> bool:
        return self.residual(comps).is_zero

    def describe(self, ctx: VarContext) -> str:
        lhs = f"({self.scale}) * P_{ctx.vars[self.target]}"
        rhs = " + ".join(f"({g}) * P_{ctx.vars[j]}" for j, g in self.combo) or "0"
        return f"{lhs} = {rhs}"


def find_syzygy(
    comps: Sequence[Polynomial],
    target: int,
    allowed: Sequence[int],
    point: Point | None = None,
    max_degree: int = 2,
    nonzero_on: Mapping[str, "PointValue"] | None = None,
) -> SyzygyIdentity | None:
    """Search  d * P[target] = sum_{j in allowed} g_j * P[j]  by exact linear
    algebra on coefficients, degree bound rising from 0 to max_degree.

    When a point is given, only identities whose scale is certified nonzero
    there are returned; the basis scan is complete for rational points.
    With nonzero_on, the scale must not vanish identically on that slice.
    """
    ctx = comps[0].ctx
    p_t = comps[target]
    if p_t.is_zero:
        return SyzygyIdentity(target, Polynomial.one(ctx), ())
    live = [j for j in allowed if not comps[j].is_zero]
    for deg in range(max_degree + 1):
        ident = _syzygy_at_degree(comps, target, live, point, deg, nonzero_on)
        if ident is not None:
            return ident
    return None


def _syzygy_at_degree(
    comps: Sequence[Polynomial],
    target: int,
    live: Sequence[int],
    point: Point | None,
    deg: int,
    nonzero_on: Mapping[str, "PointValue"] | None = None,
) -> SyzygyIdentity | None:
    ctx = comps[0].ctx
    p_t = comps[target]
    d_monos = list(monomials_up_to(ctx, deg, var_slots_only=False))
    g_deg = deg + p_t.total_degree()
    g_monos = list(monomials_up_to(ctx, g_deg, var_slots_only=False))

    columns: list[Polynomial] = []
    shape: list[tuple[str, int, tuple[int, ...]]] = []  # ("d"|"g", j, exponents)
    for e in d_monos:
        columns.append(Polynomial.monomial(ctx, e) * p_t)
        shape.append(("d", -1, e))
    for j in live:
        for e in g_monos:
            columns.append(Polynomial.monomial(ctx, e) * comps[j])
            shape.append(("g", j, e))

    row_index: dict[tuple[int, ...], int] = {}
    for col in columns:
        for e in col.terms:
            row_index.setdefault(e, len(row_index))
    mat = [[_ZERO] * len(columns) for _ in range(len(row_index))]
    for c, col in enumerate(columns):
        for e, coeff in col.terms.items():
            mat[row_index[e]][c] = coeff

    for vec in nullspace(mat):
        d_terms = {}
        g_terms: dict[int, dict[tuple[int, ...], GaussianRational]] = {}
        for val, (kind, j, e) in zip(vec, shape):
            if val.is_zero:
                continue
            if kind == "d":
                d_terms[e] = val
            else:
                g_terms.setdefault(j, {})[e] = val
        if not d_terms:
            continue  # a relation among the allowed components alone
        d = Polynomial(ctx, d_terms)
        if point is not None:
            if poly_eval(d, point).decide_nonzero(ctx) is not Decision.YES:
                continue
        if nonzero_on is not None and vanishes_on_slice(d, nonzero_on):
            continue
        lead = d.leading()[1]
        inv = _ONE / lead
        d = d.scale(inv)
        combo = tuple(
            (j, Polynomial(ctx, terms).scale(-inv))
            for j, terms in sorted(g_terms.items())
        )
        ident = SyzygyIdentity(target, d, combo)
        if not ident.recheck(comps):
            raise FoliaError("syzygy recheck failed; solver is inconsistent")
        return ident
    return None


@dataclass(frozen=True)
class ComponentTransversality:
    """Verdict for one cone component (a coordinate subspace)."""

    free_slots: tuple[int, ...]
    status: Status
    identities: tuple[SyzygyIdentity, ...] = ()
    reason: str = ""

    def scale_product(self, ctx: VarContext) -> Polynomial:
        acc = Polynomial.one(ctx)
        for ident in self.identities:
            acc = acc * ident.scale
        return acc


@dataclass(frozen=True)
class TransversalityVerdict:
    point: Point
    status: Status
    grade: str
    components: tuple[ComponentTransversality, ...] = ()
    reason: str = ""
    witness: Direction | None = None
    witness_component: tuple[int, ...] = ()
    witness_arc: tuple[Polynomial, ...] | None = None
    witness_arc_t: str = "t"
    witness_arc_label: str = ""

    def recheck(self, model: FoliationModel) -> bool:
        comps = model.saturated.components
        if not all(
            ident.recheck(comps)
            for c in self.components
            for ident in c.identities
        ):
            return False
        if self.witness_arc is not None:
            again = arc_limit_direction(comps, self.witness_arc, self.witness_arc_t)
            if again != self.witness:
                return False
        return True


def certify_transversal(
    model: FoliationModel,
    q: Point,
    max_degree: int = 2,
) -> TransversalityVerdict:
    """Try to certify that leaf limit directions at q meet the cone of the
    singular set only in zero.

    For each cone component with free slots S, every saturated component
    P_i (i in S) must be expressible as d_i * P_i = sum_{j not in S} g_j P_j
    with d_i(q) certified nonzero.
    """
    ctx = model.ctx
    check_point(q, ctx)
    cone = c4_cone(model.singular, q)
    comps = model.saturated.components
    results: list[ComponentTransversality] = []
    all_yes = True
    for component in cone.components:
        S = tuple(sorted(component))
        allowed = [j for j in range(ctx.nvars) if j not in component]
        idents: list[SyzygyIdentity] = []
        failed = ""
        for i in S:
            ident = find_syzygy(comps, i, allowed, point=q, max_degree=max_degree)
            if ident is None:
                failed = (
                    f"no identity for component {ctx.vars[i]} within degree {max_degree}"
                )
                break
            idents.append(ident)
        if failed:
            results.append(
                ComponentTransversality(S, Status.UNKNOWN, tuple(idents), failed)
            )
            all_yes = False
        else:
            results.append(
                ComponentTransversality(S, Status.CERTIFIED_YES, tuple(idents))
            )
    status = Status.CERTIFIED_YES if all_yes else Status.UNKNOWN
    reason = "" if all_yes else "; ".join(
        r.reason for r in results if r.status is not Status.CERTIFIED_YES
    )
    return TransversalityVerdict(q, status, "exact", tuple(results), reason)


def _point_as_polys(q: Point, sctx: VarContext) -> list[Polynomial] | None:
    """Base coordinates as polynomials over an arc context, or None when a
    coordinate is algebraic (arcs are generated over Q(i) only)."""
    out = []
    for v in q:
        if isinstance(v, ParamValue):
            out.append(Polynomial.variable(sctx, v.name))
        elif isinstance(v, GaussianRational):
            out.append(Polynomial.constant(sctx, v))
        else:
            return None
    return out


def generate_arcs(
    ctx: VarContext,
    q: Point,
    max_exponent: int = 3,
    budget: int = 120,
    n_random: int = 8,
    seed: int = 0,
    t_name: str = "t",
) -> Iterator[tuple[str, tuple[Polynomial, ...], str]]:
    """Arcs q + (c_1 t^{m_1}, ..., c_N t^{m_N}) anchored at q.

    Enumerates every sign pattern c in {0,1,-1}^N with exponent vectors of
    growing total, up to the budget, then appends seeded rational-coefficient
    arcs.  Yields (label, curve, t_name); empty when q has an algebraic
    coordinate.
    """
    sctx = VarContext((t_name,), ctx.params, ctx.side_conditions)
    base = _point_as_polys(q, sctx)
    if base is None:
        return
    n = ctx.nvars
    t_pow = {k: Polynomial.variable(sctx, t_name) ** k for k in range(1, max_exponent + 1)}
    patterns = [c for c in product((1, -1, 0), repeat=n) if any(c)]
    exps = sorted(product(range(1, max_exponent + 1), repeat=n), key=lambda m: (sum(m), m))

    def arc(coeffs: Sequence[GaussianRational], m: Sequence[int]):
        curve = tuple(
            base[i] if coeffs[i] == _ZERO else base[i] + t_pow[m[i]].scale(coeffs[i])
            for i in range(n)
        )
        shown = ", ".join(
            f"{c}*t^{k}" if k > 1 else f"{c}*t" for c, k in zip(coeffs, m)
        )
        return f"arc q + ({shown})", curve, t_name

    count = 0
    for m in exps:
        for c in patterns:
            if count >= budget:
                break
            yield arc([GaussianRational(v) for v in c], m)
            count += 1
        if count >= budget:
            break
    rng = random.Random(seed)
    for _ in range(n_random):
        coeffs = [
            GaussianRational(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
            for _ in range(n)
        ]
        if all(c == _ZERO for c in coeffs):
            continue
        m = [rng.randint(1, max_exponent) for _ in range(n)]
        yield arc(coeffs, m)


def _declared_arcs(
    ctx: VarContext, q: Point, candidates: Sequence[SeparatrixCandidate], notes: list[str]
) -> Iterator[tuple[str, tuple[Polynomial, ...], str]]:
    for cand in candidates:
        label = cand.label or "declared curve"
        if len(cand.curve) != ctx.nvars:
            notes.append(f"{label}: wrong arity")
            continue
        sctx = cand.curve_ctx()
        t_slot = sctx.slot(cand.t_name)
        at0 = [c.coefficient_in(t_slot, 0) for c in cand.curve]
        if not all(_values_match(a, w) for a, w in zip(at0, q)):
            notes.append(f"{label}: not anchored at the point")
            continue
        yield label, cand.curve, cand.t_name


def falsify_transversal(
    model: FoliationModel,
    q: Point,
    candidates: Sequence[SeparatrixCandidate] = (),
    max_exponent: int = 3,
    arc_budget: int = 120,
    n_random: int = 8,
    seed: int = 0,
) -> TransversalityVerdict:
    """Look for a leaf limit direction inside the cone of the singular set.

    An arc anchored at q along which the field has a lowest-order coefficient
    vector supported in one cone component, with an entry certified nonzero,
    witnesses such a direction: the nonzero entry forces the arc off the
    singular set for small t, and the normalized field along it converges to
    the stored direction.  Declared curves are tried first, then generated
    arcs.  The arc itself need not be tangent to the field.
    """
    ctx = model.ctx
    check_point(q, ctx)
    cone = c4_cone(model.singular, q)
    comps = model.saturated.components
    notes: list[str] = []
    if not cone.components:
        return TransversalityVerdict(
            q, Status.UNKNOWN, "exact", (),
            "the singular cone at the point has no components",
        )

    def arcs():
        yield from _declared_arcs(ctx, q, candidates, notes)
        yield from generate_arcs(
            ctx, q, max_exponent=max_exponent, budget=arc_budget,
            n_random=n_random, seed=seed,
        )

    tried = 0
    for label, curve, t_name in arcs():
        tried += 1
        direction = arc_limit_direction(comps, curve, t_name)
        if direction is None:
            if tried <= len(candidates):
                notes.append(f"{label}: the field vanishes along the curve")
            continue
        for component in cone.components:
            dec, why = _direction_in_component(direction, component)
            if dec is Decision.YES:
                return TransversalityVerdict(
                    q, Status.CERTIFIED_NO, "exact", (),
                    "a leaf limit direction lies inside the singular cone",
                    witness=direction,
                    witness_component=tuple(sorted(component)),
                    witness_arc=curve,
                    witness_arc_t=t_name,
                    witness_arc_label=label,
                )
            if dec is Decision.UNKNOWN and tried <= len(candidates):
                notes.append(f"{label}: {why}")
    notes.append(f"no falsifying direction among {tried} arcs")
    return TransversalityVerdict(q, Status.UNKNOWN, "exact", (), "; ".join(notes))


def sample_foliation_cone(
    model: FoliationModel,
    q: Point,
    max_exponent: int = 3,
    budget: int = 120,
    n_random: int = 8,
    seed: int = 0,
) -> list[Direction]:
    """Deduplicated exact limit directions of the field along generated arcs:
    an inner approximation of the projectivized foliation cone at q."""
    check_point(q, model.ctx)
    comps = model.saturated.components
    seen: dict[tuple[str, ...], Direction] = {}
    for _, curve, t_name in generate_arcs(
        model.ctx, q, max_exponent=max_exponent, budget=budget,
        n_random=n_random, seed=seed,
    ):
        d = arc_limit_direction(comps, curve, t_name)
        if d is None:
            continue
        key = tuple(str(e) for e in d.entries)
        seen.setdefault(key, d)
    return list(seen.values())


def transversality_at(
    model: FoliationModel,
    q: Point,
    candidates: Sequence[SeparatrixCandidate] = (),
    max_degree: int = 2,
    max_exponent: int = 3,
    arc_budget: int = 120,
) -> TransversalityVerdict:
    """Falsification first (cheap), then certification; both routes stay
    independent and the first certified answer wins."""
    no = falsify_transversal(
        model, q, candidates, max_exponent=max_exponent, arc_budget=arc_budget
    )
    if no.status is Status.CERTIFIED_NO:
        return no
    yes = certify_transversal(model, q, max_degree=max_degree)
    if yes.status is Status.CERTIFIED_YES:
        return yes
    reason = yes.reason or no.reason
    return TransversalityVerdict(q, Status.UNKNOWN, "exact", yes.components, reason)


# --------------------------------------------------------------------------
# exceptional sets


def exceptional_set(
    model: FoliationModel,
    component: Slice,
    verdict: ComponentTransversality,
) -> Variety:
    """Locus inside a singular-set component where the certificate's scale
    polynomials vanish (transversality is certified off this set)."""
    ctx = model.ctx
    d = verdict.scale_product(ctx)
    restricted = d.substitute_values(component.assignment_map())
    free = [n for n in ctx.vars if n not in component.assignment_map()]
    sub = VarContext(tuple(free), ctx.params, ctx.side_conditions)
    return solve_variety([restricted.map_context(sub)])


def exceptional_is_finite(exc: Variety) -> Decision:
    if exc.residuals:
        return Decision.UNKNOWN
    if all(s.dim <= 0 for s in exc.slices):
        return Decision.YES
    return Decision.NO


# --------------------------------------------------------------------------
# numeric sampling (evidence only)


def numeric_cone_probe(
    model: FoliationModel,
    q: Point,
    scales: Sequence[float] = (1e-3, 1e-4, 1e-5),
    n_random: int = 8,
    seed: int = 0,
    tol: float = 1e-3,
) -> list[np.ndarray]:
    """Sample limit directions of the saturated field near q, numerically.

    Probes deterministic sign patterns and a few seeded rational offsets at
    shrinking scales, keeping directions stable across the last two scales.
    Returns unit vectors (largest entry 1 in modulus); purely numeric and
    never feeds a verdict.
    """
    ctx = model.ctx
    if not point_is_rational(q):
        raise FoliaError("numeric cone sampling needs a rational base point")
    from .integrate import compile_field

    f = compile_field(model.saturated.components)
    base = np.array([v.to_complex() for v in q], dtype=complex)
    n = ctx.nvars

    offsets: list[np.ndarray] = []
    for i in range(n):
        e = np.zeros(n, dtype=complex)
        e[i] = 1.0
        offsets.append(e)
        e2 = np.zeros(n, dtype=complex)
        e2[i] = 1j
        offsets.append(e2)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros(n, dtype=complex)
            e[i] = 1.0
            e[j] = 1.0
            offsets.append(e)
    offsets.append(np.ones(n, dtype=complex))
    offsets.append(np.array([(-1.0) ** i for i in range(n)], dtype=complex))
    rng = random.Random(seed)
    for _ in range(n_random):
        offsets.append(
            np.array(
                [
                    complex(Fraction(rng.randint(-9, 9), 10), Fraction(rng.randint(-9, 9), 10))
                    for _ in range(n)
                ],
                dtype=complex,
            )
        )

    found: list[np.ndarray] = []
    for off in offsets:
        dirs = []
        for s in scales:
            v = f(base + s * off)
            m = np.max(np.abs(v))
            if m < 1e-14:
                dirs.append(None)
                continue
            v = v / v[int(np.argmax(np.abs(v)))]
            dirs.append(v)
        if dirs[-1] is None or dirs[-2] is None:
            continue
        if np.max(np.abs(dirs[-1] - dirs[-2])) > tol:
            continue  # not settled: no limit direction along this ray
        v = dirs[-1]
        if not any(np.max(np.abs(v - u)) < 10 * tol for u in found):
            found.append(v)
    return found


def sampled_cone_conflicts(
    directions: Sequence[np.ndarray],
    cone: ConeAtPoint,
    tol: float = 1e-6,
) -> list[tuple[int, tuple[int, ...]]]:
    """Indices of sampled directions numerically supported inside a cone
    component: evidence against transversality, never a certificate."""
    out = []
    for k, v in enumerate(directions):
        for component in cone.components:
            off = [abs(v[i]) for i in range(len(v)) if i not in component]
            inside = max(abs(v[i]) for i in component) if component else 0.0
            if off and max(off) < tol and inside > 0.5:
                out.append((k, tuple(sorted(component))))
                break
            if not off and inside > 0.5:
                out.append((k, tuple(sorted(component))))
                break
    return out
