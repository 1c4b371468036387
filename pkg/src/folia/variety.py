"""Zero sets of polynomial families as unions of coordinate slices.

The solver branches on factor splits, assigns single-variable factors,
eliminates variable-linear generators exactly, and reports anything it cannot
express as coordinate slices as an honest residual branch rather than
guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .context import (
    AlgebraicValue,
    Decision,
    ParamValue,
    Point,
    PointValue,
    VarContext,
    decide_value_eq,
    format_point,
    point_key,
    value_key,
    value_str,
)
from .errors import (
    FoliaError,
    PointNotInVariety,
    ResidualPresent,
    UndecidedParameter,
)
from .evaluate import decide_param_polynomial, poly_eval, slice_residuals
from .factor import FactorSplit, PreparedFactorization, factor_split
from .gaussian import GaussianRational
from .polynomial import Polynomial

Assignments = tuple[tuple[str, PointValue], ...]


def _sorted_assignments(ctx: VarContext, mapping: Mapping[str, PointValue]) -> Assignments:
    return tuple(sorted(mapping.items(), key=lambda kv: ctx.slot(kv[0])))


@dataclass(frozen=True)
class Slice:
    """A coordinate slice: finitely many coordinates frozen at point values."""

    ctx: VarContext
    assignments: Assignments

    @classmethod
    def of(cls, ctx: VarContext, mapping: Mapping[str, PointValue]) -> "Slice":
        coerced = {
            name: GaussianRational(v) if isinstance(v, (int, Fraction)) else v
            for name, v in mapping.items()
        }
        for name in coerced:
            if name not in ctx.vars:
                raise FoliaError(f"slice freezes unknown variable {name!r}")
        algs = {v.key() for v in coerced.values() if isinstance(v, AlgebraicValue)}
        if len(algs) > 1:
            raise FoliaError("slice carries two distinct algebraic values")
        return cls(ctx, _sorted_assignments(ctx, coerced))

    @property
    def dim(self) -> int:
        return self.ctx.nvars - len(self.assignments)

    @property
    def frozen_vars(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.assignments)

    @property
    def free_vars(self) -> tuple[str, ...]:
        frozen = set(self.frozen_vars)
        return tuple(v for v in self.ctx.vars if v not in frozen)

    def assignment_map(self) -> dict[str, PointValue]:
        return dict(self.assignments)

    def key(self) -> tuple:
        return tuple((self.ctx.slot(n), value_key(v)) for n, v in self.assignments)

    def constraint_set(self) -> frozenset:
        return frozenset((n, value_key(v)) for n, v in self.assignments)

    def __str__(self) -> str:
        if not self.assignments:
            return "{whole space}"
        inner = ", ".join(f"{n} = {value_str(v)}" for n, v in self.assignments)
        return "{" + inner + "}"


@dataclass(frozen=True)
class ResidualBranch:
    """A part of the zero set the slice machinery could not decompose."""

    assignments: Assignments
    pending: tuple[tuple[str, Polynomial], ...]
    generators: tuple[Polynomial, ...]
    reason: str

    def key(self) -> tuple:
        return (
            tuple((n, value_key(v)) for n, v in self.assignments),
            tuple((n, p.sort_key()) for n, p in self.pending),
            tuple(p.sort_key() for p in self.generators),
            self.reason,
        )

    def __str__(self) -> str:
        parts = [f"{n} = {value_str(v)}" for n, v in self.assignments]
        parts += [f"{n} := {p}" for n, p in self.pending]
        parts += [f"{p} = 0" for p in self.generators]
        return "residual{" + "; ".join(parts) + f"}} ({self.reason})"


@dataclass(frozen=True)
class Variety:
    ctx: VarContext
    generators: tuple[Polynomial, ...]
    slices: tuple[Slice, ...]
    residuals: tuple[ResidualBranch, ...]

    @property
    def is_empty(self) -> bool:
        return not self.slices and not self.residuals

    def dimensions(self) -> tuple[int, ...]:
        if self.residuals:
            raise ResidualPresent(
                "variety has residual branches; dimensions are undecided"
            )
        return tuple(sorted({s.dim for s in self.slices}))

    def components_by_dimension(self) -> dict[int, tuple[Slice, ...]]:
        if self.residuals:
            raise ResidualPresent(
                "variety has residual branches; decomposition is undecided"
            )
        out: dict[int, list[Slice]] = {}
        for s in self.slices:
            out.setdefault(s.dim, []).append(s)
        return {d: tuple(v) for d, v in sorted(out.items())}

    def max_dimension(self) -> int:
        if self.residuals:
            raise ResidualPresent("variety has residual branches")
        return max((s.dim for s in self.slices), default=-1)


# --------------------------------------------------------------------------
# solver


@dataclass
class _Branch:
    assign: dict[str, PointValue]
    pending: list[tuple[str, Polynomial]]
    gens: list[Polynomial]
    alg: AlgebraicValue | None = None


class _Solver:
    MAX_STEPS = 20000

    def __init__(
        self,
        ctx: VarContext,
        declared: Sequence[PreparedFactorization],
        auto_quadratic: bool,
    ):
        self.ctx = ctx
        self.declared = tuple(declared)
        self.auto_quadratic = auto_quadratic
        self.slices: list[Slice] = []
        self.residuals: list[ResidualBranch] = []
        self.steps = 0

    # -- helpers ----------------------------------------------------------

    def _split(self, p: Polynomial) -> FactorSplit:
        return factor_split(p, self.declared, self.auto_quadratic)

    def _residual(self, br: _Branch, reason: str) -> None:
        self.residuals.append(
            ResidualBranch(
                _sorted_assignments(self.ctx, br.assign),
                tuple(sorted(br.pending, key=lambda t: self.ctx.slot(t[0]))),
                tuple(sorted((g.monic() for g in br.gens), key=Polynomial.sort_key)),
                reason,
            )
        )

    def _apply_assignment(self, br: _Branch, var: str, value: PointValue) -> bool:
        """Substitute var := value everywhere; False kills the branch."""
        prev = br.assign.get(var)
        if prev is not None:
            dec = decide_value_eq(prev, value, self.ctx)
            if dec is Decision.YES:
                return True
            if dec is Decision.NO:
                return False
            self._residual(br, f"conflicting values for {var} undecided by side conditions")
            return False
        if isinstance(value, AlgebraicValue):
            if br.alg is not None and br.alg != value:
                self._residual(br, "second distinct algebraic coordinate unsupported")
                return False
            if any(var in expr.vars_present() for _, expr in br.pending):
                self._residual(br, "pending elimination meets an algebraic value")
                return False
            br.alg = value
            slot = self.ctx.slot(var)
            new_gens: list[Polynomial] = []
            for g in br.gens:
                for r in slice_residuals(g, {var: value}):
                    new_gens.append(r)
            br.gens = new_gens
        else:
            sub = {var: value}
            br.gens = [g.substitute_values(sub) for g in br.gens]
            br.pending = [
                (n, e.substitute_values(sub) if var in e.vars_present() else e)
                for n, e in br.pending
            ]
        br.assign[var] = value
        return True

    def _simplify(self, br: _Branch) -> bool:
        """Drop zero/settled generators; False kills the branch."""
        out: list[Polynomial] = []
        seen: set = set()
        for g in br.gens:
            if g.is_zero:
                continue
            if g.is_constant_in_vars():
                dec = decide_param_polynomial(g)
                if dec is Decision.YES:
                    return False  # generator certified nonzero: empty branch
                if dec is Decision.NO:
                    continue
                self._residual(br, f"parameter-only generator {g} undecided")
                return False
            g = g.monic()
            k = g.sort_key()
            if k not in seen:
                seen.add(k)
                out.append(g)
        out.sort(key=Polynomial.sort_key)
        br.gens = out
        return True

    def _factor_value(self, f) -> PointValue:
        return GaussianRational(0) if f.kind == "monomial" else f.value

    def _try_linear_elimination(self, br: _Branch) -> bool:
        for gi, g in enumerate(br.gens):
            if g.var_total_degree() != 1:
                continue
            nv = self.ctx.nvars
            for slot in range(nv):
                if g.degree_in(slot) != 1:
                    continue
                coeff = g.coefficient_in(slot, 1)
                if not coeff.is_constant:
                    continue
                c = coeff.constant_value()
                var = self.ctx.vars[slot]
                vpoly = Polynomial.variable(self.ctx, var)
                rest = g - vpoly.scale(c)
                if slot in rest.slots_present():
                    continue  # cross terms: not a clean linear occurrence
                expr = rest.scale(GaussianRational(-1) / c)
                br.gens = br.gens[:gi] + br.gens[gi + 1 :]
                sub = {var: expr}
                br.gens = [p.substitute(sub) for p in br.gens]
                br.pending = [(n, e.substitute(sub)) for n, e in br.pending]
                br.pending.append((var, expr))
                return True
        return False

    def _emit(self, br: _Branch) -> None:
        values = dict(br.assign)
        for var, expr in reversed(br.pending):
            free = expr.vars_present() - set(values)
            if free:
                self._residual(br, "pending elimination does not resolve to a constant")
                return
            point = tuple(
                values.get(v, GaussianRational(0)) for v in self.ctx.vars
            )
            val = poly_eval(expr, point).as_point_value()
            if val is None:
                self._residual(br, "pending elimination resolves outside point values")
                return
            if isinstance(val, AlgebraicValue) and br.alg is not None and val != br.alg:
                self._residual(br, "second distinct algebraic coordinate unsupported")
                return
            values[var] = val
        self.slices.append(Slice.of(self.ctx, values))

    # -- main loop -----------------------------------------------------------

    def run(self, gens: Sequence[Polynomial]) -> None:
        stack = [_Branch({}, [], list(gens))]
        while stack:
            self.steps += 1
            if self.steps > self.MAX_STEPS:
                raise FoliaError("variety solver exceeded its step budget")
            br = stack.pop()
            if not self._simplify(br):
                continue
            if not br.gens:
                self._emit(br)
                continue

            # single-factor assignments make progress without forking
            progressed = False
            for g in list(br.gens):
                sp = self._split(g)
                pm_dec = decide_param_polynomial(sp.param_monomial)
                if pm_dec is not Decision.YES and not sp.param_monomial.is_constant:
                    continue  # handled in the forking stage
                if len(sp.factors) == 1 and sp.factors[0].kind != "residual":
                    f = sp.factors[0]
                    br.gens.remove(g)
                    if not self._apply_assignment(br, f.var, self._factor_value(f)):
                        br = None
                    progressed = True
                    break
            if br is None:
                continue
            if progressed:
                stack.append(br)
                continue

            # forking stage: first generator with something to branch on
            forked = False
            for gi, g in enumerate(br.gens):
                sp = self._split(g)
                pm_dec = decide_param_polynomial(sp.param_monomial)
                pm_unclear = (
                    not sp.param_monomial.is_constant and pm_dec is not Decision.YES
                )
                branchable = len(sp.factors) > 1 or (
                    len(sp.factors) == 1 and sp.factors[0].kind != "residual"
                )
                if not branchable and not pm_unclear:
                    continue
                rest = br.gens[:gi] + br.gens[gi + 1 :]
                if pm_unclear:
                    child = _Branch(dict(br.assign), list(br.pending), list(rest), br.alg)
                    self._residual(
                        child,
                        f"parameter coefficient {sp.param_monomial} of {g} may vanish",
                    )
                for f in sp.factors:
                    child = _Branch(dict(br.assign), list(br.pending), list(rest), br.alg)
                    if f.kind == "residual":
                        child.gens = child.gens + [f.poly]
                        stack.append(child)
                    else:
                        if self._apply_assignment(child, f.var, self._factor_value(f)):
                            stack.append(child)
                forked = True
                break
            if forked:
                continue

            if self._try_linear_elimination(br):
                stack.append(br)
                continue

            self._residual(br, "no splittable generator")


def solve_variety(
    gens: Sequence[Polynomial],
    declared: Sequence[PreparedFactorization] = (),
    auto_quadratic: bool = True,
) -> Variety:
    """Decompose V(gens) into coordinate slices plus honest residuals."""
    if not gens:
        raise FoliaError("solve_variety needs at least one generator")
    ctx = gens[0].ctx
    for g in gens:
        if g.ctx != ctx:
            raise FoliaError("generators from different contexts")
    solver = _Solver(ctx, declared, auto_quadratic)
    solver.run(list(gens))

    # dedupe + absorption (a slice is dropped when a strictly less constrained
    # slice already covers it)
    uniq: dict[tuple, Slice] = {}
    for s in solver.slices:
        uniq.setdefault(s.key(), s)
    slices = list(uniq.values())
    kept: list[Slice] = []
    for s in slices:
        dominated = any(
            o.key() != s.key() and o.constraint_set() <= s.constraint_set()
            for o in slices
        )
        if not dominated:
            kept.append(s)
    kept.sort(key=lambda s: (len(s.assignments), s.key()))

    res_uniq: dict[tuple, ResidualBranch] = {}
    for r in solver.residuals:
        res_uniq.setdefault(r.key(), r)
    residuals = sorted(res_uniq.values(), key=ResidualBranch.key)

    canon_gens = tuple(sorted((g.monic() for g in gens if not g.is_zero), key=Polynomial.sort_key))
    return Variety(ctx, canon_gens, tuple(kept), tuple(residuals))


# --------------------------------------------------------------------------
# membership and cones


@dataclass(frozen=True)
class MembershipCheck:
    point: Point
    status: Decision
    containing: tuple[Slice, ...]
    conditional: tuple[tuple[Slice, tuple[str, ...]], ...]
    notes: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.status is Decision.YES


def slice_membership(s: Slice, point: Point) -> tuple[Decision, tuple[str, ...]]:
    """Does the point lie on the slice, given side conditions?"""
    ctx = s.ctx
    conditions: list[str] = []
    for name, val in s.assignments:
        got = point[ctx.slot(name)]
        dec = decide_value_eq(got, val, ctx)
        if dec is Decision.NO:
            return Decision.NO, ()
        if dec is Decision.UNKNOWN:
            conditions.append(f"{name}: {value_str(got)} == {value_str(val)}")
    if conditions:
        return Decision.UNKNOWN, tuple(conditions)
    return Decision.YES, ()


def contains_point(v: Variety, point: Point) -> MembershipCheck:
    """Certified membership of a point in the slice union."""
    if len(point) != v.ctx.nvars:
        raise FoliaError("point arity does not match the variety's context")
    containing: list[Slice] = []
    conditional: list[tuple[Slice, tuple[str, ...]]] = []
    for s in v.slices:
        dec, conds = slice_membership(s, point)
        if dec is Decision.YES:
            containing.append(s)
        elif dec is Decision.UNKNOWN:
            conditional.append((s, conds))
    notes: list[str] = []
    if containing:
        status = Decision.YES
    elif conditional:
        status = Decision.UNKNOWN
        notes.append("membership depends on parameter coincidences")
    elif v.residuals:
        status = Decision.UNKNOWN
        notes.append("residual branches present; membership undecided")
    else:
        status = Decision.NO
    return MembershipCheck(point, status, tuple(containing), tuple(conditional), tuple(notes))


@dataclass(frozen=True)
class ConeAtPoint:
    """Union of coordinate subspaces: the tangent cone of a slice union."""

    point: Point
    components: tuple[frozenset[int], ...]  # free-variable slot sets
    slices: tuple[Slice, ...]

    def component_names(self, ctx: VarContext) -> list[tuple[str, ...]]:
        return [tuple(ctx.vars[i] for i in sorted(c)) for c in self.components]


def c4_cone(v: Variety, point: Point) -> ConeAtPoint:
    """Tangent cone of the slice union at a certified member point.

    Refuses (rather than guesses) when residual branches or undecided
    parameter coincidences could change the answer.
    """
    if v.residuals:
        raise ResidualPresent("cone undefined while residual branches remain")
    chk = contains_point(v, point)
    if chk.status is Decision.NO:
        raise PointNotInVariety(f"{format_point(point)} is not in the variety")
    if chk.status is Decision.UNKNOWN or chk.conditional:
        raise UndecidedParameter(
            "cone needs certain membership; side conditions leave slices undecided"
        )
    comps: list[frozenset[int]] = []
    for s in chk.containing:
        frozen = {v.ctx.slot(n) for n in s.frozen_vars}
        comps.append(frozenset(i for i in range(v.ctx.nvars) if i not in frozen))
    # drop components contained in others
    kept = [
        c
        for c in comps
        if not any(c < o for o in comps)
    ]
    uniq = sorted(set(kept), key=lambda c: (len(c), sorted(c)))
    return ConeAtPoint(point, tuple(uniq), chk.containing)


def merge_assignments(
    ctx: VarContext, a: Mapping[str, PointValue], b: Mapping[str, PointValue]
) -> tuple[Decision, dict[str, PointValue] | None, tuple[str, ...]]:
    """Intersection of two coordinate slices as a slice, when decidable."""
    merged = dict(a)
    conds: list[str] = []
    for name, val in b.items():
        cur = merged.get(name)
        if cur is None:
            merged[name] = val
            continue
        dec = decide_value_eq(cur, val, ctx)
        if dec is Decision.NO:
            return Decision.NO, None, ()
        if dec is Decision.UNKNOWN:
            conds.append(f"{name}: {value_str(cur)} == {value_str(val)}")
    if conds:
        return Decision.UNKNOWN, None, tuple(conds)
    algs = {v.key() for v in merged.values() if isinstance(v, AlgebraicValue)}
    if len(algs) > 1:
        return Decision.UNKNOWN, None, ("two distinct algebraic values meet",)
    return Decision.YES, merged, ()
