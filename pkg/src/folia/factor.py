"""Splitting polynomials into zero-set-relevant factors.

The supported splitting class: monomial factors, linear factors x - c with c
rational, parametric, or an algebraic root, and everything else as honest
residual factors.  Quadratics in one variable with rational coefficients are
decided exactly (rational roots via a Q(i) discriminant square test, else a
verified-irreducible pair of conjugate root factors).  Declared
factorizations extend the class to higher degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .context import AlgebraicValue, ParamValue, PointValue, value_key
from .errors import FoliaError, SemanticError
from .gaussian import GaussianRational
from .gcd import is_squarefree_univariate
from .polynomial import Polynomial


@dataclass(frozen=True)
class Factor:
    """One factor of a split.  poly is the representable polynomial form;
    it is None exactly for algebraic-root factors."""

    kind: str  # "monomial" | "linear" | "residual"
    multiplicity: int
    var: str | None = None
    value: PointValue | None = None
    poly: Polynomial | None = None

    def describe(self) -> str:
        if self.kind == "monomial":
            return f"{self.var}" + (f"^{self.multiplicity}" if self.multiplicity > 1 else "")
        if self.kind == "linear":
            return f"{self.var} - ({self.value})"
        return f"[{self.poly}]"

    def sort_token(self, ctx) -> tuple:
        if self.kind == "monomial":
            return (0, ctx.slot(self.var), ())
        if self.kind == "linear":
            return (1, ctx.slot(self.var), value_key(self.value))
        return (2, 0, self.poly.sort_key())


@dataclass(frozen=True)
class FactorSplit:
    """p = unit * param_monomial * prod(var^k) * prod(factors^mult)."""

    unit: GaussianRational
    param_monomial: Polynomial
    factors: tuple[Factor, ...]
    assumptions: tuple[str, ...] = ()

    @property
    def is_trivial(self) -> bool:
        return not self.factors


@dataclass(frozen=True)
class PreparedFactorization:
    """A user-declared factorization, validated and resolved to factors."""

    core_monic: Polynomial
    factors: tuple[Factor, ...]
    assumptions: tuple[str, ...]
    product: Polynomial | None = None
    declared_polys: tuple[Polynomial, ...] = ()

    def remap(self, target_ctx) -> "PreparedFactorization | None":
        """Re-home onto a sub-context when all names survive; else None."""
        if self.product is None:
            return None
        try:
            return prepare_factorization(
                self.product.map_context(target_ctx),
                [f.map_context(target_ctx) for f in self.declared_polys],
            )
        except (FoliaError, KeyError):
            return None


def _linear_factor(var: str, coeff1: Polynomial, coeff0: Polynomial, mult: int) -> Factor | None:
    """Try to express coeff1*v + coeff0 = 0 as v = representable value."""
    if not coeff1.is_constant:
        return None
    c1 = coeff1.constant_value()
    val = coeff0.scale(GaussianRational(-1) / c1)
    if val.is_zero:
        return Factor("monomial", mult, var=var)
    if val.is_constant:
        c = val.constant_value()
        ctx = coeff0.ctx
        poly = Polynomial.variable(ctx, var) - Polynomial.constant(ctx, c)
        return Factor("linear", mult, var=var, value=c, poly=poly)
    if len(val.terms) == 1:
        e, c = next(iter(val.terms.items()))
        if c.is_one and sum(e) == 1:
            slot = e.index(1)
            ctx = coeff0.ctx
            if not ctx.is_var_slot(slot):
                pname = ctx.slot_name(slot)
                poly = Polynomial.variable(ctx, var) - Polynomial.variable(ctx, pname)
                return Factor("linear", mult, var=var, value=ParamValue(pname), poly=poly)
    return None


def _split_univariate(q: Polynomial, var: str, mult: int) -> tuple[list[Factor], GaussianRational, list[str]] | None:
    """Split a content-free polynomial involving exactly one variable."""
    slot = q.ctx.slot(var)
    coeffs = q.as_univariate(slot)
    deg = max(coeffs)
    if deg == 1:
        f = _linear_factor(var, coeffs[1], coeffs.get(0, Polynomial.zero(q.ctx)), mult)
        if f is None:
            return None
        unit = coeffs[1].constant_value() if coeffs[1].is_constant else GaussianRational(1)
        return [f], unit ** mult, []
    if deg == 2 and all(c.is_constant for c in coeffs.values()):
        a = coeffs[2].constant_value()
        b = coeffs.get(1, Polynomial.zero(q.ctx)).constant_value()
        c = coeffs.get(0, Polynomial.zero(q.ctx)).constant_value()
        disc = b * b - GaussianRational(4) * a * c
        sq = disc.sqrt()
        ctx = q.ctx
        v = Polynomial.variable(ctx, var)
        if sq is not None:
            two_a = GaussianRational(2) * a
            r0, r1 = (-b + sq) / two_a, (-b - sq) / two_a
            out: list[Factor] = []
            if r0 == r1:
                out.append(_value_factor(ctx, var, r0, 2 * mult))
            else:
                out.append(_value_factor(ctx, var, r0, mult))
                out.append(_value_factor(ctx, var, r1, mult))
            return out, a ** mult, []
        minpoly = (c / a, b / a, GaussianRational(1))
        roots = [AlgebraicValue(minpoly, 0), AlgebraicValue(minpoly, 1)]
        fs = [Factor("linear", mult, var=var, value=r, poly=None) for r in roots]
        return fs, a ** mult, []
    return None


def _value_factor(ctx, var: str, value: GaussianRational, mult: int) -> Factor:
    if value.is_zero:
        return Factor("monomial", mult, var=var)
    poly = Polynomial.variable(ctx, var) - Polynomial.constant(ctx, value)
    return Factor("linear", mult, var=var, value=value, poly=poly)


def prepare_factorization(product: Polynomial, declared: Sequence[Polynomial]) -> PreparedFactorization:
    """Validate a `factor LHS = f1 * f2 * ...` declaration."""
    if product.is_zero:
        raise SemanticError("declared factorization of the zero polynomial")
    check = Polynomial.one(product.ctx)
    for f in declared:
        check = check * f
    if check != product:
        raise SemanticError(
            f"declared factorization does not multiply back: {product} != {check}"
        )
    counted: dict[tuple, tuple[Polynomial, int]] = {}
    for f in declared:
        key = f.sort_key()
        poly, mult = counted.get(key, (f, 0))
        counted[key] = (poly, mult + 1)

    factors: list[Factor] = []
    assumptions: list[str] = []
    for poly, mult in counted.values():
        mc, core = poly.monomial_content_split()
        nv = poly.ctx.nvars
        for s, k in enumerate(mc):
            if k and s >= nv:
                raise SemanticError("declared factor carries a parameter monomial")
        # pure monomial content is re-derived by factor_split itself
        if core.is_constant:
            continue
        vs = core.vars_present()
        split = _split_univariate(core, next(iter(vs)), mult) if len(vs) == 1 else None
        if split is not None:
            fs, _, notes = split
            factors.extend(fs)
            assumptions.extend(notes)
            continue
        if len(vs) == 1 and not core.params_present():
            var = next(iter(vs))
            slot = core.ctx.slot(var)
            if not is_squarefree_univariate(core, slot):
                raise SemanticError(f"declared factor {core} is not squarefree")
            deg = core.degree_in(slot)
            lc = core.coefficient_in(slot, deg).constant_value()
            monic = core.scale(GaussianRational(1) / lc)
            coeffs = monic.as_univariate(slot)
            mp = tuple(
                coeffs.get(k, Polynomial.zero(core.ctx)).constant_value()
                for k in range(deg + 1)
            )
            assumptions.append(f"declared factor {monic} assumed irreducible over Q(i)")
            for tag in range(deg):
                factors.append(
                    Factor("linear", mult, var=var, value=AlgebraicValue(mp, tag), poly=None)
                )
            continue
        factors.append(Factor("residual", mult, poly=core.monic()))

    # fold the explicit unit into a canonical core polynomial for matching
    _, pcore = product.monomial_content_split()
    return PreparedFactorization(
        pcore.monic(), tuple(factors), tuple(assumptions), product, tuple(declared)
    )


def factor_split(
    p: Polynomial,
    declared: Sequence[PreparedFactorization] = (),
    auto_quadratic: bool = True,
) -> FactorSplit:
    """Split p into tagged factors; the product of all parts rebuilds p."""
    if p.is_zero:
        raise FoliaError("cannot factor the zero polynomial")
    ctx = p.ctx
    content, core = p.monomial_content_split()
    factors: list[Factor] = []
    assumptions: list[str] = []
    nv = ctx.nvars
    param_exps = [0] * ctx.nslots
    for s, k in enumerate(content):
        if not k:
            continue
        if s < nv:
            factors.append(Factor("monomial", k, var=ctx.vars[s]))
        else:
            param_exps[s] = k
    param_monomial = Polynomial.monomial(ctx, tuple(param_exps))
    unit = GaussianRational(1)

    if core.is_constant:
        unit = core.constant_value()
        core = Polynomial.one(ctx)
    else:
        matched = False
        core_monic = core.monic()
        for prep in declared:
            if prep.core_monic == core_monic:
                _, lc = core.leading()
                unit = unit * lc
                factors.extend(prep.factors)
                assumptions.extend(prep.assumptions)
                matched = True
                break
        if not matched:
            vs = core.vars_present()
            split = (
                _split_univariate(core, next(iter(vs)), 1)
                if len(vs) == 1 and auto_quadratic
                else None
            )
            if split is not None:
                fs, u, notes = split
                factors.extend(fs)
                unit = unit * u
                assumptions.extend(notes)
            else:
                factors.append(Factor("residual", 1, poly=core.monic()))
                _, lc = core.leading()
                unit = unit * lc

    factors.sort(key=lambda f: f.sort_token(ctx))
    return FactorSplit(unit, param_monomial, tuple(factors), tuple(assumptions))
