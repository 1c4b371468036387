"""Exact evaluation of polynomials at points whose coordinates may be
rational, parametric, or one algebraic value.

Evaluation results are ExtValue: a polynomial in the parameters and (at most)
one root symbol theta, kept reduced modulo theta's minimal polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .context import (
    AlgebraicValue,
    Decision,
    ParamValue,
    Point,
    PointValue,
    VarContext,
    check_point,
)
from .errors import FoliaError, MixedAlgebraics
from .gaussian import GaussianRational
from .polynomial import Polynomial

_Key = tuple[int, ...]  # param exponents + one trailing theta exponent


def _theta_powers(minpoly: tuple[GaussianRational, ...], upto: int) -> list[list[GaussianRational]]:
    """theta^k for k <= upto as coefficient rows over theta^0..theta^{d-1}."""
    d = len(minpoly) - 1
    rows: list[list[GaussianRational]] = []
    for k in range(upto + 1):
        if k < d:
            row = [GaussianRational(0)] * d
            row[k] = GaussianRational(1)
        else:
            prev = rows[k - 1]
            row = [GaussianRational(0)] * d
            # theta * prev: shift, then fold theta^d = -(c0 + ... + c_{d-1} theta^{d-1})
            top = prev[d - 1]
            for j in range(d - 1):
                row[j + 1] = row[j + 1] + prev[j]
            if top:
                for j in range(d):
                    row[j] = row[j] - top * minpoly[j]
        rows.append(row)
    return rows


class ExtValue:
    """Element of Q(i)[params][theta]/(m(theta)); theta optional."""

    __slots__ = ("params", "alg", "terms")

    def __init__(
        self,
        params: tuple[str, ...],
        alg: AlgebraicValue | None,
        terms: Mapping[_Key, GaussianRational],
    ):
        clean: dict[_Key, GaussianRational] = {}
        width = len(params) + 1
        for e, c in terms.items():
            if len(e) != width:
                raise FoliaError("ExtValue key width mismatch")
            if not c.is_zero:
                clean[e] = c
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "alg", alg)
        object.__setattr__(self, "terms", clean)
        if alg is not None:
            self._reduce()

    def __setattr__(self, name, value):
        raise AttributeError("ExtValue is immutable")

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls, params: tuple[str, ...], alg: AlgebraicValue | None = None) -> "ExtValue":
        return cls(params, alg, {})

    @classmethod
    def rational(cls, params: tuple[str, ...], c, alg: AlgebraicValue | None = None) -> "ExtValue":
        key = (0,) * (len(params) + 1)
        return cls(params, alg, {key: GaussianRational.from_value(c)})

    @classmethod
    def from_value(
        cls, params: tuple[str, ...], v: PointValue, alg: AlgebraicValue | None
    ) -> "ExtValue":
        n = len(params)
        if isinstance(v, GaussianRational):
            return cls.rational(params, v, alg)
        if isinstance(v, ParamValue):
            e = [0] * (n + 1)
            e[params.index(v.name)] = 1
            return cls(params, alg, {tuple(e): GaussianRational(1)})
        if isinstance(v, AlgebraicValue):
            if alg is None or alg != v:
                raise MixedAlgebraics("algebraic value does not match evaluation root")
            e = [0] * (n + 1)
            e[n] = 1
            return cls(params, alg, {tuple(e): GaussianRational(1)})
        raise FoliaError(f"unsupported point value {v!r}")

    # -- reduction -----------------------------------------------------------

    def _reduce(self) -> None:
        assert self.alg is not None
        d = self.alg.degree
        n = len(self.params)
        high = [e for e in self.terms if e[n] >= d]
        if not high:
            return
        maxk = max(e[n] for e in high)
        rows = _theta_powers(self.alg.minpoly, maxk)
        terms = dict(self.terms)
        for e in high:
            c = terms.pop(e)
            row = rows[e[n]]
            for j in range(d):
                if row[j].is_zero:
                    continue
                e2 = e[:n] + (j,)
                cur = terms.get(e2, GaussianRational(0))
                nc = cur + c * row[j]
                if nc.is_zero:
                    terms.pop(e2, None)
                else:
                    terms[e2] = nc
        object.__setattr__(self, "terms", terms)

    # -- arithmetic -------------------------------------------------------------

    def _compat(self, other: "ExtValue") -> None:
        if self.params != other.params or self.alg != other.alg:
            raise FoliaError("ExtValue operands from different evaluations")

    def __add__(self, other: "ExtValue") -> "ExtValue":
        self._compat(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            cur = terms.get(e)
            terms[e] = c if cur is None else cur + c
        return ExtValue(self.params, self.alg, terms)

    def __neg__(self) -> "ExtValue":
        return ExtValue(self.params, self.alg, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "ExtValue") -> "ExtValue":
        return self + (-other)

    def __mul__(self, other: "ExtValue") -> "ExtValue":
        self._compat(other)
        terms: dict[_Key, GaussianRational] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                c = ca * cb
                cur = terms.get(e)
                terms[e] = c if cur is None else cur + c
        return ExtValue(self.params, self.alg, terms)

    def __pow__(self, k: int) -> "ExtValue":
        out = ExtValue.rational(self.params, 1, self.alg)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # -- inspection ------------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def theta_coefficients(self) -> list[dict[tuple[int, ...], GaussianRational]]:
        """Coefficient dicts over the parameters, indexed by theta power."""
        d = self.alg.degree if self.alg is not None else 1
        n = len(self.params)
        out: list[dict[tuple[int, ...], GaussianRational]] = [dict() for _ in range(d)]
        for e, c in self.terms.items():
            out[e[n]][e[:n]] = c
        return out

    def as_rational(self) -> GaussianRational | None:
        if self.is_zero:
            return GaussianRational(0)
        if len(self.terms) != 1:
            return None
        e, c = next(iter(self.terms.items()))
        return c if not any(e) else None

    def as_point_value(self) -> PointValue | None:
        r = self.as_rational()
        if r is not None:
            return r
        if len(self.terms) != 1:
            return None
        e, c = next(iter(self.terms.items()))
        n = len(self.params)
        if not c.is_one or sum(e) != 1:
            return None
        if e[n] == 1:
            return self.alg
        return ParamValue(self.params[e.index(1)])

    def to_polynomial(self, ctx: VarContext) -> Polynomial:
        """Re-home a theta-free value as a variable-free polynomial."""
        if self.alg is not None and any(e[len(self.params)] for e in self.terms):
            raise FoliaError("cannot re-home a value carrying a root symbol")
        terms = {}
        n = len(self.params)
        for e, c in self.terms.items():
            full = [0] * ctx.nslots
            for j, k in enumerate(e[:n]):
                if k:
                    full[ctx.slot(self.params[j])] = k
            terms[tuple(full)] = c
        return Polynomial(ctx, terms)

    def decide_nonzero(self, ctx: VarContext) -> Decision:
        """Is this value nonzero for every admissible parameter choice?"""
        if self.is_zero:
            return Decision.NO
        if self.alg is None:
            return _decide_param_dict(dict(self.terms), self.params, ctx, strip_theta=True)
        for coeffs in self.theta_coefficients():
            if coeffs and _decide_param_dict(
                {e + (0,): c for e, c in coeffs.items()}, self.params, ctx, strip_theta=True
            ) is Decision.YES:
                return Decision.YES
        return Decision.UNKNOWN

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        names = self.params + ("theta",)
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True):
            mono = "*".join(
                f"{names[s]}^{k}" if k > 1 else names[s] for s, k in enumerate(e) if k
            )
            if mono:
                head = "" if c.is_one else f"({c})*" if c.im else f"{c}*"
                parts.append(head + mono)
            else:
                parts.append(f"({c})" if c.im and c.re else str(c))
        return " + ".join(parts).replace("+ -", "- ")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtValue):
            return NotImplemented
        return (
            self.params == other.params
            and self.alg == other.alg
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(
            (self.params, self.alg, tuple(sorted((e, c.re, c.im) for e, c in self.terms.items())))
        )


def _decide_param_dict(
    terms: dict[_Key, GaussianRational],
    params: tuple[str, ...],
    ctx: VarContext,
    strip_theta: bool = False,
) -> Decision:
    """Nonzero-for-all-admissible-parameters decision on a parameter polynomial."""
    if not terms:
        return Decision.NO
    n = len(params)
    keys = [e[:n] if strip_theta else e for e in terms]
    coeffs = list(terms.values())
    if len(keys) == 1:
        e = keys[0]
        if not any(e):
            return Decision.YES
        # monomial c * prod p_j^k: nonzero iff every participating p_j != 0
        for j, k in enumerate(e):
            if k and GaussianRational(0) not in ctx.excluded_values(params[j]):
                return Decision.UNKNOWN
        return Decision.YES
    # factor out the common monomial, then look for a linear univariate shape
    mins = [min(e[j] for e in keys) for j in range(n)]
    for j, k in enumerate(mins):
        if k and GaussianRational(0) not in ctx.excluded_values(params[j]):
            return Decision.UNKNOWN
    reduced = [tuple(x - y for x, y in zip(e, mins)) for e in keys]
    active = {j for e in reduced for j, k in enumerate(e) if k}
    if len(active) == 1:
        j = next(iter(active))
        degs = sorted(e[j] for e in reduced)
        if degs == [0, 1]:
            c0 = c1 = GaussianRational(0)
            for e, c in zip(reduced, coeffs):
                if e[j] == 0:
                    c0 = c
                else:
                    c1 = c
            root = -c0 / c1
            if root in ctx.excluded_values(params[j]):
                return Decision.YES
    return Decision.UNKNOWN


def decide_param_polynomial(p: Polynomial) -> Decision:
    """Nonzero-for-all-admissible-parameters decision for a variable-free
    polynomial, using the context's side conditions."""
    nv = p.ctx.nvars
    if any(any(e[:nv]) for e in p.terms):
        raise FoliaError("decide_param_polynomial needs a variable-free polynomial")
    terms = {e[nv:] + (0,): c for e, c in p.terms.items()}
    return _decide_param_dict(terms, p.ctx.params, p.ctx, strip_theta=True)


def poly_eval(p: Polynomial, point: Point) -> ExtValue:
    """Evaluate at a point over p's context (variables get point values)."""
    ctx = p.ctx
    check_point(point, ctx)
    alg: AlgebraicValue | None = None
    for v in point:
        if isinstance(v, AlgebraicValue):
            alg = v
            break
    params = ctx.params
    n = len(params)
    out = ExtValue.zero(params, alg)
    val_cache: dict[int, ExtValue] = {}
    for e, c in p.terms.items():
        term = ExtValue.rational(params, c, alg)
        pe = [0] * (n + 1)
        for s, k in enumerate(e):
            if not k:
                continue
            if s < ctx.nvars:
                base = val_cache.get(s)
                if base is None:
                    base = ExtValue.from_value(params, point[s], alg)
                    val_cache[s] = base
                term = term * base**k
            else:
                pe[s - ctx.nvars] += k
        if any(pe):
            term = term * ExtValue(params, alg, {tuple(pe): GaussianRational(1)})
        out = out + term
    return out


# -- slice substitution -------------------------------------------------------


def _reduce_by_minpoly(p: Polynomial, slot: int, minpoly: tuple[GaussianRational, ...]) -> Polynomial:
    """Remainder of p under theta^d = -(lower terms) in the given slot."""
    d = len(minpoly) - 1
    ctx = p.ctx
    mp_terms = {}
    for k, c in enumerate(minpoly):
        e = [0] * ctx.nslots
        e[slot] = k
        mp_terms[tuple(e)] = c
    m = Polynomial(ctx, mp_terms)
    while p.degree_in(slot) >= d:
        e = p.degree_in(slot)
        lead = p.coefficient_in(slot, e)
        shift = [0] * ctx.nslots
        shift[slot] = e - d
        p = p - lead * Polynomial.monomial(ctx, tuple(shift)) * m
    return p


def slice_residuals(p: Polynomial, assignments: Mapping[str, PointValue]) -> list[Polynomial]:
    """Polynomials in the free variables whose simultaneous vanishing is
    equivalent to p vanishing identically on the coordinate slice."""
    plain: dict[str, PointValue] = {}
    alg_vars: list[tuple[str, AlgebraicValue]] = []
    for name, v in assignments.items():
        if isinstance(v, AlgebraicValue):
            alg_vars.append((name, v))
        else:
            plain[name] = v
    alg_vars.sort(key=lambda t: p.ctx.slot(t[0]))
    distinct = {v.key() for _, v in alg_vars}
    if len(distinct) > 1:
        raise MixedAlgebraics("two distinct algebraic values in one slice")
    if len(alg_vars) > 1:
        # same root on several coordinates: unify symbols exactly
        keeper = alg_vars[0][0]
        unify = {
            name: Polynomial.variable(p.ctx, keeper) for name, _ in alg_vars[1:]
        }
        p = p.substitute(unify)
        alg_vars = alg_vars[:1]
    if plain:
        p = p.substitute_values(plain)
    if not alg_vars:
        return [p]
    name, av = alg_vars[0]
    slot = p.ctx.slot(name)
    p = _reduce_by_minpoly(p, slot, av.minpoly)
    return [p.coefficient_in(slot, k) for k in range(av.degree)]


def vanishes_on_slice(p: Polynomial, assignments: Mapping[str, PointValue]) -> bool:
    return all(r.is_zero for r in slice_residuals(p, assignments))


# -- parametric curve substitution ---------------------------------------------


@dataclass(frozen=True)
class CurvePullback:
    """Result of substituting a parametric curve into one polynomial.

    components: residual polynomials in (t, params); the substituted value is
    sum components[k] * theta^k, so 'vanishes identically' means all zero.
    """

    ctx_t: VarContext
    t_name: str
    components: tuple[Polynomial, ...]

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)


def curve_pullback(
    p: Polynomial,
    base: Point,
    offsets: Sequence[Polynomial],
    t_name: str = "_t",
    u_name: str = "_u",
) -> CurvePullback:
    """Substitute x_i := base_i + offsets_i(t) into p.

    offsets live over a context containing t_name (and the parameters); an
    algebraic base coordinate is carried via a fresh symbol reduced by its
    minimal polynomial afterwards.
    """
    ctx = p.ctx
    check_point(base, ctx)
    alg = next((v for v in base if isinstance(v, AlgebraicValue)), None)
    extra = (t_name,) if alg is None else (t_name, u_name)
    ctx_t = VarContext(ctx.vars + extra, ctx.params, ctx.side_conditions)

    bindings: dict[str, Polynomial] = {}
    for idx, name in enumerate(ctx.vars):
        v = base[idx]
        if isinstance(v, GaussianRational):
            b = Polynomial.constant(ctx_t, v)
        elif isinstance(v, ParamValue):
            b = Polynomial.variable(ctx_t, v.name)
        else:
            b = Polynomial.variable(ctx_t, u_name)
        off = offsets[idx]
        if not off.is_zero:
            b = b + off.map_context(ctx_t)
        bindings[name] = b
    image = p.substitute(bindings)
    if alg is None:
        return CurvePullback(ctx_t, t_name, (image,))
    slot = ctx_t.slot(u_name)
    image = _reduce_by_minpoly(image, slot, alg.minpoly)
    comps = tuple(image.coefficient_in(slot, k) for k in range(alg.degree))
    return CurvePullback(ctx_t, t_name, comps)
