"""Exact multivariate polynomials over Q(i) with named variables/parameters.

Terms are a dict from exponent tuples (variables first, parameters after) to
GaussianRational coefficients.  The monomial order everywhere is graded
lexicographic over the declared slot order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .context import ParamValue, PointValue, VarContext
from .errors import DivisionByZero, FoliaError, NotDivisible, UnknownVariable
from .gaussian import GaussianRational

Exponents = tuple[int, ...]


def _grlex_key(e: Exponents) -> tuple:
    return (sum(e), e)


class Polynomial:
    __slots__ = ("ctx", "terms", "_key")

    def __init__(self, ctx: VarContext, terms: Mapping[Exponents, GaussianRational]):
        clean: dict[Exponents, GaussianRational] = {}
        n = ctx.nslots
        for e, c in terms.items():
            if not isinstance(c, GaussianRational):
                c = GaussianRational.from_value(c)
            if c.is_zero:
                continue
            if len(e) != n:
                raise FoliaError("exponent tuple does not match context")
            clean[e] = c
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ctx: VarContext) -> "Polynomial":
        return cls(ctx, {})

    @classmethod
    def constant(cls, ctx: VarContext, c) -> "Polynomial":
        return cls(ctx, {(0,) * ctx.nslots: GaussianRational.from_value(c)})

    @classmethod
    def one(cls, ctx: VarContext) -> "Polynomial":
        return cls.constant(ctx, 1)

    @classmethod
    def variable(cls, ctx: VarContext, name: str) -> "Polynomial":
        slot = ctx.slot(name)
        e = [0] * ctx.nslots
        e[slot] = 1
        return cls(ctx, {tuple(e): GaussianRational(1)})

    @classmethod
    def monomial(cls, ctx: VarContext, exps: Exponents, coeff=1) -> "Polynomial":
        return cls(ctx, {tuple(exps): GaussianRational.from_value(coeff)})

    # -- basic structure ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        """Constant in every slot (variables and parameters alike)."""
        return all(not any(e) for e in self.terms)

    def is_constant_in_vars(self) -> bool:
        nv = self.ctx.nvars
        return all(not any(e[:nv]) for e in self.terms)

    def constant_value(self) -> GaussianRational:
        if self.is_zero:
            return GaussianRational(0)
        if not self.is_constant:
            raise FoliaError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        """Total degree over all slots; -1 for the zero polynomial."""
        if self.is_zero:
            return -1
        return max(sum(e) for e in self.terms)

    def var_total_degree(self) -> int:
        """Total degree counting variable slots only."""
        if self.is_zero:
            return -1
        nv = self.ctx.nvars
        return max(sum(e[:nv]) for e in self.terms)

    def degree_in(self, slot: int) -> int:
        if self.is_zero:
            return -1
        return max(e[slot] for e in self.terms)

    def slots_present(self) -> set[int]:
        out: set[int] = set()
        for e in self.terms:
            for s, k in enumerate(e):
                if k:
                    out.add(s)
        return out

    def vars_present(self) -> set[str]:
        nv = self.ctx.nvars
        return {self.ctx.vars[s] for s in self.slots_present() if s < nv}

    def params_present(self) -> set[str]:
        nv = self.ctx.nvars
        return {self.ctx.slot_name(s) for s in self.slots_present() if s >= nv}

    def leading(self) -> tuple[Exponents, GaussianRational]:
        """Leading (exponents, coefficient) in graded lex order."""
        if self.is_zero:
            raise FoliaError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def sorted_terms(self, reverse: bool = True) -> list[tuple[Exponents, GaussianRational]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=reverse)

    # -- ring operations -------------------------------------------------------

    def _same(self, other: "Polynomial") -> None:
        if self.ctx != other.ctx:
            raise FoliaError("polynomials from different contexts")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._same(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            terms[e] = c if s is None else s + c
        return Polynomial(self.ctx, terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._same(other)
        terms: dict[Exponents, GaussianRational] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                c = ca * cb
                s = terms.get(e)
                terms[e] = c if s is None else s + c
        return Polynomial(self.ctx, terms)

    def scale(self, c) -> "Polynomial":
        c = GaussianRational.from_value(c)
        return Polynomial(self.ctx, {e: k * c for e, k in self.terms.items()})

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise FoliaError("negative polynomial power")
        out = Polynomial.one(self.ctx)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # -- calculus ----------------------------------------------------------------

    def partial_derivative(self, name: str) -> "Polynomial":
        slot = self.ctx.slot(name)
        terms: dict[Exponents, GaussianRational] = {}
        for e, c in self.terms.items():
            k = e[slot]
            if not k:
                continue
            e2 = list(e)
            e2[slot] = k - 1
            e2t = tuple(e2)
            add = c * k
            s = terms.get(e2t)
            terms[e2t] = add if s is None else s + add
        return Polynomial(self.ctx, terms)

    # -- substitution ---------------------------------------------------------------

    def substitute(self, bindings: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Simultaneously replace named slots by polynomials.

        Bindings may target a different context; all bound polynomials must
        share one target context, and every unbound slot this polynomial
        actually uses must exist there under the same name.
        """
        if not bindings:
            return self
        target = next(iter(bindings.values())).ctx
        for b in bindings.values():
            if b.ctx != target:
                raise FoliaError("substitution bindings disagree on context")
        slot_bind: dict[int, Polynomial] = {self.ctx.slot(n): b for n, b in bindings.items()}
        # unbound slots in use map straight across by name
        passthrough: dict[int, int] = {}
        for s in self.slots_present():
            if s in slot_bind:
                continue
            passthrough[s] = target.slot(self.ctx.slot_name(s))

        out = Polynomial.zero(target)
        pow_cache: dict[tuple[int, int], Polynomial] = {}
        for e, c in self.terms.items():
            term = Polynomial.constant(target, c)
            mono = [0] * target.nslots
            for s, k in enumerate(e):
                if not k:
                    continue
                if s in passthrough:
                    mono[passthrough[s]] += k
                else:
                    key = (s, k)
                    p = pow_cache.get(key)
                    if p is None:
                        p = slot_bind[s] ** k
                        pow_cache[key] = p
                    term = term * p
            if any(mono):
                term = term * Polynomial.monomial(target, tuple(mono))
            out = out + term
        return out

    def substitute_values(self, assignments: Mapping[str, PointValue]) -> "Polynomial":
        """Plug rational/parameter values into variables (same context).

        Algebraic values are deliberately not accepted here; see
        evaluate.slice_residuals for the reduction that handles them.
        """
        bindings: dict[str, Polynomial] = {}
        for name, v in assignments.items():
            if isinstance(v, GaussianRational):
                bindings[name] = Polynomial.constant(self.ctx, v)
            elif isinstance(v, ParamValue):
                bindings[name] = Polynomial.variable(self.ctx, v.name)
            else:
                raise FoliaError(
                    "substitute_values only takes rational or parameter values"
                )
        return self.substitute(bindings) if bindings else self

    def map_context(self, target: VarContext) -> "Polynomial":
        """Re-home onto a context sharing the names this polynomial uses."""
        if target == self.ctx:
            return self
        mapping = {s: target.slot(self.ctx.slot_name(s)) for s in self.slots_present()}
        terms: dict[Exponents, GaussianRational] = {}
        for e, c in self.terms.items():
            e2 = [0] * target.nslots
            for s, k in enumerate(e):
                if k:
                    e2[mapping[s]] = k
            e2t = tuple(e2)
            if e2t in terms:
                raise FoliaError("context mapping collapsed distinct monomials")
            terms[e2t] = c
        return Polynomial(target, terms)

    # -- division -----------------------------------------------------------------------

    def divide(self, den: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Single-divisor division: self = q*den + r with no r-term divisible
        by the leading monomial of den."""
        self._same(den)
        if den.is_zero:
            raise DivisionByZero("polynomial division by zero")
        de, dc = den.leading()
        q_terms: dict[Exponents, GaussianRational] = {}
        r_terms: dict[Exponents, GaussianRational] = {}
        work = dict(self.terms)
        while work:
            e = max(work, key=_grlex_key)
            c = work.pop(e)
            if all(x >= y for x, y in zip(e, de)):
                qe = tuple(x - y for x, y in zip(e, de))
                qc = c / dc
                prev = q_terms.get(qe)
                q_terms[qe] = qc if prev is None else prev + qc
                for fe, fc in den.terms.items():
                    if fe == de:
                        continue
                    te = tuple(x + y for x, y in zip(qe, fe))
                    sub = qc * fc
                    cur = work.get(te, GaussianRational(0))
                    nc = cur - sub
                    if nc.is_zero:
                        work.pop(te, None)
                    else:
                        work[te] = nc
            else:
                r_terms[e] = c
        return Polynomial(self.ctx, q_terms), Polynomial(self.ctx, r_terms)

    def divide_exact(self, den: "Polynomial") -> "Polynomial":
        q, r = self.divide(den)
        if not r.is_zero:
            raise NotDivisible(r)
        return q

    # -- univariate views ------------------------------------------------------------------

    def as_univariate(self, slot: int) -> dict[int, "Polynomial"]:
        """Coefficients {exp: poly-without-that-slot} viewed in one slot."""
        buckets: dict[int, dict[Exponents, GaussianRational]] = {}
        for e, c in self.terms.items():
            k = e[slot]
            e2 = list(e)
            e2[slot] = 0
            buckets.setdefault(k, {})[tuple(e2)] = c
        return {k: Polynomial(self.ctx, t) for k, t in buckets.items()}

    def coefficient_in(self, slot: int, power: int) -> "Polynomial":
        terms: dict[Exponents, GaussianRational] = {}
        for e, c in self.terms.items():
            if e[slot] == power:
                e2 = list(e)
                e2[slot] = 0
                terms[tuple(e2)] = c
        return Polynomial(self.ctx, terms)

    # -- content ---------------------------------------------------------------------------

    def monomial_content(self) -> Exponents:
        """Slotwise minimum exponent (the largest common monomial)."""
        if self.is_zero:
            raise FoliaError("zero polynomial has no content")
        mins = [min(e[s] for e in self.terms) for s in range(self.ctx.nslots)]
        return tuple(mins)

    def monomial_content_split(self) -> tuple[Exponents, "Polynomial"]:
        m = self.monomial_content()
        if not any(m):
            return m, self
        terms = {tuple(x - y for x, y in zip(e, m)): c for e, c in self.terms.items()}
        return m, Polynomial(self.ctx, terms)

    def monic(self) -> "Polynomial":
        if self.is_zero:
            return self
        _, lc = self.leading()
        return self.scale(GaussianRational(1) / lc)

    # -- display / identity ---------------------------------------------------------------------

    def _coeff_str(self, c: GaussianRational, lead_mono: bool) -> str:
        if c.im and c.re:
            return f"({c})" + ("*" if lead_mono else "")
        if c.im:
            if c.im == 1:
                return "i*" if lead_mono else "i"
            if c.im == -1:
                return "-i*" if lead_mono else "-i"
            return f"{c.im}*i" + ("*" if lead_mono else "")
        if lead_mono:
            if c.re == 1:
                return ""
            if c.re == -1:
                return "-"
            return f"{c.re}*"
        return f"{c.re}"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        names = self.ctx.vars + self.ctx.params
        parts: list[str] = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"{names[s]}^{k}" if k > 1 else names[s]
                for s, k in enumerate(e)
                if k
            )
            cs = self._coeff_str(c, bool(mono))
            parts.append(cs + mono if mono else cs)
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"<Polynomial {self}>"

    def sort_key(self) -> tuple:
        key = object.__getattribute__(self, "_key")
        if key is None:
            key = tuple(
                (e, c.re, c.im) for e, c in self.sorted_terms()
            )
            object.__setattr__(self, "_key", key)
        return key

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, self.sort_key()))


def poly_sum(ctx: VarContext, ps: Iterable[Polynomial]) -> Polynomial:
    out = Polynomial.zero(ctx)
    for p in ps:
        out = out + p
    return out


def monomials_up_to(ctx: VarContext, degree: int, var_slots_only: bool = True) -> Iterator[Exponents]:
    """All variable-slot monomial exponent tuples of total degree <= degree,
    in graded lex order (parameters held at zero)."""
    nv = ctx.nvars if var_slots_only else ctx.nslots
    pad = ctx.nslots - nv

    def rec(prefix: list[int], remaining: int, slots_left: int):
        if slots_left == 0:
            yield tuple(prefix) + (0,) * pad
            return
        for k in range(remaining, -1, -1):
            yield from rec(prefix + [k], remaining - k, slots_left - 1)

    out = []
    for d in range(degree + 1):
        for e in rec([], d, nv):
            # restrict to exact degree d so the overall order is graded
            if sum(e[:nv]) == d:
                out.append(e)
    return iter(out)
