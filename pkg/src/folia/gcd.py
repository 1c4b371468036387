"""Multivariate gcd over Q(i) via monomial content + primitive PRS.

Textbook variant, chosen for auditability over speed: strip the common
monomial, then recurse on one slot at a time with primitive pseudo-remainder
sequences.  Results are normalized monic in graded lex order.
"""

from __future__ import annotations

from typing import Sequence

from .errors import AllZero
from .gaussian import GaussianRational
from .polynomial import Polynomial


def _prem(f: Polynomial, g: Polynomial, slot: int) -> Polynomial:
    """Sparse pseudo-remainder of f by g in the given slot."""
    dg = g.degree_in(slot)
    lc_g = g.coefficient_in(slot, dg)
    r = f
    while not r.is_zero and r.degree_in(slot) >= dg:
        dr = r.degree_in(slot)
        lc_r = r.coefficient_in(slot, dr)
        shift = [0] * f.ctx.nslots
        shift[slot] = dr - dg
        r = r * lc_g - lc_r * Polynomial.monomial(f.ctx, tuple(shift)) * g
    return r


def _coefficient_content(p: Polynomial, slot: int) -> Polynomial:
    coeffs = [c for c in p.as_univariate(slot).values() if not c.is_zero]
    out = None
    for c in coeffs:
        out = c if out is None else polynomial_gcd(out, c)
        if out.is_constant:
            return Polynomial.one(p.ctx)
    if out is None:
        raise AllZero("content of zero polynomial")
    return out


def _primitive_wrt(p: Polynomial, slot: int) -> Polynomial:
    if p.is_zero:
        return p
    _, p = p.monomial_content_split()
    cont = _coefficient_content(p, slot)
    if cont.is_constant:
        return p
    return p.divide_exact(cont)


def _gcd_content_free(a: Polynomial, b: Polynomial) -> Polynomial:
    """gcd of two nonzero polynomials whose slotwise minimum is zero."""
    one = Polynomial.one(a.ctx)
    if a.is_constant or b.is_constant:
        return one
    slot = max(a.slots_present() | b.slots_present())
    if a.degree_in(slot) == 0:
        return polynomial_gcd(a, _coefficient_content(b, slot))
    if b.degree_in(slot) == 0:
        return polynomial_gcd(_coefficient_content(a, slot), b)

    cont_a = _coefficient_content(a, slot)
    cont_b = _coefficient_content(b, slot)
    c = polynomial_gcd(cont_a, cont_b)
    f = a.divide_exact(cont_a)
    g = b.divide_exact(cont_b)
    if f.degree_in(slot) < g.degree_in(slot):
        f, g = g, f
    while not g.is_zero:
        r = _prem(f, g, slot)
        f, g = g, _primitive_wrt(r, slot)
    _, f = f.monomial_content_split()
    if f.degree_in(slot) == 0:
        return c
    return c * f


def polynomial_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd of two polynomials (not both zero)."""
    if a.is_zero and b.is_zero:
        raise AllZero("gcd(0, 0) is undefined")
    if a.is_zero:
        return b.monic()
    if b.is_zero:
        return a.monic()
    ea, pa = a.monomial_content_split()
    eb, pb = b.monomial_content_split()
    common = tuple(min(x, y) for x, y in zip(ea, eb))
    g = _gcd_content_free(pa, pb)
    if any(common):
        g = g * Polynomial.monomial(a.ctx, common)
    return g.monic()


def multivariate_gcd(ps: Sequence[Polynomial]) -> Polynomial:
    """Monic gcd of a family; zero entries are ignored.  AllZero if none left."""
    live = [p for p in ps if not p.is_zero]
    if not live:
        raise AllZero("gcd of an all-zero family")
    out = live[0].monic()
    for p in live[1:]:
        out = polynomial_gcd(out, p)
        if out.is_constant:
            return Polynomial.one(out.ctx)
    return out


def is_squarefree_univariate(p: Polynomial, slot: int) -> bool:
    """Squarefreeness in one slot: gcd(p, dp/dslot) is constant."""
    name = p.ctx.slot_name(slot)
    dp = p.partial_derivative(name)
    if dp.is_zero:
        return False
    return polynomial_gcd(p, dp).is_constant
