"""Variable/parameter contexts, point values, and scalar fact decisions.

A context fixes the ordered variable and parameter names every polynomial
refers to.  Parameters are transcendental: the algebra layer treats them as
extra slots and never looks at side conditions; only verdict-producing code
calls the decide_* helpers below.
"""

from __future__ import annotations

import enum
import re as _re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import FoliaError, MixedAlgebraics, UnknownVariable
from .gaussian import GaussianRational

_NAME_RE = _re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


@dataclass(frozen=True)
class AlgebraicValue:
    """One specific root of a squarefree monic univariate polynomial.

    minpoly holds the monic coefficient tuple (c0, ..., c_{d-1}, 1) in
    ascending degree over Q(i); tag in {0, ..., d-1} names which root.
    Root order is a bookkeeping label, not a numeric statement.
    """

    minpoly: tuple[GaussianRational, ...]
    tag: int

    def __post_init__(self):
        if len(self.minpoly) < 3:
            raise FoliaError("algebraic value needs degree >= 2")
        if self.minpoly[-1] != GaussianRational(1):
            raise FoliaError("minimal polynomial must be monic")
        if not 0 <= self.tag < self.degree:
            raise FoliaError("root tag out of range")

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    def minpoly_str(self, var: str = "u") -> str:
        parts = []
        for e in range(self.degree, -1, -1):
            c = self.minpoly[e]
            if c.is_zero:
                continue
            if e == 0:
                parts.append(str(c))
            else:
                head = "" if c.is_one else (f"({c})*" if c.im else f"{c}*")
                parts.append(f"{head}{var}" + (f"^{e}" if e > 1 else ""))
        return " + ".join(parts).replace("+ -", "- ")

    def key(self) -> tuple:
        return (tuple((c.re, c.im) for c in self.minpoly), self.tag)

    def __str__(self) -> str:
        return f"root{self.tag}[{self.minpoly_str()}]"


@dataclass(frozen=True)
class ParamValue:
    """A coordinate equal to a declared parameter."""

    name: str

    def __str__(self) -> str:
        return self.name


PointValue = GaussianRational | ParamValue | AlgebraicValue
Point = tuple[PointValue, ...]


@dataclass(frozen=True)
class SideCondition:
    """Declared fact: param != excluded."""

    param: str
    excluded: GaussianRational

    def __str__(self) -> str:
        return f"{self.param} != {self.excluded}"


@dataclass(frozen=True)
class VarContext:
    """Ordered variables and parameters a polynomial family lives over.

    Exponent tuples are laid out variables-first, parameters after.  The
    toolkit allows 1-variable contexts internally (restrictions, pull-backs);
    input files must declare at least two variables.
    """

    vars: tuple[str, ...]
    params: tuple[str, ...] = ()
    side_conditions: tuple[SideCondition, ...] = ()

    def __post_init__(self):
        names = self.vars + self.params
        if len(self.vars) < 1:
            raise FoliaError("a context needs at least one variable")
        if len(set(names)) != len(names):
            raise FoliaError("duplicate variable/parameter name")
        for n in names:
            if not _NAME_RE.match(n):
                raise FoliaError(f"bad name {n!r}")
            if n == "i":
                raise FoliaError("'i' is reserved for the imaginary unit")
        for sc in self.side_conditions:
            if sc.param not in self.params:
                raise UnknownVariable(f"side condition on unknown parameter {sc.param!r}")

    # -- slot bookkeeping -------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.vars)

    @property
    def nslots(self) -> int:
        return len(self.vars) + len(self.params)

    def slot(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            pass
        try:
            return len(self.vars) + self.params.index(name)
        except ValueError:
            raise UnknownVariable(f"unknown name {name!r}") from None

    def slot_name(self, slot: int) -> str:
        return (self.vars + self.params)[slot]

    def is_var_slot(self, slot: int) -> bool:
        return slot < len(self.vars)

    def extend_params(
        self,
        new_params: tuple[str, ...],
        new_conditions: tuple[SideCondition, ...] = (),
    ) -> "VarContext":
        """Same variables, extra parameters appended at the end."""
        return VarContext(
            self.vars,
            self.params + new_params,
            self.side_conditions + new_conditions,
        )

    def excluded_values(self, param: str) -> set[GaussianRational]:
        return {sc.excluded for sc in self.side_conditions if sc.param == param}


class Decision(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


def decide_value_eq(a: PointValue, b: PointValue, ctx: VarContext) -> Decision:
    """Is a == b, given the context's side conditions?"""
    if isinstance(a, GaussianRational) and isinstance(b, GaussianRational):
        return Decision.YES if a == b else Decision.NO
    if isinstance(a, ParamValue) and isinstance(b, ParamValue):
        return Decision.YES if a.name == b.name else Decision.UNKNOWN
    if isinstance(a, AlgebraicValue) and isinstance(b, AlgebraicValue):
        if a.minpoly == b.minpoly:
            # distinct tags of one squarefree polynomial are distinct roots
            return Decision.YES if a.tag == b.tag else Decision.NO
        return Decision.UNKNOWN
    # mixed kinds
    if isinstance(a, ParamValue) or isinstance(b, ParamValue):
        p, other = (a, b) if isinstance(a, ParamValue) else (b, a)
        if isinstance(other, GaussianRational):
            if other in ctx.excluded_values(p.name):
                return Decision.NO
        return Decision.UNKNOWN
    # algebraic vs rational: the root of a degree>=2 squarefree polynomial can
    # equal r only if r is a root; evaluate the minimal polynomial at r.
    alg, rat = (a, b) if isinstance(a, AlgebraicValue) else (b, a)
    assert isinstance(alg, AlgebraicValue) and isinstance(rat, GaussianRational)
    val = GaussianRational(0)
    power = GaussianRational(1)
    for c in alg.minpoly:
        val = val + c * power
        power = power * rat
    if not val.is_zero:
        return Decision.NO
    return Decision.UNKNOWN


def value_key(v: PointValue) -> tuple:
    """Stable sort/identity key across the three value kinds."""
    if isinstance(v, GaussianRational):
        return (0, v.re, v.im)
    if isinstance(v, ParamValue):
        return (1, v.name)
    return (2,) + v.key()


def value_str(v: PointValue) -> str:
    return str(v)


def format_point(p: Point) -> str:
    return "(" + ", ".join(value_str(v) for v in p) + ")"


def point_key(p: Point) -> tuple:
    return tuple(value_key(v) for v in p)


def check_point(p: Point, ctx: VarContext) -> None:
    """Validate arity, parameter names, and the one-algebraic rule."""
    if len(p) != ctx.nvars:
        raise FoliaError(
            f"point has {len(p)} coordinates, context has {ctx.nvars} variables"
        )
    seen: AlgebraicValue | None = None
    for v in p:
        if isinstance(v, ParamValue) and v.name not in ctx.params:
            raise UnknownVariable(f"unknown parameter {v.name!r} in point")
        if isinstance(v, AlgebraicValue):
            if seen is not None and seen != v:
                raise MixedAlgebraics(
                    "two distinct algebraic values in one point"
                )
            seen = v


def point_is_rational(p: Point) -> bool:
    return all(isinstance(v, GaussianRational) for v in p)
