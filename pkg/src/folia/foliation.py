"""Polynomial vector fields, saturation, singular sets, and invariance.

The foliation model pairs the raw field with its saturation (coefficients
divided by their gcd); the singular set is always the zero set of the
saturated coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .context import AlgebraicValue, Decision, PointValue, VarContext
from .errors import FoliaError, InvalidFoliation
from .evaluate import slice_residuals
from .factor import PreparedFactorization
from .gaussian import GaussianRational
from .gcd import multivariate_gcd
from .polynomial import Polynomial
from .variety import Slice, Variety, solve_variety


@dataclass(frozen=True)
class VectorField:
    """X = sum components[i] d/dx_i over ctx.vars."""

    ctx: VarContext
    components: tuple[Polynomial, ...]

    def __post_init__(self):
        if len(self.components) != self.ctx.nvars:
            raise FoliaError("component count does not match the context")
        for p in self.components:
            if p.ctx != self.ctx:
                raise FoliaError("component from a different context")
        if all(p.is_zero for p in self.components):
            raise FoliaError("the zero vector field induces no foliation")

    def apply(self, f: Polynomial) -> Polynomial:
        """Directional derivative X(f)."""
        out = Polynomial.zero(self.ctx)
        for name, p in zip(self.ctx.vars, self.components):
            out = out + p * f.partial_derivative(name)
        return out

    def is_constant(self) -> bool:
        return all(p.is_constant_in_vars() for p in self.components)

    def __str__(self) -> str:
        inner = ", ".join(str(p) for p in self.components)
        return f"({inner})"


def saturate(field: VectorField) -> tuple[Polynomial, VectorField]:
    """Divide out the gcd of the coefficients.

    Returns (common_factor, saturated_field); the common factor is monic.
    """
    g = multivariate_gcd(field.components)
    if g.is_constant:
        return Polynomial.one(field.ctx), field
    sat = tuple(
        p.divide_exact(g) if not p.is_zero else p for p in field.components
    )
    return g, VectorField(field.ctx, sat)


def singular_set(
    field: VectorField,
    declared: Sequence[PreparedFactorization] = (),
) -> Variety:
    """Zero set of the saturated coefficients."""
    _, sat = saturate(field)
    live = [p for p in sat.components if not p.is_zero]
    return solve_variety(live, declared)


@dataclass(frozen=True)
class Domain:
    kind: str  # "affine" | "polydisc"
    radius: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("affine", "polydisc"):
            raise FoliaError(f"unknown domain kind {self.kind!r}")
        if self.kind == "polydisc" and (self.radius is None or self.radius <= 0):
            raise FoliaError("polydisc domain needs a positive radius")

    def __str__(self) -> str:
        return "affine" if self.kind == "affine" else f"polydisc {self.radius}"


@dataclass(frozen=True)
class FoliationModel:
    """A field, its saturation, and the singular set, computed once."""

    field: VectorField
    common_factor: Polynomial
    saturated: VectorField
    singular: Variety
    domain: Domain
    declared: tuple[PreparedFactorization, ...] = ()

    @property
    def ctx(self) -> VarContext:
        return self.field.ctx

    def codim1_check(self) -> None:
        for s in self.singular.slices:
            if s.dim == self.ctx.nvars - 1:
                raise InvalidFoliation(
                    f"saturated field still vanishes on the hypersurface {s}"
                )


def build_model(
    field: VectorField,
    domain: Domain,
    declared: Sequence[PreparedFactorization] = (),
) -> FoliationModel:
    common, sat = saturate(field)
    live = [p for p in sat.components if not p.is_zero]
    singular = solve_variety(live, declared)
    model = FoliationModel(field, common, sat, singular, domain, tuple(declared))
    model.codim1_check()
    return model


def with_context(field: VectorField, ctx: VarContext) -> VectorField:
    """Re-home a field onto an extended context (same variables)."""
    if field.ctx == ctx:
        return field
    if ctx.vars != field.ctx.vars:
        raise FoliaError("with_context cannot change the variable list")
    return VectorField(ctx, tuple(p.map_context(ctx) for p in field.components))


# --------------------------------------------------------------------------
# invariance


@dataclass(frozen=True)
class InvariantWitness:
    """Machine-checkable invariance evidence.

    Hypersurface kind: X(f) = quotient * f exactly.
    Slice kind: every frozen component vanishes identically on the slice.
    """

    kind: str  # "hypersurface" | "slice"
    invariant: bool
    f: Polynomial | None = None
    quotient: Polynomial | None = None
    remainder: Polynomial | None = None
    slice: Slice | None = None
    failures: tuple[tuple[str, Polynomial], ...] = ()

    def recheck(self, field: VectorField) -> bool:
        if self.kind == "hypersurface":
            if not self.invariant:
                return True
            return field.apply(self.f) == self.quotient * self.f
        if not self.invariant:
            return True
        amap = self.slice.assignment_map()
        for name in self.slice.frozen_vars:
            comp = field.components[field.ctx.slot(name)]
            if not all(r.is_zero for r in slice_residuals(comp, amap)):
                return False
        return True


def is_invariant_hypersurface(field: VectorField, f: Polynomial) -> InvariantWitness:
    """Does X(f) lie in the ideal (f)?  Uses the raw field by contract."""
    if f.is_zero or f.is_constant:
        raise FoliaError("invariance asks for a nonconstant hypersurface polynomial")
    xf = field.apply(f)
    if xf.is_zero:
        return InvariantWitness(
            "hypersurface", True, f=f, quotient=Polynomial.zero(field.ctx)
        )
    q, r = xf.divide(f)
    if r.is_zero:
        return InvariantWitness("hypersurface", True, f=f, quotient=q)
    return InvariantWitness("hypersurface", False, f=f, remainder=r)


def is_invariant_slice(field: VectorField, s: Slice) -> InvariantWitness:
    """A coordinate slice is invariant iff every frozen component of the
    field vanishes identically on it."""
    amap = s.assignment_map()
    failures: list[tuple[str, Polynomial]] = []
    for name in s.frozen_vars:
        comp = field.components[field.ctx.slot(name)]
        for r in slice_residuals(comp, amap):
            if not r.is_zero:
                failures.append((name, r))
                break
    if failures:
        return InvariantWitness("slice", False, slice=s, failures=tuple(failures))
    return InvariantWitness("slice", True, slice=s)


# --------------------------------------------------------------------------
# restriction


@dataclass(frozen=True)
class RestrictedField:
    """The induced field on a coordinate slice, over the free variables."""

    field: VectorField
    slice: Slice
    ambient_ctx: VarContext

    @property
    def free_vars(self) -> tuple[str, ...]:
        return self.field.ctx.vars


def restrict(field: VectorField, s: Slice) -> RestrictedField:
    """Restrict the field to an invariant coordinate slice.

    Only rational or parametric frozen values are supported: an algebraic
    frozen value would push the coefficients into an extension ring.
    """
    amap = s.assignment_map()
    for v in amap.values():
        if isinstance(v, AlgebraicValue):
            raise FoliaError(
                "restriction across an algebraic coordinate is unsupported"
            )
    free = s.free_vars
    if not free:
        raise FoliaError("cannot restrict to a zero-dimensional slice")
    sub_ctx = VarContext(free, field.ctx.params, field.ctx.side_conditions)
    comps = []
    for name in free:
        p = field.components[field.ctx.slot(name)]
        comps.append(p.substitute_values(amap).map_context(sub_ctx))
    if all(p.is_zero for p in comps):
        raise FoliaError(
            "field vanishes identically on the slice; restriction is the zero field"
        )
    return RestrictedField(VectorField(sub_ctx, tuple(comps)), s, field.ctx)


def embed_free_point(
    rf: RestrictedField, free_point: Mapping[str, PointValue]
) -> tuple[PointValue, ...]:
    """Rebuild an ambient point from slice values + free coordinates."""
    amap = rf.slice.assignment_map()
    out: list[PointValue] = []
    for name in rf.ambient_ctx.vars:
        if name in amap:
            out.append(amap[name])
        else:
            out.append(free_point[name])
    return tuple(out)
