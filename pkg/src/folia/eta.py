"""Leafwise Poincare density probes.

Three entry points: `eta_exact_product` evaluates the closed-form density
for a foliation whose leaves are vertical unit discs (a disc automorphism
moves the base point to the origin, and the derivative there is the
density); `eta_lower_bound_shoot` integrates the complex-time flow of the
saturated field along rays and reports how large a leaf disc it could
verify, which yields a lower bound for the density; `continuity_scan`
tabulates the bound along a straight segment, typically one that ends on
the singular set.

Everything in this module is floating point.  Its outputs are graded
"numeric" and never upgrade a symbolic verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DeclInvalid, FoliaError, IntegratorDiverged
from .foliation import FoliationModel
from .integrate import compile_field, integrate_ode


def _as_complex(value) -> complex:
    to = getattr(value, "to_complex", None)
    return to() if to is not None else complex(value)


@dataclass(frozen=True)
class MetricContext:
    """Euclidean ambient metric on an open polydisc of the given radius."""

    radius: float = 1.0
    metric: str = "euclidean"

    def __post_init__(self):
        if self.metric != "euclidean":
            raise FoliaError(f"unsupported ambient metric {self.metric!r}")
        if not self.radius > 0:
            raise FoliaError("metric context needs a positive polydisc radius")


@dataclass(frozen=True)
class ProductLeafDecl:
    """Declares that the leaves are vertical discs in one coordinate.

    The declaration is honest for a model exactly when every component of
    the saturated field other than `leaf_index` vanishes identically, so
    the flow moves the chosen coordinate and nothing else.
    """

    leaf_index: int

    def validate(self, model: FoliationModel) -> None:
        n = model.ctx.nvars
        if not 0 <= self.leaf_index < n:
            raise DeclInvalid(
                f"leaf coordinate index {self.leaf_index} is out of range for"
                f" {n} variables"
            )
        for i, comp in enumerate(model.saturated.components):
            if i != self.leaf_index and not comp.is_zero:
                raise DeclInvalid(
                    "field moves the non-leaf coordinate"
                    f" {model.ctx.slot_name(i)}"
                )
        if model.saturated.components[self.leaf_index].is_zero:
            raise DeclInvalid("the declared leaf coordinate has zero velocity")


def eta_exact_product(
    p: Sequence,
    decl: ProductLeafDecl,
    ctx: MetricContext | None = None,
    model: FoliationModel | None = None,
) -> float:
    """Exact density at `p` for a verified product-leaf declaration.

    The leaf through `p` is the unit disc in coordinate `decl.leaf_index`;
    the extremal disc map is the automorphism sending 0 to that coordinate
    value z0, whose derivative at 0 has modulus 1 - |z0|^2.

    Pass `model` to (re)validate the declaration against the field.
    """
    ctx = ctx or MetricContext()
    if ctx.radius != 1.0:
        raise DeclInvalid("the closed form is for the unit polydisc only")
    if model is not None:
        decl.validate(model)
    if not 0 <= decl.leaf_index < len(p):
        raise DeclInvalid(
            f"point has {len(p)} coordinates, leaf index is {decl.leaf_index}"
        )
    z0 = _as_complex(p[decl.leaf_index])
    if abs(z0) >= 1.0:
        raise DeclInvalid("the leaf coordinate lies outside the open unit disc")
    return 1.0 - abs(z0) ** 2


def default_radius_schedule(radius: float, depth: int = 20) -> tuple[float, ...]:
    """Radii `radius * (1 - 2^-k)` for k = 1..depth; the last one caps rays."""
    return tuple(radius * (1.0 - 0.5 ** k) for k in range(1, depth + 1))


@dataclass(frozen=True)
class EtaEstimate:
    """A shooting result: a verified disc radius and the bound it implies.

    `lower_bound` is `shoot_radius * |X(p)|`; `exact` is filled only for a
    validated product-leaf declaration.  Integrator statistics are summed
    over rays, and `diverged` counts rays whose integration failed (those
    rays contribute a zero radius, so the bound stays a bound).
    """

    point: tuple[complex, ...]
    lower_bound: float
    exact: float | None
    shoot_radius: float
    rays: int
    threshold: float
    steps: int
    rejected: int
    diverged: int
    notes: tuple[str, ...] = ()
    grade: str = "numeric"


def eta_lower_bound_shoot(
    p: Sequence,
    model: FoliationModel,
    ctx: MetricContext | None = None,
    radii: Sequence[float] | None = None,
    *,
    rays: int = 32,
    threshold: float = 1e-6,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    param_values: Mapping[str, complex] | None = None,
    decl: ProductLeafDecl | None = None,
) -> EtaEstimate:
    """Lower-bound the density at `p` by shooting leaf rays.

    Integrates dy/ds = e^(i theta) * Xhat(y) for `rays` equally spaced
    angles theta, where Xhat is the saturated field.  A state is admissible
    while it stays strictly inside the polydisc and the largest saturated
    component modulus stays above `threshold` (the proxy for distance to
    the singular set).  Each ray reports the last admissible ray radius
    (located by step shrinking); the verified disc radius is the minimum
    over rays, capped by the largest scheduled radius, and the bound is
    that radius times the Euclidean speed |Xhat(p)|.

    A base point that is already inadmissible gets the trivial bound 0
    rather than an error, so scans can include their singular endpoint.
    """
    ctx = ctx or MetricContext()
    r = float(ctx.radius)
    y0 = np.asarray([_as_complex(v) for v in p], dtype=complex)
    if y0.shape != (model.ctx.nvars,):
        raise FoliaError(
            f"point has {y0.size} coordinates, model has {model.ctx.nvars}"
        )
    if rays < 1:
        raise FoliaError("shooting needs at least one ray")
    fhat = compile_field(model.saturated.components, param_values)
    if radii is None:
        radii = default_radius_schedule(r)
    schedule = sorted(float(v) for v in radii)
    if not schedule or schedule[0] <= 0:
        raise FoliaError("the radius schedule must list positive radii")
    cap = schedule[-1]

    exact = None
    if decl is not None:
        decl.validate(model)
        z0 = _as_complex(p[decl.leaf_index])
        if r == 1.0 and abs(z0) < 1.0:
            exact = 1.0 - abs(z0) ** 2

    def admissible(y: np.ndarray) -> bool:
        if float(np.max(np.abs(y))) >= r:
            return False
        return float(np.max(np.abs(fhat(y)))) > threshold

    point = tuple(complex(v) for v in y0)
    if not admissible(y0):
        return EtaEstimate(
            point, 0.0, exact, 0.0, rays, threshold, 0, 0, 0,
            ("the base point is already inadmissible",),
        )

    speed = float(np.linalg.norm(fhat(y0)))
    rho = cap
    steps = rejected = diverged = 0
    notes: list[str] = []
    for m in range(rays):
        angle = 2.0 * math.pi * m / rays
        phase = complex(math.cos(angle), math.sin(angle))

        def ray_field(y: np.ndarray, phase: complex = phase) -> np.ndarray:
            return phase * fhat(y)

        try:
            res = integrate_ode(
                ray_field, y0, cap, rtol=rtol, atol=atol, check=admissible
            )
        except IntegratorDiverged as exc:
            diverged += 1
            rho = 0.0
            notes.append(f"ray {m}: {exc}")
            continue
        steps += res.steps
        rejected += res.rejected
        rho = min(rho, res.s_reached)
    return EtaEstimate(
        point, rho * speed, exact, rho, rays, threshold,
        steps, rejected, diverged, tuple(notes),
    )


@dataclass(frozen=True)
class ScanRow:
    s: float
    point: tuple[complex, ...]
    lower_bound: float
    exact: float | None
    safe_radius: float
    estimate: EtaEstimate


def continuity_scan(
    model: FoliationModel,
    ctx: MetricContext | None,
    start: Sequence,
    end: Sequence,
    samples: int,
    decl: ProductLeafDecl | None = None,
    **shoot_kwargs,
) -> tuple[ScanRow, ...]:
    """Sample the shooting bound along the straight segment start -> end.

    Emits `samples` rows at s = 0, 1/(samples-1), ..., 1.  When a
    product-leaf declaration is given, the exact column carries the closed
    form clamped to zero at and beyond the disc boundary, which is the
    extension by zero that the bound is expected to approach.  No
    continuity claim is made; the rows are data.
    """
    if samples < 2:
        raise FoliaError("a scan needs at least two samples")
    a = [_as_complex(v) for v in start]
    b = [_as_complex(v) for v in end]
    if len(a) != model.ctx.nvars or len(b) != model.ctx.nvars:
        raise FoliaError("scan endpoints must match the model dimension")
    if max(abs(x - y) for x, y in zip(a, b)) == 0.0:
        raise FoliaError("zero-length scan segment")
    if decl is not None:
        decl.validate(model)
    rows = []
    for k in range(samples):
        s = k / (samples - 1)
        q = tuple((1.0 - s) * x + s * y for x, y in zip(a, b))
        est = eta_lower_bound_shoot(q, model, ctx, **shoot_kwargs)
        exact = None
        if decl is not None:
            exact = max(0.0, 1.0 - abs(q[decl.leaf_index]) ** 2)
        rows.append(ScanRow(s, q, est.lower_bound, exact, est.shoot_radius, est))
    return tuple(rows)
