"""Embedded adaptive Runge-Kutta (Dormand-Prince 5(4)) on complex state.

Used for numeric leaf probes and for metric lower-bound shooting.  The
integrator walks a single real parameter s >= 0 along dy/ds = f(y) with
complex y, reporting how far it safely got; a checkpoint predicate can stop
it (boundary located by step shrinking, not interpolation).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import IntegratorDiverged
from .polynomial import Polynomial

# Dormand-Prince coefficients
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)


@dataclass
class IntegrationResult:
    ok: bool
    s_reached: float
    y: np.ndarray
    steps: int
    rejected: int
    reason: str  # "end" | "check" | ""


def integrate_ode(
    f: Callable[[np.ndarray], np.ndarray],
    y0: Sequence[complex],
    s_end: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    max_steps: int = 50000,
    check: Callable[[np.ndarray], bool] | None = None,
    locate: float = 1e-9,
    max_step: float | None = None,
) -> IntegrationResult:
    """Integrate dy/ds = f(y) from 0 to s_end.

    If `check` rejects an accepted state, the step is halved and retried so
    the admissible horizon is located to within `locate`; the result then has
    reason "check" and s_reached = last admissible s.
    """
    y = np.asarray(y0, dtype=complex)
    if check is not None and not check(y):
        return IntegrationResult(True, 0.0, y, 0, 0, "check")
    s = 0.0
    h = min(s_end, 1e-3 if max_step is None else min(1e-3, max_step))
    hmax = s_end if max_step is None else max_step
    steps = rejected = 0
    k = [np.zeros_like(y) for _ in range(7)]
    while s < s_end:
        if steps >= max_steps:
            raise IntegratorDiverged("integration exceeded its step budget")
        h = min(h, s_end - s)
        k[0] = f(y)
        for i in range(1, 7):
            acc = y.copy()
            for j, a in enumerate(_A[i]):
                if a:
                    acc = acc + (h * a) * k[j]
            k[i] = f(acc)
        y5 = y.copy()
        y4 = y.copy()
        for i in range(7):
            if _B5[i]:
                y5 = y5 + (h * _B5[i]) * k[i]
            if _B4[i]:
                y4 = y4 + (h * _B4[i]) * k[i]
        if not np.all(np.isfinite(y5.view(float))):
            raise IntegratorDiverged("state left the representable range")
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.max(np.abs(y5 - y4) / scale)) if scale.size else 0.0
        steps += 1
        if err <= 1.0:
            if check is not None and not check(y5):
                # boundary crossed inside this step: shrink toward it
                if h <= locate:
                    return IntegrationResult(True, s, y, steps, rejected, "check")
                h = h / 2
                rejected += 1
                continue
            s += h
            y = y5
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = min(hmax, h * factor)
            if h <= 1e-14:
                raise IntegratorDiverged("step size underflow")
        else:
            rejected += 1
            h = max(1e-14, h * max(0.2, 0.9 * err ** -0.2))
            if h <= 1e-14:
                raise IntegratorDiverged("step size underflow")
    return IntegrationResult(True, s_end, y, steps, rejected, "end")


def compile_field(
    components: Sequence[Polynomial],
    param_values: Mapping[str, complex] | None = None,
) -> Callable[[np.ndarray], np.ndarray]:
    """Compile polynomial components into a float evaluator.

    Parameters must be given numeric values (or be absent).
    """
    param_values = dict(param_values or {})
    ctx = components[0].ctx
    nv = ctx.nvars
    compiled: list[list[tuple[complex, tuple[int, ...]]]] = []
    for p in components:
        terms = []
        for e, c in p.sorted_terms():
            coeff = c.to_complex()
            for s in range(nv, ctx.nslots):
                k = e[s]
                if k:
                    name = ctx.slot_name(s)
                    if name not in param_values:
                        raise IntegratorDiverged(
                            f"parameter {name} has no numeric value"
                        )
                    coeff *= param_values[name] ** k
            terms.append((coeff, e[:nv]))
        compiled.append(terms)

    def f(y: np.ndarray) -> np.ndarray:
        out = np.zeros(len(compiled), dtype=complex)
        for i, terms in enumerate(compiled):
            acc = 0j
            for coeff, exps in terms:
                v = coeff
                for s, kk in enumerate(exps):
                    if kk == 1:
                        v *= y[s]
                    elif kk:
                        v *= y[s] ** kk
                acc += v
            out[i] = acc
        return out

    return f
