"""Equilibrium computation: boundary points, closed forms, nullcline roots.

Every model has the extinction point (0, 0) and the exclusion point (1, 0).
Models 1-2 have closed-form coexistence equilibria; models 3-4 reduce to a
scalar root problem in the parasitoid density y after eliminating x through
the host nullcline. The doubly-exponential model has a fold: for r > 2
there is a b-window below 1 holding two coexistence equilibria.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _curves
from . import _kernels as _k
from .errors import ContractError, DomainError, NumericError
from .models import GrowthKind, ModelSpec, ParasitismKind, State, map_values

RESIDUAL_TOL = 1e-10


class EquilibriumKind(Enum):
    EXTINCTION = "extinction"
    EXCLUSION = "exclusion"
    COEXISTENCE = "coexistence"


class Provenance(Enum):
    CLOSED_FORM = "closed-form"
    NULLCLINE_ROOT = "nullcline-root"


class NullclineKind(Enum):
    HOST = "host"
    PARASITOID = "parasitoid"


@dataclass(frozen=True)
class EquilibriumRecord:
    state: State
    kind: EquilibriumKind
    provenance: Provenance
    residual: float = 0.0
    degenerate: bool = False
    tangent: bool = False


@dataclass(frozen=True)
class NullclineSamples:
    which: NullclineKind
    points: np.ndarray  # (n, 2)


def _coexistence_record(spec: ModelSpec, x: float, y: float,
                        provenance: Provenance, tangent: bool = False) -> EquilibriumRecord:
    u, v = map_values(spec, State(x, y))
    return EquilibriumRecord(
        state=State(x, y),
        kind=EquilibriumKind.COEXISTENCE,
        provenance=provenance,
        residual=max(abs(u - 1.0), abs(v - 1.0)),
        tangent=tangent,
    )


def boundary_equilibria(spec: ModelSpec) -> tuple[EquilibriumRecord, EquilibriumRecord]:
    """The extinction point (0,0) and the exclusion point (1,0).

    Both records are flagged degenerate at r = 0, where the whole x-axis is
    a line of equilibria."""
    deg = spec.degenerate
    return (
        EquilibriumRecord(State(0.0, 0.0), EquilibriumKind.EXTINCTION,
                          Provenance.CLOSED_FORM, degenerate=deg),
        EquilibriumRecord(State(1.0, 0.0), EquilibriumKind.EXCLUSION,
                          Provenance.CLOSED_FORM, degenerate=deg),
    )


def coexistence_closed_form(spec: ModelSpec) -> EquilibriumRecord | None:
    """Closed-form interior equilibrium for models 1 and 2.

    Model 1: (1/b, R0/(1 + (R0-1)/b) - 1); model 2: (1/b, e^{r(1-1/b)} - 1).
    Returns None when the formula does not land in the open first quadrant
    (b <= 1, or r = 0); at b = 1 the point has merged with (1, 0).
    """
    if spec.parasitism is not ParasitismKind.FRACTIONAL:
        raise ContractError(
            "closed-form equilibria exist only for fractional parasitism "
            "(models 1-2); use coexistence_numeric")
    if spec.b <= 1.0 or spec.r <= 0.0:
        return None
    x = 1.0 / spec.b
    if spec.growth is GrowthKind.FRACTIONAL:
        y = spec.R0 / (1.0 + (spec.R0 - 1.0) / spec.b) - 1.0
    else:
        y = math.expm1(spec.r * (1.0 - 1.0 / spec.b))
    return _coexistence_record(spec, x, y, Provenance.CLOSED_FORM)


def coexistence_numeric(spec: ModelSpec) -> list[EquilibriumRecord]:
    """Interior equilibria by scalar root finding in y, ascending in y.

    x is eliminated through the host nullcline (closed form per model), and
    the parasitoid-nullcline residual is sign-scanned on a log grid, then
    polished by bisection plus guarded Newton. A fold double root closer
    than 1e-7 is reported as a single record flagged ``tangent``.
    Models 1-2 are accepted as a cross-check path against the closed forms.
    """
    gk, pk, r, b = spec.kernel_args
    count, y0, y1, tangent, status = _k.coexistence_roots(gk, pk, r, b)
    if status:
        raise NumericError(
            f"root polish failed to converge for model {spec.index} "
            f"(r={r}, b={b})", bracket=(y0, y1))
    records = []
    for y in (y0, y1)[:count]:
        x = _k.host_nullcline_x(gk, pk, r, y)
        if x <= 0.0:
            continue
        records.append(_coexistence_record(
            spec, x, y, Provenance.NULLCLINE_ROOT, tangent=bool(tangent)))
    return records


def coexistence(spec: ModelSpec) -> list[EquilibriumRecord]:
    """Interior equilibria via the preferred route for the model: closed
    form for models 1-2, nullcline roots for models 3-4."""
    if spec.parasitism is ParasitismKind.FRACTIONAL:
        rec = coexistence_closed_form(spec)
        return [rec] if rec is not None else []
    return coexistence_numeric(spec)


def saddle_node_b(spec: ModelSpec) -> float:
    """The fold location in b for the doubly-exponential model at the
    spec's r: the b at which the nullclines become tangent and the root
    count jumps 0 -> 2. Computed by inverting the fold boundary curve,
    which is monotone in its internal variable. Requires r > 2."""
    if spec.index != 4:
        raise ContractError("the fold in b exists only for model 4")
    if spec.r <= 2.0:
        raise DomainError(
            f"no fold branch for r <= 2 (got r={spec.r}); the coexistence "
            "equilibrium is unique for b > 1")
    target = spec.r

    def f(y):
        return float(_curves.model4_jury1(y)[0]) - target

    lo, hi = 1e-8, 4.0
    while f(hi) < 0.0:
        hi *= 2.0
        if hi > 1e6:
            raise NumericError("fold-curve inversion bracket expansion failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-14 * max(1.0, hi):
            break
    return float(_curves.model4_jury1(0.5 * (lo + hi))[1])


def parasitoid_x_intercept(spec: ModelSpec) -> float:
    """x-intercept of the parasitoid nullcline for model 3:
    1/(R0 (b - 1) + 1). Lies in (0, 1) iff b > 1, which is exactly when
    the unique interior equilibrium exists; outside that the value signals
    no interior equilibrium (it may be >= 1, negative, or infinite)."""
    if spec.index != 3:
        raise ContractError("the intercept formula applies to model 3")
    denom = spec.R0 * (spec.b - 1.0) + 1.0
    if denom == 0.0:
        return math.inf
    return 1.0 / denom


def _invert_h_exponential(w: float) -> float:
    """Solve (1 - e^{-y})/y = w for y >= 0, w in (0, 1]."""
    if w >= 1.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while _k.parasitism(1, hi) > w:
        hi *= 2.0
        if hi > 1e9:
            raise NumericError("parasitism inversion bracket expansion failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _k.parasitism(1, mid) > w:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def nullcline_samples(spec: ModelSpec, which: NullclineKind,
                      x_range: tuple[float, float] = (0.0, 1.0),
                      n: int = 256) -> NullclineSamples:
    """Sample a zero-growth curve over an x interval.

    Host nullcline: y with u(x, y) = 1, defined for g(x) >= 1 (x <= 1).
    Parasitoid nullcline: y with v(x, y) = 1, defined where b x g(x) >= 1.
    Points outside the defining domain raise DomainError.
    """
    if n < 2:
        raise DomainError("need at least 2 sample points")
    x0, x1 = float(x_range[0]), float(x_range[1])
    if not (math.isfinite(x0) and math.isfinite(x1)) or x0 < 0.0 or x1 <= x0:
        raise DomainError(f"bad x range {x_range}")
    gk, pk, r, b = spec.kernel_args
    xs = np.linspace(x0, x1, n)
    pts = np.empty((n, 2))
    for i, x in enumerate(xs):
        g = _k.growth(gk, r, float(x))
        if which is NullclineKind.HOST:
            if g < 1.0:
                raise DomainError(
                    f"host nullcline undefined at x={x}: g(x) < 1")
            # E(y) = 1/g
            if pk == 0:
                y = g - 1.0
            else:
                y = math.log(g)
        else:
            w = b * x * g
            if w < 1.0:
                raise DomainError(
                    f"parasitoid nullcline undefined at x={x}: b x g(x) < 1")
            if pk == 0:
                y = w - 1.0
            else:
                y = _invert_h_exponential(1.0 / w)
        pts[i, 0] = x
        pts[i, 1] = y
    return NullclineSamples(which=which, points=pts)
