"""Analytic stability-boundary curves and point-in-region queries.

The interesting boundaries are: the flip curve of model 2 (parametric in
u = r/b > 3/2), the Neimark-Sacker curve of model 3, and all three Jury
curves of model 4 (parametric in the equilibrium parasitoid density y).
The lines b = 1 (transcritical) and r = 0 (degenerate) close the stability
regions and are emitted as explicit degenerate curves so region plots can
be assembled from this module alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _curves
from .equilibria import EquilibriumRecord, coexistence
from .errors import BracketError, DomainError
from .models import ModelSpec
from .stability import JuryReport, StabilityVerdict, jury_report

DEFAULT_POINTS = 512
DEFAULT_INTERNAL_RANGE = (1e-4, 10.0)


@dataclass(frozen=True)
class BoundaryCurve:
    model: int
    jury: int
    param_kind: str              # "r" or "R0"
    internal: np.ndarray         # curve parameter (u for model 2, else y)
    growth_param: np.ndarray
    b: np.ndarray
    degenerate_line: bool = False

    @property
    def samples(self) -> np.ndarray:
        """(n, 2) array of (growth_param, b) pairs."""
        return np.column_stack([self.growth_param, self.b])


@dataclass(frozen=True)
class RegionVerdict:
    stable: bool
    failing_conditions: tuple[str, ...]
    n_coexistence: int
    stable_equilibrium_index: int | None
    degenerate: bool = False
    verdicts: tuple[StabilityVerdict, ...] = field(default=())
    reports: tuple[JuryReport, ...] = field(default=())
    records: tuple[EquilibriumRecord, ...] = field(default=())


def _geomspace(lo: float, hi: float, n: int) -> np.ndarray:
    if not (0.0 < lo <= hi) or not math.isfinite(hi):
        raise DomainError(f"internal-variable range must be positive, "
                          f"got ({lo}, {hi})")
    return np.exp(np.linspace(math.log(lo), math.log(hi), n))


def curve_model2_jury2(u_range: tuple[float, float] | None = None,
                       n: int = DEFAULT_POINTS) -> BoundaryCurve:
    """Model 2 flip boundary. Without an explicit range, u is sampled as
    3/2 plus a geometric grid of offsets over DEFAULT_INTERNAL_RANGE
    (the curve blows up at u -> 3/2+)."""
    if n < 2:
        raise DomainError("need at least 2 curve points")
    if u_range is None:
        u = 1.5 + _geomspace(*DEFAULT_INTERNAL_RANGE, n)
    else:
        lo, hi = u_range
        if lo <= 1.5:
            raise DomainError("internal variable u must be > 3/2")
        u = _geomspace(lo, hi, n)
    r, b = _curves.model2_jury2(u)
    return BoundaryCurve(model=2, jury=2, param_kind="r",
                         internal=u, growth_param=r, b=b)


def curve_model3_jury3(y_range: tuple[float, float] = DEFAULT_INTERNAL_RANGE,
                       n: int = DEFAULT_POINTS) -> BoundaryCurve:
    """Model 3 Neimark-Sacker boundary in the (R0, b) plane."""
    if n < 2:
        raise DomainError("need at least 2 curve points")
    y = _geomspace(*y_range, n)
    R0, b = _curves.model3_jury3(y)
    return BoundaryCurve(model=3, jury=3, param_kind="R0",
                         internal=y, growth_param=R0, b=b)


def curves_model4(jury: int,
                  y_range: tuple[float, float] = DEFAULT_INTERNAL_RANGE,
                  n: int = DEFAULT_POINTS) -> BoundaryCurve:
    """Model 4 Jury boundary (jury in {1, 2, 3}) in the (r, b) plane."""
    if jury not in (1, 2, 3):
        raise DomainError(f"jury index must be 1, 2 or 3, got {jury}")
    if n < 2:
        raise DomainError("need at least 2 curve points")
    y = _geomspace(*y_range, n)
    fn = {1: _curves.model4_jury1, 2: _curves.model4_jury2,
          3: _curves.model4_jury3}[jury]
    r, b = fn(y)
    return BoundaryCurve(model=4, jury=jury, param_kind="r",
                         internal=y, growth_param=r, b=b)


def boundary_lines(model: int, growth_max: float = 10.0, b_max: float = 10.0,
                   n: int = 2) -> list[BoundaryCurve]:
    """The degenerate closing boundaries: b = 1 (Jury 1 / transcritical)
    and r = 0, i.e. R0 = 1 (Jury 1 and 3 both vanish)."""
    if model not in (1, 2, 3, 4):
        raise DomainError(f"model index must be 1..4, got {model}")
    kind = "R0" if model in (1, 3) else "r"
    g_lo = 1.0 if kind == "R0" else 0.0
    gs = np.linspace(g_lo, growth_max, n)
    bs = np.linspace(0.0, b_max, n)
    return [
        BoundaryCurve(model=model, jury=1, param_kind=kind, internal=gs,
                      growth_param=gs, b=np.full(n, 1.0), degenerate_line=True),
        BoundaryCurve(model=model, jury=3, param_kind=kind, internal=bs,
                      growth_param=np.full(n, g_lo), b=bs, degenerate_line=True),
    ]


def curve(model: int, jury: int, internal_range=None,
          n: int = DEFAULT_POINTS) -> BoundaryCurve:
    """Dispatch to the analytic curve for (model, jury)."""
    if (model, jury) == (2, 2):
        return curve_model2_jury2(internal_range, n)
    if (model, jury) == (3, 3):
        return curve_model3_jury3(internal_range or DEFAULT_INTERNAL_RANGE, n)
    if model == 4:
        return curves_model4(jury, internal_range or DEFAULT_INTERNAL_RANGE, n)
    raise DomainError(f"no analytic boundary curve for model {model}, jury {jury}")


# ---------------------------------------------------------------------------
# curve inversion
# ---------------------------------------------------------------------------

def _invert_monotone(fn, component: int, target: float,
                     t_lo: float, t_hi: float) -> float:
    """Bisection for fn(t)[component] = target on [t_lo, t_hi].

    Monotonicity over the bracket is assumed (and asserted via the
    endpoint ordering); the curves used here are monotone in their
    internal variable over their documented domains.
    """
    f_lo = float(np.asarray(fn(t_lo)[component]))
    f_hi = float(np.asarray(fn(t_hi)[component]))
    increasing = f_hi >= f_lo
    lo_val, hi_val = (f_lo, f_hi) if increasing else (f_hi, f_lo)
    if not (lo_val <= target <= hi_val):
        raise BracketError(
            f"target {target} outside curve range [{lo_val}, {hi_val}]",
            bracket=(t_lo, t_hi))
    lo, hi = t_lo, t_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = float(np.asarray(fn(mid)[component]))
        if (val < target) == increasing:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def curve_point_at(model: int, jury: int, *, growth_param: float | None = None,
                   b: float | None = None) -> tuple[float, float, float]:
    """Invert an analytic curve: given the growth parameter (r or R0, per
    the curve's param_kind) or given b, return (growth_param, b, internal).

    For model 2 the inversion is restricted to the stability branch
    u in (3/2, 2], where both coordinates are monotone.
    """
    if (model, jury) not in _curves.CURVES:
        raise DomainError(f"no analytic boundary curve for model {model}, jury {jury}")
    if (growth_param is None) == (b is None):
        raise DomainError("give exactly one of growth_param or b")
    fn, _kind = _curves.CURVES[(model, jury)]
    component = 0 if growth_param is not None else 1
    target = growth_param if growth_param is not None else b
    if model == 2:
        t_lo, t_hi = 1.5 + 1e-13, 2.0
    else:
        t_lo, t_hi = 1e-8, 50.0
    t = _invert_monotone(fn, component, float(target), t_lo, t_hi)
    g_val, b_val = fn(t)
    return float(np.asarray(g_val)), float(np.asarray(b_val)), t


# ---------------------------------------------------------------------------
# direct region queries
# ---------------------------------------------------------------------------

def region_verdict(spec: ModelSpec) -> RegionVerdict:
    """Stability verdict for the coexistence equilibria at one parameter
    point, computed directly (equilibria + Jury), not from the curves.

    When no equilibrium is stable, failing_conditions reports the failures
    of the largest-y equilibrium (the only candidate for stability in the
    two-equilibria regime).
    """
    if spec.degenerate:
        return RegionVerdict(stable=False, failing_conditions=("J1", "J3"),
                             n_coexistence=0, stable_equilibrium_index=None,
                             degenerate=True)
    records = coexistence(spec)
    reports = tuple(jury_report(spec, rec) for rec in records)
    verdicts = tuple(rep.verdict for rep in reports)
    stable_idx = None
    for i, rep in enumerate(reports):
        if rep.verdict is StabilityVerdict.STABLE:
            stable_idx = i
            break
    if stable_idx is not None:
        failing: tuple[str, ...] = ()
    elif reports:
        failing = reports[-1].failing
    else:
        failing = ("J1",)  # no interior equilibrium at all
    return RegionVerdict(
        stable=stable_idx is not None,
        failing_conditions=failing,
        n_coexistence=len(records),
        stable_equilibrium_index=stable_idx,
        verdicts=verdicts,
        reports=reports,
        records=tuple(records),
    )


def _respec(spec: ModelSpec, param: str, value: float) -> ModelSpec:
    if param == "b":
        return ModelSpec(spec.growth, spec.parasitism, spec.r, value)
    if param == "r":
        return ModelSpec(spec.growth, spec.parasitism, value, spec.b)
    if param == "R0":
        if value < 1.0:
            raise DomainError(f"R0 must be >= 1, got {value}")
        return ModelSpec(spec.growth, spec.parasitism, math.log(value), spec.b)
    raise DomainError(f"unknown parameter {param!r}")


def _jury_residual(spec: ModelSpec, jury: int) -> float:
    records = coexistence(spec)
    if not records:
        raise BracketError(
            f"no coexistence equilibrium at r={spec.r}, b={spec.b}")
    rep = jury_report(spec, records[-1])
    return {1: rep.j1, 2: rep.j2, 3: rep.j3}[jury]


def critical_parameter(spec: ModelSpec, param: str, jury: int,
                       bracket: tuple[float, float]) -> float:
    """Bisection for the zero of a Jury residual along one parameter line.

    The residual is evaluated at the largest-y coexistence equilibrium.
    Both bracket endpoints must yield an equilibrium and residuals of
    opposite sign. Independent of the analytic curves, so the two can be
    cross-checked against each other.
    """
    if jury not in (1, 2, 3):
        raise DomainError(f"jury index must be 1, 2 or 3, got {jury}")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise DomainError(f"bad bracket {bracket}")
    f_lo = _jury_residual(_respec(spec, param, lo), jury)
    f_hi = _jury_residual(_respec(spec, param, hi), jury)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise BracketError(
            f"Jury-{jury} residual does not change sign over {bracket}: "
            f"{f_lo:.3e} .. {f_hi:.3e}", bracket=bracket)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = _jury_residual(_respec(spec, param, mid), jury)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo = mid
            f_lo = f_mid
        if hi - lo <= 1e-13 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)
