"""Orbit simulation, cycle detection and refinement, Lyapunov exponents,
attractor classification, and basin-of-attraction sampling.

Classification thresholds are explicit (see :class:`Thresholds`) and are
recorded in every report: an orbit is called chaotic when the largest
Lyapunov exponent exceeds ``lyap_zero``, quasiperiodic (invariant circle)
when it sits within ``lyap_zero`` of zero, and periodic below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels as _k
from .equilibria import EquilibriumRecord
from .errors import DomainError, NumericError
from .models import ModelSpec, State
from .stability import StabilityVerdict, eigenvalues_2x2, jacobian_at


class AttractorKind(Enum):
    FIXED_POINT = "fixed-point"
    N_CYCLE = "n-cycle"
    INVARIANT_CIRCLE = "invariant-circle"
    CHAOTIC = "chaotic"
    AXIS_ATTRACTOR = "axis-attractor"
    EXTINCTION = "extinction"


@dataclass(frozen=True)
class OrbitFlags:
    extinct_x: bool = False
    extinct_y: bool = False
    diverged: bool = False

    @classmethod
    def from_bits(cls, bits: int) -> "OrbitFlags":
        return cls(
            extinct_x=bool(bits & _k.FLAG_EXTINCT_X),
            extinct_y=bool(bits & _k.FLAG_EXTINCT_Y),
            diverged=bool(bits & _k.FLAG_DIVERGED),
        )

    @property
    def any(self) -> bool:
        return self.extinct_x or self.extinct_y or self.diverged


@dataclass(frozen=True)
class Orbit:
    spec: ModelSpec
    initial: State
    transient: int
    samples: np.ndarray          # (n, 2) exact iterates after the transient
    flags: OrbitFlags

    @property
    def final(self) -> State:
        if len(self.samples) == 0:
            return self.initial
        return State(float(self.samples[-1, 0]), float(self.samples[-1, 1]))


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    flags: OrbitFlags

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class PeriodicOrbit:
    period: int
    points: np.ndarray           # (period, 2)
    multipliers: tuple[complex, complex]
    stability: StabilityVerdict
    residual: float


@dataclass(frozen=True)
class Thresholds:
    """Classification thresholds; every report carries the set used."""
    lyap_zero: float = 1e-3      # |lambda| below this reads as zero
    cycle_tol: float = 1e-9      # recurrence tolerance for cycle detection
    max_period: int = 64
    point_tol: float = 1e-8      # fixed-point convergence tolerance
    axis_tol: float = 1e-12      # tail counts as on-axis below this y
    match_tol: float = 0.1       # basin nearest-attractor acceptance
    visitation_frac: float = 0.15  # stride diameter fraction for modulation


@dataclass(frozen=True)
class AttractorReport:
    kind: AttractorKind
    lyapunov_max: float
    period: int | None
    modulation_period: int | None
    diameter: float
    center: tuple[float, float]
    final: State
    representative: np.ndarray
    flags: OrbitFlags
    thresholds: Thresholds


MULTIPLIER_BAND = 1e-8
NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-12


def _check_state(s) -> State:
    x, y = float(s[0]), float(s[1])
    if not (math.isfinite(x) and math.isfinite(y)) or x < 0.0 or y < 0.0:
        raise DomainError(f"state must lie in the closed first quadrant, got {s}")
    return State(x, y)


def simulate(spec: ModelSpec, init, transient: int = 10_000,
             n: int = 10_000) -> Orbit:
    """Iterate the map, discarding `transient` steps and recording the next
    `n`. Coordinates that fall below 1e-300 from a positive start raise the
    numeric-extinction flags; values are never clamped. A non-finite state
    sets the diverged flag and truncates the record."""
    init = _check_state(init)
    if transient < 0 or n < 0:
        raise DomainError("transient and n must be >= 0")
    gk, pk, r, b = spec.kernel_args
    out = np.empty((n, 2), dtype=np.float64)
    bits, n_valid = _k.orbit_kernel(gk, pk, r, b, init.x, init.y, transient, out)
    return Orbit(spec=spec, initial=init, transient=transient,
                 samples=out[:n_valid], flags=OrbitFlags.from_bits(bits))


def detect_cycle(orbit_or_samples, max_period: int = 64,
                 tol: float = 1e-9) -> tuple[int, np.ndarray] | None:
    """Smallest period n <= max_period under which the orbit tail recurs
    within `tol` (sup norm), verified over a window of 2*max_period steps.
    A fixed point reports period 1. Returns None when nothing recurs."""
    samples = orbit_or_samples.samples if isinstance(orbit_or_samples, Orbit) \
        else np.asarray(orbit_or_samples, dtype=np.float64)
    L = len(samples)
    if L < 4 * max_period:
        raise DomainError(
            f"need at least {4 * max_period} samples to detect periods "
            f"up to {max_period}, got {L}")
    W = 2 * max_period
    for n in range(1, max_period + 1):
        d = samples[L - W:] - samples[L - W - n: L - n]
        if np.max(np.abs(d)) <= tol:
            return n, samples[L - n:].copy()
    return None


def _cycle_jacobian(spec: ModelSpec, p: tuple[float, float], n: int):
    """Chain-rule Jacobian product along n iterates from p; returns the
    product matrix entries and the n-th iterate."""
    gk, pk, r, b = spec.kernel_args
    a11, a12, a21, a22 = 1.0, 0.0, 0.0, 1.0
    x, y = p
    for _ in range(n):
        j11, j12, j21, j22 = _k.jacobian(gk, pk, r, b, x, y)
        a11, a12, a21, a22 = (
            j11 * a11 + j12 * a21, j11 * a12 + j12 * a22,
            j21 * a11 + j22 * a21, j21 * a12 + j22 * a22,
        )
        x, y = _k.step(gk, pk, r, b, x, y)
    return (a11, a12, a21, a22), (x, y)


def refine_cycle(spec: ModelSpec, points, period: int) -> PeriodicOrbit:
    """Newton refinement of an n-cycle from a nearby guess.

    Solves map^n(p) = p with the chain-rule Jacobian product, so unstable
    cycles converge as readily as stable ones. The guess is the first entry
    of `points`. Raises NumericError (carrying the last iterate) after
    NEWTON_MAX_ITER steps without reaching NEWTON_TOL."""
    if period < 1:
        raise DomainError("period must be >= 1")
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    x, y = float(pts[0, 0]), float(pts[0, 1])
    gk, pk, r, b = spec.kernel_args
    for _ in range(NEWTON_MAX_ITER):
        try:
            (a11, a12, a21, a22), (fx, fy) = _cycle_jacobian(spec, (x, y), period)
        except OverflowError:
            # pure-Python math.exp raises where the compiled kernel would
            # return inf; either way the iteration has left the basin
            raise NumericError("cycle refinement diverged", last_iterate=(x, y))
        rx = fx - x
        ry = fy - y
        if max(abs(rx), abs(ry)) < NEWTON_TOL:
            break
        m11, m12, m21, m22 = a11 - 1.0, a12, a21, a22 - 1.0
        det = m11 * m22 - m12 * m21
        if det == 0.0 or not math.isfinite(det):
            raise NumericError("singular Newton system while refining cycle",
                               last_iterate=(x, y))
        dx = (rx * m22 - ry * m12) / det
        dy = (m11 * ry - m21 * rx) / det
        x -= dx
        y -= dy
        if not (math.isfinite(x) and math.isfinite(y)):
            raise NumericError("cycle refinement diverged", last_iterate=(x, y))
    else:
        raise NumericError(
            f"cycle refinement did not converge in {NEWTON_MAX_ITER} steps",
            last_iterate=(x, y))
    cycle = np.empty((period, 2))
    cx, cy = x, y
    for i in range(period):
        cycle[i, 0] = cx
        cycle[i, 1] = cy
        cx, cy = _k.step(gk, pk, r, b, cx, cy)
    residual = max(abs(cx - x), abs(cy - y))
    (a11, a12, a21, a22), _ = _cycle_jacobian(spec, (x, y), period)
    mults = eigenvalues_2x2(a11, a12, a21, a22)
    top = max(abs(mults[0]), abs(mults[1]))
    if top < 1.0 - MULTIPLIER_BAND:
        stab = StabilityVerdict.STABLE
    elif top <= 1.0 + MULTIPLIER_BAND:
        stab = StabilityVerdict.MARGINAL
    else:
        stab = StabilityVerdict.UNSTABLE
    return PeriodicOrbit(period=period, points=cycle, multipliers=mults,
                         stability=stab, residual=residual)


def lyapunov_max(spec: ModelSpec, init, transient: int = 10_000,
                 n: int = 100_000) -> LyapunovEstimate:
    """Largest Lyapunov exponent along the forward orbit: iterated Jacobian
    on a tangent vector with per-step renormalisation. Deterministic for
    fixed inputs; estimates settle for n of order 1e4 and up. If the orbit
    hits numeric extinction or diverges the result carries the flags."""
    init = _check_state(init)
    if n < 1:
        raise DomainError("n must be >= 1")
    gk, pk, r, b = spec.kernel_args
    lam, bits = _k.lyapunov_kernel(gk, pk, r, b, init.x, init.y, transient, n)
    return LyapunovEstimate(value=lam, flags=OrbitFlags.from_bits(bits))


def _visitation_period(tail: np.ndarray, diameter: float, max_period: int,
                       frac: float) -> int | None:
    """Smallest stride p whose p-step displacement stays under
    frac * diameter: cyclic visitation structure of a multi-piece
    attractor (metadata only)."""
    if diameter <= 0.0:
        return None
    L = len(tail)
    for p in range(1, max_period + 1):
        if L <= p:
            break
        d = np.max(np.abs(tail[p:] - tail[:-p]))
        if d < frac * diameter:
            return p
    return None


def classify_attractor(spec: ModelSpec, init, budget: int = 100_000,
                       thresholds: Thresholds | None = None) -> AttractorReport:
    """Decision cascade over a simulated orbit.

    The budget sets the Lyapunov window; the transient and sampling window
    are budget//5 each (capped at 20000). Cascade: extinction, then
    convergence to a point, then on-axis attractors, then detected cycles,
    then the Lyapunov split between circle and chaos. A negative exponent
    without a detected cycle reports an n-cycle of unknown (> max_period)
    period. Divergence is reported as chaotic with an infinite exponent
    and the diverged flag set.
    """
    th = thresholds or Thresholds()
    if budget < 100:
        raise DomainError("budget must be >= 100 iterations")
    transient = max(4 * th.max_period, budget // 5)
    window = min(max(4 * th.max_period, budget // 5), 20_000)
    orb = simulate(spec, init, transient, window)
    tail = orb.samples
    flags = orb.flags

    def report(kind, lyap, period=None, modulation=None):
        if len(tail) == 0:
            diameter = 0.0
            center = (orb.initial.x, orb.initial.y)
            rep = np.asarray([orb.initial], dtype=np.float64)
        else:
            lo = tail.min(axis=0)
            hi = tail.max(axis=0)
            diameter = float(math.hypot(hi[0] - lo[0], hi[1] - lo[1]))
            center = (float(tail[:, 0].mean()), float(tail[:, 1].mean()))
            stride = max(1, len(tail) // 512)
            rep = tail[::stride].copy()
        return AttractorReport(
            kind=kind, lyapunov_max=lyap, period=period,
            modulation_period=modulation, diameter=diameter, center=center,
            final=orb.final, representative=rep, flags=flags, thresholds=th)

    if flags.diverged or len(tail) == 0:
        return report(AttractorKind.CHAOTIC, math.inf)

    lam_est = lyapunov_max(spec, orb.final, transient=0, n=budget)
    lam = lam_est.value
    flags = OrbitFlags(
        extinct_x=flags.extinct_x or lam_est.flags.extinct_x,
        extinct_y=flags.extinct_y or lam_est.flags.extinct_y,
        diverged=flags.diverged or lam_est.flags.diverged,
    )

    fx, fy = orb.final
    if flags.extinct_x or (abs(fx) <= th.point_tol and abs(fy) <= th.point_tol):
        return report(AttractorKind.EXTINCTION, lam)

    lo = tail.min(axis=0)
    hi = tail.max(axis=0)
    spread = max(hi[0] - lo[0], hi[1] - lo[1])
    nx, ny = _k.step(*spec.kernel_args, fx, fy)
    if spread <= th.point_tol and max(abs(nx - fx), abs(ny - fy)) <= th.point_tol:
        return report(AttractorKind.FIXED_POINT, lam, period=1)

    if hi[1] <= th.axis_tol:
        hit = detect_cycle(tail, th.max_period, th.cycle_tol)
        return report(AttractorKind.AXIS_ATTRACTOR, lam,
                      period=None if hit is None else hit[0])

    hit = detect_cycle(tail, th.max_period, th.cycle_tol)
    if hit is not None:
        return report(AttractorKind.N_CYCLE, lam, period=hit[0])

    if lam > th.lyap_zero:
        return report(AttractorKind.CHAOTIC, lam)
    if lam >= -th.lyap_zero:
        lo_ = tail.min(axis=0)
        hi_ = tail.max(axis=0)
        diameter = float(math.hypot(hi_[0] - lo_[0], hi_[1] - lo_[1]))
        modulation = _visitation_period(tail, diameter, th.max_period,
                                        th.visitation_frac)
        return report(AttractorKind.INVARIANT_CIRCLE, lam, modulation=modulation)
    return report(AttractorKind.N_CYCLE, lam, period=None)


def flip_cycles_near(spec: ModelSpec, eq: EquilibriumRecord,
                     offsets=(0.01, 0.02, 0.05, 0.1, 0.2, 0.3),
                     ) -> list[PeriodicOrbit]:
    """Two-cycles near an equilibrium, found by perturbing along the
    eigenvector of the most negative real eigenvalue and running the
    second-iterate Newton solver over a ladder of offsets (both signs).
    Distinct cycles are returned sorted by amplitude; the equilibrium
    itself (a period-1 solution of the second iterate) is filtered out."""
    jac = jacobian_at(spec, eq.state)
    eigs = jac.eigenvalues()
    lam = min((e for e in eigs if e.imag == 0.0), default=None,
              key=lambda e: e.real)
    if lam is None:
        return []
    lam = lam.real
    if abs(jac.j12) > 1e-14:
        vx, vy = jac.j12, lam - jac.j11
    else:
        vx, vy = lam - jac.j22, jac.j21
    nrm = math.hypot(vx, vy)
    if nrm == 0.0:
        return []
    vx /= nrm
    vy /= nrm
    ex, ey = eq.state
    found: list[PeriodicOrbit] = []
    for mag in offsets:
        for sign in (1.0, -1.0):
            seed = (ex + sign * mag * vx, ey + sign * mag * vy)
            if seed[0] <= 0.0 or seed[1] <= 0.0:
                continue
            try:
                po = refine_cycle(spec, [seed], 2)
            except NumericError:
                continue
            amp = float(np.hypot(po.points[:, 0] - ex,
                                 po.points[:, 1] - ey).max())
            if amp < 1e-7:
                continue  # collapsed back onto the equilibrium
            if any(np.abs(po.points - q.points).max() < 1e-6 or
                   np.abs(po.points - q.points[::-1]).max() < 1e-6
                   for q in found):
                continue
            found.append(po)
    found.sort(key=lambda po: float(
        np.hypot(po.points[:, 0] - ex, po.points[:, 1] - ey).max()))
    return found


# ---------------------------------------------------------------------------
# basins of attraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasinGrid:
    x_range: tuple[float, float] = (0.0, 1.5)
    y_range: tuple[float, float] = (0.0, 3.0)
    nx: int = 256
    ny: int = 256

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.linspace(self.x_range[0], self.x_range[1], self.nx)
        ys = np.linspace(self.y_range[0], self.y_range[1], self.ny)
        XX, YY = np.meshgrid(xs, ys)
        return XX.ravel(), YY.ravel()


def _attractor_points(a) -> np.ndarray:
    if isinstance(a, AttractorReport):
        if a.kind is AttractorKind.EXTINCTION:
            return np.zeros((1, 2))
        return np.asarray(a.representative, dtype=np.float64)
    if isinstance(a, PeriodicOrbit):
        return np.asarray(a.points, dtype=np.float64)
    if isinstance(a, EquilibriumRecord):
        return np.asarray([a.state], dtype=np.float64)
    if isinstance(a, State):
        return np.asarray([a], dtype=np.float64)
    arr = np.atleast_2d(np.asarray(a, dtype=np.float64))
    if arr.shape[1] != 2:
        raise DomainError("attractor representative must be (n, 2) points")
    return arr


def basin_sample(spec: ModelSpec, grid: BasinGrid, attractors,
                 budget: int = 4096, match_tol: float = 0.1) -> np.ndarray:
    """Assign each grid point to the nearest attractor of its forward
    orbit's endpoint, or -1 for none within match_tol.

    Deterministic: row-major grid, fixed iteration budget per point, and a
    pure distance argmin against the attractor representatives.
    """
    if not attractors:
        raise DomainError("need at least one attractor to match against")
    reps = [_attractor_points(a) for a in attractors]
    xs0, ys0 = grid.points()
    gk, pk, r, b = spec.kernel_args
    xs, ys, _flags = _k.orbit_final_batch(gk, pk, r, b, xs0, ys0, budget)
    finals = np.column_stack([xs, ys])
    n_pts = finals.shape[0]
    best = np.full(n_pts, np.inf)
    label = np.full(n_pts, -1, dtype=np.int16)
    chunk = 8192
    for lo in range(0, n_pts, chunk):
        hi = min(lo + chunk, n_pts)
        block = finals[lo:hi]
        for ai, rep in enumerate(reps):
            d = np.sqrt(
                (block[:, None, 0] - rep[None, :, 0]) ** 2
                + (block[:, None, 1] - rep[None, :, 1]) ** 2
            ).min(axis=1)
            closer = d < best[lo:hi]
            best[lo:hi] = np.where(closer, d, best[lo:hi])
            label[lo:hi] = np.where(closer, ai, label[lo:hi])
    label[best > match_tol] = -1
    return label.reshape(grid.ny, grid.nx)
