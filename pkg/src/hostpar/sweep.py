"""Parameter sweeps: 1-D bifurcation scans and 2-D stability rasters.

Work units (parameter points, raster cells) are independent; parallel
execution partitions index ranges across threads writing to disjoint
output slices, so results are byte-identical for any worker count. The
one exception is the inherit-previous-attractor continuation policy, whose
points form a sequential chain; such scans always run serially and the
worker count only changes nothing.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k
from . import io
from .dynamics import OrbitFlags, classify_attractor
from .errors import DomainError
from .models import ModelSpec, State
from ._accel import backend_name

SWEEP_SCHEMA = "1"

# fixed multi-start fan used by the reset policy
DEFAULT_INITIALS = (
    (0.2, 0.2), (0.5, 0.3), (0.8, 0.7), (0.3, 0.4),
    (1.2, 0.1), (0.1, 1.0), (0.9, 1.5), (0.6, 0.05),
)


@dataclass(frozen=True)
class SweepConfig:
    model: int
    param: str                         # "b", "r" or "R0"
    start: float
    stop: float
    count: int
    fixed_r: float | None = None       # the non-swept growth parameter
    fixed_b: float | None = None
    policy: str = "inherit"            # "inherit" or "reset"
    transient: int = 2000
    tail: int = 256
    budget: int = 20_000               # classification budget per point
    initials: tuple = ((0.5, 0.3),)
    record: tuple = ("tail", "class")  # extras: "equilibria"
    version: str = SWEEP_SCHEMA

    def __post_init__(self):
        if self.count < 2:
            raise DomainError("sweep needs count >= 2")
        if self.param not in ("b", "r", "R0"):
            raise DomainError(f"unknown sweep parameter {self.param!r}")
        if self.policy not in ("inherit", "reset"):
            raise DomainError(f"unknown policy {self.policy!r}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def spec_at(self, value: float) -> ModelSpec:
        r = self.fixed_r
        b = self.fixed_b
        if self.param == "b":
            b = value
        elif self.param == "r":
            r = value
        else:
            if value < 1.0:
                raise DomainError(f"R0 must be >= 1, got {value}")
            r = math.log(value)
        if r is None or b is None:
            raise DomainError("the non-swept parameter must be fixed")
        return ModelSpec.from_index(self.model, b=b, r=r)

    def digest(self) -> str:
        parts = (self.model, self.param, self.start, self.stop, self.count,
                 self.fixed_r, self.fixed_b, self.policy, self.transient,
                 self.tail, self.budget, self.initials, self.record,
                 self.version)
        return hashlib.sha256(repr(parts).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SweepPoint:
    value: float
    tails: tuple[np.ndarray, ...]        # one (tail, 2) array per initial
    classes: tuple[str, ...]
    flags: tuple[OrbitFlags, ...]
    n_equilibria: int | None = None
    jury_residuals: tuple | None = None  # (j1, j2, j3) per equilibrium
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    points: tuple[SweepPoint, ...]
    provenance: dict = field(default_factory=dict)

    def to_csv_text(self) -> str:
        """Full record: one row per retained tail state per initial."""
        rows = []
        for pt in self.points:
            for k, tail in enumerate(pt.tails):
                cls = pt.classes[k] if k < len(pt.classes) else ""
                for j in range(len(tail)):
                    rows.append((pt.value, k, tail[j, 0], tail[j, 1], cls))
        return io.csv_text(("param", "initial", "x", "y", "class"), rows)

    def to_plot_csv_text(self, coord: str = "y") -> str:
        """Bifurcation-diagram export: `param,x_or_y,class` rows for the
        chosen coordinate."""
        col = {"x": 0, "y": 1}.get(coord)
        if col is None:
            raise DomainError(f"coord must be 'x' or 'y', got {coord!r}")
        rows = []
        for pt in self.points:
            for k, tail in enumerate(pt.tails):
                cls = pt.classes[k] if k < len(pt.classes) else ""
                for j in range(len(tail)):
                    rows.append((pt.value, tail[j, col], cls))
        return io.csv_text(("param", "x_or_y", "class"), rows)


def _scan_point(config: SweepConfig, value: float, starts) -> SweepPoint:
    try:
        spec = config.spec_at(float(value))
    except DomainError as exc:
        return SweepPoint(value=float(value), tails=(), classes=(), flags=(),
                          error=str(exc))
    gk, pk, r, b = spec.kernel_args
    tails = []
    classes = []
    flags = []
    for s in starts:
        out = np.empty((config.tail, 2))
        bits, n_valid = _k.orbit_kernel(gk, pk, r, b, float(s[0]), float(s[1]),
                                        config.transient, out)
        tails.append(out[:n_valid])
        flags.append(OrbitFlags.from_bits(bits))
        if "class" in config.record:
            rep = classify_attractor(spec, State(float(s[0]), float(s[1])),
                                     budget=config.budget)
            classes.append(rep.kind.value)
    n_eq = None
    jr = None
    if "equilibria" in config.record or "jury" in config.record:
        count, y0, y1, _tang, _st = _k.coexistence_roots(gk, pk, r, b)
        n_eq = int(count)
        if "jury" in config.record:
            resids = []
            for y in (y0, y1)[:count]:
                x = _k.host_nullcline_x(gk, pk, r, y)
                tau, delta = _k.jury_terms(gk, pk, r, x, y)
                resids.append((1.0 - tau + delta, 1.0 + tau + delta,
                               1.0 - delta))
            jr = tuple(resids)
    return SweepPoint(value=float(value), tails=tuple(tails),
                      classes=tuple(classes), flags=tuple(flags),
                      n_equilibria=n_eq, jury_residuals=jr)


def bifurcation_scan(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Simulate past the transient at each swept value and record orbit
    tails plus attractor classes.

    Policy "inherit": each point continues from the previous point's final
    state (exposes hysteresis; runs serially by construction). Policy
    "reset": every point restarts from the configured fan of initial
    states; points are independent and parallelise.
    """
    values = config.values()
    points: list[SweepPoint | None] = [None] * len(values)
    if config.policy == "inherit":
        current = tuple(config.initials)
        for i, v in enumerate(values):
            pt = _scan_point(config, v, current)
            points[i] = pt
            if pt.error is None and pt.tails and all(len(t) for t in pt.tails):
                current = tuple((float(t[-1, 0]), float(t[-1, 1]))
                                for t in pt.tails)
        assembled = points
    else:
        starts = tuple(config.initials)
        if workers <= 1:
            assembled = [_scan_point(config, v, starts) for v in values]
        else:
            assembled = points
            chunks = np.array_split(np.arange(len(values)), workers)

            def run(idx):
                for i in idx:
                    assembled[i] = _scan_point(config, values[i], starts)

            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(run, chunks))
    prov = {
        "config_digest": config.digest(),
        "backend": backend_name(),
        "schema_version": config.version,
    }
    return SweepResult(config=config, points=tuple(assembled), provenance=prov)


# ---------------------------------------------------------------------------
# 2-D stability raster
# ---------------------------------------------------------------------------

_FAIL_NAMES = {1: "J1", 2: "J2", 4: "J3"}


def _bits_failing(bits: int) -> tuple[str, ...]:
    return tuple(name for bit, name in _FAIL_NAMES.items() if bits & bit)


def _bits_marginal(bits: int) -> tuple[str, ...]:
    return tuple(name for bit, name in _FAIL_NAMES.items() if bits & (bit << 3))


@dataclass(frozen=True)
class RegionRaster:
    model: int
    param_kind: str                  # "r" or "R0"
    growth_values: np.ndarray        # shape (nx,)
    b_values: np.ndarray             # shape (ny,)
    counts: np.ndarray               # (ny, nx) coexistence-equilibrium count
    stable: np.ndarray               # (ny, nx) bool: some equilibrium stable
    stable_index: np.ndarray         # (ny, nx) int8, -1 when none
    fail_bits: np.ndarray            # (ny, nx) of the relevant equilibrium
    refined: tuple = ()              # (growth, b, count, stable) sub-cells
    provenance: dict = field(default_factory=dict)

    def to_csv_text(self) -> str:
        rows = []
        for iy in range(len(self.b_values)):
            for ix in range(len(self.growth_values)):
                rows.append((
                    self.growth_values[ix], self.b_values[iy],
                    int(self.counts[iy, ix]), bool(self.stable[iy, ix]),
                    "|".join(_bits_failing(int(self.fail_bits[iy, ix]))),
                ))
        for g, b, c, s in self.refined:
            rows.append((g, b, int(c), bool(s), "refined"))
        return io.csv_text(
            ("growth_param", "b", "n_equilibria", "stable", "failing_conditions"),
            rows)


def _raster_arrays(model: int, rs_flat, bs_flat, workers: int):
    gk = (model - 1) & 1
    pk = (model - 1) >> 1
    n = len(rs_flat)
    if workers <= 1:
        return _k.region_cells(gk, pk, rs_flat, bs_flat)
    outs = {
        "counts": np.zeros(n, dtype=np.int8),
        "y_small": np.zeros(n), "y_large": np.zeros(n),
        "bits_small": np.zeros(n, dtype=np.int8),
        "bits_large": np.zeros(n, dtype=np.int8),
        "tangent": np.zeros(n, dtype=np.int8),
        "status": np.zeros(n, dtype=np.int8),
    }
    bounds = np.linspace(0, n, workers + 1).astype(int)

    def run(w):
        lo, hi = bounds[w], bounds[w + 1]
        if lo == hi:
            return
        part = _k.region_cells(gk, pk, rs_flat[lo:hi], bs_flat[lo:hi])
        for key, arr in part.items():
            outs[key][lo:hi] = arr

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, range(workers)))
    return outs


def region_scan(model: int, growth_range: tuple[float, float],
                b_range: tuple[float, float], resolution: tuple[int, int],
                workers: int = 1, refine: bool = True) -> RegionRaster:
    """Per-cell stability verdicts over a (growth-parameter, b) rectangle.

    The growth parameter is R0 for models 1/3 and r for models 2/4. The
    relevant equilibrium for the reported failure bits is the stable one
    when present, else the largest-y one. Cells whose stability verdict
    differs from a neighbour's are re-evaluated once on a 4x subdivision
    (one refinement level).
    """
    if model not in (1, 2, 3, 4):
        raise DomainError(f"model index must be 1..4, got {model}")
    nx, ny = int(resolution[0]), int(resolution[1])
    if nx < 2 or ny < 2:
        raise DomainError("resolution must be at least 2x2")
    param_kind = "R0" if model in (1, 3) else "r"
    gvals = np.linspace(growth_range[0], growth_range[1], nx)
    bvals = np.linspace(b_range[0], b_range[1], ny)
    if param_kind == "R0" and np.any(gvals < 1.0):
        raise DomainError("R0 range must stay >= 1")
    if param_kind == "r" and np.any(gvals < 0.0):
        raise DomainError("r range must stay >= 0")
    if np.any(bvals <= 0.0):
        raise DomainError("b range must stay > 0")
    rs = np.log(gvals) if param_kind == "R0" else gvals
    GG, BB = np.meshgrid(rs, bvals)
    out = _raster_arrays(model, GG.ravel(), BB.ravel(), workers)

    counts = out["counts"].reshape(ny, nx)
    bits_small = out["bits_small"].reshape(ny, nx)
    bits_large = out["bits_large"].reshape(ny, nx)
    small_ok = (counts >= 1) & ((bits_small & 0b111111) == 0)
    large_ok = (counts >= 2) & ((bits_large & 0b111111) == 0)
    stable = small_ok | large_ok
    stable_index = np.full((ny, nx), -1, dtype=np.int8)
    stable_index[large_ok] = 1
    stable_index[small_ok] = 0  # ascending-y order: index 0 wins when both
    # failure bits of the relevant equilibrium: stable one, else largest-y
    fail_bits = np.where(counts >= 2, bits_large, bits_small).astype(np.int8)
    fail_bits = np.where(small_ok, bits_small, fail_bits).astype(np.int8)
    fail_bits = np.where(counts == 0, 1, fail_bits)  # no interior point: J1 side
    RR = GG.reshape(ny, nx)
    fail_bits = np.where(RR <= 0.0, 1 | 4, fail_bits)  # r = 0 line: J1 and J3
    fail_bits = np.where(stable, 0, fail_bits).astype(np.int8)

    refined: list = []
    if refine:
        edge = np.zeros_like(stable, dtype=bool)
        edge[:, :-1] |= stable[:, :-1] != stable[:, 1:]
        edge[:, 1:] |= stable[:, :-1] != stable[:, 1:]
        edge[:-1, :] |= stable[:-1, :] != stable[1:, :]
        edge[1:, :] |= stable[:-1, :] != stable[1:, :]
        iy, ix = np.nonzero(edge)
        if len(ix):
            dg = (gvals[1] - gvals[0]) if nx > 1 else 0.0
            db = (bvals[1] - bvals[0]) if ny > 1 else 0.0
            sub_g = []
            sub_b = []
            for gy, gx in zip(iy, ix):
                for fy in (-0.25, 0.25):
                    for fx in (-0.25, 0.25):
                        gP = gvals[gx] + fx * dg
                        bP = bvals[gy] + fy * db
                        if bP > 0.0 and (gP >= 1.0 if param_kind == "R0"
                                         else gP >= 0.0):
                            sub_g.append(gP)
                            sub_b.append(bP)
            if sub_g:
                sub_r = (np.log(sub_g) if param_kind == "R0"
                         else np.asarray(sub_g))
                sub = _raster_arrays(model, np.asarray(sub_r),
                                     np.asarray(sub_b), workers)
                for k in range(len(sub_g)):
                    cnt = int(sub["counts"][k])
                    ok = (cnt >= 1 and (int(sub["bits_small"][k]) & 0b111111) == 0) \
                        or (cnt >= 2 and (int(sub["bits_large"][k]) & 0b111111) == 0)
                    refined.append((float(sub_g[k]), float(sub_b[k]), cnt, ok))

    digest = hashlib.sha256(repr((model, tuple(growth_range), tuple(b_range),
                                  (nx, ny), refine)).encode()).hexdigest()[:16]
    prov = {"backend": backend_name(), "workers_invariant": True,
            "request_digest": digest}
    return RegionRaster(model=model, param_kind=param_kind,
                        growth_values=gvals, b_values=bvals, counts=counts,
                        stable=stable, stable_index=stable_index,
                        fail_bits=fail_bits, refined=tuple(refined),
                        provenance=prov)


def run_parallel(work, workers: int = 1):
    """Execute a prepared sweep (SweepConfig), a raster request, or a list
    of such work items with the given worker count; output equals the
    serial run byte for byte. An empty list yields an empty result."""
    if workers < 1:
        raise DomainError("worker count must be >= 1")
    if isinstance(work, (list, tuple)):
        return [run_parallel(item, workers) for item in work]
    if isinstance(work, SweepConfig):
        return bifurcation_scan(work, workers=workers)
    if isinstance(work, dict) and work.get("kind") == "region":
        return region_scan(work["model"], work["growth_range"],
                           work["b_range"], work["resolution"],
                           workers=workers, refine=work.get("refine", True))
    raise DomainError(f"cannot dispatch work item {work!r}")
