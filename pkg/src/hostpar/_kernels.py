"""Hot numeric kernels for the four host-parasitoid maps.

Everything here works on plain scalars/ndarrays and integer kind codes so
the same source compiles under numba (see :mod:`hostpar._accel`). The
nondimensional map is

    x' = x * g(x) * E(y)
    y' = b * x * g(x) * h(y) * y

with per-capita recruitment g, escape fraction E(y) = 1 - y*h(y), and
per-parasitoid kill fraction h. Kind codes: FRACTIONAL growth is
g(x) = R0 / (1 + (R0-1) x) with R0 = exp(r); EXPONENTIAL growth is
g(x) = exp(r (1-x)). FRACTIONAL parasitism is h(y) = 1/(1+y);
EXPONENTIAL parasitism is h(y) = (1 - exp(-y))/y.

Only the batched orbit driver has a second, vectorised implementation for
the numpy fallback path; every other routine is single-source.
"""

import math

import numpy as np

from ._accel import NUMBA_ENABLED, maybe_jit

FRACTIONAL = 0
EXPONENTIAL = 1

# Below this, exponential-parasitism forms switch to Taylor series; the
# direct formulas are 0/0 at y = 0.
SERIES_CUTOFF = 1e-4

# An orbit coordinate falling below this is reported "numerically extinct".
EXTINCT_FLOOR = 1e-300

FLAG_EXTINCT_X = 1
FLAG_EXTINCT_Y = 2
FLAG_DIVERGED = 4

# Root-scan defaults: 2048 log-spaced points from Y_SCAN_MIN up to a
# model-dependent upper bound, bisection to width 1e-6, Newton polish to
# residual 1e-12.
SCAN_POINTS = 2048
Y_SCAN_MIN = 1e-8
BISECT_WIDTH = 1e-6
POLISH_TOL = 1e-12
POLISH_MAX_ITER = 100
TANGENT_MERGE = 1e-7
TANGENT_RESIDUAL = 1e-9


# ---------------------------------------------------------------------------
# scalar map primitives
# ---------------------------------------------------------------------------

@maybe_jit
def growth(gk, r, x):
    """Per-capita recruitment g(x)."""
    if gk == FRACTIONAL:
        R0 = math.exp(r)
        return R0 / (1.0 + (R0 - 1.0) * x)
    return math.exp(r * (1.0 - x))


@maybe_jit
def growth_deriv(gk, r, x):
    """g'(x)."""
    g = growth(gk, r, x)
    if gk == FRACTIONAL:
        R0 = math.exp(r)
        return -(R0 - 1.0) / R0 * g * g
    return -r * g


@maybe_jit
def growth_log_deriv(gk, r, x):
    """g'(x)/g(x), exact per kind (no quotient noise)."""
    if gk == FRACTIONAL:
        R0 = math.exp(r)
        return -(R0 - 1.0) / (1.0 + (R0 - 1.0) * x)
    return -r


@maybe_jit
def parasitism(pk, y):
    """Kill fraction per parasitoid h(y); h(0) = 1 for both kinds."""
    if pk == FRACTIONAL:
        return 1.0 / (1.0 + y)
    if y < SERIES_CUTOFF:
        return 1.0 - y / 2.0 + y * y / 6.0 - y * y * y / 24.0
    return -math.expm1(-y) / y


@maybe_jit
def parasitism_deriv(pk, y):
    """h'(y)."""
    if pk == FRACTIONAL:
        q = 1.0 + y
        return -1.0 / (q * q)
    if y < SERIES_CUTOFF:
        return -0.5 + y / 3.0 - y * y / 8.0 + y * y * y / 30.0
    return (math.expm1(-y) + y * math.exp(-y)) / (y * y)


@maybe_jit
def escape(pk, y):
    """Fraction escaping parasitism, E(y) = 1 - y h(y)."""
    if pk == FRACTIONAL:
        return 1.0 / (1.0 + y)
    return math.exp(-y)


@maybe_jit
def step(gk, pk, r, b, x, y):
    """One application of the map. The canonical evaluation order used by
    every orbit kernel, so results agree bitwise across entry points."""
    g = growth(gk, r, x)
    xg = x * g
    return xg * escape(pk, y), b * xg * parasitism(pk, y) * y


@maybe_jit
def jacobian(gk, pk, r, b, x, y):
    """Analytic Jacobian entries (j11, j12, j21, j22) at any state."""
    g = growth(gk, r, x)
    gp = growth_deriv(gk, r, x)
    h = parasitism(pk, y)
    hp = parasitism_deriv(pk, y)
    E = escape(pk, y)
    u = g * E
    ux = gp * E
    uy = -g * (h + y * hp)
    v = b * x * g * h
    vx = b * h * (g + x * gp)
    vy = b * x * g * hp
    return x * ux + u, x * uy, y * vx, y * vy + v


@maybe_jit
def eq_partials(gk, pk, r, x, y):
    """Partial derivatives (u_x, u_y, v_x, v_y) in the simplified form
    valid where u = v = 1 (the closed forms per growth/parasitism kind)."""
    ux = growth_log_deriv(gk, r, x)
    if pk == FRACTIONAL:
        h = 1.0 / (1.0 + y)
        uy = -h
        vy = -h
    else:
        uy = -1.0
        vy = parasitism_deriv(EXPONENTIAL, y) / parasitism(EXPONENTIAL, y)
    vx = 1.0 / x + ux
    return ux, uy, vx, vy


@maybe_jit
def jury_terms(gk, pk, r, x, y):
    """Trace and determinant of the coexistence Jacobian, built from the
    simplified equilibrium partials."""
    ux, uy, vx, vy = eq_partials(gk, pk, r, x, y)
    cross = x * y * (ux * vy - uy * vx)
    tau = 2.0 + x * ux + y * vy
    delta = tau - 1.0 + cross
    return tau, delta


# ---------------------------------------------------------------------------
# coexistence roots (nullcline elimination)
# ---------------------------------------------------------------------------

@maybe_jit
def host_nullcline_x(gk, pk, r, y):
    """x on the host nullcline u(x, y) = 1 for a given y (closed form)."""
    if gk == FRACTIONAL:
        R0 = math.exp(r)
        return (R0 * escape(pk, y) - 1.0) / (R0 - 1.0)
    if pk == FRACTIONAL:
        return 1.0 - math.log1p(y) / r
    return 1.0 - y / r


@maybe_jit
def nullcline_residual(gk, pk, r, b, y):
    """v(x(y), y) - 1 along the host nullcline; its positive roots are the
    coexistence equilibria."""
    x = host_nullcline_x(gk, pk, r, y)
    if pk == FRACTIONAL:
        return b * x - 1.0
    return b * x * (math.expm1(y) / y) - 1.0


@maybe_jit
def nullcline_residual_deriv(gk, pk, r, b, y):
    """d/dy of :func:`nullcline_residual`."""
    x = host_nullcline_x(gk, pk, r, y)
    if gk == FRACTIONAL:
        R0 = math.exp(r)
        if pk == FRACTIONAL:
            q1 = 1.0 + y
            dx = -R0 / (q1 * q1) / (R0 - 1.0)
        else:
            dx = -R0 * math.exp(-y) / (R0 - 1.0)
    else:
        if pk == FRACTIONAL:
            dx = -1.0 / (r * (1.0 + y))
        else:
            dx = -1.0 / r
    if pk == FRACTIONAL:
        return b * dx
    q = math.expm1(y) / y
    dq = (y * math.exp(y) - math.expm1(y)) / (y * y)
    return b * (dx * q + x * dq)


@maybe_jit
def _residual_grid(gk, pk, r, b, ys):
    """Vectorised :func:`nullcline_residual` over an array of y values."""
    if gk == FRACTIONAL:
        R0 = math.exp(r)
        if pk == FRACTIONAL:
            E = 1.0 / (1.0 + ys)
        else:
            E = np.exp(-ys)
        xs = (R0 * E - 1.0) / (R0 - 1.0)
    else:
        if pk == FRACTIONAL:
            xs = 1.0 - np.log1p(ys) / r
        else:
            xs = 1.0 - ys / r
    if pk == FRACTIONAL:
        return b * xs - 1.0
    return b * xs * (np.expm1(ys) / ys) - 1.0


@maybe_jit
def _polish_root(gk, pk, r, b, lo, hi, flo, fhi):
    """Bisection to width BISECT_WIDTH then bracket-guarded Newton.

    Returns (root, converged)."""
    while hi - lo > BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        fm = nullcline_residual(gk, pk, r, b, mid)
        if fm == 0.0:
            return mid, True
        if flo * fm < 0.0:
            hi = mid
            fhi = fm
        else:
            lo = mid
            flo = fm
    y = 0.5 * (lo + hi)
    for _ in range(POLISH_MAX_ITER):
        f = nullcline_residual(gk, pk, r, b, y)
        if abs(f) < POLISH_TOL:
            return y, True
        if f * flo < 0.0:
            hi = y
        else:
            lo = y
        d = nullcline_residual_deriv(gk, pk, r, b, y)
        ynew = y - f / d if d != 0.0 else lo - 1.0
        if ynew <= lo or ynew >= hi:
            ynew = 0.5 * (lo + hi)
        y = ynew
    return y, abs(nullcline_residual(gk, pk, r, b, y)) < POLISH_TOL


@maybe_jit
def _polish_extremum(gk, pk, r, b, lo, hi):
    """Locate the interior extremum of the residual on [lo, hi] by
    bisection on its derivative. Returns (y, residual_at_y)."""
    dlo = nullcline_residual_deriv(gk, pk, r, b, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        dm = nullcline_residual_deriv(gk, pk, r, b, mid)
        if dlo * dm <= 0.0:
            hi = mid
        else:
            lo = mid
            dlo = dm
        if hi - lo < 1e-13:
            break
    y = 0.5 * (lo + hi)
    return y, nullcline_residual(gk, pk, r, b, y)


@maybe_jit
def scan_y_max(gk, pk, r):
    """Upper end of the root-scan interval in y.

    Fractional parasitism: the interior bound y < R0 - 1. Exponential
    parasitism: y < ln R0 = r for exponential growth; ln R0 + 10 is used
    for fractional growth (points past ln R0 have x <= 0 and produce no
    spurious roots)."""
    if pk == FRACTIONAL:
        return math.expm1(r)
    if gk == FRACTIONAL:
        return r + 10.0
    return r


@maybe_jit
def coexistence_roots(gk, pk, r, b):
    """All positive coexistence roots in y.

    Returns (count, y0, y1, tangent, status): count in {0, 1, 2} with roots
    ascending; tangent = 1 when a fold double-root was merged into a single
    entry; status = 1 when some polish failed to reach POLISH_TOL.

    A sign scan over SCAN_POINTS log-spaced points is followed by bracketed
    polish. When the scan sees no sign change (the near-fold regime of the
    doubly-exponential model), the interior maximum of the residual is
    located explicitly so that root pairs tighter than the grid spacing,
    and exact tangencies, are still resolved.
    """
    if r <= 0.0:
        return 0, 0.0, 0.0, 0, 0
    ymax = scan_y_max(gk, pk, r)
    if ymax <= 4.0 * Y_SCAN_MIN:
        return 0, 0.0, 0.0, 0, 0
    ys = np.exp(np.linspace(math.log(Y_SCAN_MIN), math.log(ymax), SCAN_POINTS))
    F = _residual_grid(gk, pk, r, b, ys)

    roots = np.zeros(4)
    count = 0
    status = 0
    for i in range(SCAN_POINTS - 1):
        f0 = F[i]
        f1 = F[i + 1]
        if f0 == 0.0:
            if count < 4:
                roots[count] = ys[i]
                count += 1
        elif f0 * f1 < 0.0:
            yr, ok = _polish_root(gk, pk, r, b, ys[i], ys[i + 1], f0, f1)
            if not ok:
                status = 1
            if count < 4:
                roots[count] = yr
                count += 1
    if F[SCAN_POINTS - 1] == 0.0 and count < 4:
        roots[count] = ys[SCAN_POINTS - 1]
        count += 1

    tangent = 0
    if count == 0:
        # all-negative grid: resolve a possible sub-grid root pair/tangency
        imax = int(np.argmax(F))
        if 0 < imax < SCAN_POINTS - 1 and F[imax] < 0.0:
            ym, fm = _polish_extremum(gk, pk, r, b, ys[imax - 1], ys[imax + 1])
            if fm > 0.0:
                ya, ok1 = _polish_root(gk, pk, r, b, ys[imax - 1], ym,
                                       F[imax - 1], fm)
                yb, ok2 = _polish_root(gk, pk, r, b, ym, ys[imax + 1],
                                       fm, F[imax + 1])
                if not (ok1 and ok2):
                    status = 1
                roots[0] = ya
                roots[1] = yb
                count = 2
            elif abs(fm) <= TANGENT_RESIDUAL:
                roots[0] = ym
                count = 1
                tangent = 1

    if count == 2 and roots[1] - roots[0] < TANGENT_MERGE:
        roots[0] = 0.5 * (roots[0] + roots[1])
        count = 1
        tangent = 1

    return count, roots[0], roots[1], tangent, status


# ---------------------------------------------------------------------------
# orbit kernels
# ---------------------------------------------------------------------------

@maybe_jit
def orbit_kernel(gk, pk, r, b, x0, y0, transient, out_xy):
    """Iterate from (x0, y0); after `transient` steps record the next
    len(out_xy) iterates. Returns (flags, n_recorded)."""
    x = x0
    y = y0
    flags = 0
    checkx = x0 > 0.0
    checky = y0 > 0.0
    for _ in range(transient):
        x, y = step(gk, pk, r, b, x, y)
        if checky and y < EXTINCT_FLOOR:
            flags |= FLAG_EXTINCT_Y
        if checkx and x < EXTINCT_FLOOR:
            flags |= FLAG_EXTINCT_X
        if not (math.isfinite(x) and math.isfinite(y)):
            return flags | FLAG_DIVERGED, 0
    n = out_xy.shape[0]
    for i in range(n):
        x, y = step(gk, pk, r, b, x, y)
        out_xy[i, 0] = x
        out_xy[i, 1] = y
        if checky and y < EXTINCT_FLOOR:
            flags |= FLAG_EXTINCT_Y
        if checkx and x < EXTINCT_FLOOR:
            flags |= FLAG_EXTINCT_X
        if not (math.isfinite(x) and math.isfinite(y)):
            return flags | FLAG_DIVERGED, i + 1
    return flags, n


@maybe_jit
def lyapunov_kernel(gk, pk, r, b, x0, y0, transient, n):
    """Largest Lyapunov exponent by tangent-vector iteration with
    per-step renormalisation. Returns (lambda_max, flags)."""
    x = x0
    y = y0
    flags = 0
    checkx = x0 > 0.0
    checky = y0 > 0.0
    for _ in range(transient):
        x, y = step(gk, pk, r, b, x, y)
        if checky and y < EXTINCT_FLOOR:
            flags |= FLAG_EXTINCT_Y
        if checkx and x < EXTINCT_FLOOR:
            flags |= FLAG_EXTINCT_X
        if not (math.isfinite(x) and math.isfinite(y)):
            return math.nan, flags | FLAG_DIVERGED
    inv = 1.0 / math.sqrt(2.0)
    vx = inv
    vy = inv
    acc = 0.0
    for i in range(n):
        j11, j12, j21, j22 = jacobian(gk, pk, r, b, x, y)
        wx = j11 * vx + j12 * vy
        wy = j21 * vx + j22 * vy
        nrm = math.sqrt(wx * wx + wy * wy)
        if nrm == 0.0:
            return -math.inf, flags
        acc += math.log(nrm)
        vx = wx / nrm
        vy = wy / nrm
        x, y = step(gk, pk, r, b, x, y)
        if checky and y < EXTINCT_FLOOR:
            flags |= FLAG_EXTINCT_Y
        if checkx and x < EXTINCT_FLOOR:
            flags |= FLAG_EXTINCT_X
        if not (math.isfinite(x) and math.isfinite(y)):
            return acc / (i + 1.0), flags | FLAG_DIVERGED
    return acc / n, flags


@maybe_jit
def _orbit_final_batch_jit(gk, pk, r, b, xs, ys, steps, flags_out):
    for k in range(xs.shape[0]):
        x = xs[k]
        y = ys[k]
        fl = 0
        checkx = x > 0.0
        checky = y > 0.0
        for _ in range(steps):
            x, y = step(gk, pk, r, b, x, y)
            if checky and y < EXTINCT_FLOOR:
                fl |= FLAG_EXTINCT_Y
            if checkx and x < EXTINCT_FLOOR:
                fl |= FLAG_EXTINCT_X
            if not (math.isfinite(x) and math.isfinite(y)):
                fl |= FLAG_DIVERGED
                break
        xs[k] = x
        ys[k] = y
        flags_out[k] = fl


def _orbit_final_batch_np(gk, pk, r, b, xs, ys, steps, flags_out):
    # Vectorised across the batch; same arithmetic as `step`.
    checkx = xs > 0.0
    checky = ys > 0.0
    Rm1 = math.expm1(r)
    for _ in range(steps):
        if gk == FRACTIONAL:
            g = (Rm1 + 1.0) / (1.0 + Rm1 * xs)
        else:
            g = np.exp(r * (1.0 - xs))
        if pk == FRACTIONAL:
            E = 1.0 / (1.0 + ys)
            h = E
        else:
            E = np.exp(-ys)
            small = ys < SERIES_CUTOFF
            h = np.where(small,
                         1.0 - ys / 2.0 + ys * ys / 6.0 - ys ** 3 / 24.0,
                         -np.expm1(-ys) / np.where(small, 1.0, ys))
        xg = xs * g
        xs_new = xg * E
        ys_new = b * xg * h * ys
        xs = xs_new
        ys = ys_new
        flags_out |= np.where(checky & (ys < EXTINCT_FLOOR), FLAG_EXTINCT_Y, 0)
        flags_out |= np.where(checkx & (xs < EXTINCT_FLOOR), FLAG_EXTINCT_X, 0)
        flags_out |= np.where(np.isfinite(xs) & np.isfinite(ys), 0, FLAG_DIVERGED)
    return xs, ys


def orbit_final_batch(gk, pk, r, b, xs, ys, steps):
    """Advance a batch of states `steps` iterations.

    Returns (xs, ys, flags). Uses per-orbit compiled loops under numba and
    a batch-vectorised numpy path otherwise.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64).copy()
    ys = np.ascontiguousarray(ys, dtype=np.float64).copy()
    flags = np.zeros(xs.shape[0], dtype=np.int64)
    if NUMBA_ENABLED:
        _orbit_final_batch_jit(gk, pk, r, b, xs, ys, steps, flags)
        return xs, ys, flags
    xs, ys = _orbit_final_batch_np(gk, pk, r, b, xs, ys, steps, flags)
    return xs, ys, flags


# ---------------------------------------------------------------------------
# region-raster driver
# ---------------------------------------------------------------------------

JURY_TOL = 1e-10

# failing bits: 1/2/4 for Jury 1/2/3 below -JURY_TOL; marginal bits: 8/16/32
# for |residual| <= JURY_TOL.
@maybe_jit
def jury_bits(gk, pk, r, x, y):
    tau, delta = jury_terms(gk, pk, r, x, y)
    j1 = 1.0 - tau + delta
    j2 = 1.0 + tau + delta
    j3 = 1.0 - delta
    bits = 0
    if j1 < -JURY_TOL:
        bits |= 1
    elif abs(j1) <= JURY_TOL:
        bits |= 8
    if j2 < -JURY_TOL:
        bits |= 2
    elif abs(j2) <= JURY_TOL:
        bits |= 16
    if j3 < -JURY_TOL:
        bits |= 4
    elif abs(j3) <= JURY_TOL:
        bits |= 32
    return bits


@maybe_jit
def _region_cells_jit(gk, pk, rs, bs, counts, yA, yB, bitsA, bitsB,
                      tangents, statuses):
    for i in range(rs.shape[0]):
        c, y0, y1, tang, st = coexistence_roots(gk, pk, rs[i], bs[i])
        counts[i] = c
        tangents[i] = tang
        statuses[i] = st
        yA[i] = y0
        yB[i] = y1
        if c >= 1:
            x0 = host_nullcline_x(gk, pk, rs[i], y0)
            bitsA[i] = jury_bits(gk, pk, rs[i], x0, y0)
        if c >= 2:
            x1 = host_nullcline_x(gk, pk, rs[i], y1)
            bitsB[i] = jury_bits(gk, pk, rs[i], x1, y1)


def region_cells(gk, pk, rs, bs):
    """Coexistence count, root locations and Jury bits for a flat batch of
    (r, b) parameter cells. Returns dict of arrays.

    Under the numpy fallback the driver loop runs in Python but the grid
    scan inside coexistence_roots stays vectorised, which keeps full-size
    rasters tractable."""
    n = rs.shape[0]
    counts = np.zeros(n, dtype=np.int8)
    yA = np.zeros(n, dtype=np.float64)
    yB = np.zeros(n, dtype=np.float64)
    bitsA = np.zeros(n, dtype=np.int8)
    bitsB = np.zeros(n, dtype=np.int8)
    tangents = np.zeros(n, dtype=np.int8)
    statuses = np.zeros(n, dtype=np.int8)
    _region_cells_jit(gk, pk, np.ascontiguousarray(rs, dtype=np.float64),
                      np.ascontiguousarray(bs, dtype=np.float64),
                      counts, yA, yB, bitsA, bitsB, tangents, statuses)
    return {
        "counts": counts, "y_small": yA, "y_large": yB,
        "bits_small": bitsA, "bits_large": bitsB,
        "tangent": tangents, "status": statuses,
    }
