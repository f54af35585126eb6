"""Closed-form parametric stability-boundary curves.

Each function maps the curve's internal variable (array or scalar) to a
(growth-parameter, b) pair. Model 2's flip boundary is parameterised by
u = r/b > 3/2; the other curves by the equilibrium parasitoid density
y > 0. Cancellation-prone subterms are evaluated via expm1 or short series
so the curves stay accurate down to internal values ~1e-12.
"""

import numpy as np

from .errors import DomainError


def _ye_minus_em1(y):
    """y e^y - (e^y - 1), series below 1e-3 (direct form cancels)."""
    y = np.asarray(y, dtype=np.float64)
    small = np.abs(y) < 1e-3
    ysafe = np.where(small, 0.0, y)
    direct = ysafe * np.exp(ysafe) - np.expm1(ysafe)
    series = y * y * (0.5 + y * (1.0 / 3.0 + y * (0.125 + y / 30.0)))
    return np.where(small, series, direct)


def _ye2_minus_em1(y):
    """y e^{2y} - (e^y - 1), series below 1e-3."""
    y = np.asarray(y, dtype=np.float64)
    small = np.abs(y) < 1e-3
    ysafe = np.where(small, 0.0, y)
    direct = ysafe * np.exp(2.0 * ysafe) - np.expm1(ysafe)
    series = y * y * (1.5 + y * (11.0 / 6.0 + y * (31.0 / 24.0 + y * 79.0 / 120.0)))
    return np.where(small, series, direct)


def _check_positive(name, t):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0.0):
        raise DomainError(f"{name} must be > 0")
    return t


def model2_jury2(u):
    """Flip boundary of the overcompensatory/fractional model:
    r = u - ln(2u - 3), b = 1 - ln(2u - 3)/u, for u > 3/2.
    Passes exactly through (r, b) = (2, 1) at u = 2."""
    u = np.asarray(u, dtype=np.float64)
    if np.any(u <= 1.5):
        raise DomainError("internal variable u must be > 3/2")
    ln = np.log(2.0 * u - 3.0)
    return u - ln, 1.0 - ln / u


def model3_jury3(y):
    """Neimark-Sacker boundary of the compensatory/exponential model:
    R0 = y e^{2y}/(e^y - 1),
    b = (y^2 e^{2y} - y e^y + y) / ((e^y - 1)(y e^y - e^y + 1))."""
    y = _check_positive("y", y)
    em1 = np.expm1(y)
    R0 = y * np.exp(2.0 * y) / em1
    b = y * _ye2_minus_em1(y) / (em1 * _ye_minus_em1(y))
    return R0, b


def model4_jury1(y):
    """Fold boundary of the doubly-exponential model:
    r = y^2 e^y/(1 + y e^y - e^y), b = y^2 e^y/(e^y - 1)^2.
    Limit (r, b) -> (2, 1) as y -> 0."""
    y = _check_positive("y", y)
    ey = np.exp(y)
    em1 = np.expm1(y)
    r = y * y * ey / _ye_minus_em1(y)
    b = y * y * ey / (em1 * em1)
    return r, b


def model4_jury2(y):
    """Flip boundary of the doubly-exponential model:
    r = (e^y(y^2 + 2y + 2) - 2)/(e^y(y + 1) - 1),
    b = (2y(e^y - 1) + y^2 e^y (2 + y)) / ((2 + y) e^{2y} - 4 e^y + 2 - y).
    Limit (r, b) -> (2, 1) as y -> 0. The denominator of b is evaluated as
    2(e^y - 1)^2 + y(e^{2y} - 1), an identical rearrangement free of
    cancellation."""
    y = _check_positive("y", y)
    ey = np.exp(y)
    em1 = np.expm1(y)
    r = (2.0 * em1 + 2.0 * y * ey + y * y * ey) / (em1 + y * ey)
    denom = 2.0 * em1 * em1 + y * np.expm1(2.0 * y)
    b = (2.0 * y * em1 + y * y * ey * (2.0 + y)) / denom
    return r, b


def model4_jury3(y):
    """Neimark-Sacker boundary of the doubly-exponential model:
    r = (y e^y + y^2 e^y - e^y + 1)/(y e^y),
    b = (y^3 e^y + y^2 e^y - y e^y + y) / ((e^y - 1)(y e^y - e^y + 1))."""
    y = _check_positive("y", y)
    ey = np.exp(y)
    em1 = np.expm1(y)
    r = (y * ey + y * y * ey - em1) / (y * ey)
    b = y * (y * y * ey + _ye_minus_em1(y)) / (em1 * _ye_minus_em1(y))
    return r, b


# (model, jury) -> (curve function, growth-parameter kind)
CURVES = {
    (2, 2): (model2_jury2, "r"),
    (3, 3): (model3_jury3, "R0"),
    (4, 1): (model4_jury1, "r"),
    (4, 2): (model4_jury2, "r"),
    (4, 3): (model4_jury3, "r"),
}
