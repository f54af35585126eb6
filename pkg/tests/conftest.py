"""Shared oracles and helpers.

The finite-difference Jacobian here is the independent check against the
analytic derivative code: centered differences at two step sizes combined
by Richardson extrapolation.
"""

import numpy as np
import pytest

from hostpar import ModelSpec, State, map_step, map_values

ALL_MODELS = (1, 2, 3, 4)


def spec_for(model, r=None, R0=None, b=2.0):
    if r is None and R0 is None:
        r = 1.0
    return ModelSpec.from_index(model, b=b, r=r, R0=R0)


def fd_derivative(f, x, h=1e-6):
    """Richardson-extrapolated centered difference."""
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + h / 2.0) - f(x - h / 2.0)) / h
    return (4.0 * d2 - d1) / 3.0


def fd_map_jacobian(spec, s, h=1e-6):
    """Finite-difference Jacobian of the full map at a state."""
    x, y = s

    def fx(t):
        return map_step(spec, State(t, y))

    def fy(t):
        return map_step(spec, State(x, t))

    j11 = fd_derivative(lambda t: fx(t).x, x, h)
    j21 = fd_derivative(lambda t: fx(t).y, x, h)
    j12 = fd_derivative(lambda t: fy(t).x, y, h)
    j22 = fd_derivative(lambda t: fy(t).y, y, h)
    return np.array([[j11, j12], [j21, j22]])


def fd_uv_partials(spec, s, h=1e-6):
    """Finite-difference partials of the factors u and v."""
    x, y = s

    def u_at(xx, yy):
        return map_values(spec, State(xx, yy))[0]

    def v_at(xx, yy):
        return map_values(spec, State(xx, yy))[1]

    return (
        fd_derivative(lambda t: u_at(t, y), x, h),
        fd_derivative(lambda t: u_at(x, t), y, h),
        fd_derivative(lambda t: v_at(t, y), x, h),
        fd_derivative(lambda t: v_at(x, t), y, h),
    )


def rel_err(a, b):
    scale = max(abs(a), abs(b), 1e-12)
    return abs(a - b) / scale


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
