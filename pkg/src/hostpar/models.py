"""Model definitions: the four host-parasitoid maps and their calculus.

The nondimensional system is

    x[t+1] = x u(x, y),   u = g(x) (1 - y h(y))
    y[t+1] = y v(x, y),   v = b x g(x) h(y)

where x is host density over carrying capacity, y = a * P is scaled
parasitoid density, and b = a * c * K bundles searching efficiency a,
clutch size c and carrying capacity K. Growth g and parasitism h each come
in a fractional and an exponential flavour, giving four models:

    1: fractional growth,  fractional parasitism   (compensatory, kappa=1)
    2: exponential growth, fractional parasitism   (overcompensatory, kappa=1)
    3: fractional growth,  exponential parasitism  (compensatory, Poisson)
    4: exponential growth, exponential parasitism  (overcompensatory, Poisson)

The canonical growth parameter is r >= 0; the net reproductive rate
R0 = exp(r) is derived on demand. r = 0 is accepted but degenerate (the
whole x-axis is then a line of equilibria).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

from . import _kernels as _k
from .errors import ContractError, DomainError

EQ_RESIDUAL_TOL = 1e-8   # |u-1|, |v-1| allowed when equilibrium forms are requested


class GrowthKind(IntEnum):
    FRACTIONAL = 0
    EXPONENTIAL = 1


class ParasitismKind(IntEnum):
    FRACTIONAL = 0
    EXPONENTIAL = 1


class State(NamedTuple):
    """Nondimensional (host, parasitoid) pair."""
    x: float
    y: float


_MODEL_KINDS = {
    1: (GrowthKind.FRACTIONAL, ParasitismKind.FRACTIONAL),
    2: (GrowthKind.EXPONENTIAL, ParasitismKind.FRACTIONAL),
    3: (GrowthKind.FRACTIONAL, ParasitismKind.EXPONENTIAL),
    4: (GrowthKind.EXPONENTIAL, ParasitismKind.EXPONENTIAL),
}


@dataclass(frozen=True)
class ModelSpec:
    """One concrete model: growth/parasitism kinds plus (r, b)."""

    growth: GrowthKind
    parasitism: ParasitismKind
    r: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.b)):
            raise DomainError("r and b must be finite")
        if self.r < 0.0:
            raise DomainError(f"growth rate r must be >= 0, got {self.r}")
        if self.b <= 0.0:
            raise DomainError(f"composite parameter b must be > 0, got {self.b}")

    @classmethod
    def from_index(cls, index: int, *, b: float, r: float | None = None,
                   R0: float | None = None) -> "ModelSpec":
        """Build model 1-4 from either r or R0 (exactly one required)."""
        if index not in _MODEL_KINDS:
            raise DomainError(f"model index must be 1..4, got {index}")
        if (r is None) == (R0 is None):
            raise DomainError("give exactly one of r or R0")
        if r is None:
            if not (math.isfinite(R0) and R0 >= 1.0):
                raise DomainError(f"R0 must be >= 1, got {R0}")
            r = math.log(R0)
        gk, pk = _MODEL_KINDS[index]
        return cls(gk, pk, float(r), float(b))

    @property
    def R0(self) -> float:
        return math.exp(self.r)

    @property
    def index(self) -> int:
        return 1 + int(self.growth) + 2 * int(self.parasitism)

    @property
    def degenerate(self) -> bool:
        """r = 0: the x-axis is a line of equilibria."""
        return self.r == 0.0

    @property
    def kernel_args(self):
        return int(self.growth), int(self.parasitism), self.r, self.b


@dataclass(frozen=True)
class Partials:
    """Partial derivatives of u and v at a state."""
    u_x: float
    u_y: float
    v_x: float
    v_y: float


@dataclass(frozen=True)
class RawParams:
    """Dimensional parameters: searching efficiency a, clutch size c,
    carrying capacity K, and a growth rate given as r or R0."""
    a: float
    c: float
    K: float
    r: float | None = None
    R0: float | None = None

    def __post_init__(self):
        for name in ("a", "c", "K"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0.0):
                raise DomainError(f"{name} must be positive, got {val}")
        if (self.r is None) == (self.R0 is None):
            raise DomainError("give exactly one of r or R0")


@dataclass(frozen=True)
class DimensionalTransform:
    """Exact substitutions x = N/K, y = a*P and their inverses."""
    a: float
    K: float

    def to_dimensionless(self, N: float, P: float) -> State:
        return State(N / self.K, self.a * P)

    def to_dimensional(self, s: State) -> tuple[float, float]:
        return s.x * self.K, s.y / self.a


def _check_scalar(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    if value < 0.0:
        raise DomainError(f"{name} must be >= 0, got {value}")
    return value


def growth_per_capita(spec: ModelSpec, x: float) -> float:
    """g(x). Monotone decreasing for r > 0, with g(0) = R0 and g(1) = 1."""
    x = _check_scalar("x", x)
    return _k.growth(int(spec.growth), spec.r, x)


def parasitism_factor(spec: ModelSpec, y: float) -> float:
    """h(y). Positive, monotone decreasing, h(0) = 1.

    The exponential kind evaluates a Taylor series below y = 1e-4; the
    direct expression is 0/0 there.
    """
    y = _check_scalar("y", y)
    return _k.parasitism(int(spec.parasitism), y)


def escape_fraction(spec: ModelSpec, y: float) -> float:
    """Fraction of hosts escaping parasitism, 1 - y h(y)."""
    y = _check_scalar("y", y)
    return _k.escape(int(spec.parasitism), y)


def map_step(spec: ModelSpec, s: State) -> State:
    """One generation of the map. Preserves the closed first quadrant;
    x = 0 maps to (0, 0) and y = 0 to (x g(x), 0) exactly."""
    x = _check_scalar("x", s[0])
    y = _check_scalar("y", s[1])
    gk, pk, r, b = spec.kernel_args
    nx, ny = _k.step(gk, pk, r, b, x, y)
    return State(nx, ny)


def map_values(spec: ModelSpec, s: State) -> tuple[float, float]:
    """The factors (u, v) at a state."""
    x = _check_scalar("x", s[0])
    y = _check_scalar("y", s[1])
    gk, pk, r, b = spec.kernel_args
    g = _k.growth(gk, r, x)
    return g * _k.escape(pk, y), b * x * g * _k.parasitism(pk, y)


def partials_at(spec: ModelSpec, s: State, at_equilibrium: bool = False) -> Partials:
    """Partial derivatives of u and v.

    With ``at_equilibrium`` the simplified per-model closed forms are
    returned; they assume u = v = 1 and a state violating that beyond
    EQ_RESIDUAL_TOL is a contract error. The general forms are valid at
    any state.
    """
    gk, pk, r, b = spec.kernel_args
    x = float(s[0])
    y = float(s[1])
    if at_equilibrium:
        if x <= 0.0:
            raise ContractError("equilibrium partials need x > 0")
        u, v = map_values(spec, s)
        if abs(u - 1.0) > EQ_RESIDUAL_TOL or abs(v - 1.0) > EQ_RESIDUAL_TOL:
            if not (spec.degenerate and y == 0.0):
                raise ContractError(
                    f"state is not an equilibrium: |u-1|={abs(u - 1.0):.3e}, "
                    f"|v-1|={abs(v - 1.0):.3e}")
        ux, uy, vx, vy = _k.eq_partials(gk, pk, r, x, y)
        return Partials(ux, uy, vx, vy)
    g = _k.growth(gk, r, x)
    gp = _k.growth_deriv(gk, r, x)
    h = _k.parasitism(pk, y)
    hp = _k.parasitism_deriv(pk, y)
    E = _k.escape(pk, y)
    return Partials(
        u_x=gp * E,
        u_y=-g * (h + y * hp),
        v_x=b * h * (g + x * gp),
        v_y=b * x * g * hp,
    )


def from_raw(raw: RawParams, growth: GrowthKind,
             parasitism: ParasitismKind) -> tuple[ModelSpec, DimensionalTransform]:
    """Fold dimensional parameters into a ModelSpec plus the exact state
    transform N <-> x = N/K, P <-> y = a P. b = a*c*K."""
    b = raw.a * raw.c * raw.K
    spec = ModelSpec.from_index(
        1 + int(growth) + 2 * int(parasitism), b=b, r=raw.r, R0=raw.R0)
    return spec, DimensionalTransform(a=raw.a, K=raw.K)
