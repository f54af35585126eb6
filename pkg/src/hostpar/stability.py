"""Jacobians, eigenvalues, Jury conditions, and equilibrium classification.

For a planar map a fixed point is asymptotically stable iff all three Jury
quantities are positive:

    j1 = 1 - tau + Delta,   j2 = 1 + tau + Delta,   j3 = 1 - Delta,

with tau/Delta the trace/determinant of the Jacobian there. At a
coexistence point the Jacobian simplifies to
[[x u_x + 1, x u_y], [y v_x, y v_y + 1]], giving tau = 2 + x u_x + y v_y
and Delta = 1 + x u_x + y v_y + x y (u_x v_y - u_y v_x); j1 collapses to
x y (u_x v_y - u_y v_x). A residual inside MARGINAL_TOL of zero is never
reported Stable: boundary classification needs a deterministic three-way
outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import _kernels as _k
from .equilibria import EquilibriumKind, EquilibriumRecord
from .errors import ContractError
from .models import GrowthKind, ModelSpec, State

MARGINAL_TOL = 1e-10
HINT_TOL = 1e-6


class StabilityVerdict(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


class BifurcationKind(Enum):
    FOLD_TRANSCRITICAL = "fold/transcritical"   # j1 = 0, eigenvalue +1
    PERIOD_DOUBLING = "period-doubling"          # j2 = 0, eigenvalue -1
    NEIMARK_SACKER = "neimark-sacker"            # j3 = 0, complex pair on circle


@dataclass(frozen=True)
class Jacobian2:
    j11: float
    j12: float
    j21: float
    j22: float

    @property
    def trace(self) -> float:
        return self.j11 + self.j22

    @property
    def det(self) -> float:
        return self.j11 * self.j22 - self.j12 * self.j21

    def eigenvalues(self) -> tuple[complex, complex]:
        return eigenvalues_2x2(self.j11, self.j12, self.j21, self.j22)


@dataclass(frozen=True)
class JuryReport:
    tau: float
    delta: float
    j1: float
    j2: float
    j3: float
    verdict: StabilityVerdict
    failing: tuple[str, ...]
    marginal: tuple[str, ...]


@dataclass(frozen=True)
class BifurcationHint:
    kind: BifurcationKind
    residual: float
    eigenvalues: tuple[complex, complex]


@dataclass(frozen=True)
class EquilibriumClassification:
    record: EquilibriumRecord
    verdict: StabilityVerdict
    eigenvalues: tuple[complex, complex]
    moduli: tuple[float, float]
    jury: JuryReport | None
    hint: BifurcationHint | None


def eigenvalues_2x2(j11: float, j12: float, j21: float, j22: float
                    ) -> tuple[complex, complex]:
    """Eigenvalues of a 2x2 matrix by the quadratic formula, with the
    cancellation-safe pairing (larger root first by the sign of tau, the
    other as Delta over it)."""
    tau = j11 + j22
    delta = j11 * j22 - j12 * j21
    disc = tau * tau - 4.0 * delta
    if disc >= 0.0:
        s = math.sqrt(disc)
        l1 = 0.5 * (tau + s) if tau >= 0.0 else 0.5 * (tau - s)
        if l1 == 0.0:
            return 0.0 + 0.0j, 0.0 + 0.0j
        return complex(l1), complex(delta / l1)
    s = 0.5 * math.sqrt(-disc)
    return complex(0.5 * tau, s), complex(0.5 * tau, -s)


def jacobian_at(spec: ModelSpec, s: State) -> Jacobian2:
    """Analytic Jacobian of the map at any first-quadrant state.

    At (0, 0) this is diag(R0, 0); at (1, 0) it is upper triangular with
    diagonal (g'(1) + 1, b)."""
    gk, pk, r, b = spec.kernel_args
    j11, j12, j21, j22 = _k.jacobian(gk, pk, r, b, float(s[0]), float(s[1]))
    return Jacobian2(j11, j12, j21, j22)


def jury_terms(spec: ModelSpec, x: float, y: float) -> tuple[float, float]:
    """(tau, Delta) from the simplified equilibrium partials. No contract
    check; also usable on the degenerate r = 0 line of equilibria."""
    gk, pk, r, _ = spec.kernel_args
    return _k.jury_terms(gk, pk, r, float(x), float(y))


def _verdict_from_residuals(j1: float, j2: float, j3: float
                            ) -> tuple[StabilityVerdict, tuple[str, ...], tuple[str, ...]]:
    names = ("J1", "J2", "J3")
    vals = (j1, j2, j3)
    failing = tuple(n for n, v in zip(names, vals) if v < -MARGINAL_TOL)
    marginal = tuple(n for n, v in zip(names, vals) if abs(v) <= MARGINAL_TOL)
    if failing:
        return StabilityVerdict.UNSTABLE, failing, marginal
    if marginal:
        return StabilityVerdict.MARGINAL, failing, marginal
    return StabilityVerdict.STABLE, failing, marginal


def jury_report(spec: ModelSpec, eq: EquilibriumRecord) -> JuryReport:
    """Jury conditions at a coexistence equilibrium."""
    if eq.kind is not EquilibriumKind.COEXISTENCE:
        raise ContractError(
            "Jury analysis applies to coexistence equilibria; use "
            "exclusion_stability for the boundary points")
    x, y = eq.state
    tau, delta = jury_terms(spec, x, y)
    j1 = 1.0 - tau + delta
    j2 = 1.0 + tau + delta
    j3 = 1.0 - delta
    verdict, failing, marginal = _verdict_from_residuals(j1, j2, j3)
    return JuryReport(tau=tau, delta=delta, j1=j1, j2=j2, j3=j3,
                      verdict=verdict, failing=failing, marginal=marginal)


def exclusion_stability(spec: ModelSpec) -> StabilityVerdict:
    """Stability of the exclusion point (1, 0).

    Eigenvalues are g'(1) + 1 and b. Fractional growth has
    g'(1) = (1 - R0)/R0 in (-1, 0], so only b < 1 is needed; exponential
    growth has g'(1) = -r, adding the requirement r < 2.
    """
    if spec.growth is GrowthKind.FRACTIONAL:
        lam1 = 1.0 / spec.R0
    else:
        lam1 = 1.0 - spec.r
    lam2 = spec.b
    worst = max(abs(lam1), abs(lam2))
    if worst < 1.0 - MARGINAL_TOL:
        return StabilityVerdict.STABLE
    if worst <= 1.0 + MARGINAL_TOL:
        return StabilityVerdict.MARGINAL
    return StabilityVerdict.UNSTABLE


def _hint_from_jury(jury: JuryReport, eigs: tuple[complex, complex]
                    ) -> BifurcationHint | None:
    candidates = [
        (abs(jury.j1), jury.j1, BifurcationKind.FOLD_TRANSCRITICAL),
        (abs(jury.j2), jury.j2, BifurcationKind.PERIOD_DOUBLING),
        (abs(jury.j3), jury.j3, BifurcationKind.NEIMARK_SACKER),
    ]
    candidates.sort(key=lambda c: c[0])
    mag, residual, kind = candidates[0]
    if mag > HINT_TOL:
        return None
    if kind is BifurcationKind.NEIMARK_SACKER and eigs[0].imag == 0.0:
        return None
    return BifurcationHint(kind=kind, residual=residual, eigenvalues=eigs)


def classify_equilibrium(spec: ModelSpec, eq: EquilibriumRecord
                         ) -> EquilibriumClassification:
    """Merge eigenvalue data with the Jury verdict and attach a bifurcation
    hint when a Jury residual sits within HINT_TOL of zero."""
    jac = jacobian_at(spec, eq.state)
    eigs = jac.eigenvalues()
    moduli = (abs(eigs[0]), abs(eigs[1]))
    if eq.kind is EquilibriumKind.COEXISTENCE:
        jury = jury_report(spec, eq)
        verdict = jury.verdict
        hint = _hint_from_jury(jury, eigs)
    else:
        jury = None
        hint = None
        if eq.kind is EquilibriumKind.EXCLUSION:
            verdict = exclusion_stability(spec)
        else:
            # extinction point: eigenvalues R0 and 0
            if spec.R0 > 1.0 + MARGINAL_TOL:
                verdict = StabilityVerdict.UNSTABLE
            elif spec.R0 >= 1.0 - MARGINAL_TOL:
                verdict = StabilityVerdict.MARGINAL
            else:
                verdict = StabilityVerdict.STABLE
    return EquilibriumClassification(
        record=eq, verdict=verdict, eigenvalues=eigs, moduli=moduli,
        jury=jury, hint=hint)
