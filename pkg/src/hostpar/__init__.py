"""Four discrete-time host-parasitoid models with density dependence acting
before parasitism: equilibria, Jury-condition stability, analytic
bifurcation-boundary curves, and orbit-level attractor analysis.
"""

__version__ = "0.1.0"

from ._accel import NUMBA_ENABLED, backend_name
from .errors import BracketError, ContractError, DomainError, NumericError
from .models import (
    DimensionalTransform,
    GrowthKind,
    ModelSpec,
    ParasitismKind,
    Partials,
    RawParams,
    State,
    escape_fraction,
    from_raw,
    growth_per_capita,
    map_step,
    map_values,
    parasitism_factor,
    partials_at,
)
from .equilibria import (
    EquilibriumKind,
    EquilibriumRecord,
    NullclineKind,
    NullclineSamples,
    Provenance,
    boundary_equilibria,
    coexistence,
    coexistence_closed_form,
    coexistence_numeric,
    nullcline_samples,
    parasitoid_x_intercept,
    saddle_node_b,
)
from .stability import (
    BifurcationHint,
    BifurcationKind,
    EquilibriumClassification,
    Jacobian2,
    JuryReport,
    StabilityVerdict,
    classify_equilibrium,
    eigenvalues_2x2,
    exclusion_stability,
    jacobian_at,
    jury_report,
    jury_terms,
)
from .boundaries import (
    BoundaryCurve,
    RegionVerdict,
    boundary_lines,
    critical_parameter,
    curve,
    curve_model2_jury2,
    curve_model3_jury3,
    curve_point_at,
    curves_model4,
    region_verdict,
)
from .dynamics import (
    AttractorKind,
    AttractorReport,
    BasinGrid,
    LyapunovEstimate,
    Orbit,
    OrbitFlags,
    PeriodicOrbit,
    Thresholds,
    basin_sample,
    classify_attractor,
    detect_cycle,
    flip_cycles_near,
    lyapunov_max,
    refine_cycle,
    simulate,
)
from .sweep import (
    RegionRaster,
    SweepConfig,
    SweepPoint,
    SweepResult,
    bifurcation_scan,
    region_scan,
    run_parallel,
)

__all__ = [name for name in dir() if not name.startswith("_")]
