"""Equilibria: boundary points, closed forms, nullcline roots, the fold.

Numeric fixtures for the implicit models were generated with a 40-digit
mpmath root solve and frozen here.
"""

import math

import numpy as np
import pytest

from hostpar import (
    ContractError,
    DomainError,
    EquilibriumKind,
    ModelSpec,
    NullclineKind,
    Provenance,
    boundary_equilibria,
    coexistence_closed_form,
    coexistence_numeric,
    map_values,
    nullcline_samples,
    parasitoid_x_intercept,
    saddle_node_b,
)
from hostpar._kernels import coexistence_roots

from conftest import ALL_MODELS, spec_for

# mpmath oracles (40 digits, rounded to double)
M3_R0_2_EQ = {
    2.0: (0.41911767781695734, 0.34311185571698662),
    3.0: (0.26251834151358346, 0.46003877056654559),
    3.5: (0.22099142087278803, 0.49348401176827524),
    9.0: (0.080388014615737177, 0.61582693115448363),
}
M4_R25_B098_Y = (0.22379985743402878, 1.0991680680359567)
M4_R25_B105_Y = 1.4267157869141979
M4_R25_FOLD_B = 0.95902175465486563


class TestBoundaryEquilibria:
    def test_points(self):
        for model in ALL_MODELS:
            ext, exc = boundary_equilibria(spec_for(model))
            assert ext.state == (0.0, 0.0)
            assert ext.kind is EquilibriumKind.EXTINCTION
            assert exc.state == (1.0, 0.0)
            assert exc.kind is EquilibriumKind.EXCLUSION
            assert not ext.degenerate

    def test_degenerate_at_r0(self):
        ext, exc = boundary_equilibria(ModelSpec.from_index(1, b=2.0, r=0.0))
        assert ext.degenerate and exc.degenerate


class TestClosedForm:
    def test_model1(self):
        rec = coexistence_closed_form(ModelSpec.from_index(1, b=2.0, R0=2.0))
        assert rec.state.x == 0.5
        assert rec.state.y == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert rec.provenance is Provenance.CLOSED_FORM
        assert rec.residual < 1e-14

    def test_model2(self):
        rec = coexistence_closed_form(ModelSpec.from_index(2, b=2.0, r=1.0))
        assert rec.state.x == 0.5
        # e^{0.5} - 1
        assert rec.state.y == pytest.approx(0.64872127070012815, rel=1e-15)

    def test_collision_at_b1_gives_none(self):
        assert coexistence_closed_form(ModelSpec.from_index(1, b=1.0, R0=2.0)) is None
        assert coexistence_closed_form(ModelSpec.from_index(2, b=0.8, r=1.0)) is None

    def test_contract_on_models_3_4(self):
        with pytest.raises(ContractError):
            coexistence_closed_form(spec_for(3))
        with pytest.raises(ContractError):
            coexistence_closed_form(spec_for(4))


class TestNumericRoots:
    def test_cross_check_against_closed_forms(self):
        rs = np.linspace(0.15, 3.0, 5)
        bs = np.linspace(1.2, 5.0, 5)
        for model in (1, 2):
            for r in rs:
                for b in bs:
                    spec = ModelSpec.from_index(model, b=float(b), r=float(r))
                    closed = coexistence_closed_form(spec)
                    roots = coexistence_numeric(spec)
                    assert len(roots) == 1
                    assert abs(roots[0].state.x - closed.state.x) < 1e-10
                    assert abs(roots[0].state.y - closed.state.y) < 1e-10

    def test_model3_unique_root_iff_b_above_one(self):
        for R0 in (1.5, 2.0, 5.0):
            for b in (0.5, 0.9, 1.0, 1.1, 2.0, 5.0):
                spec = ModelSpec.from_index(3, b=b, R0=R0)
                n = len(coexistence_numeric(spec))
                assert n == (1 if b > 1.0 else 0), (R0, b, n)

    def test_model3_pinned_coordinates(self):
        for b, (x, y) in M3_R0_2_EQ.items():
            spec = ModelSpec.from_index(3, b=b, R0=2.0)
            (rec,) = coexistence_numeric(spec)
            assert rec.state.x == pytest.approx(x, abs=1e-11)
            assert rec.state.y == pytest.approx(y, abs=1e-11)

    def test_model4_two_roots_window(self):
        spec = ModelSpec.from_index(4, b=0.98, r=2.5)
        recs = coexistence_numeric(spec)
        assert len(recs) == 2
        assert recs[0].state.y == pytest.approx(M4_R25_B098_Y[0], abs=1e-10)
        assert recs[1].state.y == pytest.approx(M4_R25_B098_Y[1], abs=1e-10)
        assert recs[0].state.y < recs[1].state.y  # ascending order

    def test_model4_unique_above_one(self):
        spec = ModelSpec.from_index(4, b=1.05, r=2.5)
        recs = coexistence_numeric(spec)
        assert len(recs) == 1
        assert recs[0].state.y == pytest.approx(M4_R25_B105_Y, abs=1e-10)

    def test_model4_count_sequence(self):
        # 0 -> 2 -> 1 as b sweeps through the fold and the transcritical
        for r in (2.2, 2.5, 3.0):
            spec = ModelSpec.from_index(4, b=1.0, r=r)
            fold = saddle_node_b(spec)
            for b, want in ((fold - 1e-4, 0), (0.5 * (fold + 1.0), 2),
                            (1.0 + 1e-6, 1), (1.5, 1)):
                got = len(coexistence_numeric(
                    ModelSpec.from_index(4, b=b, r=r)))
                assert got == want, (r, b, got, want)

    def test_residuals_meet_tolerance(self):
        for model, kwargs in ((3, dict(R0=2.0, b=3.5)), (4, dict(r=2.5, b=0.98)),
                              (4, dict(r=2.3, b=2.2)), (3, dict(R0=5.0, b=1.01))):
            spec = ModelSpec.from_index(model, **kwargs)
            for rec in coexistence_numeric(spec):
                assert rec.residual < 1e-10
                u, v = map_values(spec, rec.state)
                assert abs(u - 1.0) < 1e-10 and abs(v - 1.0) < 1e-10

    def test_tangent_flag_near_fold(self):
        spec = ModelSpec.from_index(4, b=M4_R25_FOLD_B * (1.0 - 1e-12), r=2.5)
        recs = coexistence_numeric(spec)
        assert len(recs) == 1
        assert recs[0].tangent

    def test_subgrid_pair_resolved(self):
        # just above the fold the roots are closer than the scan grid
        spec = ModelSpec.from_index(4, b=M4_R25_FOLD_B + 1e-7, r=2.5)
        count, y0, y1, tangent, status = coexistence_roots(*spec.kernel_args)
        assert status == 0
        assert count == 2
        assert 0.0 < y1 - y0 < 5e-3


class TestSaddleNode:
    def test_pinned_value(self):
        spec = ModelSpec.from_index(4, b=1.0, r=2.5)
        assert saddle_node_b(spec) == pytest.approx(M4_R25_FOLD_B, abs=1e-10)

    def test_limit_toward_r2(self):
        spec = ModelSpec.from_index(4, b=1.0, r=2.0001)
        assert saddle_node_b(spec) == pytest.approx(1.0, abs=1e-4)

    def test_domain_error_below_r2(self):
        with pytest.raises(DomainError):
            saddle_node_b(ModelSpec.from_index(4, b=1.0, r=1.9))
        with pytest.raises(ContractError):
            saddle_node_b(ModelSpec.from_index(2, b=1.0, r=2.5))

    def test_agrees_with_root_count_bisection(self):
        # independent oracle: bisect the 0 -> 2 root-count transition
        r = 3.0
        spec = ModelSpec.from_index(4, b=1.0, r=r)
        want = saddle_node_b(spec)

        def count_at(b):
            return len(coexistence_numeric(ModelSpec.from_index(4, b=b, r=r)))

        lo, hi = 0.5, 0.999
        assert count_at(lo) == 0 and count_at(hi) == 2
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if count_at(mid) == 0:
                lo = mid
            else:
                hi = mid
        assert abs(0.5 * (lo + hi) - want) < 1e-6


class TestIntercept:
    def test_values(self):
        assert parasitoid_x_intercept(
            ModelSpec.from_index(3, b=1.0, R0=2.0)) == pytest.approx(1.0)
        assert parasitoid_x_intercept(
            ModelSpec.from_index(3, b=3.0, R0=2.0)) == pytest.approx(0.2)

    def test_no_interior_region(self):
        v = parasitoid_x_intercept(ModelSpec.from_index(3, b=0.5, R0=2.0))
        assert math.isinf(v) or not (0.0 < v < 1.0)

    def test_in_unit_interval_iff_b_above_one(self):
        for b in (0.6, 0.99, 1.01, 4.0):
            v = parasitoid_x_intercept(ModelSpec.from_index(3, b=b, R0=2.0))
            assert (0.0 < v < 1.0) == (b > 1.0)

    def test_contract(self):
        with pytest.raises(ContractError):
            parasitoid_x_intercept(spec_for(1))


class TestNullclines:
    def test_host_endpoints_model3(self):
        spec = ModelSpec.from_index(3, b=3.0, R0=2.0)
        ns = nullcline_samples(spec, NullclineKind.HOST, (0.0, 1.0), 64)
        assert ns.points[0, 1] == pytest.approx(math.log(2.0), abs=1e-14)
        assert ns.points[-1, 1] == pytest.approx(0.0, abs=1e-14)

    def test_host_monotone_decreasing_model3(self):
        spec = ModelSpec.from_index(3, b=3.0, R0=2.0)
        ns = nullcline_samples(spec, NullclineKind.HOST, (0.0, 1.0), 64)
        assert np.all(np.diff(ns.points[:, 1]) < 0)

    def test_parasitoid_slope_positive_model3(self):
        spec = ModelSpec.from_index(3, b=3.0, R0=2.0)
        x0 = parasitoid_x_intercept(spec) + 1e-6
        ns = nullcline_samples(spec, NullclineKind.PARASITOID, (x0, 1.0), 64)
        assert np.all(np.diff(ns.points[:, 1]) > 0)

    def test_points_satisfy_equations(self):
        for model, kwargs in ((3, dict(R0=2.0, b=3.0)), (4, dict(r=2.5, b=1.05)),
                              (1, dict(R0=3.0, b=2.0))):
            spec = ModelSpec.from_index(model, **kwargs)
            host = nullcline_samples(spec, NullclineKind.HOST, (0.01, 1.0), 32)
            for x, y in host.points:
                u, _ = map_values(spec, (x, y))
                assert abs(u - 1.0) < 1e-10
            x0 = 0.9 / spec.b if model == 1 else 0.6
            para = nullcline_samples(spec, NullclineKind.PARASITOID,
                                     (max(x0, 0.45), 1.0), 32)
            for x, y in para.points:
                _, v = map_values(spec, (x, y))
                assert abs(v - 1.0) < 1e-10

    def test_domain_errors(self):
        spec = ModelSpec.from_index(3, b=3.0, R0=2.0)
        with pytest.raises(DomainError):
            nullcline_samples(spec, NullclineKind.HOST, (0.5, 1.5), 16)
        with pytest.raises(DomainError):
            nullcline_samples(spec, NullclineKind.PARASITOID, (0.0, 1.0), 16)
        with pytest.raises(DomainError):
            nullcline_samples(spec, NullclineKind.HOST, (0.0, 1.0), 1)
