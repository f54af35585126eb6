"""Orbits, cycles, Lyapunov exponents, classification, basins."""

import math

import numpy as np
import pytest

from hostpar import (
    AttractorKind,
    BasinGrid,
    DomainError,
    ModelSpec,
    NumericError,
    StabilityVerdict,
    State,
    basin_sample,
    classify_attractor,
    coexistence_closed_form,
    coexistence_numeric,
    detect_cycle,
    flip_cycles_near,
    growth_per_capita,
    jacobian_at,
    lyapunov_max,
    refine_cycle,
    simulate,
)

from conftest import spec_for

M2_B11_FLIP_R = 2.1042391450179883   # flip location at b = 1.1 (mpmath)
M4_B098_CYCLE = ((0.5417738906, 0.7365856079),
                 (0.8155220040594887, 0.8701746553885875))


class TestSimulate:
    def test_converges_to_known_equilibrium(self):
        spec = ModelSpec.from_index(1, b=2.0, R0=2.0)
        orb = simulate(spec, State(0.4, 0.2), transient=10_000, n=8)
        assert np.all(np.abs(orb.samples[:, 0] - 0.5) < 1e-8)
        assert np.all(np.abs(orb.samples[:, 1] - 1.0 / 3.0) < 1e-8)

    def test_hostless_state_collapses_immediately(self):
        for model in (1, 2, 3, 4):
            orb = simulate(spec_for(model), State(0.0, 0.7), transient=0, n=3)
            assert np.all(orb.samples == 0.0)

    def test_axis_orbit_is_pure_growth_map_bitwise(self):
        for model in (1, 2, 3, 4):
            spec = spec_for(model, r=2.5, b=3.0)
            orb = simulate(spec, State(0.37, 0.0), transient=0, n=50)
            x = 0.37
            for i in range(50):
                x = x * growth_per_capita(spec, x)
                assert orb.samples[i, 0] == x
                assert orb.samples[i, 1] == 0.0

    def test_extinction_flag_raised_not_clamped(self):
        # parasitoid crash: y underflows from a positive start
        spec = ModelSpec.from_index(3, b=30.0, R0=2.0)
        orb = simulate(spec, State(0.5, 0.3), transient=0, n=3000)
        assert orb.flags.extinct_y
        assert not orb.flags.extinct_x
        # axis starts never raise the flag: y stays exactly 0
        orb0 = simulate(spec, State(0.5, 0.0), transient=0, n=3000)
        assert not orb0.flags.extinct_y

    def test_validation(self):
        with pytest.raises(DomainError):
            simulate(spec_for(1), State(-0.1, 0.2))
        with pytest.raises(DomainError):
            simulate(spec_for(1), State(0.1, 0.2), transient=-1)


class TestDetectCycle:
    def test_fixed_point_is_period_one(self):
        spec = ModelSpec.from_index(1, b=2.0, R0=2.0)
        orb = simulate(spec, State(0.4, 0.2), transient=10_000, n=300)
        period, pts = detect_cycle(orb)
        assert period == 1
        assert pts.shape == (1, 2)

    def test_flip_two_cycle(self):
        spec = ModelSpec.from_index(2, b=1.1, r=M2_B11_FLIP_R + 0.01)
        orb = simulate(spec, State(0.4, 0.5), transient=60_000, n=300)
        period, pts = detect_cycle(orb)
        assert period == 2

    def test_quasiperiodic_has_no_short_period(self):
        spec = ModelSpec.from_index(3, b=3.5, R0=2.0)
        orb = simulate(spec, State(0.5, 0.3), transient=100_000, n=300)
        assert detect_cycle(orb, max_period=64, tol=1e-7) is None

    def test_needs_enough_samples(self):
        spec = ModelSpec.from_index(1, b=2.0, R0=2.0)
        orb = simulate(spec, State(0.4, 0.2), transient=100, n=100)
        with pytest.raises(DomainError):
            detect_cycle(orb, max_period=64)


class TestRefineCycle:
    def test_period_one_multipliers_equal_jacobian_eigenvalues(self):
        spec = ModelSpec.from_index(3, b=3.0, R0=2.0)
        (rec,) = coexistence_numeric(spec)
        po = refine_cycle(spec, [rec.state], 1)
        eigs = sorted(jacobian_at(spec, rec.state).eigenvalues(),
                      key=lambda z: (z.real, z.imag))
        mults = sorted(po.multipliers, key=lambda z: (z.real, z.imag))
        for m, e in zip(mults, eigs):
            assert abs(m - e) < 1e-10

    def test_model4_unstable_two_cycle(self):
        spec = ModelSpec.from_index(4, b=0.98, r=2.5)
        po = refine_cycle(spec, [M4_B098_CYCLE[0]], 2)
        assert po.stability is StabilityVerdict.UNSTABLE
        assert po.residual < 1e-10
        got = sorted(map(tuple, po.points))
        want = sorted(M4_B098_CYCLE)
        for g, w in zip(got, want):
            assert g[0] == pytest.approx(w[0], abs=1e-9)
            assert g[1] == pytest.approx(w[1], abs=1e-9)
        mods = sorted(abs(m) for m in po.multipliers)
        assert mods[0] == pytest.approx(0.6305502554398525, abs=1e-9)
        assert mods[1] == pytest.approx(1.2355593695357459, abs=1e-9)

    def test_cycle_points_return_after_n_steps(self):
        from hostpar import map_step
        spec = ModelSpec.from_index(4, b=0.98, r=2.5)
        po = refine_cycle(spec, [M4_B098_CYCLE[0]], 2)
        for p in po.points:
            s = State(*p)
            for _ in range(po.period):
                s = map_step(spec, s)
            assert abs(s.x - p[0]) < 1e-10
            assert abs(s.y - p[1]) < 1e-10

    def test_bistable_pair_multipliers_straddle_one(self):
        # subcritical window just below the flip at b = 1.3
        spec = ModelSpec.from_index(2, b=1.3, r=2.329)
        rec = coexistence_closed_form(spec)
        cycles = [po for po in flip_cycles_near(spec, rec)
                  if np.all(po.points[:, 1] > 1e-6)]  # interior only
        stabilities = {po.stability for po in cycles}
        assert StabilityVerdict.STABLE in stabilities
        assert StabilityVerdict.UNSTABLE in stabilities
        tops = sorted(max(abs(m) for m in po.multipliers) for po in cycles)
        assert tops[0] < 1.0 < tops[-1]

    def test_nonconvergence_raises_with_last_iterate(self):
        spec = ModelSpec.from_index(4, b=2.2, r=2.3)
        with pytest.raises(NumericError) as err:
            refine_cycle(spec, [(0.9, 0.9)], 3)
        assert err.value.last_iterate is not None

    def test_axis_two_cycle_transverse_stability_exchange(self):
        # the on-axis 2-cycle of the overcompensatory models has transverse
        # multiplier v(p1) v(p2) = b^2 x1 x2; at r = 2.5 it crosses 1 at
        # b = 1/sqrt(x1 x2) = 1.4214, below the interior Neimark-Sacker
        for b, want in ((1.42, StabilityVerdict.STABLE),
                        (1.44, StabilityVerdict.UNSTABLE)):
            spec = ModelSpec.from_index(4, b=b, r=2.5)
            po = refine_cycle(spec, [(1.7104124252797597, 0.0)], 2)
            assert np.all(po.points[:, 1] == 0.0)
            assert po.stability is want
            x1, x2 = po.points[:, 0]
            mods = sorted(abs(m) for m in po.multipliers)
            assert mods[1] == pytest.approx(b * b * x1 * x2, rel=1e-9)
            # the in-axis multiplier is the pure growth-map cycle multiplier
            assert mods[0] == pytest.approx(0.9042806382420364, rel=1e-9)


class TestLyapunov:
    def test_negative_at_stable_equilibrium(self):
        est = lyapunov_max(ModelSpec.from_index(1, b=2.0, R0=2.0),
                           State(0.4, 0.2), transient=2000, n=20_000)
        assert est.value < -0.01

    def test_positive_for_strange_attractor(self):
        est = lyapunov_max(ModelSpec.from_index(4, b=2.2, r=2.3),
                           State(0.5, 0.5), transient=10_000, n=200_000)
        assert est.value == pytest.approx(0.063, abs=0.01)

    def test_near_zero_on_invariant_circle(self):
        est = lyapunov_max(ModelSpec.from_index(3, b=3.5, R0=2.0),
                           State(0.5, 0.3), transient=10_000, n=400_000)
        assert abs(est.value) < 1e-3

    def test_float_conversion(self):
        est = lyapunov_max(spec_for(1), State(0.4, 0.2), transient=100, n=1000)
        assert float(est) == est.value


class TestClassify:
    def test_model3_fixed_point_then_circle(self):
        assert classify_attractor(ModelSpec.from_index(3, b=3.0, R0=2.0),
                                  State(0.5, 0.3)).kind is AttractorKind.FIXED_POINT
        rep = classify_attractor(ModelSpec.from_index(3, b=3.5, R0=2.0),
                                 State(0.5, 0.3))
        assert rep.kind is AttractorKind.INVARIANT_CIRCLE
        assert abs(rep.lyapunov_max) < 1e-3

    def test_bistability_including_modulated_circle(self):
        eq = classify_attractor(ModelSpec.from_index(2, b=1.9, r=2.92),
                                State(0.8, 0.7))
        assert eq.kind is AttractorKind.FIXED_POINT
        other = classify_attractor(ModelSpec.from_index(2, b=1.9, r=2.92),
                                   State(0.3, 0.4))
        assert other.kind is not AttractorKind.FIXED_POINT
        assert other.lyapunov_max >= -1e-3
        four = classify_attractor(ModelSpec.from_index(2, b=1.9, r=2.9205),
                                  State(0.3, 0.4))
        assert four.kind is AttractorKind.INVARIANT_CIRCLE
        assert four.modulation_period == 4

    def test_axis_two_cycle(self):
        rep = classify_attractor(ModelSpec.from_index(2, b=0.5, r=2.5),
                                 State(0.5, 0.3))
        assert rep.kind is AttractorKind.AXIS_ATTRACTOR
        assert rep.period == 2
        assert rep.flags.extinct_y

    def test_exclusion_convergence_is_fixed_point(self):
        rep = classify_attractor(ModelSpec.from_index(1, b=0.5, R0=2.0),
                                 State(0.5, 0.3))
        assert rep.kind is AttractorKind.FIXED_POINT
        assert rep.final.x == pytest.approx(1.0, abs=1e-8)
        assert rep.final.y == 0.0

    def test_hostless_start_is_extinction(self):
        rep = classify_attractor(spec_for(1), State(0.0, 0.7))
        assert rep.kind is AttractorKind.EXTINCTION

    def test_flip_cycle_classified(self):
        rep = classify_attractor(
            ModelSpec.from_index(2, b=1.1, r=M2_B11_FLIP_R + 0.01),
            State(0.4, 0.5))
        assert rep.kind is AttractorKind.N_CYCLE
        assert rep.period == 2

    def test_chaos(self):
        rep = classify_attractor(ModelSpec.from_index(4, b=2.2, r=2.3),
                                 State(0.5, 0.5), budget=200_000)
        assert rep.kind is AttractorKind.CHAOTIC
        assert rep.lyapunov_max > 1e-2

    def test_thresholds_recorded(self):
        rep = classify_attractor(spec_for(1), State(0.4, 0.2))
        assert rep.thresholds.lyap_zero == 1e-3
        assert rep.thresholds.max_period == 64


class TestFlipAmplitude:
    def test_supercritical_amplitude_vanishes_at_crossing(self):
        # amplitude of the stable 2-cycle shrinks toward the flip point
        amps = []
        for dr in (0.02, 0.01, 0.005, 0.0025):
            spec = ModelSpec.from_index(2, b=1.1, r=M2_B11_FLIP_R + dr)
            orb = simulate(spec, State(0.4, 0.5), transient=200_000, n=2)
            p1, p2 = orb.samples
            amps.append(math.hypot(p1[0] - p2[0], p1[1] - p2[1]))
        assert all(a > b for a, b in zip(amps, amps[1:]))
        # square-root scaling: halving the offset shrinks by ~sqrt(2)
        assert amps[-1] == pytest.approx(amps[-2] / math.sqrt(2.0), rel=0.1)

    def test_cycle_points_straddle_equilibrium(self):
        spec = ModelSpec.from_index(2, b=1.1, r=M2_B11_FLIP_R + 0.005)
        rec = coexistence_closed_form(spec)
        orb = simulate(spec, State(0.4, 0.5), transient=200_000, n=2)
        p1, p2 = orb.samples
        d1 = (p1[0] - rec.state.x, p1[1] - rec.state.y)
        d2 = (p2[0] - rec.state.x, p2[1] - rec.state.y)
        assert d1[0] * d2[0] + d1[1] * d2[1] < 0.0


class TestBasins:
    def test_bistable_basins_contain_their_seeds(self):
        spec = ModelSpec.from_index(2, b=1.9, r=2.92)
        a_eq = classify_attractor(spec, State(0.8, 0.7))
        a_other = classify_attractor(spec, State(0.3, 0.4))
        ext = classify_attractor(spec, State(0.0, 0.5))
        grid = BasinGrid((0.0, 1.5), (0.0, 3.0), 48, 48)
        labels = basin_sample(spec, grid, [a_eq, a_other, ext], budget=4096)
        xs = np.linspace(0.0, 1.5, 48)
        ys = np.linspace(0.0, 3.0, 48)
        assert labels[np.argmin(np.abs(ys - 0.7)),
                      np.argmin(np.abs(xs - 0.8))] == 0
        assert labels[np.argmin(np.abs(ys - 0.4)),
                      np.argmin(np.abs(xs - 0.3))] == 1
        assert (labels == 0).any() and (labels == 1).any()

    def test_y_axis_column_is_extinction(self):
        spec = ModelSpec.from_index(2, b=1.9, r=2.92)
        ext = classify_attractor(spec, State(0.0, 0.5))
        a_eq = classify_attractor(spec, State(0.8, 0.7))
        grid = BasinGrid((0.0, 1.5), (0.0, 3.0), 16, 16)
        labels = basin_sample(spec, grid, [a_eq, ext], budget=2048)
        assert set(labels[1:, 0].tolist()) == {1}

    def test_interior_single_basin(self):
        spec = ModelSpec.from_index(1, b=2.0, R0=2.0)
        a = classify_attractor(spec, State(0.5, 0.3))
        grid = BasinGrid((0.05, 1.5), (0.05, 3.0), 64, 64)
        labels = basin_sample(spec, grid, [a], budget=4096)
        assert np.all(labels == 0)

    def test_deterministic(self):
        spec = ModelSpec.from_index(2, b=1.9, r=2.92)
        a_eq = classify_attractor(spec, State(0.8, 0.7))
        grid = BasinGrid((0.0, 1.5), (0.0, 3.0), 24, 24)
        l1 = basin_sample(spec, grid, [a_eq], budget=1024)
        l2 = basin_sample(spec, grid, [a_eq], budget=1024)
        assert np.array_equal(l1, l2)

    def test_needs_attractors(self):
        with pytest.raises(DomainError):
            basin_sample(spec_for(1), BasinGrid(), [], budget=100)
