import csv
import io
import math

import numpy as np
import pytest
import scipy.linalg

from sptk.decomposition import decompose
from sptk.model import full_generator
from sptk.numerics import spectral_abscissa
from sptk.tikhonov import (
    default_dt,
    default_horizon,
    epsilon_sweep,
    error_trajectories,
    fit_loglog,
    fixed_ic,
    perturbed_growth_bound,
    scaled_ic,
    simulate_full,
)

GRID = [0.1, 0.05, 0.025, 0.0125, 0.00625]


def _sup(traj):
    return float(np.max(np.linalg.norm(traj.states, axis=1)))


class TestDefaults:
    def test_horizon(self, scalar_parts, heat_parts):
        assert default_horizon(scalar_parts[1]) == pytest.approx(10.0)
        assert default_horizon(heat_parts[1]) == pytest.approx(10.0 / 1.91667, rel=1e-4)

    def test_dt(self):
        assert default_dt(0.1, 10.0) == pytest.approx(0.005)
        assert default_dt(1.0, 10.0) == pytest.approx(0.005)
        assert default_dt(0.01, 10.0) == pytest.approx(0.0005)


class TestSimulateFull:
    def test_matches_matrix_exponential(self, scalar):
        traj = simulate_full(scalar, 0.1, [1.0], [1.0], 1.0, dt=1e-4)
        exact = scipy.linalg.expm(full_generator(scalar, 0.1)) @ np.ones(2)
        np.testing.assert_allclose(traj.states[-1], exact, atol=1e-7)

    def test_rejects_wrong_ic(self, scalar):
        with pytest.raises(ValueError):
            simulate_full(scalar, 0.1, [1.0, 2.0], [1.0], 1.0)


class TestErrorTrajectories:
    def test_errors_start_at_zero(self, heat_parts, rng):
        sys, dec, _ = heat_parts
        z_err, w_err = error_trajectories(sys, dec, 0.05, rng.standard_normal(32),
                                          rng.standard_normal(1), 1.0)
        assert np.max(np.abs(z_err.states[0])) <= 1e-12
        assert np.max(np.abs(w_err.states[0])) <= 1e-12

    def test_decoupled_slow_error_vanishes(self, heat):
        # B2 = 0: the slow state does not see z, so w follows the reduced flow exactly
        sys = heat.replace(B2=np.zeros_like(heat.B2))
        dec = decompose(sys)
        _, w_err = error_trajectories(sys, dec, 0.05, np.ones(32), [1.0], 1.0)
        assert _sup(w_err) <= 1e-12

    def test_fully_decoupled_errors_vanish(self, scalar):
        # B1 = B2 = 0: full flow is the product of boundary layer and reduced flow
        sys = scalar.replace(B1=np.zeros((1, 1)), B2=np.zeros((1, 1)))
        dec = decompose(sys)
        z_err, w_err = error_trajectories(sys, dec, 0.1, [2.0], [1.0], 2.0)
        assert _sup(z_err) <= 1e-12
        assert _sup(w_err) <= 1e-12

    def test_error_shrinks_with_eps(self, scalar_parts):
        sys, dec, _ = scalar_parts
        sups = []
        for eps in (0.1, 0.01):
            z_err, w_err = error_trajectories(sys, dec, eps, [1.0], [1.0], 5.0)
            sups.append(_sup(z_err) + _sup(w_err))
        assert sups[1] < 0.2 * sups[0]

    def test_warns_on_coarse_step(self, scalar_parts, caplog):
        sys, dec, _ = scalar_parts
        error_trajectories(sys, dec, 0.1, [1.0], [1.0], 1.0, dt=0.05)
        assert "boundary layer" in caplog.text


class TestSweep:
    def test_state_scaling_slope(self, scalar_parts):
        sys, dec, cert = scalar_parts
        res = epsilon_sweep(sys, dec, cert, GRID, scaled_ic(sys), mode="state_scaling")
        assert res.slope == pytest.approx(1.0, abs=1e-6)
        assert res.passed()

    def test_tikhonov_slope_fixed_ic(self, scalar_parts):
        sys, dec, cert = scalar_parts
        res = epsilon_sweep(sys, dec, cert, GRID, fixed_ic(sys))
        assert 0.75 <= res.slope <= 1.25
        assert np.all(np.diff(res.metrics) < 0)

    def test_tikhonov_with_eps_scaled_ic_is_second_order(self, scalar_parts):
        # linearity: eps-sized initial states multiply the O(eps) error by eps
        sys, dec, cert = scalar_parts
        res = epsilon_sweep(sys, dec, cert, GRID, scaled_ic(sys))
        assert res.slope == pytest.approx(2.0, abs=0.1)
        assert not res.passed()

    def test_state_scaling_with_fixed_ic_is_flat(self, scalar_parts):
        sys, dec, cert = scalar_parts
        res = epsilon_sweep(sys, dec, cert, GRID, fixed_ic(sys), mode="state_scaling")
        assert abs(res.slope) <= 0.1

    def test_sorted_descending(self, scalar_parts):
        sys, dec, cert = scalar_parts
        res = epsilon_sweep(sys, dec, cert, [0.01, 0.1, 0.05], fixed_ic(sys),
                            t_final=2.0)
        assert res.eps_values.tolist() == [0.1, 0.05, 0.01]

    def test_threads_match_serial(self, heat_parts):
        sys, dec, cert = heat_parts
        grid = [0.1, 0.05, 0.025]
        serial = epsilon_sweep(sys, dec, cert, grid, fixed_ic(sys), t_final=1.0)
        pooled = epsilon_sweep(sys, dec, cert, grid, fixed_ic(sys), t_final=1.0,
                               max_workers=3)
        np.testing.assert_array_equal(serial.metrics, pooled.metrics)
        assert serial.to_csv() == pooled.to_csv()

    @pytest.mark.parametrize("grid", [[0.1, 0.05], [0.1, 0.1, 0.05]])
    def test_needs_three_distinct_values(self, scalar_parts, grid):
        sys, dec, cert = scalar_parts
        with pytest.raises(ValueError):
            epsilon_sweep(sys, dec, cert, grid, fixed_ic(sys))

    def test_rejects_eps_above_threshold(self, scalar_parts):
        sys, dec, cert = scalar_parts
        with pytest.raises(ValueError, match="eps_star"):
            epsilon_sweep(sys, dec, cert, [0.5, 0.1, 0.05], fixed_ic(sys))

    def test_rejects_unknown_mode(self, scalar_parts):
        sys, dec, cert = scalar_parts
        with pytest.raises(ValueError):
            epsilon_sweep(sys, dec, cert, GRID, fixed_ic(sys), mode="other")

    def test_csv_and_summary(self, scalar_parts):
        sys, dec, cert = scalar_parts
        res = epsilon_sweep(sys, dec, cert, [0.1, 0.05, 0.025], fixed_ic(sys),
                            t_final=2.0)
        rows = list(csv.reader(io.StringIO(res.to_csv())))
        assert rows[0] == ["eps", "metric"]
        assert [float(r[0]) for r in rows[1:]] == [0.1, 0.05, 0.025]
        assert float(rows[1][1]) == res.metrics[0]
        summary = res.summary()
        assert set(summary) == {"slope", "intercept", "mode", "pass"}
        assert summary["mode"] == "tikhonov_error"


class TestFitLogLog:
    def test_exact_power_law(self):
        eps = np.array([0.1, 0.01, 0.001])
        slope, intercept = fit_loglog(eps, 3.0 * eps ** 1.5)
        assert slope == pytest.approx(1.5)
        assert intercept == pytest.approx(math.log(3.0))

    def test_floor(self):
        slope, _ = fit_loglog([0.1, 0.01, 0.001], [0.0, 0.0, 0.0])
        assert slope == pytest.approx(0.0, abs=1e-12)


class TestGrowthBound:
    def test_scalar(self, scalar_parts):
        sys, dec, _ = scalar_parts
        gb = perturbed_growth_bound(sys, dec, 0.25)
        assert gb.alpha == pytest.approx(-0.75)
        assert gb.eps_max == pytest.approx(1.0)
        assert (gb.K1, gb.omega1) == (1.0, 1.0)
        perturbed = sys.A1 + 0.25 * dec.inv_a1_b1_c1 @ sys.B2 @ sys.C2
        assert spectral_abscissa(perturbed) == pytest.approx(-1.25)

    def test_zero_eps(self, heat_parts):
        sys, dec, _ = heat_parts
        gb = perturbed_growth_bound(sys, dec, 0.0)
        assert gb.alpha == pytest.approx(-math.pi ** 2)

    def test_non_normal_uses_eigenvector_condition(self, scalar):
        A1 = np.array([[-1.0, 5.0], [0.0, -2.0]])
        sys = scalar.replace(A1=A1, B1=np.ones((2, 1)), C2=np.ones((1, 2)))
        dec = decompose(sys)
        gb = perturbed_growth_bound(sys, dec, 0.01)
        assert gb.K1 > 1.0
        for eps in np.linspace(0.0, 0.99 * gb.eps_max, 10):
            pert = sys.A1 + eps * dec.inv_a1_b1_c1 @ sys.B2 @ sys.C2
            assert spectral_abscissa(pert) <= perturbed_growth_bound(sys, dec, eps).alpha + 1e-10

    def test_infinite_when_uncoupled(self, heat):
        sys = heat.replace(B2=np.zeros_like(heat.B2))
        assert math.isinf(perturbed_growth_bound(sys, decompose(sys), 0.1).eps_max)
