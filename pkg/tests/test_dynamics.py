"""Time-domain integration tests against analytic limits and the propagator oracle."""

import io

import numpy as np
import pytest

from carl import (
    RAO,
    WAO,
    NonExponentialFitError,
    ScaledParams,
    StepSizeRejection,
    TrajectoryState,
    eigen_spectrum,
    evolve,
    fit_growth_rate,
    propagator,
    system_matrix,
    write_trajectory_csv,
)

SEED_STATE = TrajectoryState(tau=0.0, A1=1e-6 + 0j, B=0j, Bdot=0j)


def decoupled(eta):
    return ScaledParams(delta21=0.0, alpha=0.0, beta=0.0, eta=eta)


class TestAnalyticLimits:
    def test_wao_bunching_is_harmonic_oscillator(self):
        # alpha=beta=0, eta=1, B(0)=1: B(tau) = cos(tau)
        traj = evolve(decoupled(WAO), TrajectoryState(0.0, 0j, 1.0 + 0j, 0j), tau_end=20.0, dt=1e-3)
        worst = max(abs(s.B - np.cos(s.tau)) for s in traj.samples)
        assert worst <= 1e-8

    def test_rao_bunching_is_free_particle(self):
        # alpha=beta=0, eta=0, dB/dtau(0)=1: B(tau) = tau
        traj = evolve(decoupled(RAO), TrajectoryState(0.0, 0j, 0j, 1.0 + 0j), tau_end=20.0, dt=1e-3)
        worst = max(abs(s.B - s.tau) for s in traj.samples)
        assert worst <= 1e-8

    def test_decoupled_probe_phase_rotation(self):
        d0 = 0.7
        p = ScaledParams(delta21=d0, alpha=0.0, beta=0.0, eta=WAO)
        traj = evolve(p, TrajectoryState(0.0, 1.0 + 0j, 0j, 0j), tau_end=20.0, dt=1e-3)
        worst = max(abs(s.A1 - np.exp(1j * d0 * s.tau)) for s in traj.samples)
        assert worst <= 1e-8
        mags = traj.probe_magnitudes()
        assert np.max(np.abs(mags - 1.0)) <= 1e-8


class TestEvolveMechanics:
    def test_validation(self):
        p = ScaledParams.from_product(0.0, 1.0, WAO)
        with pytest.raises(ValueError):
            evolve(p, SEED_STATE, tau_end=0.0)
        with pytest.raises(ValueError):
            evolve(p, SEED_STATE, tau_end=1.0, dt=-1e-3)
        with pytest.raises(ValueError):
            evolve(p, SEED_STATE, tau_end=1.0, output_stride=0)

    def test_taus_strictly_increasing_and_stride(self):
        p = ScaledParams.from_product(0.0, 1.0, WAO)
        traj = evolve(p, SEED_STATE, tau_end=2.0, dt=1e-3, output_stride=250)
        taus = traj.taus()
        assert np.all(np.diff(taus) > 0.0)
        # initial + every 250 steps + final
        assert taus[0] == 0.0 and taus[-1] == pytest.approx(2.0, abs=1e-12)
        assert taus[1] == pytest.approx(0.25, abs=1e-12)

    def test_non_integer_span_lands_on_tau_end(self):
        p = ScaledParams.from_product(0.0, 1.0, WAO)
        traj = evolve(p, SEED_STATE, tau_end=1.0005, dt=1e-3)
        assert traj.samples[-1].tau == pytest.approx(1.0005, abs=1e-12)
        # short final step agrees with the propagator
        exact = propagator(p, 1.0005) @ SEED_STATE.as_vector()
        got = traj.samples[-1].as_vector()
        assert np.linalg.norm(got - exact) / np.linalg.norm(exact) < 1e-9

    def test_step_rejection_raises_with_guidance(self):
        p = ScaledParams.from_product(1.0, 5.0, WAO)
        with pytest.raises(StepSizeRejection, match="reduce dt"):
            evolve(p, SEED_STATE, tau_end=10.0, dt=0.8)

    def test_linearity_flag_set_when_bunching_saturates(self):
        p = ScaledParams.from_product(0.0, 1.0, WAO)
        g = eigen_spectrum(p).gamma
        traj = evolve(p, TrajectoryState(0.0, 1.0 + 0j, 0j, 0j), tau_end=40.0, dt=1e-3)
        assert traj.linearity_flag is not None
        # |B| crosses 1 roughly when the seed has grown by that factor
        assert 0.0 < traj.linearity_flag < 40.0
        before = [s for s in traj.samples if s.tau < traj.linearity_flag]
        assert all(abs(s.B) <= 1.0 + 1e-9 for s in before)

    def test_linearity_flag_none_in_stable_regime(self):
        traj = evolve(ScaledParams.from_product(0.0, 0.1, WAO), SEED_STATE, tau_end=50.0, dt=5e-3)
        assert traj.linearity_flag is None


class TestPropagatorOracle:
    def test_identity_at_tau_zero(self):
        p = ScaledParams.from_product(1.0, 1.0, WAO)
        assert np.allclose(propagator(p, 0.0), np.eye(3), atol=1e-12)

    def test_characteristic_polynomial_matches_dispersion_cubic(self):
        # det(M - lam I) = -(lam^3 - i d lam^2 + eta lam - i(ab + eta d))
        rng = np.random.default_rng(21)
        for _ in range(100):
            d = rng.uniform(-5, 10)
            a = rng.uniform(0, 5)
            b = rng.uniform(0, 4)
            eta = int(rng.integers(0, 2))
            m = system_matrix(ScaledParams(delta21=d, alpha=a, beta=b, eta=eta))
            lam = complex(rng.normal(), rng.normal())
            det = np.linalg.det(m - lam * np.eye(3))
            poly = lam**3 - 1j * d * lam**2 + eta * lam - 1j * (a * b + eta * d)
            assert det == pytest.approx(-poly, rel=1e-10, abs=1e-10)

    def test_evolve_matches_propagator(self):
        p = ScaledParams(delta21=1.0, alpha=1.0, beta=1.0, eta=WAO)
        traj = evolve(p, SEED_STATE, tau_end=10.0, dt=1e-3)
        exact = propagator(p, 10.0) @ SEED_STATE.as_vector()
        got = traj.samples[-1].as_vector()
        assert np.linalg.norm(got - exact) / np.linalg.norm(exact) <= 1e-6

    def test_degenerate_fallback_free_particle(self):
        # alpha=beta=0, eta=0: nilpotent generator, triple eigenvalue 0
        p = decoupled(RAO)
        expected = np.eye(3, dtype=complex)
        expected[1, 2] = 7.5  # exp of the nilpotent block
        assert np.allclose(propagator(p, 7.5), expected, atol=1e-12)

    def test_fourth_order_convergence(self):
        p = ScaledParams(delta21=1.0, alpha=1.0, beta=1.0, eta=WAO)
        y0 = SEED_STATE.as_vector()
        exact = propagator(p, 10.0) @ y0

        def final_error(dt):
            traj = evolve(p, SEED_STATE, tau_end=10.0, dt=dt)
            got = traj.samples[-1].as_vector()
            return np.linalg.norm(got - exact) / np.linalg.norm(exact)

        ratio = final_error(0.05) / final_error(0.025)
        assert 11.0 <= ratio <= 22.0  # ~16x for a fourth-order scheme


class TestFitGrowthRate:
    def test_wao_rate_recovered(self):
        p = ScaledParams.from_product(0.0, 1.0, WAO)
        g = eigen_spectrum(p).gamma
        traj = evolve(p, SEED_STATE, tau_end=60.0 / g, dt=5e-3, output_stride=20)
        fitted = fit_growth_rate(traj, (30.0 / g, 60.0 / g))
        assert abs(fitted - g) / g <= 0.01
        assert fitted == pytest.approx(0.56227951206230124, rel=1e-4)

    def test_rao_rate_recovered(self):
        p = ScaledParams.from_product(0.0, 1.0, RAO)
        g = eigen_spectrum(p).gamma
        traj = evolve(p, SEED_STATE, tau_end=60.0 / g, dt=5e-3, output_stride=20)
        fitted = fit_growth_rate(traj, (30.0 / g, 60.0 / g))
        assert abs(fitted - g) / g <= 0.01
        assert fitted == pytest.approx(0.86602540378443865, rel=1e-4)

    def test_below_threshold_is_non_exponential(self):
        p = ScaledParams.from_product(0.0, 0.1, WAO)  # 0.1 < 2/(3 sqrt 3)
        traj = evolve(p, SEED_STATE, tau_end=60.0, dt=5e-3, output_stride=20)
        with pytest.raises(NonExponentialFitError) as excinfo:
            fit_growth_rate(traj, (20.0, 60.0))
        assert excinfo.value.residual > 1e-2

    def test_window_validation(self):
        p = ScaledParams.from_product(0.0, 1.0, WAO)
        traj = evolve(p, SEED_STATE, tau_end=10.0, dt=5e-3, output_stride=20)
        with pytest.raises(ValueError):
            fit_growth_rate(traj, (5.0, 15.0))  # beyond the trajectory
        with pytest.raises(ValueError):
            fit_growth_rate(traj, (5.0, 5.0))
        with pytest.raises(ValueError):
            fit_growth_rate(traj, (5.0, 5.1))  # fewer than 5 samples

    def test_rate_converges_with_later_windows(self):
        p = ScaledParams.from_product(0.5, 2.0, WAO)
        g = eigen_spectrum(p).gamma
        traj = evolve(p, SEED_STATE, tau_end=60.0 / g, dt=5e-3, output_stride=20)
        errors = [
            abs(fit_growth_rate(traj, (t0 / g, 2.0 * t0 / g)) - g) / g for t0 in (10.0, 20.0, 30.0)
        ]
        assert errors[-1] <= 0.01
        assert errors[2] <= errors[0]


class TestStableBound:
    def test_no_secular_growth_below_threshold(self):
        # |A1(tau)| <= sum_k |V[0,k] (V^-1 y0)_k| for purely imaginary spectra
        p = ScaledParams.from_product(2.5, 0.4, WAO)
        sp = eigen_spectrum(p)
        assert sp.gamma == 0.0
        m = system_matrix(p)
        eigvals, v = np.linalg.eig(m)
        y0 = SEED_STATE.as_vector()
        weights = np.linalg.solve(v, y0)
        bound = float(np.sum(np.abs(v[0, :] * weights)))
        traj = evolve(p, SEED_STATE, tau_end=100.0, dt=5e-3, output_stride=10)
        assert float(traj.probe_magnitudes().max()) <= bound * (1.0 + 1e-3)


class TestTrajectoryCsv:
    def test_schema_and_metadata(self):
        p = ScaledParams.from_product(0.0, 1.0, WAO)
        traj = evolve(p, SEED_STATE, tau_end=1.0, dt=1e-3, output_stride=500)
        buf = io.StringIO()
        write_trajectory_csv(traj, buf)
        lines = buf.getvalue().splitlines()
        comments = [l for l in lines if l.startswith("#")]
        assert any("dt: 0.001" in l for l in comments)
        assert any("abs_A1=1e-06" in l for l in comments)
        header = next(l for l in lines if not l.startswith("#"))
        assert header == "tau,re_A1,im_A1,abs_A1,re_B,im_B,abs_B,re_Bdot,im_Bdot"
        data = [l for l in lines if not l.startswith("#")][1:]
        assert len(data) == len(traj.samples)
        first = data[0].split(",")
        assert len(first) == 9
        assert float(first[0]) == 0.0
        assert float(first[3]) == pytest.approx(1e-6)

    def test_round_trips_to_file(self, tmp_path):
        p = ScaledParams.from_product(0.0, 1.0, WAO)
        traj = evolve(p, SEED_STATE, tau_end=0.5, dt=1e-3)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, str(path))
        rows = np.genfromtxt(path, delimiter=",", names=True, comments="#")
        assert rows["tau"][-1] == pytest.approx(0.5)
