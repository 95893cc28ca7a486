"""Single-qubit stochastic evolution, purity, coherence time."""

import numpy as np
import pytest

from annealkit.errors import HorizonError, ParameterError
from annealkit.noise import NoiseSpectrum
from annealkit.qubit import PurityCurve, QubitRun, coherence_time, evolve_qubit


def quick_run(**kw):
    defaults = dict(h_z=0.0,
                    spectrum=NoiseSpectrum(coupling=0.05, n_modes=100),
                    t_max=20.0, dt_out=0.5, n_realizations=50, master_seed=3)
    defaults.update(kw)
    return QubitRun(**defaults)


class TestValidation:
    def test_domains(self):
        with pytest.raises(ParameterError):
            quick_run(t_max=0.0)
        with pytest.raises(ParameterError):
            quick_run(n_realizations=0)
        with pytest.raises(ParameterError):
            quick_run(dt_out=100.0)


class TestPurity:
    def test_no_noise_purity_stays_one(self):
        run = quick_run(spectrum=NoiseSpectrum(coupling=0.0, n_modes=8),
                        h_z=0.3, n_realizations=5, t_max=10.0)
        curve = evolve_qubit(run)
        assert np.abs(curve.purity - 1.0).max() < 1e-9

    def test_single_realization_is_pure(self):
        run = quick_run(n_realizations=1, t_max=10.0)
        curve = evolve_qubit(run)
        assert np.abs(curve.purity - 1.0).max() < 1e-9

    def test_purity_starts_at_one_and_stays_in_range(self):
        curve = evolve_qubit(quick_run(n_realizations=100))
        assert curve.purity[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(curve.purity >= 0.5 - 1e-9)
        assert np.all(curve.purity <= 1.0 + 1e-9)

    def test_density_matrix_diagnostics(self):
        curve = evolve_qubit(quick_run(n_realizations=100))
        assert curve.trace_defect < 1e-9
        assert curve.hermiticity_defect < 1e-9
        assert curve.min_eigenvalue > -1e-9

    def test_noise_decoheres(self):
        curve = evolve_qubit(quick_run(n_realizations=100, t_max=30.0))
        assert curve.purity[-1] < 0.95


class TestCoherenceTime:
    def test_linear_synthetic_crossing(self):
        times = np.linspace(0.0, 100.0, 201)
        curve = PurityCurve(times=times, purity=1.0 - times / 100.0,
                            run=quick_run())
        assert coherence_time(curve) == pytest.approx(25.0, abs=1e-9)

    def test_horizon_error_carries_final_purity(self):
        times = np.linspace(0.0, 10.0, 21)
        curve = PurityCurve(times=times, purity=np.full(21, 0.9),
                            run=quick_run())
        with pytest.raises(HorizonError) as err:
            coherence_time(curve)
        assert err.value.final_purity == pytest.approx(0.9)

    def test_interpolation_between_samples(self):
        times = np.array([0.0, 1.0, 2.0])
        curve = PurityCurve(times=times, purity=np.array([1.0, 0.8, 0.6]),
                            run=quick_run())
        # crosses 0.75 a quarter of the way into [1, 2]
        assert coherence_time(curve) == pytest.approx(1.25, abs=1e-12)

    def test_field_slows_decoherence(self):
        base = dict(n_realizations=100, t_max=60.0,
                    spectrum=NoiseSpectrum(coupling=0.08, n_modes=100))
        t0 = coherence_time(evolve_qubit(quick_run(h_z=0.0, **base)))
        t1 = coherence_time(evolve_qubit(quick_run(h_z=0.15, **base)))
        assert t1 > t0
