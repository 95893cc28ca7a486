"""Noise synthesis: spectrum sampling, evaluation, exact autocorrelation."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import gamma as gamma_dist
from scipy.stats import kstest

from annealkit.errors import ParameterError
from annealkit.noise import (NoiseSignal, NoiseSpectrum, SignalBank,
                             autocorrelation_exact, sample_signal)

SPEC = NoiseSpectrum(p=0.75, omega0=1.0, coupling=0.01, n_modes=1000)


def spectral_density(w, spec=SPEC):
    return (w / spec.omega0) ** (-spec.p) * np.exp(-w / spec.omega0) / (
        spec.omega0 * math.gamma(1.0 - spec.p))


def quadrature_autocorrelation(tau, spec=SPEC):
    """Independent oracle: C(tau) = int S(w) cos(w tau) dw."""
    val, _ = quad(lambda w: spectral_density(w, spec) * np.cos(w * tau),
                  0.0, np.inf, limit=800)
    return val


class TestSpectrumValidation:
    def test_exponent_domain(self):
        with pytest.raises(ParameterError):
            NoiseSpectrum(p=1.0)
        with pytest.raises(ParameterError):
            NoiseSpectrum(p=0.0)
        with pytest.raises(ParameterError):
            NoiseSpectrum(p=-0.3)

    def test_other_domains(self):
        with pytest.raises(ParameterError):
            NoiseSpectrum(omega0=0.0)
        with pytest.raises(ParameterError):
            NoiseSpectrum(coupling=-0.1)
        with pytest.raises(ParameterError):
            NoiseSpectrum(n_modes=0)


class TestSampling:
    def test_mode_frequency_mean(self):
        # gamma mean (1-p)*omega0; cross-checked by quadrature of w * S(w)
        mean_quad, _ = quad(lambda w: w * spectral_density(w), 0.0, np.inf,
                            limit=400)
        assert mean_quad == pytest.approx(0.25, abs=1e-9)
        draws = np.concatenate([sample_signal(SPEC, (42, r)).omega
                                for r in range(100)])
        se = draws.std() / np.sqrt(draws.size)
        assert abs(draws.mean() - mean_quad) < 5 * se

    def test_single_mode_signal(self):
        spec = NoiseSpectrum(n_modes=1)
        sig = sample_signal(spec, 7)
        assert sig.n_modes == 1
        assert sig.eval(0.0) == pytest.approx(sig.x[0], abs=1e-14)

    def test_determinism(self):
        s1 = sample_signal(SPEC, (3, 1, 5))
        s2 = sample_signal(SPEC, (3, 1, 5))
        assert np.array_equal(s1.omega, s2.omega)
        assert np.array_equal(s1.x, s2.x)
        assert np.array_equal(s1.p, s2.p)

    def test_distinct_keys_distinct_streams(self):
        s1 = sample_signal(SPEC, (3, 1, 5))
        s2 = sample_signal(SPEC, (3, 1, 6))
        assert not np.array_equal(s1.omega, s2.omega)

    def test_goodness_of_fit_against_density(self):
        rng_draws = np.concatenate([sample_signal(SPEC, (1111, r)).omega
                                    for r in range(100)])
        assert rng_draws.size == 100_000
        stat = kstest(rng_draws, gamma_dist(a=1.0 - SPEC.p,
                                            scale=SPEC.omega0).cdf)
        assert stat.pvalue > 0.01

    def test_all_frequencies_positive(self):
        sig = sample_signal(SPEC, 0)
        assert np.all(sig.omega > 0)


class TestEval:
    def test_unit_cosine_amplitudes(self):
        n = 64
        sig = NoiseSignal(omega=np.linspace(0.1, 2.0, n), x=np.ones(n),
                          p=np.zeros(n), spectrum=SPEC)
        assert sig.eval(0.0) == pytest.approx(np.sqrt(n), rel=1e-12)

    def test_zero_amplitudes(self):
        n = 16
        sig = NoiseSignal(omega=np.linspace(0.1, 2.0, n), x=np.zeros(n),
                          p=np.zeros(n), spectrum=SPEC)
        for t in (0.0, 0.7, 13.1):
            assert sig.eval(t) == 0.0

    def test_variance_at_zero(self):
        spec = NoiseSpectrum(n_modes=100)
        vals = np.array([sample_signal(spec, (5, r)).eval(0.0)
                         for r in range(10_000)])
        assert vals.var() == pytest.approx(1.0, abs=0.05)

    def test_mean_is_zero(self):
        spec = NoiseSpectrum(n_modes=100)
        t = 2.31
        vals = np.array([sample_signal(spec, (6, r)).eval(t)
                         for r in range(10_000)])
        se = vals.std() / np.sqrt(vals.size)
        assert abs(vals.mean()) < 5 * se

    def test_eval_many_matches_eval(self):
        sig = sample_signal(SPEC, 12)
        ts = np.array([0.0, 0.4, 1.7, 22.2])
        many = sig.eval_many(ts)
        single = [sig.eval(t) for t in ts]
        assert np.allclose(many, single, atol=1e-12)


class TestAutocorrelation:
    def test_zero_lag_is_unit_variance(self):
        assert autocorrelation_exact(SPEC, 0.0) == 1.0

    def test_closed_form_at_unit_lag(self):
        expected = float(np.real((1.0 - 1.0j) ** (-0.25)))
        assert autocorrelation_exact(SPEC, 1.0) == pytest.approx(expected,
                                                                 rel=1e-14)
        assert autocorrelation_exact(SPEC, 1.0) == pytest.approx(
            quadrature_autocorrelation(1.0), abs=1e-8)

    def test_long_lag_decay(self):
        c10 = autocorrelation_exact(SPEC, 10.0)
        c100 = autocorrelation_exact(SPEC, 100.0)
        assert abs(c10) == pytest.approx(abs(quadrature_autocorrelation(10.0)),
                                         abs=1e-6)
        assert abs(c100) < abs(c10) < 1.0
        # magnitude envelope (1 + w0^2 tau^2)^(-(1-p)/2) decreases monotonically
        taus = np.logspace(-1, 3, 40)
        env = (1 + taus ** 2) ** (-(1 - SPEC.p) / 2)
        assert np.all(np.diff(env) < 0)

    def test_empirical_autocorrelation(self):
        spec = NoiseSpectrum(n_modes=64)
        n_seeds = 10_000
        t0 = 0.9
        taus = (0.0, 0.5, 1.0, 5.0)
        ts = np.array([t0] + [t0 + tau for tau in taus])
        prods = np.empty((n_seeds, len(taus)))
        for r in range(n_seeds):
            vals = sample_signal(spec, (77, r)).eval_many(ts)
            prods[r] = vals[0] * vals[1:]
        for j, tau in enumerate(taus):
            mean = prods[:, j].mean()
            se = prods[:, j].std() / np.sqrt(n_seeds)
            assert abs(mean - autocorrelation_exact(spec, tau)) < 5 * se, tau

    def test_cross_site_independence(self):
        spec = NoiseSpectrum(n_modes=64)
        t = 1.3
        a = np.array([sample_signal(spec, (88, r, 0)).eval(t)
                      for r in range(10_000)])
        b = np.array([sample_signal(spec, (88, r, 1)).eval(t)
                      for r in range(10_000)])
        prod = a * b
        se = prod.std() / np.sqrt(prod.size)
        assert abs(prod.mean()) < 5 * se

    def test_stationarity(self):
        spec = NoiseSpectrum(n_modes=64)
        v0, v1 = [], []
        for r in range(10_000):
            sig = sample_signal(spec, (99, r))
            v0.append(sig.eval(0.0))
            v1.append(sig.eval(37.2))
        v0, v1 = np.array(v0), np.array(v1)
        var0, var1 = v0.var(), v1.var()
        # variance-of-variance for近 gaussian samples: var^2 * 2/n
        err = np.sqrt(2.0 / v0.size) * (var0 + var1)
        assert abs(var0 - var1) < 5 * err


class TestSignalBank:
    def test_matches_individual_signals(self):
        sigs = [sample_signal(NoiseSpectrum(n_modes=32), (4, i))
                for i in range(5)]
        sigs[2] = None
        bank = SignalBank(sigs, size=5)
        for t in (0.0, 1.1, 8.8):
            got = bank.eval_at(t)
            for i, sig in enumerate(sigs):
                want = 0.0 if sig is None else sig.eval(t)
                assert got[i] == pytest.approx(want, abs=1e-12)

    def test_empty_bank_returns_zeros(self):
        bank = SignalBank([None, None], size=2)
        assert np.array_equal(bank.eval_at(3.2), np.zeros(2))
