"""Free-fermion chain: matrices, ground state, evolution, observables.

Dense-diagonalization cross-checks pin every sign convention; the
annihilator realizing the module's convention in the spin basis is
c_i = (prod_{j<i} sigma^x_j) (sigma^z - i sigma^y)_i / 2.
"""

import numpy as np
import pytest

from annealkit import ed
from annealkit.errors import ParameterError
from annealkit.fermion import (BdgModes, ChainSpec, _Rhs, bdg_matrices,
                               correlations, energy_expectation, evolve,
                               evolve_checkpointed, field_offset,
                               ground_energy, ground_state,
                               quasiparticle_energies, residual_energy,
                               spin_spectrum, transverse_magnetization)
from annealkit.noise import NoiseSpectrum, sample_signal

I2 = np.eye(2)
SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SZ = np.diag([1.0, -1.0])


def site_op(op, i, L):
    ops = [I2] * L
    ops[L - 1 - i] = op  # site 0 is the least-significant bit
    out = np.array([[1.0 + 0j]])
    for o in ops:
        out = np.kron(out, o)
    return out


def annihilator(i, L):
    c = site_op((SZ - 1j * SY) / 2.0, i, L)
    for j in range(i):
        c = c @ site_op(SX, j, L)
    return c


def random_modes(L, seed):
    """A valid Nambu frame from a random quadratic ground state."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((L, L))
    A = A + A.T
    B = rng.standard_normal((L, L))
    B = B - B.T
    return ground_state(A, B)


def noisy_chain(L, seed, coupling=0.01, n_modes=64):
    spec = NoiseSpectrum(n_modes=n_modes)
    signals = tuple(sample_signal(spec, (seed, L, site)) for site in range(L))
    return ChainSpec(size=L, coupling=coupling, signals=signals)


class TestBdgMatrices:
    def test_start_of_schedule(self):
        A, B = bdg_matrices(ChainSpec(size=5), s=0.0)
        assert np.allclose(A, 2.0 * np.eye(5))
        assert np.allclose(B, 0.0)

    def test_classical_point(self):
        A, B = bdg_matrices(ChainSpec(size=5), s=1.0)
        assert np.allclose(np.diag(A), 0.0)
        off = np.arange(4)
        assert np.allclose(A[off, off + 1], -1.0)
        assert np.allclose(B[off, off + 1], -1.0)
        assert np.allclose(B[off + 1, off], 1.0)

    def test_spectrum_reconstruction_matches_ed(self):
        chain = ChainSpec(size=4)
        A, B = bdg_matrices(chain, s=0.5)
        spec_f = spin_spectrum(A, B, field_offset(chain, 0.5))
        spec_e = ed.spectrum_exact(chain, 0.5)
        assert np.abs(spec_f - spec_e).max() < 1e-10

    def test_rhs_matches_dense_bdg_form(self):
        # the structured hot loop equals i d/dt [U;V] = [[A,B],[-B,-A]][U;V]
        chain = noisy_chain(6, seed=3)
        T = 4.0
        rhs = _Rhs(chain, T)
        modes = random_modes(6, seed=11)
        phi = modes.U + modes.V
        psi = modes.U - modes.V
        y = np.concatenate([phi, psi]).ravel()
        t = 1.234
        out = rhs(t, y).reshape(12, 6)
        dU = 0.5 * (out[:6] + out[6:])
        dV = 0.5 * (out[:6] - out[6:])
        A, B = bdg_matrices(chain, t / T, t)
        assert np.abs(dU - (-1j) * (A @ modes.U + B @ modes.V)).max() < 1e-12
        assert np.abs(dV - (-1j) * (-B @ modes.U - A @ modes.V)).max() < 1e-12


class TestGroundState:
    def test_paramagnetic_start(self):
        chain = ChainSpec(size=6)
        modes = ground_state(*bdg_matrices(chain, 0.0))
        corr = correlations(modes)
        assert np.abs(corr.G).max() < 1e-12
        assert np.abs(corr.F).max() < 1e-12
        assert np.allclose(transverse_magnetization(corr), 1.0)
        A, B = bdg_matrices(chain, 0.0)
        e = energy_expectation(corr, A, B, field_offset(chain, 0.0))
        assert e == pytest.approx(-6.0, abs=1e-12)

    def test_ground_energy_vs_ed(self):
        chain = ChainSpec(size=8)
        for s in (0.2, 0.5, 0.9):
            assert ground_energy(chain, s) == pytest.approx(
                ed.spectrum_exact(chain, s)[0], abs=1e-10)

    def test_nambu_constraints(self):
        modes = random_modes(7, seed=5)
        assert modes.orthonormality_defect() < 1e-10
        assert modes.pairing_defect() < 1e-10

    def test_energies_nonnegative_with_zero_mode_at_classical_point(self):
        A, B = bdg_matrices(ChainSpec(size=6), s=1.0)
        eps = quasiparticle_energies(A, B)
        assert np.all(eps >= 0)
        assert eps.min() < 1e-12  # doubly degenerate ordered ground state

    def test_classical_ground_state_has_zero_residual(self):
        modes = ground_state(*bdg_matrices(ChainSpec(size=6), s=1.0))
        assert residual_energy(correlations(modes)) == pytest.approx(0.0,
                                                                     abs=1e-8)

    def test_input_validation(self):
        rng = np.random.default_rng(0)
        M = rng.standard_normal((4, 4))
        with pytest.raises(ParameterError):
            ground_state(M, np.zeros((4, 4)))  # A not symmetric
        with pytest.raises(ParameterError):
            ground_state(np.eye(4), M)  # B not antisymmetric


class TestEvolution:
    def test_energy_conserved_under_frozen_hamiltonian(self):
        L = 8
        chain = ChainSpec(size=L, bond_coupling=lambda s: 0.3,
                          base_field=lambda s: 0.6)
        A, B = bdg_matrices(chain, 0.0)
        offset = field_offset(chain, 0.0)
        modes = ground_state(*bdg_matrices(ChainSpec(size=L), 0.4))
        e0 = energy_expectation(correlations(modes), A, B, offset)
        final = evolve(modes, chain, T=100.0, rtol=1e-10, atol=1e-12)
        e1 = energy_expectation(correlations(final), A, B, offset)
        assert abs(e1 - e0) < 1e-8 * L

    def test_noiseless_evolution_matches_ed(self):
        chain = ChainSpec(size=8)
        modes = ground_state(*bdg_matrices(chain, 0.0))
        final = evolve(modes, chain, T=10.0)
        de = residual_energy(correlations(final))
        de_ed = ed.residual_energy_exact(ed.anneal_exact(chain, T=10.0))
        assert abs(de - de_ed) < 1e-6

    def test_noisy_evolution_matches_ed_with_shared_signals(self):
        chain = noisy_chain(8, seed=1234, n_modes=200)
        modes = ground_state(*bdg_matrices(chain, 0.0, 0.0))
        final = evolve(modes, chain, T=10.0)
        de = residual_energy(correlations(final))
        de_ed = ed.residual_energy_exact(ed.anneal_exact(chain, T=10.0))
        assert abs(de - de_ed) < 1e-5

    def test_nambu_preserved_on_long_run(self):
        chain = ChainSpec(size=32)
        modes = ground_state(*bdg_matrices(chain, 0.0))
        times = np.linspace(100.0, 1000.0, 10)
        for _, m in evolve_checkpointed(modes, chain, T=1000.0, times=times):
            assert m.orthonormality_defect() < 1e-6
            assert m.pairing_defect() < 1e-6

    def test_adiabatic_improvement_across_decades(self):
        chain = ChainSpec(size=32)
        modes = ground_state(*bdg_matrices(chain, 0.0))
        de = {T: residual_energy(correlations(evolve(modes, chain, T=T)))
              for T in (1.0, 100.0, 10_000.0)}
        assert de[10_000.0] < de[100.0] < de[1.0]

    def test_checkpoint_times_must_be_sorted(self):
        chain = ChainSpec(size=4)
        modes = ground_state(*bdg_matrices(chain, 0.0))
        with pytest.raises(ParameterError):
            evolve_checkpointed(modes, chain, T=1.0, times=[0.8, 0.2])


class TestObservables:
    def test_vacuum_residual_energy_is_bond_count(self):
        L = 9
        corr = correlations(BdgModes(U=np.eye(L, dtype=complex),
                                     V=np.zeros((L, L), dtype=complex)))
        assert residual_energy(corr) == pytest.approx(L - 1, abs=1e-12)

    def test_occupation_bounds(self):
        corr = correlations(random_modes(6, seed=9))
        occ = np.trace(corr.G).real
        assert -1e-10 <= occ <= 6 + 1e-10
        eig = np.linalg.eigvalsh(corr.G)
        assert eig.min() > -1e-8 and eig.max() < 1 + 1e-8
        assert np.abs(corr.G - corr.G.conj().T).max() < 1e-10
        assert np.abs(corr.F + corr.F.T).max() < 1e-10

    def test_correlators_match_ed_operators(self):
        L = 6
        chain = ChainSpec(size=L)
        modes = ground_state(*bdg_matrices(chain, 0.0))
        final = evolve(modes, chain, T=3.0, rtol=1e-10, atol=1e-12)
        corr = correlations(final)
        psi = ed.anneal_exact(chain, T=3.0).amplitudes
        cs = [annihilator(i, L) for i in range(L)]
        for i in range(L):
            for j in range(L):
                g = psi.conj() @ (cs[i].conj().T @ cs[j] @ psi)
                f = psi.conj() @ (cs[i] @ cs[j] @ psi)
                assert abs(g - corr.G[i, j]) < 1e-8
                assert abs(f - corr.F[i, j]) < 1e-8

    def test_residual_clamps_tiny_negative(self):
        L = 4
        corr = correlations(ground_state(*bdg_matrices(ChainSpec(size=L), 1.0)))
        # exact classical ground state: the bond sum may dip below 0 by eps
        assert residual_energy(corr) >= 0.0


class TestScalingBehavior:
    def test_kzm_slope_small_size_sanity(self):
        # bulk slope approaches 1/2; loose window at modest size
        chain = ChainSpec(size=64)
        modes = ground_state(*bdg_matrices(chain, 0.0))
        vs = np.array([0.01, 0.03, 0.1])
        des = [residual_energy(correlations(evolve(modes, chain, T=1.0 / v)))
               for v in vs]
        slope = np.polyfit(np.log(vs), np.log(des), 1)[0]
        assert slope == pytest.approx(0.5, abs=0.1)

    def test_extensivity_at_fixed_velocity(self):
        v = 0.03
        des = {}
        for L in (64, 128):
            chain = ChainSpec(size=L)
            modes = ground_state(*bdg_matrices(chain, 0.0))
            des[L] = residual_energy(correlations(evolve(modes, chain,
                                                         T=1.0 / v)))
        assert des[128] / 128 == pytest.approx(des[64] / 64, rel=0.05)
