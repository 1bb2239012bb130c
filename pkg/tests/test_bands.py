import numpy as np
import pytest

from quasicharge import (
    CircuitParams,
    ZakGrid,
    bloch_wavefunction,
    charge_basis_hamiltonian,
    solve_band_structure,
    z_splitting,
)
from quasicharge.bands import gauge_shifted
from quasicharge.zak import wrap_half

UNIT = CircuitParams()  # e_c = e_j = 1, n_x = 0

# lowest-band width at e_c = e_j = 1, frozen from a cutoff-60 solve
W0_REGRESSION = 3.082009595780e-02
# zone-centre transition over sqrt(2 e_c e_j), same solve
RATIO_REGRESSION = 0.916797457177


class TestHamiltonian:
    def test_small_matrix_layout(self):
        h = charge_basis_hamiltonian(UNIT, 0.0, 2)
        assert h.shape == (5, 5)
        assert np.allclose(np.diag(h), [4.0, 1.0, 0.0, 1.0, 4.0])
        assert np.allclose(np.diag(h, 1), -0.5)
        assert np.allclose(np.diag(h, -1), -0.5)
        assert np.count_nonzero(h - np.diag(np.diag(h)) - np.diag(np.diag(h, 1), 1)
                                - np.diag(np.diag(h, -1), -1)) == 0

    def test_real_symmetric(self):
        h = charge_basis_hamiltonian(CircuitParams(n_x=0.3), 0.17, 15)
        assert h.dtype == float
        assert np.array_equal(h, h.T)

    def test_free_rotor_diagonal(self):
        p = CircuitParams(e_c=1.3, e_j=0.0, n_x=0.2)
        h = charge_basis_hamiltonian(p, 0.1, 12)
        m = np.arange(-12, 13)
        assert np.allclose(h, np.diag(1.3 * (m - 0.2 - 0.1) ** 2))
        w = np.linalg.eigvalsh(h)
        assert np.allclose(np.sort(1.3 * (m - 0.3) ** 2), w)

    def test_cutoff_convergence(self):
        lo = solve_band_structure(UNIT, [0.0], 1, cutoff=20).energies[0, 0]
        hi = solve_band_structure(UNIT, [0.0], 1, cutoff=40).energies[0, 0]
        assert abs(lo - hi) < 1e-10

    @pytest.mark.parametrize("ec", [0.02, 1.0, 50.0])
    def test_cutoff_convergence_across_regimes(self, ec):
        p = CircuitParams(e_c=ec)
        lo = solve_band_structure(p, [0.0, 0.5], 4, cutoff=30).energies
        hi = solve_band_structure(p, [0.0, 0.5], 4, cutoff=60).energies
        assert np.abs(lo - hi).max() < 1e-10


class TestBandStructure:
    def test_transition_ratio(self):
        e = solve_band_structure(UNIT, [0.0], 2).energies[0]
        ratio = (e[1] - e[0]) / np.sqrt(2.0)
        assert ratio == pytest.approx(0.9, abs=0.02)
        assert ratio == pytest.approx(RATIO_REGRESSION, rel=1e-9)

    def test_free_rotor_lowest_band(self):
        p = CircuitParams(e_c=0.7, e_j=0.0)
        kappa = np.linspace(-0.5, 0.5, 101)[1:]
        bs = solve_band_structure(p, kappa, 1)
        assert np.abs(bs.band(0) - 0.7 * kappa**2).max() < 1e-12

    def test_bands_sorted_and_symmetric(self):
        kappa = ZakGrid(33, 16).k_values
        bs = solve_band_structure(UNIT, kappa, 5)
        assert np.all(np.diff(bs.energies, axis=1) >= 0)
        # time-reversal symmetry at zero offset charge
        for i, k in enumerate(kappa[:-1]):  # skip the unpaired k = 1/2
            j = np.argmin(np.abs(kappa + k))
            assert np.abs(bs.energies[i] - bs.energies[j]).max() < 1e-8

    def test_deterministic(self):
        kappa = [0.0, 0.2, 0.5]
        a = solve_band_structure(UNIT, kappa, 3).energies
        b = solve_band_structure(UNIT, kappa, 3).energies
        assert np.array_equal(a, b)

    def test_n_bands_capped_by_cutoff(self):
        with pytest.raises(ValueError):
            solve_band_structure(UNIT, [0.0], 30, cutoff=20)

    def test_gauge_shift_identity(self):
        # the offset charge only moves the band-structure origin
        kappa = np.array([-0.3, 0.0, 0.1, 0.45])
        for n_x in (0.3, 1.7, -0.6):
            p = CircuitParams(n_x=n_x)
            shifted = solve_band_structure(p, kappa, 3).energies
            ref = solve_band_structure(
                UNIT, [gauge_shifted(p, k) for k in kappa], 3
            ).energies
            assert np.abs(shifted - ref).max() < 1e-8


class TestBlochWavefunction:
    def test_seam_condition(self, grid):
        for kappa in (0.0, 0.25, 0.5):
            wf = bloch_wavefunction(UNIT, kappa, 0, grid.phi_values)
            left = wf.sample(-np.pi)
            right = wf.sample(np.pi)
            assert abs(left - np.exp(2j * np.pi * kappa) * right) < 1e-10

    def test_unit_norm_and_phase_fix(self, grid):
        wf = bloch_wavefunction(UNIT, 0.5, 1, grid.phi_values)
        norm = grid.dphi * np.sum(np.abs(wf.values) ** 2)
        assert norm == pytest.approx(1.0, abs=1e-10)
        peak = wf.values[np.argmax(np.abs(wf.values))]
        assert peak.imag == pytest.approx(0.0, abs=1e-12)
        assert peak.real > 0

    def test_orthogonality_within_kappa(self, grid):
        a = bloch_wavefunction(UNIT, 0.0, 0, grid.phi_values)
        b = bloch_wavefunction(UNIT, 0.0, 1, grid.phi_values)
        overlap = grid.dphi * np.sum(np.conj(a.values) * b.values)
        assert abs(overlap) < 1e-8

    def test_deep_transmon_peak(self, grid):
        p = CircuitParams(e_c=0.02)  # e_j / e_c = 50
        wf = bloch_wavefunction(p, 0.0, 0, grid.phi_values)
        dens = np.abs(wf.values) ** 2
        # single dominant peak at phi = 0
        assert abs(grid.phi_values[np.argmax(dens)]) < 2 * grid.dphi
        # unimodal above threshold: rises to the peak, then falls
        idx = np.where(dens > 1e-3 * dens.max())[0]
        assert np.all(np.diff(idx) == 1)
        sub = dens[idx]
        top = np.argmax(sub)
        assert np.all(np.diff(sub[: top + 1]) >= 0)
        assert np.all(np.diff(sub[top:]) <= 0)
        # zero-point width of the linearized well
        var = grid.dphi * np.sum(grid.phi_values**2 * dens)
        assert var == pytest.approx(np.sqrt(p.e_c / (2 * p.e_j)), rel=0.1)

    def test_edge_state_doubled_period(self, grid):
        wf = bloch_wavefunction(UNIT, 0.5, 0, grid.phi_values)
        ext = wf.sample(grid.phi_values + 2 * np.pi)
        assert np.abs(ext + wf.values).max() < 1e-10


class TestZSplitting:
    def test_free_rotor_value(self):
        p = CircuitParams(e_c=0.8, e_j=0.0)
        assert z_splitting(p) == pytest.approx(0.8 / 4.0, rel=1e-12)

    def test_deep_transmon_flat_band(self):
        p = CircuitParams(e_c=0.02)
        assert abs(z_splitting(p)) < 1e-3 * p.e_c

    def test_matches_band_width_regression(self):
        assert z_splitting(UNIT) == pytest.approx(W0_REGRESSION, rel=1e-6)
        bs = solve_band_structure(UNIT, [0.0, 0.5], 1)
        width = bs.energies[1, 0] - bs.energies[0, 0]
        assert z_splitting(UNIT) == pytest.approx(width, rel=1e-12)


def test_wrap_half_matches_gauge_convention():
    assert wrap_half(0.5) == 0.5
    assert gauge_shifted(CircuitParams(n_x=1.0), 0.5) == 0.5


def test_zone_spectra_match_mathieu_characteristic_values():
    # independent special-function oracle: with phi = 2z the eigenproblem
    # becomes Mathieu's equation with q = 2 e_j / e_c, so zone-centre
    # states map to the pi-periodic characteristic values and zone-edge
    # states to the 2*pi-periodic ones (a/b swapped for odd orders since
    # the effective q carries a minus sign)
    from scipy.special import mathieu_a, mathieu_b

    q = 2.0 * UNIT.e_j / UNIT.e_c
    centre = sorted(
        [mathieu_a(0, q), mathieu_b(2, q), mathieu_a(2, q), mathieu_b(4, q),
         mathieu_a(4, q)]
    )
    edge = sorted(
        [mathieu_b(1, q), mathieu_a(1, q), mathieu_b(3, q), mathieu_a(3, q),
         mathieu_b(5, q)]
    )
    e0 = solve_band_structure(UNIT, [0.0], 5).energies[0]
    eh = solve_band_structure(UNIT, [0.5], 5).energies[0]
    assert np.abs(e0 - np.array(centre) * UNIT.e_c / 4.0).max() < 1e-10
    assert np.abs(eh - np.array(edge) * UNIT.e_c / 4.0).max() < 1e-10
