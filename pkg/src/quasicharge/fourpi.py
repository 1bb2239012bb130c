"""Half-period (4*pi-periodic) shunt: doubled-zone solver and oracle.

With the shunt term -E_4pi cos(phi/2) the potential period doubles, so
states are labelled by a folded quasicharge kt in (-1/4, 1/4] and live
on the doubled phase cell pt in (-2*pi, 2*pi].  Expanding the periodic
part in half-integer plane waves e^{i m pt / 2} gives

    diagonal        E_C (m/2 + kt)^2
    |dm| = 2        -E_J / 2
    |dm| = 1        -E_4pi / 2

An independent route solves the same spectrum as two coupled blocks on
the single cell (-pi, pi], one periodic and one antiperiodic, coupled
by -E_4pi cos(phi/2) and discretized by finite differences; agreement
between the two is the module's cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .bands import DEFAULT_CUTOFF, BlochWavefunction, bloch_wavefunction
from .evolution import EvolutionResult, _dominant_pair, _wrap_angle
from .params import CircuitParams

__all__ = [
    "FourPiModeSet",
    "CoupledBlockResult",
    "fourpi_hamiltonian",
    "solve_fourpi",
    "embed_transmon_state",
    "evolve_fourpi",
    "coupled_block_oracle",
    "doubled_phase_values",
    "DEFAULT_FOURPI_CUTOFF",
]

DEFAULT_FOURPI_CUTOFF = 80
_MIN_CUTOFF = 20
DEFAULT_DOUBLED_SAMPLES = 514


def doubled_phase_values(n: int = DEFAULT_DOUBLED_SAMPLES) -> np.ndarray:
    """Uniform samples of the doubled cell (-2*pi, 2*pi], open at the bottom."""
    step = 4.0 * np.pi / n
    return -2.0 * np.pi + step * np.arange(1, n + 1)


@dataclass(frozen=True, eq=False)
class FourPiModeSet:
    """Eigenpairs of the doubled-zone problem at one folded quasicharge.

    ``wavefunctions[b]`` samples F_b on ``phi_values`` with unit norm;
    ``coefficients[b]`` keeps the half-integer plane-wave vector so the
    seam values F(-2*pi) = e^{4 i pi kt} F(2*pi) can be probed exactly.
    """

    kappa_tilde: float
    energies: np.ndarray
    phi_values: np.ndarray
    wavefunctions: np.ndarray  # (n_bands, n_phi)
    coefficients: np.ndarray  # (n_bands, 2*cutoff + 1)
    params: CircuitParams

    def sample(self, band: int, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        m = np.arange(
            -(self.coefficients.shape[1] // 2), self.coefficients.shape[1] // 2 + 1
        )
        series = np.exp(-0.5j * np.multiply.outer(phi, m)) @ self.coefficients[band]
        return np.exp(-1j * self.kappa_tilde * phi) * series


def fourpi_hamiltonian(
    params: CircuitParams, kappa_tilde: float, cutoff: int = DEFAULT_FOURPI_CUTOFF
) -> np.ndarray:
    """Dense half-integer plane-wave Hamiltonian at fixed folded quasicharge."""
    if cutoff < _MIN_CUTOFF:
        raise ValueError(f"cutoff must be at least {_MIN_CUTOFF}, got {cutoff}")
    m = np.arange(-cutoff, cutoff + 1)
    h = np.diag(params.e_c * (0.5 * m + kappa_tilde) ** 2)
    h += np.diag(np.full(2 * cutoff - 1, -0.5 * params.e_j), 2)
    h += np.diag(np.full(2 * cutoff - 1, -0.5 * params.e_j), -2)
    h += np.diag(np.full(2 * cutoff, -0.5 * params.e_4pi), 1)
    h += np.diag(np.full(2 * cutoff, -0.5 * params.e_4pi), -1)
    return h


def solve_fourpi(
    params: CircuitParams,
    kappa_tilde: float = 0.0,
    n_bands: int = 12,
    cutoff: int = DEFAULT_FOURPI_CUTOFF,
    n_phi: int = DEFAULT_DOUBLED_SAMPLES,
) -> FourPiModeSet:
    """Lowest bands of the shunted doubled-zone problem.

    Wavefunctions are reconstructed as
    F_b(pt) = e^{-i kt pt} sum_m c_m e^{-i m pt / 2}, the sign convention
    under which the doubled-cell seam condition holds for the matrix
    above; energies are unaffected by the choice.
    """
    if n_bands > 2 * cutoff + 1:
        raise ValueError("n_bands exceeds the plane-wave basis size")
    try:
        w, v = eigh(fourpi_hamiltonian(params, kappa_tilde, cutoff))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ArithmeticError(
            f"doubled-zone eigensolver failed at kt={kappa_tilde}"
        ) from exc
    phi = doubled_phase_values(n_phi)
    step = phi[1] - phi[0]
    m = np.arange(-cutoff, cutoff + 1)
    basis = np.exp(-0.5j * np.outer(phi, m))
    funcs = np.empty((n_bands, n_phi), dtype=complex)
    coeffs = np.empty((n_bands, 2 * cutoff + 1), dtype=complex)
    prefactor = np.exp(-1j * kappa_tilde * phi)
    for b in range(n_bands):
        c = v[:, b].astype(complex)
        f = prefactor * (basis @ c)
        scale = 1.0 / np.sqrt(step * np.sum(np.abs(f) ** 2))
        f *= scale
        c *= scale
        peak = np.argmax(np.abs(f))
        phase = f[peak] / abs(f[peak])
        funcs[b] = f * np.conj(phase)
        coeffs[b] = c * np.conj(phase)
    return FourPiModeSet(
        kappa_tilde=float(kappa_tilde),
        energies=w[:n_bands],
        phi_values=phi,
        wavefunctions=funcs,
        coefficients=coeffs,
        params=params,
    )


def embed_transmon_state(bloch: BlochWavefunction, phi_values) -> np.ndarray:
    """Extend a zone-centre or zone-edge band state over the doubled cell.

    The quasi-periodic continuation supplies the second cell: a periodic
    copy for kappa = 0 and a sign-flipped copy for kappa = 1/2.  The
    result is renormalized to unit norm on the doubled cell.
    """
    if bloch.kappa not in (0.0, 0.5):
        raise ValueError("embedding is defined for kappa in {0, 1/2} only")
    phi_values = np.asarray(phi_values, dtype=float)
    values = bloch.sample(phi_values)
    step = phi_values[1] - phi_values[0]
    return values / np.sqrt(step * np.sum(np.abs(values) ** 2))


def evolve_fourpi(
    params: CircuitParams,
    times: np.ndarray | None = None,
    n_bands: int = 12,
    cutoff: int = DEFAULT_FOURPI_CUTOFF,
    cutoff_2pi: int = DEFAULT_CUTOFF,
    n_phi: int = DEFAULT_DOUBLED_SAMPLES,
    snapshot_times: tuple[float, ...] = (),
) -> EvolutionResult:
    """Transient half-period shunt starting from the bare ground state.

    The shunt term is bounded, so no broadening is needed: the initial
    state is the unbroadened zone-centre ground state embedded in the
    doubled cell, which only overlaps folded-quasicharge-zero modes.
    Snapshots are (time, values-on-the-doubled-cell) pairs.
    """
    if params.e_4pi <= 0:
        raise ValueError("half-period evolution requires e_4pi > 0")
    modes = solve_fourpi(params, 0.0, n_bands, cutoff, n_phi)
    phi = modes.phi_values
    step = phi[1] - phi[0]

    target_center = embed_transmon_state(
        bloch_wavefunction(params, 0.0, 0, phi[: n_phi // 2], cutoff_2pi), phi
    )
    target_edge = embed_transmon_state(
        bloch_wavefunction(params, 0.5, 0, phi[: n_phi // 2], cutoff_2pi), phi
    )

    amplitudes = step * (modes.wavefunctions.conj() @ target_center)
    overlap_center = np.conj(step * (modes.wavefunctions.conj() @ target_center))
    overlap_edge = np.conj(step * (modes.wavefunctions.conj() @ target_edge))
    # the embedded targets live in different folding sectors: orthogonal
    target_overlap = complex(step * np.sum(np.conj(target_center) * target_edge))

    energies = modes.energies
    t_low = 2.0 * np.pi / (energies[1] - energies[0])
    j1, j2 = _dominant_pair(amplitudes)
    t_2pi = 2.0 * np.pi / abs(energies[j2] - energies[j1])
    if times is None:
        times = np.linspace(0.0, 1.1 * t_2pi, 512)
    times = np.asarray(times, dtype=float)

    phases = np.exp(-1j * np.outer(times, energies))
    amp_center = phases @ (amplitudes * overlap_center)
    amp_edge = phases @ (amplitudes * overlap_edge)
    p_center = np.abs(amp_center) ** 2
    p_edge = np.abs(amp_edge) ** 2
    theta = _wrap_angle(np.angle(amp_edge) - np.angle(amp_center))

    gram = step * (modes.wavefunctions.conj() @ modes.wavefunctions.T)
    v = phases * amplitudes[None, :]
    norms = np.sqrt(np.real(np.einsum("tj,jl,tl->t", v.conj(), gram, v)))

    snapshots = tuple(
        (float(t), np.tensordot(amplitudes * np.exp(-1j * energies * t),
                                modes.wavefunctions, 1))
        for t in snapshot_times
    )
    return EvolutionResult(
        times=times,
        amplitudes=amplitudes,
        energies=energies,
        p_center=p_center,
        p_edge=p_edge,
        residual=1.0 - p_center - p_edge,
        relative_phase=theta,
        norms=norms,
        capture=float(np.sum(np.abs(amplitudes) ** 2)),
        t_2pi=float(t_2pi),
        t_2pi_low_pair=float(t_low),
        dominant=(j1, j2),
        target_overlap=target_overlap,
        snapshots=snapshots,
    )


@dataclass(frozen=True, eq=False)
class CoupledBlockResult:
    """Spectrum of the two-block single-cell formulation.

    ``f_center[:, j]`` and ``f_edge[:, j]`` are the periodic and
    antiperiodic components of eigenvector j on ``phi_values``; their
    squared norms sum to one.
    """

    energies: np.ndarray
    f_center: np.ndarray
    f_edge: np.ndarray
    phi_values: np.ndarray


def _wrapped_laplacian(n: int, step: float, seam_sign: float, order: int) -> np.ndarray:
    """Central-difference d^2/dphi^2 on a ring, with a sign on seam wraps."""
    if order == 2:
        coeffs = {-1: 1.0, 0: -2.0, 1: 1.0}
    elif order == 4:
        coeffs = {-2: -1.0 / 12, -1: 4.0 / 3, 0: -5.0 / 2, 1: 4.0 / 3, 2: -1.0 / 12}
    else:
        raise ValueError("stencil order must be 2 or 4")
    lap = np.zeros((n, n))
    for offset, c in coeffs.items():
        for i in range(n):
            j = i + offset
            sign = 1.0
            while j < 0:
                j += n
                sign *= seam_sign
            while j >= n:
                j -= n
                sign *= seam_sign
            lap[i, j] += c * sign
    return lap / step**2


def coupled_block_oracle(
    params: CircuitParams, n: int = 512, order: int = 4
) -> CoupledBlockResult:
    """Independent spectrum via the coupled periodic/antiperiodic blocks.

    Deliberately uses a different discretization (finite differences on
    the single cell) from the plane-wave solver, so agreement between
    the two is evidence rather than tautology.
    """
    step = 2.0 * np.pi / n
    phi = -np.pi + step * np.arange(1, n + 1)
    potential = np.diag(-params.e_j * np.cos(phi))
    block_center = (
        -params.e_c * _wrapped_laplacian(n, step, 1.0, order) + potential
    )
    block_edge = (
        -params.e_c * _wrapped_laplacian(n, step, -1.0, order) + potential
    )
    coupling = np.diag(-params.e_4pi * np.cos(phi / 2.0))
    h = np.block([[block_center, coupling], [coupling, block_edge]])
    w, v = eigh(h)
    v = v / np.sqrt(step)
    return CoupledBlockResult(
        energies=w, f_center=v[:n], f_edge=v[n:], phi_values=phi
    )
