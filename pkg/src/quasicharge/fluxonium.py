"""Discrete eigenmodes of the inductively shunted circuit.

The shunt adds E_L phi^2, breaking the 2*pi phase periodicity, so the
problem is solved on a non-compact window with hard walls:

    H = -E_C d^2/dphi^2 + E_L phi^2 - E_J cos(phi)

by second-order central differences.  However small E_L is, the
spectrum is discrete; modes are folded onto the torus on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.sparse import diags

from .params import CircuitParams
from .zak import PhaseField, ZakField, ZakGrid, zak_from_phase

__all__ = [
    "ModeSet",
    "WindowTooSmallError",
    "phase_grid_hamiltonian",
    "solve_modes",
    "harmonic_spacing_profile",
    "auto_window",
    "DEFAULT_WINDOW",
    "DEFAULT_GRID_SIZE",
]

DEFAULT_WINDOW = 8 * np.pi
DEFAULT_GRID_SIZE = 2048
#: interior samples per 2*pi period used when choosing a grid automatically
SAMPLES_PER_PERIOD = 257
_EDGE_THRESHOLD = 1e-6


class WindowTooSmallError(RuntimeError):
    """Raised post-solve when a retained mode leaks to the window edge."""


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Ascending eigenpairs of the shunted circuit.

    ``modes_phase`` holds the unit-norm real eigenfunctions on the
    non-compact window; ``modes_zak`` is filled by ``with_zak``.
    ``edge_ratios`` records the relative wall amplitude of every mode,
    the post-solve confinement diagnostic.
    """

    energies: np.ndarray
    modes_phase: tuple[PhaseField, ...]
    params: CircuitParams
    phi_max: float
    n: int
    edge_ratios: np.ndarray
    modes_zak: tuple[ZakField, ...] | None = None

    def __len__(self) -> int:
        return self.energies.size

    def with_zak(self, grid: ZakGrid) -> "ModeSet":
        zak = tuple(zak_from_phase(m, grid) for m in self.modes_phase)
        return replace(self, modes_zak=zak)


def _fd_parts(params: CircuitParams, phi_max: float, n: int):
    """Interior grid and tridiagonal parts of the hard-wall operator."""
    if params.e_l <= 0:
        raise ValueError("inductive solve requires e_l > 0")
    ratio = phi_max / np.pi
    if abs(ratio - round(ratio)) > 1e-9:
        raise ValueError("phi_max must be an integer multiple of pi")
    if n < 512:
        raise ValueError(f"grid size must be at least 512, got {n}")
    phi = np.linspace(-phi_max, phi_max, n)
    inner = phi[1:-1]
    h = phi[1] - phi[0]
    kin = params.e_c / h**2
    diag = 2.0 * kin + params.e_l * inner**2 - params.e_j * np.cos(inner)
    off = -kin * np.ones(inner.size - 1)
    return phi, inner, diag, off


def phase_grid_hamiltonian(
    params: CircuitParams, phi_max: float = DEFAULT_WINDOW, n: int = DEFAULT_GRID_SIZE
):
    """Sparse finite-difference Hamiltonian on the hard-wall window."""
    _, _, diag, off = _fd_parts(params, phi_max, n)
    return diags([off, diag, off], [-1, 0, 1], format="csr")


def auto_window(params: CircuitParams, n_modes: int) -> float:
    """Window half-width (odd multiple of pi) confining ``n_modes`` modes.

    Estimates the top retained energy from the harmonic ladder, places
    the wall beyond the classical turning point plus a tunnelling
    margin, and never returns less than 9*pi.
    """
    omega = 2.0 * math.sqrt(params.e_c * params.e_l)
    e_top = omega * (n_modes + 8) + params.e_j
    phi_turn = math.sqrt(e_top / params.e_l)
    slope = 2.0 * params.e_l * phi_turn / params.e_c
    margin = max(4.0, (30.0 / math.sqrt(slope)) ** (2.0 / 3.0))
    half_periods = math.ceil((phi_turn + margin) / np.pi)
    if half_periods % 2 == 0:
        half_periods += 1
    return max(half_periods, 9) * np.pi


def solve_modes(
    params: CircuitParams,
    n_modes: int = 100,
    phi_max: float | None = None,
    n: int | None = None,
) -> ModeSet:
    """Lowest ``n_modes`` eigenpairs, unit norm and sign-fixed.

    When window or grid size are omitted they are chosen from the mode
    count: the window from ``auto_window`` (an odd multiple of pi, which
    keeps the samples commensurate with the default torus grid) and the
    grid at SAMPLES_PER_PERIOD interior points per 2*pi.
    """
    if phi_max is None:
        phi_max = auto_window(params, n_modes)
    if n is None:
        # one sample step per dphi = 2*pi / SAMPLES_PER_PERIOD across the window
        n = int(round(2 * phi_max / (2 * np.pi) * SAMPLES_PER_PERIOD)) + 1
    if n_modes > n // 4:
        raise ValueError("n_modes too large for the grid resolution")
    phi, inner, diag, off = _fd_parts(params, phi_max, n)
    try:
        w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_modes - 1))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ArithmeticError("inductive eigensolver failed") from exc
    h = phi[1] - phi[0]
    v = v / math.sqrt(h)

    peaks = np.abs(v).max(axis=0)
    signs = np.sign(v[np.abs(v).argmax(axis=0), np.arange(n_modes)])
    v = v * signs
    edge = np.maximum(np.abs(v[0]), np.abs(v[-1])) / peaks
    if edge[0] > _EDGE_THRESHOLD:
        raise WindowTooSmallError(
            f"ground mode edge amplitude {edge[0]:.2e} exceeds {_EDGE_THRESHOLD:.0e}; "
            f"enlarge phi_max (currently {phi_max / np.pi:.0f} pi)"
        )

    modes = []
    for j in range(n_modes):
        full = np.zeros(n)
        full[1:-1] = v[:, j]
        modes.append(PhaseField(-phi_max, phi_max, full))
    edge.flags.writeable = False
    w.flags.writeable = False
    return ModeSet(
        energies=w,
        modes_phase=tuple(modes),
        params=params,
        phi_max=float(phi_max),
        n=int(n),
        edge_ratios=edge,
    )


def harmonic_spacing_profile(modes: ModeSet) -> np.ndarray:
    """Successive level spacings E_{j+1} - E_j.

    In the harmonic-dominated limit the spacings approach
    2 sqrt(E_C E_L); a slowly decaying semiclassical oscillation around
    that value survives to high level numbers.
    """
    if len(modes) < 40:
        raise ValueError("spacing profile needs at least 40 modes")
    return np.diff(modes.energies)
