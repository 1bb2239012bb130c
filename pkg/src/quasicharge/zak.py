"""Compact two-coordinate (modular charge, modular phase) representation.

A state of the non-compact node is sampled as psi(k, phi) on the torus
k in (-1/2, 1/2], phi in (-pi, pi].  Grids exclude the open lower
endpoints and include the closed upper ones; the values at the excluded
endpoints follow from the seam identities

    psi(-1/2, phi) = psi(1/2, phi)
    psi(k, -pi)    = exp(2i pi (k + twist)) psi(k, pi)

so a plain Riemann sum over the samples equals the trapezoidal rule on
the closed torus.  ``twist`` is 0 for ordinary fields; a wavepacket
wrapped to the zone edge carries twist 1/2, and multiplying by a Bloch
function of quasicharge kappa adds kappa to the twist (mod 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "ZakGrid",
    "ZakField",
    "PhaseField",
    "broadened_profile",
    "delta_broadened",
    "zak_from_phase",
    "zak_sample",
    "inner_product",
    "k_marginal",
    "apply_charge_operator",
    "apply_cos_phase",
    "apply_half_period_cos",
]

_MIN_SAMPLES = 16


def wrap_half(x):
    """Wrap values into the quasicharge zone (-1/2, 1/2]."""
    y = np.asarray(x, dtype=float)
    out = y - np.floor(y + 0.5)
    out = np.where(out <= -0.5, out + 1.0, out)
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class ZakGrid:
    """Uniform sampling of the (k, phi) torus."""

    n_k: int = 201
    n_phi: int = 257

    def __post_init__(self) -> None:
        if self.n_k < _MIN_SAMPLES or self.n_phi < _MIN_SAMPLES:
            raise ValueError(f"grid needs at least {_MIN_SAMPLES} samples per axis")

    @cached_property
    def k_values(self) -> np.ndarray:
        k = -0.5 + self.dk * np.arange(1, self.n_k + 1)
        k.flags.writeable = False
        return k

    @cached_property
    def phi_values(self) -> np.ndarray:
        phi = -np.pi + self.dphi * np.arange(1, self.n_phi + 1)
        phi.flags.writeable = False
        return phi

    @property
    def dk(self) -> float:
        return 1.0 / self.n_k

    @property
    def dphi(self) -> float:
        return 2.0 * np.pi / self.n_phi

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ZakGrid)
            and self.n_k == other.n_k
            and self.n_phi == other.n_phi
        )

    def __hash__(self) -> int:
        return hash((self.n_k, self.n_phi))


@dataclass(frozen=True, eq=False)
class ZakField:
    """Complex samples psi(k, phi) with the seam twist they satisfy."""

    grid: ZakGrid
    values: np.ndarray  # shape (n_k, n_phi)
    twist: float = 0.0

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n_k, self.grid.n_phi):
            raise ValueError(
                f"values shape {vals.shape} does not match grid "
                f"({self.grid.n_k}, {self.grid.n_phi})"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "twist", float(self.twist) % 1.0)

    def norm(self) -> float:
        return float(
            np.sqrt(self.grid.dk * self.grid.dphi * np.sum(np.abs(self.values) ** 2))
        )

    def normalized(self) -> "ZakField":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero field")
        return ZakField(self.grid, self.values / n, self.twist)


@dataclass(frozen=True, eq=False)
class PhaseField:
    """Complex samples over a finite non-compact phase window.

    The window [phi_min, phi_max] is sampled inclusively and uniformly.
    It must be symmetric about zero and span a whole number of 2*pi
    periods; confined solver output keeps the wall samples at zero.
    """

    phi_min: float
    phi_max: float
    values: np.ndarray
    n: int = field(init=False)

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(self.values)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("values must be a 1-D array with at least two samples")
        if abs(self.phi_min + self.phi_max) > 1e-12 * max(1.0, abs(self.phi_max)):
            raise ValueError("phase window must be symmetric about zero")
        periods = (self.phi_max - self.phi_min) / (2.0 * np.pi)
        if abs(periods - round(periods)) > 1e-9:
            raise ValueError("phase window must span an integer number of 2*pi periods")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "n", int(vals.size))

    @cached_property
    def phi_values(self) -> np.ndarray:
        phi = np.linspace(self.phi_min, self.phi_max, self.n)
        phi.flags.writeable = False
        return phi

    @property
    def dphi(self) -> float:
        return (self.phi_max - self.phi_min) / (self.n - 1)

    def norm(self) -> float:
        w = np.ones(self.n)
        w[0] = w[-1] = 0.5
        return float(np.sqrt(self.dphi * np.sum(w * np.abs(self.values) ** 2)))


def broadened_profile(delta: float, k) -> np.ndarray:
    """Offset Gaussian exp(-(k/Delta)^2) - exp(-(1/(2 Delta))^2), unnormalized.

    The constant offset makes the profile vanish at the zone edge
    k = +-1/2, which the seam boundary conditions require.
    """
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 0.5), got {delta}")
    k = np.asarray(k, dtype=float)
    return np.exp(-((k / delta) ** 2)) - np.exp(-((0.5 / delta) ** 2))


def delta_broadened(grid: ZakGrid, delta: float, center: float = 0.0) -> ZakField:
    """Broadened quasicharge wavepacket centered at kappa_0 in {0, 1/2}.

    Returns N * exp(-i k' phi) * (exp(-(k'/Delta)^2) - exp(-(1/(2 Delta))^2))
    in the wrapped coordinate k' = wrap(k - kappa_0), with N fixed so the
    k-quadrature of |psi|^2 is exactly 1 on every phi column.  The
    edge-centered packet carries seam twist 1/2.
    """
    if center not in (0.0, 0.5):
        raise ValueError(f"packet center must be 0 or 0.5, got {center}")
    kp = wrap_half(grid.k_values - center)
    g = broadened_profile(delta, kp)
    g = g / np.sqrt(grid.dk * np.sum(g**2))
    values = np.exp(-1j * np.outer(kp, grid.phi_values)) * g[:, None]
    return ZakField(grid, values, twist=center)


def _shift_indices(phase: PhaseField, grid: ZakGrid):
    """Map each (shift s, column q) to the sample index of phi_q + 2*pi*s.

    Returns (shifts, index array, validity mask).  Raises if the window
    sampling is not commensurate with the torus grid.
    """
    dphi = grid.dphi
    if abs(phase.dphi - dphi) > 1e-9 * dphi:
        raise ValueError(
            "phase window sampling must match the torus grid spacing "
            f"({phase.dphi} vs {dphi})"
        )
    base = (grid.phi_values[0] - phase.phi_min) / dphi
    if abs(base - round(base)) > 1e-6:
        raise ValueError("phase window samples are not aligned with the torus grid")
    per_period = round(2.0 * np.pi / dphi)
    s_max = int(np.ceil((phase.phi_max + np.pi) / (2.0 * np.pi)))
    shifts = np.arange(-s_max, s_max + 1)
    idx = (
        int(round(base))
        + shifts[:, None] * per_period
        + np.arange(grid.n_phi)[None, :]
    )
    ok = (idx >= 0) & (idx < phase.n)
    return shifts, np.where(ok, idx, 0), ok


def _check_window(phase: PhaseField) -> None:
    # Edge-amplitude estimate of the norm truncated by the finite window.
    dens = np.abs(phase.values) ** 2
    total = float(np.sum(dens) * phase.dphi)
    if total == 0.0:
        raise ValueError("cannot transform a zero field")
    lost = float(max(dens[0], dens[-1])) * (phase.phi_max - phase.phi_min)
    if lost > 1e-8 * total:
        raise ValueError(
            f"phase window too small: estimated truncated norm fraction "
            f"{lost / total:.3e} exceeds 1e-8"
        )


def zak_from_phase(phase: PhaseField, grid: ZakGrid) -> ZakField:
    """Fold a confined non-compact field onto the (k, phi) torus.

    psi(k, phi) = sum_j exp(-2i pi j k) psi_nc(phi - 2 pi j), summed over
    every shift that stays inside the window.  The folding is unitary
    (it preserves the norm) when the window holds the whole field.
    """
    _check_window(phase)
    shifts, idx, ok = _shift_indices(phase, grid)
    comb = np.where(ok, np.asarray(phase.values)[idx], 0.0)  # (n_s, n_phi)
    harmonics = np.exp(2j * np.pi * np.outer(grid.k_values, shifts))
    return ZakField(grid, harmonics @ comb, twist=0.0)


def zak_sample(phase: PhaseField, k, phi) -> np.ndarray:
    """Evaluate the torus fold of ``phase`` at arbitrary (k, phi) points.

    Every phi + 2*pi*s that falls inside the window must land on a
    window sample; phi itself need not be a torus grid point.  Used to
    probe seam values that the torus grid leaves implicit.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if k.shape != phi.shape:
        raise ValueError("k and phi must have matching shapes")
    dphi = phase.dphi
    out = np.zeros(k.shape, dtype=complex)
    s_max = int(np.ceil((phase.phi_max + np.pi) / (2.0 * np.pi)))
    for s in range(-s_max, s_max + 1):
        pos = (phi + 2.0 * np.pi * s - phase.phi_min) / dphi
        idx = np.round(pos).astype(int)
        inside = (idx >= 0) & (idx < phase.n)
        misaligned = inside & (np.abs(pos - idx) > 1e-6)
        if np.any(misaligned):
            raise ValueError("requested phi values do not align with window samples")
        vals = np.where(inside, np.asarray(phase.values)[np.where(inside, idx, 0)], 0.0)
        out += np.exp(2j * np.pi * s * k) * vals
    return out


def inner_product(a: ZakField, b: ZakField) -> complex:
    """<a|b> by trapezoidal quadrature over the torus."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    if abs((a.twist - b.twist) % 1.0) > 1e-12:
        raise ValueError(
            f"fields carry different seam twists ({a.twist} vs {b.twist})"
        )
    return complex(a.grid.dk * a.grid.dphi * np.sum(np.conj(a.values) * b.values))


def k_marginal(field: ZakField) -> np.ndarray:
    """Probability density in k after integrating out phi."""
    return field.grid.dphi * np.sum(np.abs(field.values) ** 2, axis=1)


def apply_charge_operator(field: ZakField) -> ZakField:
    """Apply the charge operator -i d/dphi along each k row.

    The row at quasicharge k is e^{-i(k+twist)phi} times a 2*pi-periodic
    function, which is differentiated spectrally.
    """
    grid = field.grid
    phi = grid.phi_values
    kt = grid.k_values + field.twist
    w = field.values * np.exp(1j * np.outer(kt, phi))
    m = np.fft.fftfreq(grid.n_phi, d=1.0 / grid.n_phi)
    minus_i_dw = np.fft.ifft(m[None, :] * np.fft.fft(w, axis=1), axis=1)
    out = np.exp(-1j * np.outer(kt, phi)) * minus_i_dw - kt[:, None] * field.values
    return ZakField(grid, out, field.twist)


def apply_cos_phase(field: ZakField) -> ZakField:
    """Multiply by cos(phi); local in this representation."""
    return ZakField(
        field.grid, field.values * np.cos(field.grid.phi_values)[None, :], field.twist
    )


def apply_half_period_cos(field: ZakField) -> ZakField:
    """Apply the half-period coupling cos(phi/2).

    Shifts the quasicharge content by 1/2 (wrapped into the zone) and
    multiplies by cos(phi/2); the seam twist advances by 1/2.  Requires
    an even number of k samples so the half-shift lands on the grid.
    """
    grid = field.grid
    if grid.n_k % 2:
        raise ValueError("half-period coupling needs an even k-sample count")
    shifted = np.roll(field.values, grid.n_k // 2, axis=0)
    out = shifted * np.cos(grid.phi_values / 2.0)[None, :]
    return ZakField(grid, out, field.twist + 0.5)
