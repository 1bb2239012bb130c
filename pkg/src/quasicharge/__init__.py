"""Spectral simulation of transmon/CPB circuits beyond the compact-phase picture.

The bare junction + capacitor circuit has a band spectrum labelled by a
conserved quasicharge.  Transiently shunting an element that breaks the
2*pi phase periodicity (a linear inductor, or a phenomenological
half-period junction) couples quasicharges and drives coherent
oscillations between the zone-centre and zone-edge states of the lowest
band; this package computes the spectra, the transient dynamics, and
the derived qubit-protocol quantities.
"""

import os as _os

# honored only if set before the numeric stack starts its thread pools,
# hence before any numpy import below
if _os.environ.get("QCS_THREADS"):
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        _os.environ.setdefault(_var, _os.environ["QCS_THREADS"])

from .params import CircuitParams, params_from_si
from .zak import (
    PhaseField,
    ZakField,
    ZakGrid,
    delta_broadened,
    inner_product,
    k_marginal,
    zak_from_phase,
)
from .bands import (
    BandStructure,
    BlochWavefunction,
    bloch_wavefunction,
    charge_basis_hamiltonian,
    solve_band_structure,
    z_splitting,
)
from .fluxonium import (
    ModeSet,
    WindowTooSmallError,
    harmonic_spacing_profile,
    phase_grid_hamiltonian,
    solve_modes,
)
from .evolution import (
    EvolutionResult,
    HoldSample,
    evolve,
    hold_time_scan,
    initial_state,
    project,
    run_inductive,
    unshunted_snapshots,
)
from .fourpi import (
    CoupledBlockResult,
    FourPiModeSet,
    coupled_block_oracle,
    embed_transmon_state,
    evolve_fourpi,
    fourpi_hamiltonian,
    solve_fourpi,
)

__version__ = "0.1.0"

__all__ = [
    "CircuitParams",
    "params_from_si",
    "ZakGrid",
    "ZakField",
    "PhaseField",
    "delta_broadened",
    "zak_from_phase",
    "inner_product",
    "k_marginal",
    "BandStructure",
    "BlochWavefunction",
    "charge_basis_hamiltonian",
    "solve_band_structure",
    "bloch_wavefunction",
    "z_splitting",
    "ModeSet",
    "WindowTooSmallError",
    "phase_grid_hamiltonian",
    "solve_modes",
    "harmonic_spacing_profile",
    "EvolutionResult",
    "HoldSample",
    "initial_state",
    "project",
    "evolve",
    "run_inductive",
    "hold_time_scan",
    "unshunted_snapshots",
    "FourPiModeSet",
    "CoupledBlockResult",
    "fourpi_hamiltonian",
    "solve_fourpi",
    "embed_transmon_state",
    "evolve_fourpi",
    "coupled_block_oracle",
    "__version__",
]
