"""Dimensionless circuit parameters and SI conversion.

All energies are expressed in units of the Josephson energy E_J, with
hbar = 1, so times carry units of 1/E_J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.constants import e as ELEMENTARY_CHARGE, h as PLANCK

#: Magnetic flux quantum h/(2e), in Wb.
FLUX_QUANTUM = PLANCK / (2.0 * ELEMENTARY_CHARGE)


@dataclass(frozen=True)
class CircuitParams:
    """Dimensionless parameters of a junction + capacitor circuit node.

    e_c       charging energy (units of E_J), > 0
    e_j       junction energy; fixed to 1.0 as the unit, kept explicit so
              the free-rotor limit e_j = 0 stays expressible
    e_l       inductive-shunt energy coefficient of phi^2, >= 0
    e_4pi     half-period shunt energy coefficient of cos(phi/2), >= 0
    n_x       offset charge from a gate bias
    delta     quasicharge broadening of regularized wavepackets, in (0, 1/2)
    """

    e_c: float = 1.0
    e_j: float = 1.0
    e_l: float = 0.0
    e_4pi: float = 0.0
    n_x: float = 0.0
    delta: float = 0.2

    def __post_init__(self) -> None:
        if not self.e_c > 0:
            raise ValueError(f"e_c must be positive, got {self.e_c}")
        if self.e_j < 0:
            raise ValueError(f"e_j must be nonnegative, got {self.e_j}")
        if self.e_l < 0:
            raise ValueError(f"e_l must be nonnegative, got {self.e_l}")
        if self.e_4pi < 0:
            raise ValueError(f"e_4pi must be nonnegative, got {self.e_4pi}")
        if self.e_l > 0 and self.e_4pi > 0:
            raise ValueError("at most one of e_l, e_4pi may be nonzero")
        if not 0.0 < self.delta < 0.5:
            raise ValueError(f"delta must lie in (0, 0.5), got {self.delta}")

    def with_(self, **changes) -> "CircuitParams":
        return replace(self, **changes)


def params_from_si(
    capacitance_junction: float,
    capacitance_gate: float,
    inductance: float | None,
    gate_voltage: float,
    junction_energy: float,
    *,
    delta: float = 0.2,
) -> CircuitParams:
    """Build CircuitParams from SI circuit values.

    E_C = 2e^2/(C + C_x), E_L = Phi_0^2/(8 pi^2 L) and n_x = C_x V_x/(2e);
    the two energies are then divided by ``junction_energy`` (in joules) to
    nondimensionalize.  ``inductance`` may be None (or infinite) for an
    open inductive branch, giving e_l = 0.
    """
    if capacitance_junction <= 0:
        raise ValueError("junction capacitance must be positive")
    if capacitance_gate <= 0:
        raise ValueError("gate capacitance must be positive")
    if junction_energy <= 0:
        raise ValueError("junction energy must be positive")

    e_c_si = 2.0 * ELEMENTARY_CHARGE**2 / (capacitance_junction + capacitance_gate)
    if inductance is None or math.isinf(inductance):
        e_l_si = 0.0
    elif inductance <= 0:
        raise ValueError("inductance must be positive")
    else:
        e_l_si = FLUX_QUANTUM**2 / (8.0 * math.pi**2 * inductance)
    n_x = capacitance_gate * gate_voltage / (2.0 * ELEMENTARY_CHARGE)

    return CircuitParams(
        e_c=e_c_si / junction_energy,
        e_j=1.0,
        e_l=e_l_si / junction_energy,
        n_x=n_x,
        delta=delta,
    )
