"""Shared fixtures: the reference parameter sets and solved pipelines.

The expensive solves (100 inductive modes folded onto the torus, the
doubled-zone shunt spectrum) are session-scoped so every module reuses
them.
"""

import numpy as np
import pytest

from quasicharge import (
    CircuitParams,
    ZakGrid,
    evolve,
    evolve_fourpi,
    initial_state,
    project,
    solve_fourpi,
    solve_modes,
)

EL_REFERENCE = 1.0 / (2.0 * np.pi) ** 2


@pytest.fixture(scope="session")
def grid():
    return ZakGrid()


@pytest.fixture(scope="session")
def ind_params():
    return CircuitParams(e_l=EL_REFERENCE)


@pytest.fixture(scope="session")
def ind_modes(ind_params, grid):
    return solve_modes(ind_params, 100).with_zak(grid)


@pytest.fixture(scope="session")
def ind_psi0(ind_params, grid):
    return initial_state(ind_params, grid, 0.0)


@pytest.fixture(scope="session")
def ind_projection(ind_psi0, ind_modes):
    return project(ind_psi0, ind_modes)


@pytest.fixture(scope="session")
def ind_result(ind_projection, ind_modes):
    probe = evolve(ind_projection.amplitudes, ind_modes, times=np.array([0.0]))
    t2 = probe.t_2pi
    return evolve(
        ind_projection.amplitudes,
        ind_modes,
        snapshot_times=(0.0, t2 / 4, t2 / 2, 3 * t2 / 4, t2),
    )


@pytest.fixture(scope="session")
def fourpi_params():
    return CircuitParams(e_4pi=0.5)


@pytest.fixture(scope="session")
def fourpi_modes(fourpi_params):
    return solve_fourpi(fourpi_params, 0.0, n_bands=12)


@pytest.fixture(scope="session")
def fourpi_result(fourpi_params):
    probe = evolve_fourpi(fourpi_params, times=np.array([0.0]))
    t2 = probe.t_2pi
    return evolve_fourpi(
        fourpi_params, snapshot_times=(0.0, t2 / 4, t2 / 2, 3 * t2 / 4, t2)
    )
