import numpy as np
import pytest

from hermvp import FluxConfig, HermiteParams, HermiteState, Mesh1D, assemble, solve
from hermvp.poisson import compute_rho0
from hermvp.stepper import StepContext


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_state(params: HermiteParams, mesh: Mesh1D, rng, amp: float = 0.1) -> HermiteState:
    """Random state with a positive mean density, any mode content."""
    coeffs = amp * rng.standard_normal(
        (params.n_modes, mesh.n_cells, mesh.degree + 1)
    )
    coeffs[0, :, 0] += np.sqrt(mesh.widths)  # cell-average 1 in mode 0
    return HermiteState(coeffs, params, mesh)


def make_context(state: HermiteState, beta: float = 1.0):
    """Poisson operator, flux and background matched to a state."""
    rho_0 = compute_rho0(state.mode(0), state.params)
    op = assemble(state.mesh, beta)
    ctx = StepContext(op, FluxConfig.from_params(state.params), rho_0)
    fields = solve(op, state.mode(0), rho_0, state.params)
    return ctx, fields
