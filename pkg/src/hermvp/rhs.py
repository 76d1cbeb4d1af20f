"""Semi-discrete spatial operator for the Hermite-mode transport system.

Each mode obeys dC_n/dt = -(advection form) - (source form), with the flux
function g_n = v_th (sqrt(n+1) C_{n+1} + sqrt(n) C_{n-1}) closed by
C_{-1} = C_{N_H} = 0, a global Lax-Friedrichs interface flux with viscosity
alpha = v_th sqrt(N_H), and field sources sqrt(n)/v_th E C_{n-1}.  Interface
residuals feed the n=1 and n=2 equations so that total momentum and energy
are conserved exactly at the discrete level: r_1 ~ -[Phi][E] and
r_2 ~ ({C_1} - Chat_1)[Phi], where Chat_1 is the numerical flux of the C_0
equation divided by v_th.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermite import HermiteParams
from .mesh import DGField, Mesh1D
from .poisson import FieldPair, c0_checksum


@dataclass
class HermiteState:
    """All mode coefficient fields: coeffs[n] is the DG data of C_n."""

    coeffs: np.ndarray  # (n_modes, n_cells, degree+1)
    params: HermiteParams
    mesh: Mesh1D

    def __post_init__(self) -> None:
        expected = (self.params.n_modes, self.mesh.n_cells, self.mesh.degree + 1)
        if self.coeffs.shape != expected:
            raise ValueError(f"state shape {self.coeffs.shape} != {expected}")

    @classmethod
    def zero(cls, params: HermiteParams, mesh: Mesh1D) -> "HermiteState":
        shape = (params.n_modes, mesh.n_cells, mesh.degree + 1)
        return cls(np.zeros(shape), params, mesh)

    def mode(self, n: int) -> DGField:
        """View of mode n as a scalar field (shares memory)."""
        return DGField(self.mesh, self.coeffs[n])

    def copy(self) -> "HermiteState":
        return HermiteState(self.coeffs.copy(), self.params, self.mesh)


@dataclass(frozen=True)
class FluxConfig:
    """Numerical viscosity of the global Lax-Friedrichs flux."""

    alpha: float

    def __post_init__(self) -> None:
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @classmethod
    def from_params(cls, params: HermiteParams) -> "FluxConfig":
        return cls(alpha=params.v_scale * np.sqrt(params.n_modes))


def lf_flux(g_minus, g_plus, c_minus, c_plus, alpha: float):
    """Global Lax-Friedrichs flux; consistent for equal left/right states."""
    return 0.5 * (g_minus + g_plus - alpha * (c_plus - c_minus))


def flux_field(n: int, state: HermiteState) -> DGField:
    """Flux g_n with the truncation closure C_{-1} = C_{N_H} = 0."""
    if not 0 <= n < state.params.n_modes:
        raise ValueError(f"mode index {n} outside [0, {state.params.n_modes})")
    vth = state.params.v_scale
    g = np.zeros_like(state.coeffs[n])
    if n + 1 < state.params.n_modes:
        g += np.sqrt(n + 1.0) * state.coeffs[n + 1]
    if n >= 1:
        g += np.sqrt(float(n)) * state.coeffs[n - 1]
    return DGField(state.mesh, vth * g)


def _advection_deriv(gcoeffs: np.ndarray, ccoeffs: np.ndarray,
                     mesh: Mesh1D, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Advection contribution to dC/dt and the interface fluxes used.

    Leading batch axes broadcast, so one call handles all modes.
    """
    ghat = lf_flux(
        mesh.interface_minus(gcoeffs),
        mesh.interface_plus(gcoeffs),
        mesh.interface_minus(ccoeffs),
        mesh.interface_plus(ccoeffs),
        alpha,
    )
    deriv = mesh.weak_derivative(mesh.node_values(gcoeffs))
    deriv -= ghat[..., None] * mesh.trace_right
    deriv += np.roll(ghat, 1, axis=-1)[..., None] * mesh.trace_left
    return deriv, ghat


def advection_form(n: int, state: HermiteState, flux: FluxConfig) -> DGField:
    """Advection contribution to dC_n/dt (already sign-flipped: minus a_n)."""
    g = flux_field(n, state)
    deriv, _ = _advection_deriv(g.coeffs, state.coeffs[n], state.mesh, flux.alpha)
    return DGField(state.mesh, deriv)


def chat1(state: HermiteState, flux: FluxConfig) -> np.ndarray:
    """Per-interface Chat_1 such that the C_0 equation's flux is v_th Chat_1."""
    mesh = state.mesh
    g0 = state.params.v_scale * state.coeffs[1]
    ghat0 = lf_flux(
        mesh.interface_minus(g0),
        mesh.interface_plus(g0),
        mesh.interface_minus(state.coeffs[0]),
        mesh.interface_plus(state.coeffs[0]),
        flux.alpha,
    )
    return ghat0 / state.params.v_scale


def residual_r1(fields: FieldPair, beta_penalty: float, v_scale: float) -> np.ndarray:
    """Momentum-restoring interface values -beta/(2 v_th^2) [Phi][E]."""
    mesh = fields.E.mesh
    jump_phi = mesh.interface_plus(fields.phi.coeffs) - mesh.interface_minus(fields.phi.coeffs)
    jump_e = mesh.interface_plus(fields.E.coeffs) - mesh.interface_minus(fields.E.coeffs)
    return -0.5 * beta_penalty / v_scale ** 2 * jump_phi * jump_e


def residual_r2(state: HermiteState, fields: FieldPair, flux: FluxConfig) -> np.ndarray:
    """Energy-restoring interface values ({C_1} - Chat_1)[Phi] / (sqrt(2) v_th)."""
    mesh = state.mesh
    avg_c1 = 0.5 * (
        mesh.interface_plus(state.coeffs[1]) + mesh.interface_minus(state.coeffs[1])
    )
    jump_phi = mesh.interface_plus(fields.phi.coeffs) - mesh.interface_minus(fields.phi.coeffs)
    return (avg_c1 - chat1(state, flux)) * jump_phi / (np.sqrt(2.0) * state.params.v_scale)


def scatter_interfaces(values: np.ndarray, mesh: Mesh1D) -> np.ndarray:
    """Distribute per-interface residuals to the two adjacent cells.

    Interface m contributes values[m] * phi^-(right endpoint) to cell m and
    values[m] * phi^+(left endpoint) to cell m+1.
    """
    out = values[..., None] * mesh.trace_right
    out += np.roll(values, 1, axis=-1)[..., None] * mesh.trace_left
    return out


def source_form(n: int, state: HermiteState, fields: FieldPair,
                flux: FluxConfig, beta_penalty: float) -> DGField:
    """Source contribution to dC_n/dt: sqrt(n)/v_th E C_{n-1} plus residuals.

    Accepts stage-averaged (untagged) field pairs; the staged integrators call
    this for n=2 with averaged fields.
    """
    mesh = state.mesh
    if n == 0:
        return DGField.zero(mesh)
    vth = state.params.v_scale
    e_nodes = mesh.node_values(fields.E.coeffs)
    c_nodes = mesh.node_values(state.coeffs[n - 1])
    deriv = (np.sqrt(float(n)) / vth) * mesh.project_nodal(e_nodes * c_nodes)
    if n == 1:
        deriv += scatter_interfaces(residual_r1(fields, beta_penalty, vth), mesh)
    elif n == 2:
        deriv += scatter_interfaces(residual_r2(state, fields, flux), mesh)
    return DGField(mesh, deriv)


def rhs(state: HermiteState, fields: FieldPair, flux: FluxConfig,
        beta_penalty: float, skip_mode2_source: bool = False) -> HermiteState:
    """Full semi-discrete time derivative of every mode.

    ``fields`` must be the Poisson solution for the state's C_0 (checked via
    the source tag when present).  With ``skip_mode2_source`` the n=2 source
    is omitted entirely; the staged integrators apply it afterwards with
    averaged fields.
    """
    mesh = state.mesh
    params = state.params
    vth = params.v_scale
    tag = fields.source_fingerprint
    if tag is not None and tag.c0_crc != c0_checksum(state.coeffs[0]):
        raise ValueError("fields were not solved from this state's C_0")

    # the flux ladder is linear in the modes, so flux node values and traces
    # come from mode-shifting the C arrays instead of assembling g twice
    root = np.sqrt(np.arange(1, params.n_modes, dtype=float))
    c_nodes = mesh.node_values(state.coeffs)
    cm = mesh.interface_minus(state.coeffs)
    cp = mesh.interface_plus(state.coeffs)

    g_nodes = np.zeros_like(c_nodes)
    g_nodes[:-1] = root[:, None, None] * c_nodes[1:]
    g_nodes[1:] += root[:, None, None] * c_nodes[:-1]
    g_nodes *= vth

    def shifted(traces_arr):
        out = np.zeros_like(traces_arr)
        out[:-1] = root[:, None] * traces_arr[1:]
        out[1:] += root[:, None] * traces_arr[:-1]
        return vth * out

    ghat = lf_flux(shifted(cm), shifted(cp), cm, cp, flux.alpha)
    deriv = mesh.weak_derivative(g_nodes)
    deriv -= ghat[..., None] * mesh.trace_right
    deriv += np.roll(ghat, 1, axis=-1)[..., None] * mesh.trace_left

    # sources: mode n >= 1 receives sqrt(n)/v_th * projection of E C_{n-1}
    e_nodes = mesh.node_values(fields.E.coeffs)
    src = mesh.project_nodal(e_nodes[None, :, :] * c_nodes[:-1])
    deriv[1] += src[0] / vth
    deriv[3:] += (root[2:, None, None] / vth) * src[2:]

    jump_phi = (
        mesh.interface_plus(fields.phi.coeffs) - mesh.interface_minus(fields.phi.coeffs)
    )
    jump_e = mesh.interface_plus(fields.E.coeffs) - mesh.interface_minus(fields.E.coeffs)
    r1 = -0.5 * beta_penalty / vth ** 2 * jump_phi * jump_e
    deriv[1] += scatter_interfaces(r1, mesh)

    if not skip_mode2_source:
        deriv[2] += (np.sqrt(2.0) / vth) * src[1]
        avg_c1 = 0.5 * (cp[1] + cm[1])
        r2 = (avg_c1 - ghat[0] / vth) * jump_phi / (np.sqrt(2.0) * vth)
        deriv[2] += scatter_interfaces(r2, mesh)

    return HermiteState(deriv, params, mesh)
