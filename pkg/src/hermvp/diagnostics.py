"""Conserved quantities, field norms and rate fitting.

The discrete total energy is
    (1/2) int v_th^3 (sqrt(2) C_2 + C_0) + |E|^2 dx + (beta/2) sum_j [Phi]_j^2;
the jump term belongs to the invariant, not to a norm of E alone.  Relative
deviations are taken against the t=0 record; momentum, whose initial value is
often zero, is normalized by the initial mass times v_th instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import DGField, traces
from .poisson import FieldPair
from .rhs import HermiteState

_FLOOR = 1e-300


def conserved(state: HermiteState, fields: FieldPair,
              beta_penalty: float) -> tuple[float, float, float]:
    """Total mass, momentum and energy of a state with its solved fields."""
    mesh = state.mesh
    vth = state.params.v_scale
    mass = vth * mesh.integrate_coeffs(state.coeffs[0])
    momentum = vth ** 2 * mesh.integrate_coeffs(state.coeffs[1])
    kinetic = 0.5 * vth ** 3 * (
        np.sqrt(2.0) * mesh.integrate_coeffs(state.coeffs[2])
        + mesh.integrate_coeffs(state.coeffs[0])
    )
    e_nodes = fields.E.node_values()
    e_l2_sq = float(((e_nodes ** 2) @ mesh.quad_weights) @ (0.5 * mesh.widths))
    phi_jumps = traces(fields.phi).jump
    energy = kinetic + 0.5 * e_l2_sq + 0.5 * beta_penalty * float(phi_jumps @ phi_jumps)
    return float(mass), float(momentum), float(energy)


def efield_norms(E: DGField) -> tuple[float, float]:
    """L2 and max norms of the field, sampled at quadrature nodes and endpoints."""
    mesh = E.mesh
    nodes = E.node_values()
    l2 = float(np.sqrt(((nodes ** 2) @ mesh.quad_weights) @ (0.5 * mesh.widths)))
    endpoint_max = max(
        np.abs(mesh.interface_minus(E.coeffs)).max(),
        np.abs(mesh.interface_plus(E.coeffs)).max(),
    )
    return l2, float(max(np.abs(nodes).max(), endpoint_max))


def fit_rate(t: np.ndarray, log_norm: np.ndarray, window: tuple[float, float]) -> float:
    """Least-squares slope through the local maxima of a log-norm series.

    Fitting the peak envelope makes the estimate robust to the oscillation of
    the field norm; plateau samples count as (non-strict) maxima so a constant
    series fits a zero rate.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(log_norm, dtype=float)
    lo, hi = window
    peaks_t, peaks_y = [], []
    for i in range(1, t.size - 1):
        if lo <= t[i] <= hi and y[i] >= y[i - 1] and y[i] >= y[i + 1]:
            peaks_t.append(t[i])
            peaks_y.append(y[i])
    if len(peaks_t) < 2:
        raise ValueError(
            f"need at least 2 local maxima in window {window}, found {len(peaks_t)}"
        )
    slope, _ = np.polyfit(peaks_t, peaks_y, 1)
    return float(slope)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Time-stamped conservation and field-norm snapshot of a trajectory."""

    t: float
    mass: float
    momentum: float
    energy: float
    mass_dev: float
    momentum_dev: float
    energy_dev: float
    e_l2: float
    e_max: float
    phi_jump_energy: float

    @classmethod
    def measure(cls, t: float, state: HermiteState, fields: FieldPair,
                beta_penalty: float,
                baseline: "DiagnosticsRecord | None" = None) -> "DiagnosticsRecord":
        mesh = state.mesh
        vth = state.params.v_scale
        mass = vth * mesh.integrate_coeffs(state.coeffs[0])
        momentum = vth ** 2 * mesh.integrate_coeffs(state.coeffs[1])
        kinetic = 0.5 * vth ** 3 * (
            np.sqrt(2.0) * mesh.integrate_coeffs(state.coeffs[2])
            + mesh.integrate_coeffs(state.coeffs[0])
        )
        e_nodes = fields.E.node_values()
        e_l2_sq = float(((e_nodes ** 2) @ mesh.quad_weights) @ (0.5 * mesh.widths))
        e_l2 = float(np.sqrt(e_l2_sq))
        e_max = float(
            max(
                np.abs(e_nodes).max(),
                np.abs(mesh.interface_minus(fields.E.coeffs)).max(),
                np.abs(mesh.interface_plus(fields.E.coeffs)).max(),
            )
        )
        phi_jumps = (
            mesh.interface_plus(fields.phi.coeffs)
            - mesh.interface_minus(fields.phi.coeffs)
        )
        jump_energy = 0.5 * beta_penalty * float(phi_jumps @ phi_jumps)
        energy = kinetic + 0.5 * e_l2_sq + jump_energy
        if baseline is None:
            devs = (0.0, 0.0, 0.0)
        else:
            vth = state.params.v_scale
            devs = (
                (mass - baseline.mass) / max(abs(baseline.mass), _FLOOR),
                (momentum - baseline.momentum) / max(abs(baseline.mass * vth), _FLOOR),
                (energy - baseline.energy) / max(abs(baseline.energy), _FLOOR),
            )
        return cls(t, mass, momentum, energy, *devs, e_l2, e_max, jump_energy)
