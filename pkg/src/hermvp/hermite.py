"""Normalized scaled asymmetrically weighted Hermite velocity basis.

The basis functions are Psi_n(v) = H_n(v/v_th) * exp(-v^2 / 2 v_th^2) / sqrt(2 pi),
where the H_n are normalized probabilists' Hermite polynomials built from the
three-term recurrence sqrt(n) H_n = xi H_{n-1} - sqrt(n-1) H_{n-2}.  Velocity
moments of the expanded distribution close on the first three coefficients:
density v_th C_0, momentum density v_th^2 C_1 and kinetic energy density
(v_th^3 / 2)(sqrt(2) C_2 + C_0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_hermite

SQRT_2PI = float(np.sqrt(2.0 * np.pi))

#: Coefficient vector of one velocity expansion, entry n is C_n.
ModeVector = np.ndarray


@dataclass(frozen=True)
class HermiteParams:
    """Mode count and scaling velocity of the expansion."""

    n_modes: int
    v_scale: float = 1.0

    def __post_init__(self) -> None:
        # three modes carry mass/momentum/energy; fewer breaks every invariant
        if self.n_modes < 3:
            raise ValueError(f"n_modes must be >= 3, got {self.n_modes}")
        if self.v_scale <= 0.0:
            raise ValueError(f"v_scale must be positive, got {self.v_scale}")


def hermite_eval(n: int, xi):
    """Evaluate the normalized Hermite polynomial H_n by forward recurrence."""
    if n < 0:
        raise ValueError(f"mode index must be >= 0, got {n}")
    xi_arr = np.asarray(xi, dtype=float)
    h_prev = np.zeros_like(xi_arr)
    h = np.ones_like(xi_arr)
    for m in range(1, n + 1):
        h, h_prev = (xi_arr * h - np.sqrt(m - 1.0) * h_prev) / np.sqrt(float(m)), h
    return h if isinstance(xi, np.ndarray) else float(h)


def psi_eval(n: int, v, params: HermiteParams):
    """Evaluate the basis function Psi_n at velocity v."""
    if not 0 <= n < params.n_modes:
        raise ValueError(f"mode index {n} outside [0, {params.n_modes})")
    xi = np.asarray(v, dtype=float) / params.v_scale
    # recurrence carried on Psi itself keeps every intermediate bounded
    psi_prev = np.zeros_like(xi)
    psi = np.exp(-0.5 * xi * xi) / SQRT_2PI
    for m in range(1, n + 1):
        psi, psi_prev = (xi * psi - np.sqrt(m - 1.0) * psi_prev) / np.sqrt(float(m)), psi
    return psi if isinstance(v, np.ndarray) else float(psi)


def psi_matrix(params: HermiteParams, v: np.ndarray) -> np.ndarray:
    """All basis functions at once: returns Psi[n, j] = Psi_n(v[j])."""
    xi = np.asarray(v, dtype=float) / params.v_scale
    out = np.empty((params.n_modes, xi.size))
    out[0] = np.exp(-0.5 * xi * xi) / SQRT_2PI
    if params.n_modes > 1:
        out[1] = xi * out[0]
    for m in range(2, params.n_modes):
        out[m] = (xi * out[m - 1] - np.sqrt(m - 1.0) * out[m - 2]) / np.sqrt(float(m))
    return out


def _gauss_hermite_scaled(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Physicists' Gauss-Hermite nodes and weights premultiplied by exp(x^2).

    The plain weights underflow for large q while w*exp(x^2) stays O(1); it
    equals 1/(q * psi_{q-1}(x)^2) with psi_k the orthonormal Hermite functions,
    evaluated here through a rescaled recurrence so no intermediate overflows.
    """
    x = roots_hermite(q)[0]
    mant = np.full_like(x, np.pi ** -0.25)
    prev = np.zeros_like(x)
    log_scale = np.zeros_like(x)
    for k in range(1, q):
        mant, prev = x * np.sqrt(2.0 / k) * mant - np.sqrt((k - 1.0) / k) * prev, mant
        big = np.abs(mant) > 1e120
        if big.any():
            mant[big] *= 1e-120
            prev[big] *= 1e-120
            log_scale[big] += np.log(1e120)
    log_psi = np.log(np.abs(mant)) + log_scale - 0.5 * x * x
    return x, np.exp(-np.log(float(q)) - 2.0 * log_psi)


def project_velocity(f_v, params: HermiteParams, quad_points: int | None = None) -> ModeVector:
    """Expand a velocity profile onto the basis: C_m = (1/v_th) int f(v) H_m(v/v_th) dv.

    ``f_v`` must decay at least like the basis Gaussian.  The integral is taken
    by Gauss-Hermite quadrature in the scaled variable xi = v/v_th with
    max(4 n_modes, 200) nodes unless ``quad_points`` overrides it.
    """
    n_modes = params.n_modes
    if quad_points is None:
        quad_points = max(4 * n_modes, 200)
    if quad_points < n_modes:
        raise ValueError(
            f"quad_points={quad_points} < n_modes={n_modes} guarantees aliasing"
        )
    x, w_scaled = _gauss_hermite_scaled(quad_points)
    xi = np.sqrt(2.0) * x
    v = params.v_scale * xi
    try:
        fv = np.asarray(f_v(v), dtype=float)
        if fv.shape != v.shape:
            raise TypeError
    except TypeError:  # scalar-only callable
        fv = np.array([float(f_v(vv)) for vv in v])
    # recurrence runs on z_m = y * H_m(xi) directly: the products stay bounded
    # even where H_m alone would overflow and f underflows
    y = np.sqrt(2.0) * w_scaled * fv
    coeffs = np.empty(n_modes)
    z_prev = np.zeros_like(y)
    z = y
    coeffs[0] = z.sum()
    for m in range(1, n_modes):
        z, z_prev = (xi * z - np.sqrt(m - 1.0) * z_prev) / np.sqrt(float(m)), z
        coeffs[m] = z.sum()
    return coeffs


def reconstruct(coeffs: ModeVector, v, params: HermiteParams):
    """Evaluate the truncated expansion sum_n C_n Psi_n at velocity v."""
    xi = np.asarray(v, dtype=float) / params.v_scale
    psi_prev = np.zeros_like(xi)
    psi = np.exp(-0.5 * xi * xi) / SQRT_2PI
    total = coeffs[0] * psi
    for m in range(1, len(coeffs)):
        psi, psi_prev = (xi * psi - np.sqrt(m - 1.0) * psi_prev) / np.sqrt(float(m)), psi
        total = total + coeffs[m] * psi
    return total if isinstance(v, np.ndarray) else float(total)


def moments(coeffs: ModeVector, params: HermiteParams) -> tuple[float, float, float]:
    """Density, momentum density and kinetic energy density of one expansion.

    Exact functions of C_0..C_2 alone; the velocity integrals have no
    truncation or cut-off error in this basis.
    """
    vth = params.v_scale
    density = vth * coeffs[0]
    momentum = vth ** 2 * coeffs[1]
    energy = 0.5 * vth ** 3 * (np.sqrt(2.0) * coeffs[2] + coeffs[0])
    return float(density), float(momentum), float(energy)
