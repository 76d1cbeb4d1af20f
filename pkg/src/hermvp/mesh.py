"""Periodic 1D mesh with an orthonormal modal Legendre basis per cell.

Cell-local bases are Legendre polynomials rescaled so every local mass matrix
is the identity; coefficient vectors therefore coincide with L2 projections
and the coefficient 2-norm with the L2 norm.  Interface bookkeeping follows
the jump/average convention [u] = u(x^+) - u(x^-), {u} = (u(x^+) + u(x^-))/2,
with interface m sitting between cell m and cell (m+1) mod N_x and the last
interface identified with the first (periodic wrap).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import legder, legval


class Mesh1D:
    """Partition of [x_min, x_max] with per-cell quadrature and basis tables.

    Immutable after construction; concurrent reads are safe.
    """

    def __init__(self, cell_edges: np.ndarray, degree: int, quad_order: int | None = None):
        edges = np.asarray(cell_edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise ValueError("cell_edges must be a 1D array with at least two entries")
        if not np.all(np.diff(edges) > 0.0):
            raise ValueError("cell_edges must be strictly increasing")
        if degree < 0:
            raise ValueError(f"degree must be >= 0, got {degree}")
        if quad_order is None:
            quad_order = degree + 3
        # degree+2 is the floor: exact mass matrix plus over-integration of the
        # quadratic E*C products
        if quad_order < degree + 2:
            raise ValueError(f"quad_order must be >= degree+2, got {quad_order}")

        self.cell_edges = edges
        self.degree = int(degree)
        self.quad_order = int(quad_order)
        self.n_cells = edges.size - 1
        self.x_min = float(edges[0])
        self.x_max = float(edges[-1])
        self.length = self.x_max - self.x_min
        widths = np.diff(edges)
        # snap rounding jitter so uniform meshes get bit-identical cell scales
        self.is_uniform = bool(
            np.allclose(widths, widths[0], rtol=1e-12, atol=0.0)
        )
        if self.is_uniform:
            widths = np.full(self.n_cells, self.length / self.n_cells)
        self.widths = widths
        self.h_min = float(self.widths.min())
        self.centers = 0.5 * (edges[:-1] + edges[1:])

        nodes, weights = np.polynomial.legendre.leggauss(self.quad_order)
        self.quad_ref = nodes
        self.quad_weights = weights
        self.quad_x = self.centers[:, None] + 0.5 * self.widths[:, None] * nodes[None, :]

        p = self.degree + 1
        pval = np.empty((self.quad_order, p))
        pder = np.empty((self.quad_order, p))
        for i in range(p):
            c = np.zeros(i + 1)
            c[i] = 1.0
            pval[:, i] = legval(nodes, c)
            dc = legder(c)
            pder[:, i] = legval(nodes, dc) if dc.size else 0.0
        self._pval = pval
        self._pder = pder

        i = np.arange(p)
        # phi_i(x) = sqrt((2i+1)/h) P_i(xi) makes the local mass matrix identity
        self.basis_scale = np.sqrt((2.0 * i + 1.0)[None, :] / self.widths[:, None])
        self.trace_right = self.basis_scale.copy()
        self.trace_left = self.basis_scale * np.where(i % 2 == 0, 1.0, -1.0)[None, :]

        if self.is_uniform:
            # fused per-cell-independent operators: one matmul instead of
            # scale-multiply plus reduce
            s = self.basis_scale[0]
            self._val_op = s[:, None] * pval.T                       # (p, nq)
            self._proj_op = (0.5 * self.widths[0]) * (weights[:, None] * pval) * s[None, :]
            self._der_op = (weights[:, None] * pder) * s[None, :]    # (nq, p)
            self._right_vec = self.trace_right[0]
            self._left_vec = self.trace_left[0]
        else:
            self._val_op = None

    @classmethod
    def uniform(cls, x_min: float, x_max: float, n_cells: int,
                degree: int, quad_order: int | None = None) -> "Mesh1D":
        if n_cells < 1:
            raise ValueError(f"n_cells must be positive, got {n_cells}")
        return cls(np.linspace(x_min, x_max, n_cells + 1), degree, quad_order)

    # --- array-level kernels; leading batch axes broadcast through ---

    @staticmethod
    def _flat_matmul(arr: np.ndarray, op: np.ndarray) -> np.ndarray:
        # one large GEMM instead of a slow batched loop over leading axes
        flat = np.ascontiguousarray(arr).reshape(-1, arr.shape[-1])
        out = flat @ op
        return out.reshape(arr.shape[:-1] + out.shape[-1:])

    def node_values(self, coeffs: np.ndarray) -> np.ndarray:
        """Field values at the quadrature nodes, shape (..., n_cells, quad_order)."""
        if self._val_op is not None:
            return self._flat_matmul(coeffs, self._val_op)
        return (coeffs * self.basis_scale) @ self._pval.T

    def project_nodal(self, values: np.ndarray) -> np.ndarray:
        """L2-project nodal data (..., n_cells, quad_order) onto the basis."""
        if self._val_op is not None:
            return self._flat_matmul(values, self._proj_op)
        tmp = (values * self.quad_weights) @ self._pval
        return tmp * (0.5 * self.widths[:, None]) * self.basis_scale

    def weak_derivative(self, values: np.ndarray) -> np.ndarray:
        """Volume terms int F phi_i' dx per cell from nodal data of F."""
        if self._val_op is not None:
            return self._flat_matmul(values, self._der_op)
        return ((values * self.quad_weights) @ self._pder) * self.basis_scale

    def interface_minus(self, coeffs: np.ndarray) -> np.ndarray:
        """Trace from the left of each interface (right endpoint of cell m)."""
        if self._val_op is not None:
            return self._flat_matmul(coeffs, self._right_vec[:, None])[..., 0]
        return (coeffs * self.trace_right).sum(axis=-1)

    def interface_plus(self, coeffs: np.ndarray) -> np.ndarray:
        """Trace from the right of each interface (left endpoint of cell m+1)."""
        if self._val_op is not None:
            traces_left = self._flat_matmul(coeffs, self._left_vec[:, None])[..., 0]
        else:
            traces_left = (coeffs * self.trace_left).sum(axis=-1)
        return np.roll(traces_left, -1, axis=-1)

    def integrate_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        """Exact integral of piecewise polynomials given as coefficients."""
        return coeffs[..., 0] @ np.sqrt(self.widths)


@dataclass
class DGField:
    """One piecewise-polynomial scalar field: per-cell modal coefficients."""

    mesh: Mesh1D
    coeffs: np.ndarray  # (n_cells, degree+1)

    def __post_init__(self) -> None:
        expected = (self.mesh.n_cells, self.mesh.degree + 1)
        if self.coeffs.shape != expected:
            raise ValueError(f"coefficient shape {self.coeffs.shape} != {expected}")

    @classmethod
    def zero(cls, mesh: Mesh1D) -> "DGField":
        return cls(mesh, np.zeros((mesh.n_cells, mesh.degree + 1)))

    def copy(self) -> "DGField":
        return DGField(self.mesh, self.coeffs.copy())

    def node_values(self) -> np.ndarray:
        return self.mesh.node_values(self.coeffs)

    def eval_at(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at arbitrary points; points on an edge use the right cell."""
        mesh = self.mesh
        x = np.asarray(x, dtype=float)
        cells = np.clip(
            np.searchsorted(mesh.cell_edges, x, side="right") - 1, 0, mesh.n_cells - 1
        )
        xi = 2.0 * (x - mesh.centers[cells]) / mesh.widths[cells]
        scaled = (self.coeffs[cells] * mesh.basis_scale[cells]).T
        return legval(xi, scaled, tensor=False)


@dataclass(frozen=True)
class InterfaceTrace:
    """One-sided limits u^- and u^+ at the n_cells periodic interfaces."""

    minus: np.ndarray
    plus: np.ndarray

    @property
    def jump(self) -> np.ndarray:
        return self.plus - self.minus

    @property
    def average(self) -> np.ndarray:
        return 0.5 * (self.plus + self.minus)


def project_L2(g, mesh: Mesh1D) -> DGField:
    """L2 projection of a function of x into the DG space."""
    values = g(mesh.quad_x)
    values = np.asarray(values, dtype=float)
    if values.shape != mesh.quad_x.shape:
        values = np.vectorize(g)(mesh.quad_x)
    return DGField(mesh, mesh.project_nodal(values))


def evaluate(field: DGField, cell: int, local_point: float) -> float:
    """Value of the local polynomial at a reference coordinate in [-1, 1]."""
    if not 0 <= cell < field.mesh.n_cells:
        raise IndexError(f"cell index {cell} outside [0, {field.mesh.n_cells})")
    scaled = field.coeffs[cell] * field.mesh.basis_scale[cell]
    return float(legval(local_point, scaled))


def traces(field: DGField) -> InterfaceTrace:
    """One-sided interface limits of the field, wrapping periodically."""
    return InterfaceTrace(
        minus=field.mesh.interface_minus(field.coeffs),
        plus=field.mesh.interface_plus(field.coeffs),
    )


def integrate(field: DGField) -> float:
    """Exact integral over the whole domain."""
    return float(field.mesh.integrate_coeffs(field.coeffs))
