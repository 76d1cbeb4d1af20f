"""Local discontinuous Galerkin solver for the periodic Poisson problem.

The first-order system E = -Phi', E' = v_th C_0 - rho_0 is discretized with
the central flux {Phi} for the potential and the penalized flux {E} - beta
[Phi] for the field.  Eliminating E through the (exact, identity-mass) first
equation leaves a symmetric positive semidefinite system G^T G + beta J^T J
for Phi, pinned by a zero-mean constraint row and factorized once.  Solved
pairs satisfy both discrete equations to solver precision, which is what the
conservation identities of the transport scheme rely on.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .hermite import HermiteParams
from .mesh import DGField, Mesh1D, integrate


def c0_checksum(c0_coeffs: np.ndarray) -> int:
    return zlib.crc32(np.ascontiguousarray(c0_coeffs).tobytes())


@dataclass(frozen=True)
class SourceTag:
    """Checksum of the C_0 field and background density a pair was solved from."""

    c0_crc: int
    rho_0: float


@dataclass(frozen=True)
class FieldPair:
    """Electric field and potential tagged with the source they solve."""

    E: DGField
    phi: DGField
    source_fingerprint: SourceTag | None = None

    @classmethod
    def zero(cls, mesh: Mesh1D) -> "FieldPair":
        return cls(DGField.zero(mesh), DGField.zero(mesh), None)

    @classmethod
    def average(cls, a: "FieldPair", b: "FieldPair") -> "FieldPair":
        """Stage-averaged fields; deliberately untagged (not a solved pair)."""
        mesh = a.E.mesh
        return cls(
            DGField(mesh, 0.5 * (a.E.coeffs + b.E.coeffs)),
            DGField(mesh, 0.5 * (a.phi.coeffs + b.phi.coeffs)),
            None,
        )


def compute_rho0(c0_initial: DGField, params: HermiteParams) -> float:
    """Neutralizing background density from the initial charge content."""
    return params.v_scale * integrate(c0_initial) / c0_initial.mesh.length


class PoissonOperator:
    """Assembled, factorized LDG Poisson operator; time-independent."""

    def __init__(self, mesh: Mesh1D, beta_penalty: float):
        if beta_penalty <= 0.0:
            raise ValueError(f"beta_penalty must be positive, got {beta_penalty}")
        self.mesh = mesh
        self.beta_penalty = float(beta_penalty)

        n = mesh.n_cells
        p = mesh.degree + 1
        s = mesh.basis_scale          # (n, p)
        sign = np.where(np.arange(p) % 2 == 0, 1.0, -1.0)

        def dof(j, l):
            return j * p + l

        rows, cols, data = [], [], []

        def add(r, c, v):
            rows.append(r)
            cols.append(c)
            data.append(v)

        for j in range(n):
            jp = (j + 1) % n
            jm = (j - 1) % n
            for i in range(p):
                r = dof(j, i)
                # volume: int phi_l phi_i' dx = 2 s_i s_l for l < i, i-l odd
                for l in range(i - 1, -1, -2):
                    add(r, dof(j, l), 2.0 * s[j, i] * s[j, l])
                for l in range(p):
                    # -{Phi}_{j+1/2} phi_i(right)
                    add(r, dof(j, l), -0.5 * s[j, i] * s[j, l])
                    add(r, dof(jp, l), -0.5 * s[j, i] * s[jp, l] * sign[l])
                    # +{Phi}_{j-1/2} phi_i(left)
                    add(r, dof(jm, l), 0.5 * s[j, i] * sign[i] * s[jm, l])
                    add(r, dof(j, l), 0.5 * s[j, i] * sign[i] * s[j, l] * sign[l])

        ndof = n * p
        # G maps Phi coefficients to E coefficients (negative discrete gradient
        # with central fluxes); exact because the local mass matrix is identity
        self.gradient = sp.coo_matrix((data, (rows, cols)), shape=(ndof, ndof)).tocsr()

        rows, cols, data = [], [], []
        for m in range(n):
            mp = (m + 1) % n
            for l in range(p):
                add(m, dof(m, l), -s[m, l])
                add(m, dof(mp, l), s[mp, l] * sign[l])
        self.jumps = sp.coo_matrix((data, (rows, cols)), shape=(n, ndof)).tocsr()

        self.matrix = (
            self.gradient.T @ self.gradient
            + self.beta_penalty * (self.jumps.T @ self.jumps)
        ).tocsr()

        # int phi_i dx: nonzero only for the per-cell constant mode
        w = np.zeros(ndof)
        w[::p] = np.sqrt(mesh.widths)
        self.weight = w

        augmented = sp.bmat(
            [[self.matrix, w[:, None]], [w[None, :], None]], format="csc"
        )
        try:
            self._lu = splu(augmented)
        except RuntimeError as exc:  # pragma: no cover - guarded by beta > 0
            raise RuntimeError(f"singular Poisson assembly: {exc}") from exc


def assemble(mesh: Mesh1D, beta_penalty: float) -> PoissonOperator:
    """Build and factorize the Poisson operator for this mesh and penalty."""
    return PoissonOperator(mesh, beta_penalty)


def solve(op: PoissonOperator, c0: DGField, rho_0: float, params: HermiteParams) -> FieldPair:
    """Solve for (E, Phi) from the density mode C_0 with fixed background rho_0."""
    mesh = op.mesh
    net_charge = params.v_scale * integrate(c0) - rho_0 * mesh.length
    if abs(net_charge) > 1e-10 * mesh.length:
        raise ValueError(
            f"incompatible Poisson source: net charge {net_charge:.3e} over the period"
        )
    b = params.v_scale * c0.coeffs.ravel() - rho_0 * op.weight
    sol = op._lu.solve(np.append(b, 0.0))
    phi = sol[:-1]
    e = op.gradient @ phi
    p = mesh.degree + 1
    tag = SourceTag(c0_checksum(c0.coeffs), rho_0)
    return FieldPair(
        E=DGField(mesh, e.reshape(mesh.n_cells, p)),
        phi=DGField(mesh, phi.reshape(mesh.n_cells, p)),
        source_fingerprint=tag,
    )
