import numpy as np
import pytest

from hermvp.mesh import DGField, Mesh1D, evaluate, integrate, project_L2, traces


def l2_error(field: DGField, fn) -> float:
    mesh = field.mesh
    diff = field.node_values() - fn(mesh.quad_x)
    return float(np.sqrt(((diff ** 2) @ mesh.quad_weights) @ (0.5 * mesh.widths)))


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh1D(np.array([0.0, 1.0, 0.5]), 2)
    with pytest.raises(ValueError):
        Mesh1D.uniform(0, 1, 8, 2, quad_order=3)
    with pytest.raises(ValueError):
        Mesh1D.uniform(0, 1, 0, 2)


def test_orthonormal_local_mass_matrix():
    mesh = Mesh1D.uniform(0.0, 1.7, 3, 3)
    p = mesh.degree + 1
    basis = mesh.node_values(np.eye(p).reshape(p, 1, p).repeat(3, axis=1))
    gram = np.einsum("inq,jnq,q->nij", basis, basis, mesh.quad_weights)
    gram *= 0.5 * mesh.widths[:, None, None]
    assert np.abs(gram - np.eye(p)).max() <= 1e-14


def test_project_constant():
    mesh = Mesh1D.uniform(0.0, 2.0, 5, 2)
    f = project_L2(lambda x: 3.25 * np.ones_like(x), mesh)
    assert np.allclose(f.coeffs[:, 0], 3.25 * np.sqrt(mesh.widths), atol=1e-14)
    assert np.abs(f.coeffs[:, 1:]).max() <= 1e-14


def test_project_reproduces_polynomials():
    mesh = Mesh1D.uniform(-1.0, 2.0, 4, 2)
    f = project_L2(lambda x: x, mesh)
    assert np.abs(f.node_values() - mesh.quad_x).max() <= 1e-13
    g = project_L2(lambda x: x * x, mesh)
    assert np.abs(g.node_values() - mesh.quad_x ** 2).max() <= 1e-13


def test_projection_error_third_order():
    errs = [
        l2_error(project_L2(np.cos, Mesh1D.uniform(0, 4 * np.pi, n, 2)), np.cos)
        for n in (16, 32)
    ]
    assert 7.0 <= errs[0] / errs[1] <= 9.0


def test_evaluate():
    mesh = Mesh1D.uniform(0.0, 1.0, 4, 2)
    zero = DGField.zero(mesh)
    assert evaluate(zero, 2, 0.3) == 0.0
    g = project_L2(lambda x: x * x, mesh)
    # cell 1 covers [0.25, 0.5]; the reference point 0.5 maps to x = 0.4375
    assert evaluate(g, 1, 0.5) == pytest.approx(0.4375 ** 2, abs=1e-13)
    with pytest.raises(IndexError):
        evaluate(zero, 4, 0.0)


def test_eval_at_midpoints_superconverges():
    mesh = Mesh1D.uniform(0.0, 4 * np.pi, 64, 2)
    f = project_L2(np.cos, mesh)
    mids = mesh.centers
    assert np.abs(f.eval_at(mids) - np.cos(mids)).max() < 1e-4


def test_traces_continuous_projection_has_small_jumps():
    mesh = Mesh1D.uniform(0.0, 2 * np.pi, 32, 2)
    tr = traces(project_L2(np.sin, mesh))
    assert np.abs(tr.jump).max() <= 2e-4
    assert np.abs(tr.average - np.sin(mesh.cell_edges[1:])).max() <= 2e-4


def test_traces_checkerboard():
    mesh = Mesh1D.uniform(0.0, 1.0, 6, 1)
    coeffs = np.zeros((6, 2))
    coeffs[::2, 0] = np.sqrt(mesh.widths[::2])  # 1 on even cells, 0 on odd
    tr = traces(DGField(mesh, coeffs))
    assert np.allclose(np.abs(tr.jump), 1.0, atol=1e-14)


def test_traces_periodic_wrap():
    mesh = Mesh1D.uniform(0.0, 1.0, 4, 1)
    coeffs = np.zeros((4, 2))
    coeffs[0] = (1.0, 0.5)  # nonzero only in the first cell
    tr = traces(DGField(mesh, coeffs))
    # last interface is the wrap: its plus side comes from cell 0's left end
    left_val = coeffs[0] @ mesh.trace_left[0]
    assert tr.plus[-1] == pytest.approx(left_val, rel=1e-15)
    assert tr.minus[-1] == 0.0


def test_trace_jumps_decay_at_order_kp1():
    rates = []
    for k in (1, 2):
        jumps = []
        for n in (16, 32):
            mesh = Mesh1D.uniform(0.0, 2 * np.pi, n, k)
            jumps.append(np.abs(traces(project_L2(np.cos, mesh)).jump).max())
        rates.append(np.log2(jumps[0] / jumps[1]))
    assert rates[0] >= 1.8
    assert rates[1] >= 2.8


def test_integrate_examples():
    mesh = Mesh1D.uniform(0.0, 4 * np.pi, 24, 2)
    one = project_L2(lambda x: np.ones_like(x), mesh)
    assert integrate(one) == pytest.approx(4 * np.pi, rel=1e-14)
    assert abs(integrate(project_L2(np.cos, mesh))) <= 1e-13
    f = project_L2(lambda x: 1.0 + 0.01 * np.cos(0.5 * x), mesh)
    assert integrate(f) == pytest.approx(4 * np.pi, abs=1e-13)


def test_integrate_is_linear(rng):
    mesh = Mesh1D.uniform(0.0, 3.0, 7, 2)
    a = DGField(mesh, rng.standard_normal((7, 3)))
    b = DGField(mesh, rng.standard_normal((7, 3)))
    combo = DGField(mesh, 2.5 * a.coeffs - 1.25 * b.coeffs)
    assert integrate(combo) == pytest.approx(
        2.5 * integrate(a) - 1.25 * integrate(b), rel=1e-13, abs=1e-14
    )


def test_nonuniform_mesh_round_trip():
    edges = np.array([0.0, 0.3, 1.0, 1.4, 2.0])
    mesh = Mesh1D(edges, 2)
    assert not mesh.is_uniform
    f = project_L2(lambda x: x * x - x, mesh)
    assert np.abs(f.node_values() - (mesh.quad_x ** 2 - mesh.quad_x)).max() <= 1e-13
    assert integrate(f) == pytest.approx(8.0 / 3.0 - 2.0, rel=1e-13)
