"""Command line driver: single runs and mesh-refinement studies.

``hermvp run config.ini`` marches a scenario to its end time and writes a
time-series CSV, the effective configuration, phase-space snapshots and report
figures into the output directory.  ``hermvp converge config.ini`` runs the
same scenario over a list of meshes and degrees against a refined reference
and tabulates L2 errors and observed orders.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, parse_config, render_config
from .diagnostics import DiagnosticsRecord
from .filtering import FilterSpec
from .hermite import HermiteParams, psi_matrix
from .mesh import DGField, Mesh1D
from .poisson import assemble, solve
from .rhs import FluxConfig, HermiteState
from .scenarios import build_initial
from .stepper import DivergenceError, SimTime, StepConfig, StepContext, advance

CSV_HEADER = "t,mass_dev,momentum_dev,energy_dev,E_l2,E_max"


def record_csv_row(r: DiagnosticsRecord) -> str:
    return (
        f"{r.t:.17g},{r.mass_dev:.17g},{r.momentum_dev:.17g},"
        f"{r.energy_dev:.17g},{r.e_l2:.17g},{r.e_max:.17g}"
    )


def write_timeseries(records, path: Path) -> None:
    lines = [CSV_HEADER]
    lines.extend(record_csv_row(r) for r in records)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def sample_distribution(state: HermiteState, nx: int, nv: int,
                        v_window: tuple[float, float]):
    """Reconstruct f on a uniform (x, v) grid from the mode fields."""
    mesh = state.mesh
    x = np.linspace(mesh.x_min, mesh.x_max, nx, endpoint=False)
    v = np.linspace(v_window[0], v_window[1], nv)
    c_at_x = np.stack(
        [DGField(mesh, state.coeffs[n]).eval_at(x) for n in range(state.params.n_modes)]
    )
    psi = psi_matrix(state.params, v)
    return c_at_x.T @ psi, x, v


def write_snapshot(state: HermiteState, t: float, cfg: RunConfig, out_dir: Path):
    f_xv, x, v = sample_distribution(state, cfg.snapshot_nx, cfg.snapshot_nv, cfg.v_window)
    header = (
        f"nx={cfg.snapshot_nx} nv={cfg.snapshot_nv} "
        f"x0={x[0]:.17g} x1={state.mesh.x_max:.17g} "
        f"v0={v[0]:.17g} v1={v[-1]:.17g} t={t:.17g}"
    )
    path = out_dir / f"snapshot_t{t:g}.txt"
    np.savetxt(path, f_xv, header=header, comments="# ")
    return f_xv, x, v, path


def _setup(cfg: RunConfig):
    params = HermiteParams(cfg.n_modes, cfg.v_scale)
    spec = replace(cfg.scenario, v_scale=cfg.v_scale)
    mesh = Mesh1D.uniform(0.0, spec.domain_length, cfg.n_cells, cfg.degree)
    state, rho_0 = build_initial(spec, mesh, params)
    op = assemble(mesh, cfg.beta_penalty)
    ctx = StepContext(op, FluxConfig.from_params(params), rho_0)
    fields = solve(op, state.mode(0), rho_0, params)
    return state, fields, ctx


def run(cfg: RunConfig) -> int:
    """Execute one run; returns a process exit status."""
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "effective.ini").write_text(render_config(cfg), encoding="utf-8")

    state, fields, ctx = _setup(cfg)
    step_cfg = StepConfig(cfl=cfg.cfl, order=cfg.order, filter_enabled=cfg.filter_enabled)
    filter_spec = FilterSpec(beta=cfg.filter_beta, enabled=cfg.filter_enabled)

    snapshots = []
    snap_times = sorted(set(cfg.snapshot_times))
    if 0.0 in snap_times:
        snapshots.append(write_snapshot(state, 0.0, cfg, out_dir))
    interior = [t for t in snap_times if 0.0 < t < cfg.t_end]
    final_snapshot = any(t == cfg.t_end and t > 0.0 for t in snap_times)

    records: list[DiagnosticsRecord] = []
    baseline = None
    clock = SimTime()
    try:
        for t_stop in interior + [cfg.t_end]:
            segment, state, fields = advance(
                state, fields, t_stop, step_cfg, ctx,
                filter_spec=filter_spec, stride=cfg.stride,
                baseline=baseline, clock=clock,
            )
            records.extend(segment)
            baseline = records[0]
            if t_stop < cfg.t_end:
                snapshots.append(write_snapshot(state, t_stop, cfg, out_dir))
    except DivergenceError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 2
    if final_snapshot:
        snapshots.append(write_snapshot(state, cfg.t_end, cfg, out_dir))

    write_timeseries(records, out_dir / "timeseries.csv")

    if cfg.plots:
        from . import plots

        plots.save_conservation_figure(records, out_dir / "conservation.png")
        plots.save_field_figure(records, out_dir / "efield.png")
        for f_xv, x, v, path in snapshots:
            t = float(path.stem.split("_t")[-1])
            plots.save_snapshot_figure(f_xv, x, v, t, path.with_suffix(".png"))
    return 0


def l2_field_error(field: DGField, reference: DGField) -> float:
    """Discrete L2 distance between two fields, quadrature taken on the finer mesh."""
    if field.mesh is reference.mesh or (
        field.mesh.n_cells == reference.mesh.n_cells
        and field.mesh.degree == reference.mesh.degree
        and np.array_equal(field.mesh.cell_edges, reference.mesh.cell_edges)
    ):
        return float(np.linalg.norm(field.coeffs - reference.coeffs))
    fine = reference.mesh
    xs = fine.quad_x
    diff = field.eval_at(xs.ravel()).reshape(xs.shape) - fine.node_values(reference.coeffs)
    return float(np.sqrt(((diff ** 2) @ fine.quad_weights) @ (0.5 * fine.widths)))


def _final_state(cfg: RunConfig) -> HermiteState:
    state, fields, ctx = _setup(cfg)
    step_cfg = StepConfig(cfl=cfg.cfl, order=cfg.order, filter_enabled=cfg.filter_enabled)
    filter_spec = FilterSpec(beta=cfg.filter_beta, enabled=cfg.filter_enabled)
    _, state, _ = advance(
        state, fields, cfg.t_end, step_cfg, ctx,
        filter_spec=filter_spec, stride=10 ** 9,
    )
    return state


def converge(cfg: RunConfig, cells: list[int], degrees: list[int],
             ref_cells: int, error_field: str = "c0") -> list[tuple[int, int, float, float]]:
    """Refinement study against a reference one degree higher on a finer mesh.

    Returns (degree, n_cells, l2_error, observed_order) rows; the error is the
    discrete L2 distance of C_0 (or the mode-summed state with
    ``error_field='state'``) from the reference at the final time.
    """
    if max(cells) > ref_cells:
        raise ValueError("reference mesh must be at least as fine as every study mesh")
    rows: list[tuple[int, int, float, float]] = []
    for degree in degrees:
        ref_cfg = replace(cfg, n_cells=ref_cells, degree=degree + 1)
        ref_state = _final_state(ref_cfg)
        prev_err = None
        for n in cells:
            state = _final_state(replace(cfg, n_cells=n, degree=degree))
            if error_field == "state":
                err_sq = 0.0
                for m in range(state.params.n_modes):
                    err_sq += l2_field_error(state.mode(m), ref_state.mode(m)) ** 2
                err = float(np.sqrt(err_sq))
            else:
                err = l2_field_error(state.mode(0), ref_state.mode(0))
            order = float("nan") if prev_err is None else float(np.log2(prev_err / err))
            rows.append((degree, n, err, order))
            prev_err = err
    return rows


def write_convergence(rows, path: Path, error_field: str) -> None:
    lines = [f"degree,n_cells,l2_error_{error_field},order"]
    for degree, n, err, order in rows:
        lines.append(f"{degree},{n},{err:.6e},{'' if np.isnan(order) else f'{order:.3f}'}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _int_list(raw: str) -> list[int]:
    return [int(v) for v in raw.split(",") if v.strip()]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hermvp",
        description="Conservative Hermite/DG Vlasov-Poisson solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario to its end time")
    p_run.add_argument("config", help="path to an INI configuration file")
    p_conv = sub.add_parser("converge", help="mesh-refinement accuracy study")
    p_conv.add_argument("config", help="path to an INI configuration file")
    p_conv.add_argument("--degrees", default="1,2,3", type=_int_list)
    p_conv.add_argument("--cells", default="16,32,64", type=_int_list)
    p_conv.add_argument("--ref-cells", default=256, type=int)
    p_conv.add_argument("--error-field", default="c0", choices=("c0", "state"))
    for p in (p_run, p_conv):
        p.add_argument("--t-end", type=float, default=None)
        p.add_argument("--output-dir", default=None)
        p.add_argument("--no-plots", action="store_true")
        p.add_argument(
            "--seedless-deterministic", action="store_true",
            help="force strictly serial, reproducible execution (always on)",
        )

    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if args.t_end is not None:
        cfg = replace(cfg, t_end=args.t_end)
    if args.output_dir is not None:
        cfg = replace(cfg, output_dir=args.output_dir)
    if args.no_plots:
        cfg = replace(cfg, plots=False)
    try:
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    if args.command == "run":
        return run(cfg)

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "effective.ini").write_text(render_config(cfg), encoding="utf-8")
    try:
        rows = converge(cfg, args.cells, args.degrees, args.ref_cells, args.error_field)
    except (ValueError, DivergenceError) as exc:
        print(f"convergence study failed: {exc}", file=sys.stderr)
        return 2
    write_convergence(rows, out_dir / "convergence.csv", args.error_field)
    if cfg.plots:
        from . import plots

        plots.save_convergence_figure(rows, out_dir / "convergence.png")
    for degree, n, err, order in rows:
        order_txt = "--" if np.isnan(order) else f"{order:.2f}"
        print(f"degree {degree}  cells {n:4d}  error {err:.4e}  order {order_txt}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
