"""Conservative Hermite-velocity / DG-space solver for the 1D-1V Vlasov-Poisson system."""

from .hermite import HermiteParams, hermite_eval, moments, project_velocity, psi_eval, reconstruct
from .mesh import DGField, InterfaceTrace, Mesh1D, evaluate, integrate, project_L2, traces
from .poisson import FieldPair, PoissonOperator, assemble, compute_rho0, solve
from .rhs import FluxConfig, HermiteState, rhs
from .stepper import StepConfig, StepContext, advance, compute_dt, step_euler, step_rk2
from .filtering import FilterSpec, apply_filter, sigma
from .diagnostics import DiagnosticsRecord, conserved, efield_norms, fit_rate
from .scenarios import ScenarioSpec, build_initial

__all__ = [
    "HermiteParams", "hermite_eval", "psi_eval", "project_velocity", "reconstruct",
    "moments", "Mesh1D", "DGField", "InterfaceTrace", "project_L2", "evaluate",
    "traces", "integrate", "FieldPair", "PoissonOperator", "assemble",
    "compute_rho0", "solve", "FluxConfig", "HermiteState", "rhs", "StepConfig",
    "StepContext", "compute_dt", "step_euler", "step_rk2", "advance",
    "FilterSpec", "sigma", "apply_filter", "DiagnosticsRecord", "conserved",
    "efield_norms", "fit_rate", "ScenarioSpec", "build_initial",
]

__version__ = "0.1.0"
