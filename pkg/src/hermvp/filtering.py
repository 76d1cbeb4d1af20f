"""Exponential damping of high Hermite modes with a 2/3 dealiasing rule.

sigma(s) = 1 for |s| <= 2/3 and exp(-36 |s|^36) beyond, applied per mode as
C_n <- C_n sigma(n / N_H).  Modes 0..2 satisfy n/N_H <= 1/2 < 2/3 whenever
N_H >= 4 and are exact fixed points, so the conserved quantities are
untouched.  The spatial DG coefficients are never filtered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rhs import HermiteState


@dataclass(frozen=True)
class FilterSpec:
    beta: float = 36.0
    cutoff: float = 2.0 / 3.0
    enabled: bool = True


def sigma(s, spec: FilterSpec = FilterSpec()):
    """Damping factor in (0, 1]; identically 1 up to and including the cutoff."""
    s_arr = np.abs(np.asarray(s, dtype=float))
    out = np.where(
        s_arr <= spec.cutoff, 1.0, np.exp(-spec.beta * s_arr ** spec.beta)
    )
    return out if isinstance(s, np.ndarray) else float(out)


def apply_filter(state: HermiteState, spec: FilterSpec = FilterSpec()) -> HermiteState:
    """Scale each mode by sigma(n/N_H) in place; identity when N_H < 4 or disabled."""
    n_modes = state.params.n_modes
    if not spec.enabled or n_modes < 4:
        return state
    factors = sigma(np.arange(n_modes) / n_modes, spec)
    active = factors < 1.0  # leave untouched modes bit-identical
    state.coeffs[active] *= factors[active, None, None]
    return state
