"""Run configuration: INI-style files with scenario/numerics/output sections.

Unknown keys are rejected by name (typo safety) and every invariant violation
reports the offending key.  All defaults are filled into the parsed config so
the effective configuration can be echoed next to the outputs and re-run
bit-identically.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .scenarios import KINDS, ScenarioSpec


class ConfigError(ValueError):
    pass


_SCENARIO_KEYS = {
    "kind", "alpha", "k", "harmonic", "n_p", "n_b", "v_db", "v_th_p", "v_th_b",
}
_NUMERICS_KEYS = {
    "n_cells", "n_modes", "degree", "order", "cfl", "t_end", "beta_penalty",
    "v_scale", "filter_enabled", "filter_beta",
}
_OUTPUT_KEYS = {
    "dir", "stride", "snapshot_times", "snapshot_nx", "snapshot_nv",
    "v_min", "v_max", "plots",
}


@dataclass
class RunConfig:
    scenario: ScenarioSpec
    n_cells: int
    n_modes: int
    degree: int = 2
    order: int = 2
    cfl: float = 0.3
    t_end: float = 10.0
    beta_penalty: float = 1.0
    v_scale: float = 1.0
    filter_enabled: bool = True
    filter_beta: float = 36.0
    output_dir: str = "out"
    stride: int = 1
    snapshot_times: tuple[float, ...] = ()
    snapshot_nx: int = 128
    snapshot_nv: int = 128
    v_window: tuple[float, float] = (-8.0, 8.0)
    plots: bool = True
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        checks = [
            ("n_cells", self.n_cells > 0),
            ("n_modes", self.n_modes >= 3),
            ("degree", self.degree >= 0),
            ("order", self.order in (1, 2)),
            ("cfl", 0.0 < self.cfl <= 1.0),
            ("t_end", self.t_end >= 0.0),
            ("beta_penalty", self.beta_penalty > 0.0),
            ("v_scale", self.v_scale > 0.0),
            ("stride", self.stride >= 1),
            ("snapshot_nx", self.snapshot_nx > 0),
            ("snapshot_nv", self.snapshot_nv > 0),
            ("v_max", self.v_window[1] > self.v_window[0]),
        ]
        for key, ok in checks:
            if not ok:
                raise ConfigError(f"invalid value for {key!r}")
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_end:
                raise ConfigError(
                    f"invalid value for 'snapshot_times': {t} outside [0, {self.t_end}]"
                )


def _get_typed(section, key, cast, default):
    if key not in section:
        return default
    raw = section[key]
    try:
        if cast is bool:
            lowered = raw.strip().lower()
            if lowered in ("true", "yes", "on", "1"):
                return True
            if lowered in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key!r}: {raw!r}") from exc


def parse_config(path: str | Path) -> RunConfig:
    """Read and validate a run configuration file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read(path, encoding="utf-8")

    for section, allowed in (
        ("scenario", _SCENARIO_KEYS),
        ("numerics", _NUMERICS_KEYS),
        ("output", _OUTPUT_KEYS),
    ):
        if parser.has_section(section):
            unknown = set(parser[section]) - allowed
            if unknown:
                raise ConfigError(
                    f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}"
                )
    unknown_sections = set(parser.sections()) - {"scenario", "numerics", "output"}
    if unknown_sections:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown_sections))}")

    if not parser.has_section("scenario"):
        raise ConfigError("missing [scenario] section")
    sc = parser["scenario"]
    kind = sc.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"invalid value for 'kind': {kind!r}")

    num = parser["numerics"] if parser.has_section("numerics") else {}
    out = parser["output"] if parser.has_section("output") else {}

    if "n_modes" not in num:
        raise ConfigError("'n_modes' must be given explicitly in [numerics]")

    v_scale = _get_typed(num, "v_scale", float, 1.0)
    try:
        spec = ScenarioSpec(
            kind=kind,
            amplitude=_get_typed(sc, "alpha", float, 0.01),
            wavenumber=_get_typed(sc, "k", float, 0.5),
            harmonic=_get_typed(sc, "harmonic", int, 1),
            n_p=_get_typed(sc, "n_p", float, 0.99),
            n_b=_get_typed(sc, "n_b", float, 0.01),
            v_db=_get_typed(sc, "v_db", float, 1.0),
            v_th_p=_get_typed(sc, "v_th_p", float, 0.28284271),
            v_th_b=_get_typed(sc, "v_th_b", float, 7.0710678e-2),
            v_scale=v_scale,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [scenario] settings: {exc}") from exc

    snapshot_times = ()
    if "snapshot_times" in out:
        raw = out["snapshot_times"].strip()
        if raw:
            try:
                snapshot_times = tuple(float(v) for v in raw.split(","))
            except ValueError:
                raise ConfigError(
                    f"invalid value for 'snapshot_times': {raw!r}"
                ) from None

    cfg = RunConfig(
        scenario=spec,
        n_cells=_get_typed(num, "n_cells", int, 64),
        n_modes=_get_typed(num, "n_modes", int, 64),
        degree=_get_typed(num, "degree", int, 2),
        order=_get_typed(num, "order", int, 2),
        cfl=_get_typed(num, "cfl", float, 0.3),
        t_end=_get_typed(num, "t_end", float, 10.0),
        beta_penalty=_get_typed(num, "beta_penalty", float, 1.0),
        v_scale=v_scale,
        filter_enabled=_get_typed(num, "filter_enabled", bool, True),
        filter_beta=_get_typed(num, "filter_beta", float, 36.0),
        output_dir=out.get("dir", "out") if out else "out",
        stride=_get_typed(out, "stride", int, 1),
        snapshot_times=snapshot_times,
        snapshot_nx=_get_typed(out, "snapshot_nx", int, 128),
        snapshot_nv=_get_typed(out, "snapshot_nv", int, 128),
        v_window=(
            _get_typed(out, "v_min", float, -8.0),
            _get_typed(out, "v_max", float, 8.0),
        ),
        plots=_get_typed(out, "plots", bool, True),
    )
    cfg.validate()
    return cfg


def render_config(cfg: RunConfig) -> str:
    """Effective configuration as INI text; parsing it back reproduces the run."""
    sc = cfg.scenario
    lines = [
        "[scenario]",
        f"kind = {sc.kind}",
        f"alpha = {sc.amplitude!r}",
        f"k = {sc.wavenumber!r}",
        f"harmonic = {sc.harmonic}",
        f"n_p = {sc.n_p!r}",
        f"n_b = {sc.n_b!r}",
        f"v_db = {sc.v_db!r}",
        f"v_th_p = {sc.v_th_p!r}",
        f"v_th_b = {sc.v_th_b!r}",
        "",
        "[numerics]",
        f"n_cells = {cfg.n_cells}",
        f"n_modes = {cfg.n_modes}",
        f"degree = {cfg.degree}",
        f"order = {cfg.order}",
        f"cfl = {cfg.cfl!r}",
        f"t_end = {cfg.t_end!r}",
        f"beta_penalty = {cfg.beta_penalty!r}",
        f"v_scale = {cfg.v_scale!r}",
        f"filter_enabled = {str(cfg.filter_enabled).lower()}",
        f"filter_beta = {cfg.filter_beta!r}",
        "",
        "[output]",
        f"dir = {cfg.output_dir}",
        f"stride = {cfg.stride}",
        f"snapshot_times = {', '.join(repr(t) for t in cfg.snapshot_times)}",
        f"snapshot_nx = {cfg.snapshot_nx}",
        f"snapshot_nv = {cfg.snapshot_nv}",
        f"v_min = {cfg.v_window[0]!r}",
        f"v_max = {cfg.v_window[1]!r}",
        f"plots = {str(cfg.plots).lower()}",
        "",
    ]
    return "\n".join(lines)
