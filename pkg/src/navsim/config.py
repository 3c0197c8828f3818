"""Strict INI configuration files for scenarios and runs.

The file format is deliberately rigid: unknown sections or keys are errors,
as are missing required keys, so that archived scenario files stay
unambiguous.  Two bundled configurations (``scenario_a.ini``,
``scenario_b.ini``) describe the level-flight cases used throughout the
test suite.
"""

import configparser
from dataclasses import dataclass
from importlib import resources
from math import radians
from pathlib import Path

from .geo import EarthModel, WGS84
from .navigator import AttitudeSource, RunConfig
from .scenarios import Scenario, ScenarioKind
from .updates import PosAlg, VelAlg

__all__ = ["ConfigError", "CliConfig", "load_config", "bundled_config_path"]


class ConfigError(ValueError):
    """Malformed, incomplete or unknown configuration content."""


_SCENARIO_KEYS = {
    "kind",
    "lat_deg",
    "lon_deg",
    "h0_m",
    "ve0_mps",
    "duration_s",
    "dt_s",
    "substeps",
    "a_mps2",
    "omega_rad_s",
}
_RUN_KEYS = {"vel_alg", "pos_alg", "attitude"}
_COMPARE_KEYS = {"algorithms"}
_EARTH_KEYS = {"omega_e", "gravity"}
_OUTPUT_KEYS = {"csv", "plot", "plot_path"}
_SECTIONS = {
    "scenario": _SCENARIO_KEYS,
    "run": _RUN_KEYS,
    "compare": _COMPARE_KEYS,
    "earth": _EARTH_KEYS,
    "output": _OUTPUT_KEYS,
}


@dataclass(frozen=True)
class CliConfig:
    scenario: Scenario
    vel_alg: VelAlg
    pos_alg: PosAlg
    attitude_source: AttitudeSource
    compare_algorithms: tuple[str, ...]
    csv_path: str | None
    plot: bool
    plot_path: str | None

    def run_config(self) -> RunConfig:
        return RunConfig(self.scenario, self.vel_alg, self.pos_alg, self.attitude_source)

    def compare_configs(self) -> list[RunConfig]:
        cfgs = []
        for name in self.compare_algorithms:
            cfgs.append(
                RunConfig(
                    self.scenario, VelAlg(name), PosAlg(name), self.attitude_source
                )
            )
        return cfgs


def _get_float(section, key, default=None):
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"missing required key '{key}' in [{section.name}]")
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"key '{key}': cannot parse '{raw}' as a number") from exc


def _get_bool(section, key, default=False):
    raw = section.get(key)
    if raw is None:
        return default
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"key '{key}': cannot parse '{raw}' as a boolean")


def _build_earth(section) -> EarthModel:
    if section is None:
        return WGS84
    omega_e = _get_float(section, "omega_e", WGS84.omega_e)
    gravity = section.get("gravity", "somigliana").strip().lower()
    constant = None
    if gravity != "somigliana":
        try:
            constant = float(gravity)
        except ValueError as exc:
            raise ConfigError(
                f"gravity must be 'somigliana' or a constant value, got '{gravity}'"
            ) from exc
    return EarthModel(omega_e=omega_e, constant_gravity=constant)


def load_config(
    path, dt_override: float | None = None, duration_override: float | None = None
) -> CliConfig:
    """Parse and validate a configuration file.

    ``dt_override`` / ``duration_override`` replace the scenario values
    (command-line flags); all invariants are re-checked afterwards.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    for name in parser.sections():
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
        for key in parser[name]:
            if key not in _SECTIONS[name]:
                raise ConfigError(f"unknown key '{key}' in [{name}]")
    if "scenario" not in parser:
        raise ConfigError("missing required section [scenario]")

    sect = parser["scenario"]
    kind_raw = sect.get("kind")
    if kind_raw is None:
        raise ConfigError("missing required key 'kind' in [scenario]")
    try:
        kind = ScenarioKind(kind_raw.strip().lower())
    except ValueError as exc:
        choices = ", ".join(k.value for k in ScenarioKind)
        raise ConfigError(f"kind must be one of: {choices}") from exc

    model = _build_earth(parser["earth"] if "earth" in parser else None)
    try:
        scenario = Scenario(
            kind=kind,
            lat0=radians(_get_float(sect, "lat_deg")),
            lon0=radians(_get_float(sect, "lon_deg", 0.0)),
            h0=_get_float(sect, "h0_m", 0.0),
            ve0=_get_float(sect, "ve0_mps", 500.0),
            dt=dt_override if dt_override is not None else _get_float(sect, "dt_s"),
            duration=(
                duration_override
                if duration_override is not None
                else _get_float(sect, "duration_s")
            ),
            accel_amplitude=_get_float(sect, "a_mps2", 0.0),
            accel_omega=_get_float(sect, "omega_rad_s", 0.0),
            substeps=int(_get_float(sect, "substeps", 100)),
            model=model,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc

    vel_alg, pos_alg = VelAlg.DERIVED, PosAlg.DERIVED
    attitude = AttitudeSource.INTEGRATE_GYRO
    if "run" in parser:
        run_sect = parser["run"]
        try:
            vel_alg = VelAlg(run_sect.get("vel_alg", "derived").strip().lower())
            pos_alg = PosAlg(run_sect.get("pos_alg", "derived").strip().lower())
            attitude = AttitudeSource(
                run_sect.get("attitude", "integrate_gyro").strip().lower()
            )
        except ValueError as exc:
            raise ConfigError(f"invalid [run] section: {exc}") from exc

    algorithms: tuple[str, ...] = ()
    if "compare" in parser:
        raw = parser["compare"].get("algorithms", "")
        names = [n.strip().lower() for n in raw.split(",") if n.strip()]
        for n in names:
            try:
                VelAlg(n)
            except ValueError as exc:
                raise ConfigError(f"unknown algorithm '{n}' in [compare]") from exc
        algorithms = tuple(names)

    csv_path = plot_path = None
    plot = False
    if "output" in parser:
        out = parser["output"]
        csv_path = out.get("csv")
        plot = _get_bool(out, "plot", False)
        plot_path = out.get("plot_path")

    return CliConfig(
        scenario=scenario,
        vel_alg=vel_alg,
        pos_alg=pos_alg,
        attitude_source=attitude,
        compare_algorithms=algorithms,
        csv_path=csv_path,
        plot=plot,
        plot_path=plot_path,
    )


def bundled_config_path(name: str) -> Path:
    """Filesystem path of a configuration shipped with the package."""
    return Path(resources.files("navsim").joinpath("configs", name))
