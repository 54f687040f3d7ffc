"""Run configuration: flat ``key = value`` files with typed defaults."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, asdict, replace
from pathlib import Path

from nsp_wavelab.thermo import r1_velocity, s2_velocity


class ConfigError(ValueError):
    pass


# "pinned" holds v and u at the composite values; "outflow" advances v with the
# one-sided mass equation; "outflow-neumann" also extrapolates the velocity perturbation.
LEFT_BOUNDARIES = ("pinned", "outflow", "outflow-neumann")


# Canonical fan: v- = 1, u- = 0, v_m = 1.1, v+ = 1.2.
_U_PLUS = s2_velocity(1.1, r1_velocity(1.0, 0.0, 1.1), 1.2)


@dataclass(frozen=True)
class RunConfig:
    v_minus: float = 1.0
    u_minus: float = 0.0
    v_plus: float = 1.2
    u_plus: float = _U_PLUS
    L_dom: float = 150.0
    dxi: float = 0.05
    t_final: float = 100.0
    report_interval: float = 1.0
    A_v: float = 0.01
    A_u: float = 0.01
    xi0_v: float = 0.0
    xi0_u: float = 0.0
    w_v: float = 2.0
    w_u: float = 2.0
    c0: float = 1.0
    cfl_h: float = 0.4
    cfl_p: float = 0.25
    snapshots: tuple[float, ...] = ()
    seed: int = 0
    left_boundary: str = "outflow"
    output_dir: str = "out"
    verify_profile: str = "quick"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("v_minus", "v_plus", "L_dom", "dxi", "w_v", "w_u", "c0", "cfl_h", "cfl_p",
                     "report_interval"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name}: must be positive, got {getattr(self, name)!r}")
        if self.t_final < 0:
            raise ConfigError(f"t_final: must be nonnegative, got {self.t_final!r}")
        if not self.v_plus > self.v_minus:
            raise ConfigError(
                "v_plus: must exceed v_minus for the right state to lie in the Gamma region "
                f"(got v_minus={self.v_minus}, v_plus={self.v_plus})")
        if self.dxi >= self.L_dom:
            raise ConfigError("dxi: must be smaller than L_dom")
        if self.left_boundary not in LEFT_BOUNDARIES:
            raise ConfigError(f"left_boundary: expected one of {LEFT_BOUNDARIES}, got {self.left_boundary!r}")
        if self.verify_profile not in ("quick", "full"):
            raise ConfigError(f"verify_profile: expected 'quick' or 'full', got {self.verify_profile!r}")

    def replace(self, **kw) -> "RunConfig":
        return replace(self, **kw)

    def as_text(self) -> str:
        lines = []
        for f in fields(self):
            val = getattr(self, f.name)
            if isinstance(val, tuple):
                val = ",".join(repr(float(x)) for x in val)
            elif isinstance(val, float):
                val = repr(val)
            lines.append(f"{f.name} = {val}")
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return asdict(self)


_FIELDS = {f.name: f for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    default = _FIELDS[key].default
    raw = raw.strip()
    try:
        if isinstance(default, tuple):
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError("not finite")
            return val
        return raw
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r} ({exc})") from None


def parse_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"{key}: unknown key (line {lineno})")
        values[key] = _coerce(key, raw)
    return values


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the file, then explicit overrides."""
    values = {}
    if path is not None:
        values.update(parse_text(Path(path).read_text()))
    for key, raw in (overrides or {}).items():
        if key not in _FIELDS:
            raise ConfigError(f"{key}: unknown key")
        values[key] = _coerce(key, raw) if isinstance(raw, str) else raw
    return RunConfig(**values)
