"""Run configuration: a flat INI-style text format with section headers.

Grammar
-------
::

    file      := { blank | comment | section | pair }
    section   := "[" name "]"
    pair      := key "=" value
    comment   := ("#" | ";") text
    value     := float | integer | complex | word | boolean

* Section and key names are lower case; every key belongs to exactly one
  section (listed in ``SCHEMA``). Unknown sections or keys are errors.
* Missing keys take their defaults, which describe the non-resonant OBH
  run (omega_A = 0.1, atoms at r = 8.1 pi).
* Floats accept anything ``float()`` parses; complex values use Python
  syntax such as ``4+0.33j``; booleans are ``true``/``false``.

The canonical form (``serialize``) lists every section and key in schema
order, writes floats with 17 significant digits, and ends with a newline.
``serialize(parse(text))`` is a fixed point of ``serialize . parse``.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace

import numpy as np

SCENARIOS = ("obh", "vacuum")


class ConfigError(ValueError):
    """Invalid configuration text or values; the message names the field."""


# (section, key, type) in canonical order
SCHEMA = (
    ("geometry", "a_s", float),
    ("geometry", "a_c", float),
    ("geometry", "eps_core", complex),
    ("lorentz", "omega_p", float),
    ("lorentz", "omega_0", float),
    ("lorentz", "gamma", float),
    ("layers", "shell_layers", int),
    ("layers", "sampling", str),
    ("atoms", "omega_a", float),
    ("atoms", "r", float),
    ("numerics", "rel_tol", float),
    ("numerics", "n_max", int),
    ("numerics", "branch_window", float),
    ("numerics", "n_stop", int),
    ("numerics", "stop_tol", float),
    ("numerics", "dispersion_lo", float),
    ("numerics", "dispersion_hi", float),
    ("time", "t_max", float),
    ("time", "samples", int),
    ("greens", "r_field", float),
    ("greens", "phi_field", float),
    ("greens", "z_field", float),
    ("greens", "r_source", float),
    ("greens", "phi_source", float),
    ("greens", "z_source", float),
    ("output", "scenario", str),
    ("output", "path", str),
    ("output", "doubled_negativity", bool),
)


@dataclass(frozen=True)
class RunConfig:
    a_s: float = 8 * np.pi
    a_c: float = 4 * np.pi
    eps_core: complex = 4 + 0.33j
    omega_p: float = 0.1
    omega_0: float = 1.0
    gamma: float = 0.01
    shell_layers: int = 10
    sampling: str = "inner"
    omega_a: float = 0.1
    r: float = 8.1 * np.pi
    rel_tol: float = 1e-8
    n_max: int = 2048
    branch_window: float = 0.25
    n_stop: int = 5
    stop_tol: float = 1e-10
    dispersion_lo: float = 0.01
    dispersion_hi: float = 5.0
    t_max: float = 50.0
    samples: int = 5001
    r_field: float = 8.1 * np.pi
    phi_field: float = 0.0
    z_field: float = 0.0
    r_source: float = 8.1 * np.pi
    phi_source: float = np.pi
    z_source: float = 0.0
    scenario: str = "obh"
    path: str = "-"
    doubled_negativity: bool = False

    def validate(self):
        """Raise ConfigError naming the first offending field."""
        positive = ("a_s", "a_c", "omega_0", "omega_a", "r", "rel_tol", "branch_window",
                    "stop_tol", "dispersion_lo", "dispersion_hi", "t_max", "r_field", "r_source")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("omega_p", "gamma"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative, got {getattr(self, name)!r}")
        if not self.a_c < self.a_s:
            raise ConfigError(f"a_c must be smaller than a_s ({self.a_c} >= {self.a_s})")
        if self.shell_layers < 1:
            raise ConfigError("shell_layers must be >= 1")
        if self.sampling not in ("inner", "midpoint"):
            raise ConfigError(f"sampling must be inner or midpoint, got {self.sampling!r}")
        if not self.r > self.a_s:
            raise ConfigError(f"r must exceed a_s (atoms outside the shell): r={self.r}, a_s={self.a_s}")
        for name in ("r_field", "r_source"):
            if not getattr(self, name) > self.a_s:
                raise ConfigError(f"{name} must exceed a_s")
        if self.n_max < 1 or self.n_stop < 1:
            raise ConfigError("n_max and n_stop must be >= 1")
        if self.samples < 2:
            raise ConfigError("samples must be >= 2 (time grid must be monotone)")
        if not self.dispersion_lo < self.dispersion_hi:
            raise ConfigError("dispersion_lo must be below dispersion_hi")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        return self


_TYPES = {key: typ for _, key, typ in SCHEMA}
_SECTION_OF = {key: sec for sec, key, _ in SCHEMA}
assert set(_TYPES) == {f.name for f in fields(RunConfig)}


def _format(value, typ):
    if typ is float:
        return format(float(value), ".17g")
    if typ is complex:
        z = complex(value)
        sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
        return f"{format(z.real, '.17g')}{sign}{format(abs(z.imag), '.17g')}j"
    if typ is bool:
        return "true" if value else "false"
    return str(value)


def _coerce(key, text):
    typ = _TYPES[key]
    text = text.strip()
    try:
        if typ is bool:
            low = text.lower()
            if low not in ("true", "false"):
                raise ValueError(text)
            return low == "true"
        if typ is int:
            return int(text)
        if typ is complex:
            return complex(text.replace(" ", ""))
        if typ is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"{_SECTION_OF[key]}.{key}: cannot read {text!r} as {typ.__name__}") from None


def parse(text: str) -> RunConfig:
    """Parse configuration text; unspecified keys keep their defaults."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    values = {}
    sections = {sec for sec, _, _ in SCHEMA}
    for sec in cp.sections():
        if sec not in sections:
            raise ConfigError(f"unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if key not in _TYPES or _SECTION_OF[key] != sec:
                raise ConfigError(f"unknown key {sec}.{key}")
            values[key] = _coerce(key, raw)
    return RunConfig(**values)


def load(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def serialize(cfg: RunConfig) -> str:
    """Canonical text form."""
    lines = []
    current = None
    for sec, key, typ in SCHEMA:
        if sec != current:
            if current is not None:
                lines.append("")
            lines.append(f"[{sec}]")
            current = sec
        lines.append(f"{key} = {_format(getattr(cfg, key), typ)}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg: RunConfig, **changes) -> RunConfig:
    return replace(cfg, **{k: v for k, v in changes.items() if v is not None})
