"""Run configuration in INI form (sections of ``key = value`` lines).

Grammar
-------
``[problem]``
    ``family`` is one of ``linear_affine``, ``autonomous_linear``,
    ``logistic``, ``forced_rotation``, ``limit_cycle``, ``zero``,
    ``delay_coefficient_logistic``.  Remaining keys are family parameters:

    * matrices (``a_matrix``) are row-major, entries separated by commas and
      rows by semicolons: ``1, 5; 0, -2``;
    * Fourier forcing (``forcing``) is a semicolon-separated list of
      ``component, wavenumber, re, im`` quadruples with ``wavenumber >= 0``;
    * scalars (``a``, ``c``, ``beta``, ``epsilon``, ``omega``, ``dim``) are
      plain numbers.

``[discretization]`` ``K``.
``[newton]`` ``max_iter``, ``tol_residual``, ``tol_step``, ``damping``.
``[floquet]`` ``steps``, ``tol_nondeg``.
``[continuation]`` ``tau_target_pos``, ``tau_target_neg``, ``initial_step``,
``min_step``, ``max_step``, ``grow``.
``[seed]`` ``guess`` (comma-separated initial point for shooting).
``[output]`` ``dir``.
``[run]`` ``rng_seed``.
``[verify]`` ``steps_per_unit``, ``tolerance``, ``min_tau``.

Every section except ``[problem]`` is optional and falls back to defaults.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from . import fields as vf
from .continuation import StepControl
from .errors import ConfigError
from .floquet import DEFAULT_STEPS, TOL_NONDEG
from .fourier import DEFAULT_K, PeriodicMap
from .orbit import NewtonSettings

__all__ = [
    "RunConfig",
    "FAMILIES",
    "parse_config",
    "load_config",
    "build_field",
    "problem_digest",
    "parse_matrix",
    "parse_forcing",
]

# family -> {parameter: kind}; kinds: matrix, forcing, float, int
FAMILIES = {
    "linear_affine": {"a_matrix": "matrix", "forcing": "forcing"},
    "autonomous_linear": {"a_matrix": "matrix"},
    "logistic": {"a": "float", "c": "float"},
    "forced_rotation": {"a_matrix": "matrix", "epsilon": "float"},
    "limit_cycle": {"omega": "float"},
    "zero": {"dim": "int"},
    "delay_coefficient_logistic": {"a": "float", "c": "float", "beta": "float"},
}
REQUIRED = {"linear_affine": ("a_matrix",), "autonomous_linear": ("a_matrix",)}


def parse_matrix(text):
    rows = [r for r in text.split(";") if r.strip()]
    try:
        M = [[float(v) for v in r.split(",")] for r in rows]
    except ValueError as exc:
        raise ConfigError(f"bad matrix entry in {text!r}") from exc
    if not M or any(len(r) != len(M) for r in M):
        raise ConfigError(f"matrix {text!r} is not square")
    return M


def parse_forcing(text):
    out = []
    for item in (s for s in text.split(";") if s.strip()):
        parts = item.split(",")
        if len(parts) != 4:
            raise ConfigError(f"forcing entry {item.strip()!r} needs 'component, k, re, im'")
        try:
            j, k = int(parts[0]), int(parts[1])
            re, im = float(parts[2]), float(parts[3])
        except ValueError as exc:
            raise ConfigError(f"bad forcing entry {item.strip()!r}") from exc
        if j < 0 or k < 0:
            raise ConfigError("forcing component and wavenumber must be non-negative")
        if k == 0 and im != 0.0:
            raise ConfigError("the k = 0 forcing mode must be real")
        out.append([j, k, re, im])
    return out


def _fmt_float(v):
    return repr(float(v))


def _fmt_param(kind, value):
    if kind == "matrix":
        return "; ".join(", ".join(_fmt_float(v) for v in row) for row in value)
    if kind == "forcing":
        return "; ".join(f"{j}, {k}, {_fmt_float(re)}, {_fmt_float(im)}" for j, k, re, im in value)
    if kind == "int":
        return str(int(value))
    return _fmt_float(value)


def _parse_param(kind, text):
    if kind == "matrix":
        return parse_matrix(text)
    if kind == "forcing":
        return parse_forcing(text)
    try:
        return int(text) if kind == "int" else float(text)
    except ValueError as exc:
        raise ConfigError(f"expected a number, got {text!r}") from exc


@dataclass
class RunConfig:
    family: str
    params: dict = dc_field(default_factory=dict)
    K: int = DEFAULT_K
    newton: NewtonSettings = dc_field(default_factory=NewtonSettings)
    floquet_steps: int = DEFAULT_STEPS
    tol_nondeg: float = TOL_NONDEG
    tau_target_pos: float = 0.3
    tau_target_neg: float = -0.3
    step: StepControl = dc_field(default_factory=StepControl)
    seed_guess: tuple = (0.0,)
    output_dir: str = "out"
    rng_seed: int = 0
    verify_steps_per_unit: int = 4096
    verify_tolerance: float = 1e-4
    verify_min_tau: float = 0.01

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        allowed = FAMILIES[self.family]
        unknown = set(self.params) - set(allowed)
        if unknown:
            raise ConfigError(f"unknown parameters for {self.family}: {sorted(unknown)}")
        for name in REQUIRED.get(self.family, ()):
            if name not in self.params:
                raise ConfigError(f"family {self.family} needs parameter {name!r}")
        if self.K < 4:
            raise ConfigError("K must be at least 4")
        positive = {
            "floquet steps": self.floquet_steps,
            "tol_nondeg": self.tol_nondeg,
            "verify steps_per_unit": self.verify_steps_per_unit,
            "verify tolerance": self.verify_tolerance,
        }
        for name, v in positive.items():
            if not v > 0:
                raise ConfigError(f"{name} must be positive")
        if not self.tau_target_neg <= 0.0 <= self.tau_target_pos:
            raise ConfigError("need tau_target_neg <= 0 <= tau_target_pos")
        self.seed_guess = tuple(float(v) for v in self.seed_guess)

    # -- serialization --------------------------------------------------------

    def to_parser(self):
        cp = configparser.ConfigParser(interpolation=None)
        kinds = FAMILIES[self.family]
        cp["problem"] = {"family": self.family,
                         **{k: _fmt_param(kinds[k], v) for k, v in sorted(self.params.items())}}
        cp["discretization"] = {"K": str(self.K)}
        nw = self.newton
        cp["newton"] = {"max_iter": str(nw.max_iter), "tol_residual": _fmt_float(nw.tol_residual),
                        "tol_step": _fmt_float(nw.tol_step), "damping": nw.damping}
        cp["floquet"] = {"steps": str(self.floquet_steps), "tol_nondeg": _fmt_float(self.tol_nondeg)}
        st = self.step
        cp["continuation"] = {
            "tau_target_pos": _fmt_float(self.tau_target_pos),
            "tau_target_neg": _fmt_float(self.tau_target_neg),
            "initial_step": _fmt_float(st.initial), "min_step": _fmt_float(st.min_step),
            "max_step": _fmt_float(st.max_step), "grow": _fmt_float(st.grow),
        }
        cp["seed"] = {"guess": ", ".join(_fmt_float(v) for v in self.seed_guess)}
        cp["output"] = {"dir": self.output_dir}
        cp["run"] = {"rng_seed": str(self.rng_seed)}
        cp["verify"] = {"steps_per_unit": str(self.verify_steps_per_unit),
                        "tolerance": _fmt_float(self.verify_tolerance),
                        "min_tau": _fmt_float(self.verify_min_tau)}
        return cp

    def to_text(self):
        lines = []
        for name, section in self.to_parser().items():
            if name == "DEFAULT":
                continue
            lines.append(f"[{name}]")
            lines.extend(f"{k} = {v}" for k, v in section.items())
            lines.append("")
        return "\n".join(lines)

    def problem_dict(self):
        return {"family": self.family, "params": self.params, "K": self.K}

    def as_dict(self):
        d = asdict(self)
        d["newton"] = asdict(self.newton)
        d["step"] = asdict(self.step)
        d["seed_guess"] = list(self.seed_guess)
        return d


def _get(cp, section, key, conv, default):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key).strip()
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc


def parse_config(text):
    """Parse configuration text into a :class:`RunConfig`; raises :class:`ConfigError`."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc
    known = {"problem", "discretization", "newton", "floquet", "continuation", "seed",
             "output", "run", "verify"}
    extra = set(cp.sections()) - known
    if extra:
        raise ConfigError(f"unknown sections: {sorted(extra)}")
    if not cp.has_section("problem") or not cp.has_option("problem", "family"):
        raise ConfigError("[problem] family is required")
    family = cp.get("problem", "family").strip()
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    kinds = FAMILIES[family]
    params = {}
    for key, raw in cp.items("problem"):
        if key == "family":
            continue
        if key not in kinds:
            raise ConfigError(f"unknown parameter {key!r} for family {family}")
        params[key] = _parse_param(kinds[key], raw)
    for name in REQUIRED.get(family, ()):
        if name not in params:
            raise ConfigError(f"family {family} needs parameter {name!r}")

    d_nw, d_st = NewtonSettings(), StepControl()
    try:
        newton = NewtonSettings(
            max_iter=_get(cp, "newton", "max_iter", int, d_nw.max_iter),
            tol_residual=_get(cp, "newton", "tol_residual", float, d_nw.tol_residual),
            tol_step=_get(cp, "newton", "tol_step", float, d_nw.tol_step),
            damping=_get(cp, "newton", "damping", str, d_nw.damping),
        )
        step = StepControl(
            initial=_get(cp, "continuation", "initial_step", float, d_st.initial),
            min_step=_get(cp, "continuation", "min_step", float, d_st.min_step),
            max_step=_get(cp, "continuation", "max_step", float, d_st.max_step),
            grow=_get(cp, "continuation", "grow", float, d_st.grow),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    def floats(s):
        return tuple(float(v) for v in s.split(",") if v.strip())

    return RunConfig(
        family=family,
        params=params,
        K=_get(cp, "discretization", "K", int, DEFAULT_K),
        newton=newton,
        floquet_steps=_get(cp, "floquet", "steps", int, DEFAULT_STEPS),
        tol_nondeg=_get(cp, "floquet", "tol_nondeg", float, TOL_NONDEG),
        tau_target_pos=_get(cp, "continuation", "tau_target_pos", float, 0.3),
        tau_target_neg=_get(cp, "continuation", "tau_target_neg", float, -0.3),
        step=step,
        seed_guess=_get(cp, "seed", "guess", floats, None) or _default_guess(family, params),
        output_dir=_get(cp, "output", "dir", str, "out"),
        rng_seed=_get(cp, "run", "rng_seed", int, 0),
        verify_steps_per_unit=_get(cp, "verify", "steps_per_unit", int, 4096),
        verify_tolerance=_get(cp, "verify", "tolerance", float, 1e-4),
        verify_min_tau=_get(cp, "verify", "min_tau", float, 0.01),
    )


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def _default_guess(family, params):
    if family in ("linear_affine", "autonomous_linear"):
        return (0.0,) * len(params["a_matrix"])
    if family == "zero":
        return (0.0,) * int(params.get("dim", 1))
    if family == "limit_cycle":
        return (1.0, 0.0)
    if family == "forced_rotation":
        return (0.0, 0.0)
    if family == "logistic":
        return (1.5,)
    return (0.0,)


def build_field(config):
    """Instantiate the vector field named by ``config.family``."""
    p = config.params
    fam = config.family
    if fam in ("linear_affine", "autonomous_linear"):
        B = np.asarray(p["a_matrix"], dtype=float)
        if fam == "autonomous_linear":
            return vf.autonomous_linear(B)
        return vf.linear_affine(B, _forcing_map(p.get("forcing", []), B.shape[0]))
    if fam == "logistic":
        return vf.logistic(p.get("a", 1.5), p.get("c", 1.0))
    if fam == "forced_rotation":
        return vf.forced_rotation(p.get("a_matrix"), p.get("epsilon", 1.0))
    if fam == "limit_cycle":
        return vf.limit_cycle(p.get("omega", 2.0 * np.pi))
    if fam == "zero":
        return vf.zero_field(int(p.get("dim", 1)))
    return vf.delay_coefficient_logistic(p.get("a", -1.0), p.get("c", 1.0), p.get("beta", 0.5))


def _forcing_map(entries, dim):
    kmax = max([1] + [k for _, k, _, _ in entries])
    modes = {}
    for j, k, re, im in entries:
        if j >= dim:
            raise ConfigError(f"forcing component {j} out of range for dimension {dim}")
        modes.setdefault(k, np.zeros(dim, dtype=complex))[j] += re + 1j * im
    return PeriodicMap.from_modes(modes, dim=dim, K=kmax)


def problem_digest(config):
    """SHA-256 of the canonical problem description (family, parameters, K)."""
    blob = json.dumps(config.problem_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
