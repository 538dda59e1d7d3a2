"""Sweep configuration: flat key = value text files with strict validation.

Unknown keys fail fast, every error names the offending key, and symbolic
pump-angle tokens (``golden``, ``pi/2``, ``mK``) are expanded here so config
files never carry hand-transcribed irrational numbers.
"""

import math
from dataclasses import dataclass, field

from .dmrg import DmrgConfig
from .model import GOLDEN_ANGLE, mode_count_angle
from .selfconsistency import ScfConfig

REQUIRED_KEYS = ("n_sites", "j_ising", "delta_c_min", "delta_c_max", "delta_c_count",
                 "v_pump_min", "v_pump_max", "v_pump_count")

_EPS_COLUMNS = ("alpha_abs", "m0z", "m0x", "mpiz", "mpix", "qb_mean", "p_mean")

_SCHEMA = {
    # model
    "n_sites": int, "omega0": float, "kappa": float,
    "j_ising": "float_list", "phi": "phi_list", "m_modes": int,
    # grids
    "delta_c_min": float, "delta_c_max": float, "delta_c_count": int,
    "v_pump_min": float, "v_pump_max": float, "v_pump_count": int,
    # scf
    "alpha_tol": float, "max_iterations": int, "damping": float,
    "collapse_tol": float, "pinning_eps": float, "solver_backend": str,
    "accelerate": bool,
    # dmrg
    "max_bond": int, "svd_cutoff": float, "max_sweeps": int,
    "energy_tol": float, "local_eig_tol": float, "noise": float,
    # execution / output
    "workers": int, "stride": int, "seed": int, "out_dir": str,
    "emit_csv": bool, "emit_json": bool, "emit_heatmaps": bool,
    "local_rows_origin": int, "eps_zero": float,
}
_SCHEMA.update({f"eps_zero_{c}": float for c in _EPS_COLUMNS})

_DEFAULTS = {
    "omega0": 0.1, "kappa": 10.0, "phi": (0.0,), "m_modes": 0,
    "alpha_tol": 1e-7, "max_iterations": 200, "damping": 0.5,
    "collapse_tol": 0.0, "pinning_eps": 1e-6, "solver_backend": "dmrg",
    "accelerate": False,
    "max_bond": 64, "svd_cutoff": 1e-10, "max_sweeps": 30,
    "energy_tol": 1e-10, "local_eig_tol": 1e-12, "noise": 0.0,
    "workers": 1, "stride": 1, "seed": 12061, "out_dir": "out",
    "emit_csv": True, "emit_json": True, "emit_heatmaps": True,
    "local_rows_origin": 0, "eps_zero": 1e-3,
}


class ConfigError(ValueError):
    pass


def parse_phi_token(token):
    """One pump angle: a float in radians or one of the symbolic forms.

    Accepted: ``golden`` (arccos(1/5)), ``mK`` with integer K (the K-mode
    angle arccos(1/(2K-1))), ``pi``, ``pi/D`` and plain numeric literals.
    """
    t = str(token).strip().lower()
    if t == "golden":
        return GOLDEN_ANGLE
    if t.startswith("m") and t[1:].isdigit():
        return mode_count_angle(int(t[1:]))
    if t == "pi":
        return math.pi
    if t.startswith("pi/"):
        try:
            return math.pi / float(t[3:])
        except ValueError:
            raise ConfigError(f"phi: bad token {token!r}") from None
    try:
        return float(t)
    except ValueError:
        raise ConfigError(f"phi: bad token {token!r}") from None


def _parse_value(key, raw):
    kind = _SCHEMA[key]
    raw = raw.strip()
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is bool:
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if kind is str:
            return raw
        if kind == "float_list":
            return tuple(float(x) for x in raw.split(","))
        if kind == "phi_list":
            return tuple(parse_phi_token(x) for x in raw.split(","))
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r} as {kind}") from None
    raise AssertionError(kind)


@dataclass(frozen=True)
class SweepConfig:
    """Fully resolved sweep plan: grids, solver settings, output options."""

    n_sites: int
    omega0: float
    kappa: float
    j_values: tuple
    phi_values: tuple
    delta_c_grid: tuple
    v_pump_grid: tuple
    scf: ScfConfig
    dmrg: DmrgConfig
    workers: int = 1
    stride: int = 1
    seed: int = 12061
    out_dir: str = "out"
    emit_csv: bool = True
    emit_json: bool = True
    emit_heatmaps: bool = True
    local_rows_origin: int = 0
    eps_zero: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.delta_c_grid or not self.v_pump_grid:
            raise ConfigError("grids must contain at least one point")
        if self.workers < 1 or self.stride < 1:
            raise ConfigError("workers and stride must be >= 1")


def _grid(lo, hi, count, key):
    if count < 1:
        raise ConfigError(f"key {key}_count: must be >= 1")
    if count == 1:
        return (float(lo),)
    step = (hi - lo) / (count - 1)
    return tuple(float(lo + i * step) for i in range(count))


def config_from_mapping(raw):
    """Validate a {key: string} mapping and build a SweepConfig."""
    vals = {}
    for key, rawval in raw.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}")
        vals[key] = rawval if not isinstance(rawval, str) else _parse_value(key, rawval)
    missing = [k for k in REQUIRED_KEYS if k not in vals]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    merged = dict(_DEFAULTS)
    merged.update(vals)

    phi_values = tuple(merged["phi"])
    if merged["m_modes"]:
        angle = mode_count_angle(merged["m_modes"])
        if not any(abs(angle - p) < 1e-12 for p in phi_values):
            phi_values = phi_values + (angle,)

    dmrg = DmrgConfig(max_bond=merged["max_bond"], svd_cutoff=merged["svd_cutoff"],
                      max_sweeps=merged["max_sweeps"], energy_tol=merged["energy_tol"],
                      local_eig_tol=merged["local_eig_tol"], noise=merged["noise"],
                      seed=merged["seed"])
    scf = ScfConfig(alpha_tol=merged["alpha_tol"], max_iterations=merged["max_iterations"],
                    damping=merged["damping"], solver_backend=merged["solver_backend"],
                    pinning_eps=merged["pinning_eps"], collapse_tol=merged["collapse_tol"],
                    accelerate=merged["accelerate"], dmrg=dmrg)
    eps = {c: merged["eps_zero"] for c in _EPS_COLUMNS}
    for c in _EPS_COLUMNS:
        key = f"eps_zero_{c}"
        if key in vals:
            eps[c] = merged[key]

    return SweepConfig(
        n_sites=merged["n_sites"], omega0=merged["omega0"], kappa=merged["kappa"],
        j_values=tuple(merged["j_ising"]) if isinstance(merged["j_ising"], tuple)
        else (float(merged["j_ising"]),),
        phi_values=phi_values,
        delta_c_grid=_grid(merged["delta_c_min"], merged["delta_c_max"],
                           merged["delta_c_count"], "delta_c"),
        v_pump_grid=_grid(merged["v_pump_min"], merged["v_pump_max"],
                          merged["v_pump_count"], "v_pump"),
        scf=scf, dmrg=dmrg,
        workers=merged["workers"], stride=merged["stride"], seed=merged["seed"],
        out_dir=merged["out_dir"], emit_csv=merged["emit_csv"],
        emit_json=merged["emit_json"], emit_heatmaps=merged["emit_heatmaps"],
        local_rows_origin=merged["local_rows_origin"], eps_zero=eps,
    )


def parse_config(path, overrides=None):
    """Read a ``key = value`` config file (# comments, blank lines allowed).

    ``overrides`` is an optional {key: string} mapping applied on top, which
    is how command-line flags take precedence over file keys.
    """
    raw = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as err:
        raise ConfigError(f"cannot read config file {path!r}: {err}") from None
    for lineno, line in enumerate(lines, 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = stripped.partition("=")
        key = key.strip()
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = val.strip()
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_mapping(raw)
