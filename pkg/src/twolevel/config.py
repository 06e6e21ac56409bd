"""Scenario files: TOML with one ``[[scenario]]`` table per run.

See ``docs/config.md`` for the schema. Parsing builds every domain object, so
a file that loads here satisfies all type invariants.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .core import (
    FlatBand,
    Lorentzian,
    ModelError,
    ModeSet,
    OhmicFamily,
    TimeGrid,
    TwoLevelParams,
    TwoLevelState,
)
from .kernel import CavityConfig, cavity_mode_set
from .oracle import Coherent, Fock, JCConfig

MODELS = ("sigma_pm", "sigma_z", "both", "jc_oracle", "single_excitation_oracle")
ENVIRONMENTS = ("modes", "lorentzian", "flat_band", "ohmic", "cavity")
SOLVERS = ("volterra", "laplace")
CSV_COLUMNS = (
    "t",
    "u_re",
    "u_im",
    "abs_u",
    "P_emission",
    "rho_ee",
    "rho_eg_re",
    "rho_eg_im",
    "gamma_t",
    "omega_t",
    "masked",
)
SCENARIO_KEYS = {
    "name", "model", "solver", "z_coupling_scale", "outputs",
    "atom", "initial", "grid", "environment", "field", "sweep",
}


class ConfigError(ValueError):
    """Malformed or invalid scenario file (CLI exit code 2)."""


@dataclass(frozen=True)
class Sweep:
    path: str
    values: tuple


@dataclass(frozen=True)
class Scenario:
    name: str
    model: str
    environment: Any
    atom: TwoLevelParams
    initial: TwoLevelState
    grid: TimeGrid
    outputs: tuple[str, ...] = CSV_COLUMNS
    sweep: Sweep | None = None
    solver: str = "volterra"
    z_coupling_scale: float = 1.0
    field_state: Fock | Coherent | None = None
    fock_cutoff: int | None = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def mode_set(self) -> ModeSet:
        env = self.environment
        if isinstance(env, ModeSet):
            return env
        if isinstance(env, CavityConfig):
            return cavity_mode_set(env)
        raise ConfigError(f"model {self.model!r} needs a discrete environment (modes or cavity)")

    @property
    def environment_digest(self) -> str:
        env = self.raw.get("environment", {})
        blob = json.dumps(env, sort_keys=True, separators=(",", ":"), default=float)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def jc_config(self) -> JCConfig:
        m = self.mode_set
        if len(m) != 1:
            raise ConfigError("jc_oracle needs exactly one mode in environment.modes")
        w, g = next(iter(m))
        return JCConfig(g, self.atom.omega0, w, self.field_state, self.fock_cutoff)


# ---------------------------------------------------------------- parsing helpers


def _get(table: dict, key: str, where: str, kind=float, default=...):
    if key not in table:
        if default is ...:
            raise ConfigError(f"{where}.{key}: missing")
        return default
    val = table[key]
    try:
        if kind is float:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise TypeError
            return float(val)
        if kind is int:
            if isinstance(val, bool) or not isinstance(val, int):
                raise TypeError
            return val
        if kind is str:
            if not isinstance(val, str):
                raise TypeError
            return val
        if kind is list:
            if not isinstance(val, list):
                raise TypeError
            return val
    except TypeError:
        raise ConfigError(f"{where}.{key}: expected {kind.__name__}, got {val!r}") from None
    return val


def _check_keys(table: dict, allowed: set, where: str):
    extra = set(table) - allowed
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {sorted(extra)}")


def _build(where: str, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except ModelError as e:
        raise ConfigError(f"{where}: {e}") from None


def _parse_environment(env: dict, where: str):
    if not isinstance(env, dict):
        raise ConfigError(f"{where}: expected a table")
    kinds = [k for k in env if k in ENVIRONMENTS]
    _check_keys(env, set(ENVIRONMENTS), where)
    if len(kinds) != 1:
        raise ConfigError(f"{where}: exactly one of {list(ENVIRONMENTS)} must be given, found {kinds}")
    kind = kinds[0]
    t = env[kind]
    w = f"{where}.{kind}"
    if kind == "modes":
        _check_keys(t, {"omega", "g"}, w)
        omega = _get(t, "omega", w, list)
        g = _get(t, "g", w, list)
        if len(omega) != len(g):
            raise ConfigError(f"{w}: omega and g must have the same length")
        for i, val in enumerate(omega):
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(f"{w}.omega[{i}]: expected a number")
            if val <= 0:
                raise ConfigError(f"{w}.omega[{i}]: mode frequency must be positive, got {val}")
        for i, val in enumerate(g):
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(f"{w}.g[{i}]: couplings must be real numbers")
        return _build(w, ModeSet, np.array(omega, dtype=float), np.array(g, dtype=float))
    if kind == "lorentzian":
        _check_keys(t, {"center", "width", "weight"}, w)
        return _build(w, Lorentzian, _get(t, "center", w), _get(t, "width", w), _get(t, "weight", w))
    if kind == "flat_band":
        _check_keys(t, {"omega_min", "omega_max", "density", "coupling"}, w)
        return _build(
            w,
            FlatBand,
            _get(t, "omega_min", w),
            _get(t, "omega_max", w),
            _get(t, "density", w),
            _get(t, "coupling", w),
        )
    if kind == "ohmic":
        _check_keys(t, {"exponent", "scale", "cutoff"}, w)
        return _build(w, OhmicFamily, _get(t, "exponent", w), _get(t, "scale", w), _get(t, "cutoff", w))
    # cavity
    _check_keys(t, {"L", "x_atom", "x_atom_fraction", "coupling", "n_modes"}, w)
    L = _get(t, "L", w)
    if ("x_atom" in t) == ("x_atom_fraction" in t):
        raise ConfigError(f"{w}: give exactly one of x_atom, x_atom_fraction")
    x = _get(t, "x_atom", w) if "x_atom" in t else _get(t, "x_atom_fraction", w) * L
    return _build(w, CavityConfig, L, x, _get(t, "coupling", w), _get(t, "n_modes", w, int))


def _parse_grid(t: dict, where: str) -> TimeGrid:
    _check_keys(t, {"t_max", "n_steps", "h"}, where)
    t_max = _get(t, "t_max", where)
    if ("n_steps" in t) == ("h" in t):
        raise ConfigError(f"{where}: give exactly one of n_steps, h")
    if "h" in t:
        return _build(where, TimeGrid.from_step, t_max, _get(t, "h", where))
    return _build(where, TimeGrid, t_max, _get(t, "n_steps", where, int))


def parse_scenario(raw: dict, index: int = 0, step_override: float | None = None) -> Scenario:
    where = f"scenario[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a table")
    _check_keys(raw, SCENARIO_KEYS, where)
    name = _get(raw, "name", where, str)
    where = f"scenario[{index}] ({name})"
    model = _get(raw, "model", where, str, "sigma_pm")
    if model not in MODELS:
        raise ConfigError(f"{where}.model: must be one of {list(MODELS)}, got {model!r}")
    solver = _get(raw, "solver", where, str, "volterra")
    if solver not in SOLVERS:
        raise ConfigError(f"{where}.solver: must be one of {list(SOLVERS)}")
    zs = _get(raw, "z_coupling_scale", where, float, 1.0)
    if zs not in (1.0, 0.5):
        raise ConfigError(f"{where}.z_coupling_scale: must be 1 or 0.5")
    outputs = tuple(_get(raw, "outputs", where, list, list(CSV_COLUMNS)))
    bad = [o for o in outputs if o not in CSV_COLUMNS]
    if bad:
        raise ConfigError(f"{where}.outputs: unknown series {bad}")
    outputs = tuple(c for c in CSV_COLUMNS if c in outputs or c == "t")

    atom_t = raw.get("atom")
    if not isinstance(atom_t, dict):
        raise ConfigError(f"{where}.atom: missing table")
    _check_keys(atom_t, {"omega0"}, f"{where}.atom")
    atom = _build(f"{where}.atom.omega0", TwoLevelParams, _get(atom_t, "omega0", f"{where}.atom"))

    init_t = raw.get("initial", {})
    _check_keys(init_t, {"x", "y_re", "y_im"}, f"{where}.initial")
    initial = TwoLevelState(
        _get(init_t, "x", f"{where}.initial", float, 0.0),
        complex(
            _get(init_t, "y_re", f"{where}.initial", float, 0.0),
            _get(init_t, "y_im", f"{where}.initial", float, 0.0),
        ),
    )
    _build(f"{where}.initial", initial.validate)

    if "grid" not in raw:
        raise ConfigError(f"{where}.grid: missing table")
    grid = _parse_grid(raw["grid"], f"{where}.grid")
    if step_override is not None:
        grid = _build(f"{where}.grid", TimeGrid.from_step, grid.t_max, step_override)

    if "environment" not in raw:
        raise ConfigError(f"{where}.environment: missing table")
    env = _parse_environment(raw["environment"], f"{where}.environment")

    field_state = cutoff = None
    if model == "jc_oracle":
        ft = raw.get("field")
        if not isinstance(ft, dict):
            raise ConfigError(f"{where}.field: jc_oracle needs a field table")
        _check_keys(ft, {"state", "n", "n_bar", "cutoff"}, f"{where}.field")
        kind = _get(ft, "state", f"{where}.field", str)
        if kind == "fock":
            field_state = Fock(_get(ft, "n", f"{where}.field", int))
        elif kind == "coherent":
            field_state = Coherent(_get(ft, "n_bar", f"{where}.field"))
        else:
            raise ConfigError(f"{where}.field.state: must be 'fock' or 'coherent'")
        cutoff = _get(ft, "cutoff", f"{where}.field", int)
    elif "field" in raw:
        raise ConfigError(f"{where}.field: only valid for model jc_oracle")

    sweep = None
    if "sweep" in raw:
        st = raw["sweep"]
        _check_keys(st, {"path", "values"}, f"{where}.sweep")
        path = _get(st, "path", f"{where}.sweep", str)
        values = _get(st, "values", f"{where}.sweep", list)
        if not values:
            raise ConfigError(f"{where}.sweep.values: must be nonempty")
        sweep = Sweep(path, tuple(values))

    sc = Scenario(
        name=name,
        model=model,
        environment=env,
        atom=atom,
        initial=initial,
        grid=grid,
        outputs=outputs,
        sweep=sweep,
        solver=solver,
        z_coupling_scale=zs,
        field_state=field_state,
        fock_cutoff=cutoff,
        raw=copy.deepcopy(raw),
    )
    _check_model_fit(sc, where)
    return sc


def _check_model_fit(sc: Scenario, where: str):
    discrete = isinstance(sc.environment, (ModeSet, CavityConfig))
    if sc.model in ("sigma_z", "both", "single_excitation_oracle", "jc_oracle") and not discrete:
        raise ConfigError(f"{where}.environment: model {sc.model!r} needs modes or cavity")
    if sc.model == "jc_oracle":
        try:
            sc.jc_config()
        except ModelError as e:
            raise ConfigError(f"{where}.field: {e}") from None
    if sc.solver == "laplace" and isinstance(sc.environment, (FlatBand, OhmicFamily)):
        raise ConfigError(f"{where}.solver: laplace needs a rational kernel (modes, cavity, lorentzian)")


def _set_path(raw: dict, path: str, value, where: str) -> dict:
    out = copy.deepcopy(raw)
    node = out
    parts = path.split(".")
    for p in parts[:-1]:
        if not isinstance(node, dict) or p not in node:
            raise ConfigError(f"{where}.sweep.path: unknown parameter path {path!r}")
        node = node[p]
    if not isinstance(node, dict) or parts[-1] not in node:
        raise ConfigError(f"{where}.sweep.path: unknown parameter path {path!r}")
    node[parts[-1]] = value
    return out


def expand_sweep(sc: Scenario, index: int = 0, step_override: float | None = None) -> list[Scenario]:
    """One Scenario per sweep value (or [sc] without a sweep), each fully validated."""
    if sc.sweep is None:
        return [sc]
    where = f"scenario[{index}] ({sc.name})"
    points = []
    for v in sc.sweep.values:
        raw = _set_path(sc.raw, sc.sweep.path, v, where)
        raw.pop("sweep")
        pt = parse_scenario(raw, index, step_override)
        points.append(replace(pt, sweep=sc.sweep))
    return points


def load_config(path, step_override: float | None = None) -> list[Scenario]:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: parse error: {e}") from None
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from None
    scen = data.get("scenario")
    if set(data) - {"scenario"}:
        raise ConfigError(f"{path}: unknown top-level key(s) {sorted(set(data) - {'scenario'})}")
    if isinstance(scen, dict):
        scen = [scen]
    if not scen:
        raise ConfigError(f"{path}: no [[scenario]] tables")
    out = [parse_scenario(raw, i, step_override) for i, raw in enumerate(scen)]
    names = [s.name for s in out]
    if len(set(names)) != len(names):
        raise ConfigError(f"{path}: scenario names must be unique")
    for i, s in enumerate(out):
        expand_sweep(s, i, step_override)
    return out
