"""Strict TOML run configuration.

Unknown keys are errors: silent typos in physical parameters are the dominant
failure mode in numerics runs.  Individual keys may be overridden through
environment variables named IBFLOW_<SECTION>_<KEY> (values parsed as TOML
literals), e.g. IBFLOW_TIME_DT=1e-3.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .grid import GridSpec
from .kernel import Kernel, ParticleState
from .sim import FluidParams, SimConfig
from .verify import taylor_green

ENV_PREFIX = "IBFLOW_"

_SCHEMA = {
    "domain": {"L1": float, "L2": float},
    "grid": {"n1": int, "n2": int},
    "fluid": {"rho": float, "mu": float},
    "particle": {"k": float, "X0": list, "c": float},
    "flow": {"u_mean": float, "v0": float, "initial": str, "amplitude": float},
    "time": {"dt": float, "t_end": float},
    "output": {"dir": str, "cadence": int, "formats": list},
    "mode": {"kind": str},
}
_REQUIRED_SECTIONS = ("domain", "grid", "fluid", "time")
_OPTIONAL_KEYS = {
    ("flow", "u_mean"),
    ("flow", "initial"),
    ("flow", "amplitude"),
    ("output", "dir"),
    ("output", "cadence"),
    ("output", "formats"),
}


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending key path."""


@dataclass(frozen=True)
class OutputOptions:
    dir: str = "out"
    cadence: int = 0
    formats: tuple[str, ...] = ("csv", "snapshot")


def _parse_scalar(path: str, value: Any, typ) -> Any:
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if typ is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if typ is list:
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        return value
    raise AssertionError(typ)


def _apply_env_overrides(doc: dict) -> dict:
    for name, raw in os.environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX):].lower()
        section, _, key = rest.partition("_")
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ConfigError(f"environment override {name} does not match any config key")
        try:
            parsed = tomllib.loads(f"value = {raw}")["value"]
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"environment override {name}={raw!r}: {exc}") from exc
        doc.setdefault(section, {})[key] = parsed
    return doc


def load_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_config(path, env: bool = True) -> tuple[SimConfig, OutputOptions]:
    """Read, validate, and resolve a run configuration."""
    doc = load_toml(path)
    if env:
        doc = _apply_env_overrides(doc)
    return resolve_config(doc)


def resolve_config(doc: dict) -> tuple[SimConfig, OutputOptions]:
    for section in doc:
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(doc[section], dict):
            raise ConfigError(f"{section}: expected a table")
        for key in doc[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{section}.{key}: unknown key")
    for section in _REQUIRED_SECTIONS:
        if section not in doc:
            raise ConfigError(f"missing required section [{section}]")
    for section, keys in _SCHEMA.items():
        if section in ("particle", "flow", "output", "mode") and section not in doc:
            continue
        for key in keys:
            if (section, key) in _OPTIONAL_KEYS:
                continue
            if section in doc and key not in doc[section]:
                raise ConfigError(f"missing key {section}.{key}")

    get = lambda sec, key, typ: _parse_scalar(f"{sec}.{key}", doc[sec][key], typ)

    L1 = get("domain", "L1", float)
    L2 = get("domain", "L2", float)
    n1 = get("grid", "n1", int)
    n2 = get("grid", "n2", int)
    if L1 <= 0 or L2 <= 0:
        raise ConfigError("domain.L1/domain.L2: lengths must be positive")
    if n1 < 4 or n2 < 4:
        raise ConfigError("grid.n1/grid.n2: grid must be at least 4x4")
    h1, h2 = L1 / n1, L2 / n2
    if abs(h1 - h2) > 1e-12 * max(h1, h2):
        raise ConfigError(
            f"grid cells must be square: L1/n1={h1!r} differs from L2/n2={h2!r}"
        )
    spec = GridSpec(n1=n1, n2=n2, h=h1)

    rho = get("fluid", "rho", float)
    mu = get("fluid", "mu", float)
    if rho <= 0:
        raise ConfigError(f"fluid.rho: must be positive, got {rho}")
    if mu < 0:
        raise ConfigError(f"fluid.mu: must be nonnegative, got {mu}")
    fluid = FluidParams(rho=rho, mu=mu)

    particle = None
    kern = None
    if "particle" in doc:
        k = get("particle", "k", float)
        c = get("particle", "c", float)
        X0 = get("particle", "X0", list)
        if len(X0) != 2 or not all(isinstance(v, (int, float)) for v in X0):
            raise ConfigError(f"particle.X0: expected a pair of numbers, got {X0!r}")
        if k < 0:
            raise ConfigError(f"particle.k: must be nonnegative, got {k}")
        if c <= 0:
            raise ConfigError(f"particle.c: must be positive, got {c}")
        m = c / spec.h
        if abs(m - round(m)) > 1e-9 * max(1.0, m) or round(m) < 1:
            raise ConfigError(
                f"particle.c: c/h = {m!r} must be a positive integer (c={c}, h={spec.h!r})"
            )
        kern = Kernel(c=c)
        particle = ParticleState(X=np.array(X0, float), X0=np.array(X0, float), k_spring=k)

    mode = "plain"
    if "mode" in doc:
        mode = get("mode", "kind", str)
        if mode not in ("pinned", "plain"):
            raise ConfigError(f"mode.kind: expected 'pinned' or 'plain', got {mode!r}")

    u_mean = None
    v0 = 0.0
    initial_velocity = None
    if "flow" in doc:
        v0 = get("flow", "v0", float)
        if "u_mean" in doc["flow"]:
            u_mean = get("flow", "u_mean", float)
        initial = doc["flow"].get("initial", "uniform")
        if initial not in ("uniform", "taylor-green"):
            raise ConfigError(
                f"flow.initial: expected 'uniform' or 'taylor-green', got {initial!r}"
            )
        if initial == "taylor-green":
            if abs(L1 - L2) > 1e-12 * L1:
                raise ConfigError("flow.initial: taylor-green requires a square domain")
            amp = doc["flow"].get("amplitude", 1.0)
            tg = taylor_green(L1, rho, mu, amplitude=float(amp))
            initial_velocity = lambda s: tg.velocity(s, 0.0)
    if mode == "pinned" and u_mean is None:
        raise ConfigError("mode.kind = 'pinned' requires flow.u_mean")
    if mode == "plain" and u_mean is not None and initial_velocity is None:
        # plain mode still honours u_mean as the uniform initial condition
        from .grid import VectorField

        u1_init, v0_init = u_mean, v0
        initial_velocity = lambda s: VectorField.from_arrays(
            s, np.full(s.shape, u1_init), np.full(s.shape, v0_init)
        )

    dt = get("time", "dt", float)
    t_end = get("time", "t_end", float)
    if dt <= 0:
        raise ConfigError(f"time.dt: must be positive, got {dt}")
    if t_end < 0:
        raise ConfigError(f"time.t_end: must be nonnegative, got {t_end}")

    out = OutputOptions()
    if "output" in doc:
        d = doc["output"].get("dir", out.dir)
        cadence = doc["output"].get("cadence", out.cadence)
        formats = doc["output"].get("formats", list(out.formats))
        if not isinstance(cadence, int) or isinstance(cadence, bool) or cadence < 0:
            raise ConfigError(f"output.cadence: expected a nonnegative integer, got {cadence!r}")
        for fmt in formats:
            if fmt not in ("csv", "snapshot"):
                raise ConfigError(f"output.formats: unknown format {fmt!r}")
        out = OutputOptions(dir=str(d), cadence=cadence, formats=tuple(formats))

    cfg = SimConfig(
        spec=spec,
        fluid=fluid,
        dt=dt,
        t_end=t_end,
        particle=particle,
        kern=kern,
        u_mean=u_mean if mode == "pinned" else None,
        v0=v0,
        initial_velocity=initial_velocity,
        output_dir=out.dir,
        cadence=out.cadence,
    )
    return cfg, out
