"""Settings from an INI file, environment variables and command-line flags.

Precedence, strongest first: command-line flag, environment variable,
config file, built-in default. Example file::

    [solver]
    path = z3
    timeout_ms = 5000
    pool_size = 4

    [critic]
    workers = 4
    seed = 0

    [pipeline]
    max_iter = 3

    [formalizer]
    base_url = https://api.openai.com/v1
    model = gpt-4o
    api_key_env = STEPCHECK_API_KEY
    retries = 2

    [generator]
    model = gpt-4o

The ``[generator]`` section falls back to ``[formalizer]`` for missing keys.
API keys are never read from the file: ``api_key_env`` names the variable
that holds them.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

from .critic import CriticConfig
from .formalizer import LlmEndpointConfig
from .smt import SolverConfig

ENV_PREFIX = "STEPCHECK_"

# setting name -> (INI section, INI key, type)
_SCALARS: dict[str, tuple[str, str, type]] = {
    "solver_path": ("solver", "path", str),
    "timeout_ms": ("solver", "timeout_ms", int),
    "pool_size": ("solver", "pool_size", int),
    "workers": ("critic", "workers", int),
    "seed": ("critic", "seed", int),
    "max_iter": ("pipeline", "max_iter", int),
}

_ENDPOINT_TYPES = {f.name: f.type for f in fields(LlmEndpointConfig)}
_CASTS = {"str": str, "int": int, "float": float}


@dataclass(frozen=True)
class Settings:
    solver_path: str = "z3"
    timeout_ms: int = 5000
    pool_size: int = 4
    workers: int = 4
    seed: int = 0
    max_iter: int = 3
    mock: bool = False
    report_out: Path | None = None
    formalizer: LlmEndpointConfig = field(default_factory=LlmEndpointConfig)
    generator: LlmEndpointConfig = field(default_factory=LlmEndpointConfig)

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.timeout_ms < 1:
            raise ValueError("timeout_ms must be >= 1")

    def solver_config(self) -> SolverConfig:
        return SolverConfig(path=self.solver_path, timeout_ms=self.timeout_ms,
                            pool_size=self.pool_size, seed=self.seed)

    def critic_config(self) -> CriticConfig:
        return CriticConfig(solver=self.solver_config(), workers=self.workers, seed=self.seed)


def _endpoint_values(parser: configparser.ConfigParser, section: str) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if not parser.has_section(section):
        return out
    for key, raw in parser.items(section):
        if key not in _ENDPOINT_TYPES:
            raise ValueError(f"unknown key {key!r} in [{section}]")
        if key == "api_key":
            raise ValueError("store the key in an environment variable and set api_key_env")
        out[key] = _CASTS[str(_ENDPOINT_TYPES[key])](raw)
    return out


def load_settings(config_path: Path | str | None = None,
                  env: Mapping[str, str] | None = None,
                  overrides: Mapping[str, Any] | None = None) -> Settings:
    """Merge defaults, the INI file, ``STEPCHECK_*`` variables and flag overrides."""
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    parser = configparser.ConfigParser()
    if config_path is not None:
        path = Path(config_path)
        if not path.is_file():
            raise FileNotFoundError(f"config file {path} not found")
        parser.read(path, encoding="utf-8")
    for name, (section, key, cast) in _SCALARS.items():
        if parser.has_option(section, key):
            values[name] = cast(parser.get(section, key))
    formalizer = _endpoint_values(parser, "formalizer")
    generator = {**formalizer, **_endpoint_values(parser, "generator")}

    for name, (_, _, cast) in _SCALARS.items():
        var = ENV_PREFIX + name.upper()
        if var in env:
            values[name] = cast(env[var])
    for key in ("base_url", "model", "api_key_env"):
        var = f"{ENV_PREFIX}LLM_{key.upper()}"
        if var in env:
            formalizer[key] = generator[key] = env[var]

    for name, value in (overrides or {}).items():
        if value is not None:
            values[name] = value
    return Settings(**values, formalizer=LlmEndpointConfig(**formalizer),
                    generator=LlmEndpointConfig(**generator))


def with_overrides(settings: Settings, **changes: Any) -> Settings:
    return replace(settings, **{k: v for k, v in changes.items() if v is not None})


__all__ = ["ENV_PREFIX", "Settings", "load_settings", "with_overrides"]
