"""Run configuration: one JSON file, ``${VAR}`` expanded from the environment.

Example::

    {
      "users": "data/users.csv",
      "provider": {"kind": "remote", "model": "text-embedding-ada-002",
                   "endpoint": "${EMBEDDINGS_URL}", "api_key_env": "OPENAI_API_KEY"},
      "user_weights": {"like": 0.2, "dislike": 0.2},
      "preference_weights": {"mi": 1, "um": 1, "ui": 1},
      "k": 5, "temperature": 1.0, "seed": 42, "out": "out"
    }

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from mmnudge.corpus import fixture_path
from mmnudge.errors import ConfigurationError
from mmnudge.matching import PreferenceWeights
from mmnudge.providers import ProviderConfig
from mmnudge.representation import UserWeights

_PROVIDER_OVERRIDES = {"provider_kind": "kind", "mock_mode": "mock_mode"}
_VAR = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


def interpolate(value):
    if isinstance(value, str):
        def sub(match):
            name = match.group(1)
            if name not in os.environ:
                raise ConfigurationError(f"environment variable {name} is not set")
            return os.environ[name]
        return _VAR.sub(sub, value)
    if isinstance(value, dict):
        return {k: interpolate(v) for k, v in value.items()}
    if isinstance(value, list):
        return [interpolate(v) for v in value]
    return value


@dataclass
class RunConfig:
    users: Path = field(default_factory=lambda: fixture_path("users.csv"))
    messages: Path = field(default_factory=lambda: fixture_path("messages.csv"))
    images: Path = field(default_factory=lambda: fixture_path("images.csv"))
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    user_weights: UserWeights = UserWeights()
    preference_weights: PreferenceWeights = PreferenceWeights()
    k: int = 5
    temperature: float = 1.0
    seed: int = 42
    out: Path = Path("out")

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError(f"k must be >= 1, got {self.k}")
        if not self.temperature > 0:
            raise ConfigurationError(f"temperature must be positive, got {self.temperature}")

    @property
    def cache_path(self) -> Path:
        return Path(self.provider.cache_path) if self.provider.cache_path else self.out / "embedding_cache.jsonl"

    def check_files(self):
        for name in ("users", "messages", "images"):
            path = Path(getattr(self, name))
            if not path.is_file():
                raise FileNotFoundError(f"{name} file not found: {path}")


def load_config(path=None, **overrides) -> RunConfig:
    """Read a config file (optional) and apply non-``None`` overrides."""
    raw: dict = {}
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        raw = interpolate(json.loads(path.read_text(encoding="utf-8")))
        base = path.parent
    kwargs = {}
    # file paths are relative to the config file, command-line paths to the cwd
    for name in ("users", "messages", "images", "out"):
        if overrides.get(name) is not None:
            kwargs[name] = Path(overrides[name])
        elif name in raw:
            kwargs[name] = base / raw[name]
    raw.update({k: v for k, v in overrides.items() if v is not None and k not in _PROVIDER_OVERRIDES})
    for name, cast in (("k", int), ("temperature", float), ("seed", int)):
        if name in raw:
            kwargs[name] = cast(raw[name])
    try:
        if "user_weights" in raw:
            kwargs["user_weights"] = UserWeights(**raw["user_weights"])
        if "preference_weights" in raw:
            kwargs["preference_weights"] = PreferenceWeights(**raw["preference_weights"])
        provider = dict(raw.get("provider", {}))
    except TypeError as exc:
        raise ConfigurationError(f"bad config entry: {exc}") from None
    for flag, key in _PROVIDER_OVERRIDES.items():
        if overrides.get(flag) is not None:
            provider[key] = overrides[flag]
    if overrides.get("seed") is not None or "seed" not in provider:
        provider["seed"] = kwargs.get("seed", 42)
    if provider.get("cache_path") and path is not None and not Path(provider["cache_path"]).is_absolute():
        provider["cache_path"] = str(base / provider["cache_path"])
    try:
        kwargs["provider"] = ProviderConfig(**provider)
    except TypeError as exc:
        raise ConfigurationError(f"bad provider entry: {exc}") from None
    return RunConfig(**kwargs)
