"""Headless model workspaces: registry, per-workspace RNG, param plumbing."""

from __future__ import annotations

import posixpath

from ..prng import Xoshiro256
from .fire import FireModel
from .params import EngineError, ParamSpec
from .wolfsheep import WolfSheepModel

MODEL_REGISTRY = {
    "wolf-sheep-predation": WolfSheepModel,
    "fire": FireModel,
}


def resolve_model_key(path: str) -> str:
    """Map a model path or name onto a registry key.

    Accepts registry keys directly and model-file style paths: the basename
    is lowercased, a trailing ``.nlogo`` is dropped, and spaces become
    hyphens, so "models/Wolf Sheep Predation.nlogo" resolves the same as
    "wolf-sheep-predation".
    """
    if not isinstance(path, str) or not path.strip():
        raise EngineError("model path must be a non-empty string")
    name = posixpath.basename(path.strip().replace("\\", "/")).lower()
    if name.endswith(".nlogo"):
        name = name[: -len(".nlogo")]
    key = "-".join(name.split())
    if key not in MODEL_REGISTRY:
        known = ", ".join(sorted(MODEL_REGISTRY))
        raise EngineError(f"unknown model {path!r} (known: {known})")
    return key


class NoModelError(EngineError):
    """Raised by operations that need a model before one is opened."""


class Workspace:
    """One model instance plus its private random stream.

    The stream is seeded from the workspace id so fresh workspaces on a
    fresh server behave identically across runs while still differing from
    each other; `random-seed` reseeds it explicitly.
    """

    def __init__(self, seed: int = 0):
        self.rng = Xoshiro256(seed)
        self.model = None
        self.model_key: str | None = None

    def require_model(self):
        if self.model is None:
            raise NoModelError("no model open in this workspace")
        return self.model

    def open_model(self, path: str) -> str:
        key = resolve_model_key(path)
        self.model = MODEL_REGISTRY[key]()
        self.model_key = key
        return key

    def close_model(self) -> None:
        self.model = None
        self.model_key = None

    def reseed(self, seed: int) -> None:
        self.rng.seed(seed)

    def set_param(self, name: str, value) -> None:
        self.require_model().set_param(name, value)

    def set_params_random(self) -> dict:
        return self.require_model().randomize_params(self.rng)

    def get_param_names(self) -> list[str]:
        return self.require_model().param_names()

    def get_param_ranges(self) -> list:
        return self.require_model().param_ranges()

    def setup(self) -> None:
        self.require_model().setup(self.rng)

    def step(self) -> bool:
        return self.require_model().step(self.rng)

    def stopped(self) -> bool:
        return self.require_model().stopped()


__all__ = [
    "EngineError",
    "FireModel",
    "MODEL_REGISTRY",
    "NoModelError",
    "ParamSpec",
    "resolve_model_key",
    "WolfSheepModel",
    "Workspace",
]
