"""Shared model plumbing: parameter storage and reporter dispatch."""

from __future__ import annotations

from .params import EngineError, ParamSpec


class ModelBase:
    PARAMS: list[ParamSpec] = []
    BREEDS: tuple[str, ...] = ()

    def __init__(self):
        self.params = {spec.name: spec.default for spec in self.PARAMS}
        self._spec_by_name = {spec.name: spec for spec in self.PARAMS}
        self.ticks = 0

    def set_param(self, name: str, value) -> None:
        spec = self._spec_by_name.get(name)
        if spec is None:
            raise EngineError(f"no parameter named '{name}' in this model")
        self.params[name] = spec.coerce(value)

    def param_names(self) -> list[str]:
        return [spec.name for spec in self.PARAMS]

    def param_ranges(self) -> list:
        return [spec.range_triple() for spec in self.PARAMS]

    def randomize_params(self, rng) -> dict:
        """Redraw every numeric parameter uniformly from its lattice; choice
        and boolean parameters keep their current values."""
        drawn = {}
        for spec in self.PARAMS:
            if spec.kind == "numeric":
                value = spec.lattice_draw(rng)
                self.params[spec.name] = value
                drawn[spec.name] = value
        return drawn

    def count(self, breed: str) -> int:
        raise EngineError(f"nothing named '{breed}' to count in this model")

    def any_turtles(self) -> bool:
        raise NotImplementedError

    def reporter_value(self, name: str):
        raise EngineError(f"nothing named '{name}' in this model")

    def setup(self, rng) -> None:
        raise NotImplementedError

    def step(self, rng) -> bool:
        raise NotImplementedError

    def stopped(self) -> bool:
        raise NotImplementedError
