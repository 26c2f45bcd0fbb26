"""Model parameter declarations and value coercion."""

from __future__ import annotations

import math
from dataclasses import dataclass


class EngineError(Exception):
    """Raised for recoverable model-level failures (bad params, bad setup)."""


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str  # "numeric" | "choice" | "boolean"
    default: object
    minimum: int = 0
    step: int = 1
    maximum: int = 0
    choices: tuple[str, ...] = ()

    def range_triple(self):
        """Range descriptor: (min, step, max) for numerics, the choice list
        for choosers, [False, True] for switches."""
        if self.kind == "numeric":
            return [self.minimum, self.step, self.maximum]
        if self.kind == "choice":
            return list(self.choices)
        return [False, True]

    def coerce(self, value):
        """Validate a raw value, snapping numerics onto the (min, step, max)
        lattice by rounding toward min and clamping to the lattice ends."""
        if self.kind == "numeric":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise EngineError(f"{self.name} expects a number, got {value!r}")
            if not math.isfinite(value):
                raise EngineError(f"{self.name} expects a finite number")
            if value <= self.minimum:
                return self.minimum
            k = int((value - self.minimum) // self.step)
            top = (self.maximum - self.minimum) // self.step
            return self.minimum + min(k, top) * self.step
        if self.kind == "choice":
            if not isinstance(value, str) or value not in self.choices:
                raise EngineError(
                    f"{self.name} expects one of {list(self.choices)}, got {value!r}"
                )
            return value
        # boolean
        if isinstance(value, bool):
            return value
        if value in ("true", "false"):
            return value == "true"
        raise EngineError(f"{self.name} expects true or false, got {value!r}")

    def lattice_draw(self, rng):
        """Uniform draw from the numeric lattice (inclusive of both ends)."""
        if self.kind != "numeric":
            raise EngineError(f"{self.name} is not numeric")
        points = (self.maximum - self.minimum) // self.step + 1
        return self.minimum + rng.randbelow(points) * self.step
