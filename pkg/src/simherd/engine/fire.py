"""Forest fire spread on a 101x101 non-wrapping grid.

Setup plants a tree on each cell with probability density/100 (cells drawn
in row-major order, one uniform each), then ignites every tree in column
x = 0. Each step, every burning cell ignites its 4-neighbor trees and
becomes burned; the run stops when nothing is burning. Burning cells are
the model's turtles (`not any? turtles` is true once the fire is out).

Reporters: ``burned-trees`` counts every cell that has caught fire,
burning or burned out; ``initial-trees`` is the tree count before
ignition. Fire spread consumes no randomness after setup.
"""

from __future__ import annotations

import numpy as np

from .base import ModelBase
from .params import ParamSpec

FIRE_GRID = 101


class FireModel(ModelBase):
    PARAMS = [ParamSpec("density", "numeric", 57, 0, 1, 99)]
    BREEDS = ()

    def __init__(self):
        super().__init__()
        shape = (FIRE_GRID, FIRE_GRID)
        self.tree = np.zeros(shape, dtype=bool)
        self.burning = np.zeros(shape, dtype=bool)
        self.burned = np.zeros(shape, dtype=bool)
        self.initial_trees = 0

    def setup(self, rng) -> None:
        threshold = self.params["density"] / 100.0
        tree = np.zeros((FIRE_GRID, FIRE_GRID), dtype=bool)
        for x in range(FIRE_GRID):
            for y in range(FIRE_GRID):
                tree[x, y] = rng.random() < threshold
        self.initial_trees = int(tree.sum())
        self.burning = np.zeros_like(tree)
        self.burning[0, :] = tree[0, :]
        tree[0, :] = False
        self.tree = tree
        self.burned = np.zeros_like(tree)
        self.ticks = 0

    def stopped(self) -> bool:
        return not self.burning.any()

    def step(self, rng) -> bool:
        if self.stopped():
            return True
        burning = self.burning
        reach = np.zeros_like(burning)
        reach[1:, :] |= burning[:-1, :]
        reach[:-1, :] |= burning[1:, :]
        reach[:, 1:] |= burning[:, :-1]
        reach[:, :-1] |= burning[:, 1:]
        ignited = reach & self.tree
        self.tree &= ~ignited
        self.burned |= burning
        self.burning = ignited
        self.ticks += 1
        return self.stopped()

    def any_turtles(self) -> bool:
        return bool(self.burning.any())

    def reporter_value(self, name: str):
        if name == "burned-trees":
            return int(self.burned.sum()) + int(self.burning.sum())
        if name == "initial-trees":
            return self.initial_trees
        return super().reporter_value(name)
