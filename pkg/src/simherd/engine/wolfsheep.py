"""Wolf/sheep predation on a 51x51 toroidal patch grid.

Grass-and-predation variant only: patches are grass or dirt (dirt regrows
after a countdown), sheep eat grass, wolves eat sheep, both reproduce by
splitting their energy with a clone.

Tick order (all agents processed in ascending id):
  1. each sheep moves to a uniformly drawn 8-neighbor patch, pays 1 energy,
     grazes if the patch has grass (gain energy, patch turns to dirt with a
     fresh countdown), dies below zero energy, else may reproduce
     (probability sheep-reproduce/100; energy halved rounding down, the
     clone gets the other half, same patch, fresh id);
  2. each wolf does the same, except it eats the lowest-id sheep sharing
     its patch for wolf-gain-from-food;
  3. every dirt patch counts down by 1 and regrows to grass at zero;
  4. the tick counter advances.

Newborns act from the next tick but are visible prey immediately. The run
stops when no agents remain, or when the wolves are gone and the sheep
population exceeds ``sheep_cap`` (an attribute, default 1000). A stopped
model freezes: further steps change nothing and keep reporting stopped.

Draw order is part of the determinism contract. Setup draws patches in
row-major order (one uniform for the grass coin flip, one bounded draw for
a dirt countdown unless the regrowth time is 0), then sheep, then wolves
(x, y, energy each). Per tick, each acting agent draws its move and, if it
survives, one reproduction uniform.
"""

from __future__ import annotations

import numpy as np

from .base import ModelBase
from .params import EngineError, ParamSpec

GRID = 51

# Index order of the move draw: randbelow(8) picks from this tuple.
NEIGHBOR_OFFSETS = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)

SUPPORTED_VERSION = "sheep-wolves-grass"


class Agent:
    __slots__ = ("id", "x", "y", "energy", "dead")

    def __init__(self, id: int, x: int, y: int, energy: int):
        self.id = id
        self.x = x
        self.y = y
        self.energy = energy
        self.dead = False

    def __repr__(self):
        return f"Agent(id={self.id}, x={self.x}, y={self.y}, energy={self.energy})"


class WolfSheepModel(ModelBase):
    PARAMS = [
        ParamSpec("initial-number-sheep", "numeric", 100, 0, 1, 250),
        ParamSpec("sheep-gain-from-food", "numeric", 4, 0, 1, 50),
        ParamSpec("sheep-reproduce", "numeric", 4, 1, 1, 20),
        ParamSpec("initial-number-wolves", "numeric", 50, 0, 1, 250),
        ParamSpec("wolf-gain-from-food", "numeric", 20, 0, 1, 100),
        ParamSpec("wolf-reproduce", "numeric", 5, 0, 1, 20),
        ParamSpec("grass-regrowth-time", "numeric", 30, 0, 1, 100),
        ParamSpec(
            "model-version",
            "choice",
            SUPPORTED_VERSION,
            choices=("sheep-wolves", SUPPORTED_VERSION),
        ),
        ParamSpec("show-energy?", "boolean", False),
    ]
    BREEDS = ("sheep", "wolves")

    def __init__(self):
        super().__init__()
        self.sheep: list[Agent] = []
        self.wolves: list[Agent] = []
        self.grass = np.zeros((GRID, GRID), dtype=bool)
        self.countdown = np.zeros((GRID, GRID), dtype=np.int32)
        self.next_id = 0
        self.sheep_cap = 1000

    def setup(self, rng) -> None:
        if self.params["model-version"] != SUPPORTED_VERSION:
            raise EngineError(
                f"unsupported model-version {self.params['model-version']!r}; "
                f"only {SUPPORTED_VERSION!r} is implemented"
            )
        grt = self.params["grass-regrowth-time"]
        grass = np.zeros((GRID, GRID), dtype=bool)
        countdown = np.zeros((GRID, GRID), dtype=np.int32)
        for x in range(GRID):
            for y in range(GRID):
                if rng.random() < 0.5:
                    grass[x, y] = True
                else:
                    countdown[x, y] = rng.randbelow(grt + 1)
        self.grass = grass
        self.countdown = countdown

        self.sheep = []
        self.wolves = []
        self.next_id = 0
        for flock, count, gain in (
            (self.sheep, self.params["initial-number-sheep"],
             self.params["sheep-gain-from-food"]),
            (self.wolves, self.params["initial-number-wolves"],
             self.params["wolf-gain-from-food"]),
        ):
            for _ in range(count):
                x = rng.randbelow(GRID)
                y = rng.randbelow(GRID)
                energy = rng.randbelow(2 * gain)
                flock.append(Agent(self.next_id, x, y, energy))
                self.next_id += 1
        self.ticks = 0

    def stopped(self) -> bool:
        if not self.sheep and not self.wolves:
            return True
        return not self.wolves and len(self.sheep) > self.sheep_cap

    def step(self, rng) -> bool:
        if self.stopped():
            return True
        p = self.params
        grass = self.grass
        countdown = self.countdown

        # sheep graze
        gain = p["sheep-gain-from-food"]
        rate = p["sheep-reproduce"] / 100.0
        grt = p["grass-regrowth-time"]
        survivors: list[Agent] = []
        newborns: list[Agent] = []
        for a in self.sheep:
            dx, dy = NEIGHBOR_OFFSETS[rng.randbelow(8)]
            x = (a.x + dx) % GRID
            y = (a.y + dy) % GRID
            a.x = x
            a.y = y
            energy = a.energy - 1
            if grass[x, y]:
                grass[x, y] = False
                countdown[x, y] = grt
                energy += gain
            if energy < 0:
                continue
            if rng.random() < rate:
                a.energy = energy // 2
                newborns.append(Agent(self.next_id, x, y, energy - energy // 2))
                self.next_id += 1
            else:
                a.energy = energy
            survivors.append(a)
        self.sheep = survivors + newborns

        # wolves hunt; prey lists stay id-ordered because self.sheep is
        by_patch: dict[tuple[int, int], list[Agent]] = {}
        for a in self.sheep:
            by_patch.setdefault((a.x, a.y), []).append(a)
        gain = p["wolf-gain-from-food"]
        rate = p["wolf-reproduce"] / 100.0
        survivors = []
        newborns = []
        for a in self.wolves:
            dx, dy = NEIGHBOR_OFFSETS[rng.randbelow(8)]
            x = (a.x + dx) % GRID
            y = (a.y + dy) % GRID
            a.x = x
            a.y = y
            energy = a.energy - 1
            prey_list = by_patch.get((x, y))
            if prey_list:
                prey = prey_list.pop(0)
                prey.dead = True
                if not prey_list:
                    del by_patch[(x, y)]
                energy += gain
            if energy < 0:
                continue
            if rng.random() < rate:
                a.energy = energy // 2
                newborns.append(Agent(self.next_id, x, y, energy - energy // 2))
                self.next_id += 1
            else:
                a.energy = energy
            survivors.append(a)
        self.wolves = survivors + newborns
        self.sheep = [a for a in self.sheep if not a.dead]

        # dirt regrows
        np.subtract(countdown, ~grass, out=countdown, casting="unsafe")
        np.logical_or(grass, countdown <= 0, out=grass)

        self.ticks += 1
        return self.stopped()

    def count(self, breed: str) -> int:
        if breed == "sheep":
            return len(self.sheep)
        if breed == "wolves":
            return len(self.wolves)
        return super().count(breed)

    def any_turtles(self) -> bool:
        return bool(self.sheep or self.wolves)
