"""Oracle tests for the fire model.

The independent oracle is a flood fill: the set of cells a fire can ever
reach is exactly the set of trees 4-connected to a column-0 tree, and the
stop tick is the maximum flood-fill depth plus one. The engine must agree
cell-for-cell and tick-for-tick.
"""

from collections import deque

import numpy as np
import pytest

from simherd.engine.fire import FIRE_GRID, FireModel
from simherd.engine.params import EngineError
from simherd.prng import Xoshiro256


def flood_fill(tree_grid):
    """BFS from column-0 trees through 4-neighbor trees.

    Returns (reachable mask, max depth); depth 0 is the ignition column.
    """
    depth = np.full(tree_grid.shape, -1, dtype=int)
    queue = deque()
    for y in range(tree_grid.shape[1]):
        if tree_grid[0, y]:
            depth[0, y] = 0
            queue.append((0, y))
    max_depth = 0
    while queue:
        x, y = queue.popleft()
        d = depth[x, y] + 1
        for nx, ny in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)):
            if (
                0 <= nx < tree_grid.shape[0]
                and 0 <= ny < tree_grid.shape[1]
                and tree_grid[nx, ny]
                and depth[nx, ny] < 0
            ):
                depth[nx, ny] = d
                max_depth = max(max_depth, d)
                queue.append((nx, ny))
    return depth >= 0, max_depth


def initial_tree_grid(model):
    """Reconstruct the tree assignment before column-0 ignition."""
    grid = model.tree | model.burning | model.burned
    return grid


def run_to_stop(model, max_steps=50000):
    rng = Xoshiro256(0)
    steps = 0
    while not model.stopped():
        model.step(rng)
        steps += 1
        assert steps < max_steps, "fire failed to stop"
    return model


@pytest.mark.parametrize("density", [20, 40, 59, 75, 99])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_burn_matches_flood_fill(density, seed):
    m = FireModel()
    m.set_param("density", density)
    m.setup(Xoshiro256(seed))
    trees_at_start = initial_tree_grid(m)
    assert int(trees_at_start.sum()) == m.initial_trees
    reachable, max_depth = flood_fill(trees_at_start)

    run_to_stop(m)
    ever_ignited = m.burning | m.burned
    assert np.array_equal(ever_ignited, reachable)
    assert m.reporter_value("burned-trees") == int(reachable.sum())
    if reachable.any():
        assert m.ticks == max_depth + 1
    else:
        assert m.ticks == 0


def test_burned_trees_monotone_and_capped():
    m = FireModel()
    m.set_param("density", 80)
    m.setup(Xoshiro256(5))
    rng = Xoshiro256(0)
    last = m.reporter_value("burned-trees")
    while not m.stopped():
        m.step(rng)
        cur = m.reporter_value("burned-trees")
        assert cur >= last
        assert cur <= m.initial_trees
        last = cur


def test_density_zero_stops_at_setup():
    m = FireModel()
    m.set_param("density", 0)
    m.setup(Xoshiro256(1))
    assert m.initial_trees == 0
    assert m.stopped()
    assert m.step(Xoshiro256(0)) is True
    assert m.ticks == 0
    assert not m.any_turtles()


def test_stopped_model_freezes():
    m = FireModel()
    m.set_param("density", 70)
    m.setup(Xoshiro256(9))
    run_to_stop(m)
    tick = m.ticks
    burned = m.reporter_value("burned-trees")
    for _ in range(5):
        assert m.step(Xoshiro256(0)) is True
    assert m.ticks == tick
    assert m.reporter_value("burned-trees") == burned


def test_percolation_contrast_quick():
    # dense forests burn through, sparse ones fizzle near the left edge
    for seed in (11, 12, 13):
        m = FireModel()
        m.set_param("density", 99)
        m.setup(Xoshiro256(seed))
        run_to_stop(m)
        assert m.reporter_value("burned-trees") / m.initial_trees > 0.95
    for seed in (11, 12, 13):
        m = FireModel()
        m.set_param("density", 40)
        m.setup(Xoshiro256(seed))
        run_to_stop(m)
        assert m.reporter_value("burned-trees") / m.initial_trees < 0.25


def test_setup_is_deterministic():
    a = FireModel()
    a.set_param("density", 60)
    a.setup(Xoshiro256(77))
    b = FireModel()
    b.set_param("density", 60)
    b.setup(Xoshiro256(77))
    assert np.array_equal(initial_tree_grid(a), initial_tree_grid(b))


def test_grid_shape_and_unknown_reporter():
    m = FireModel()
    assert m.tree.shape == (FIRE_GRID, FIRE_GRID) == (101, 101)
    with pytest.raises(EngineError, match="unicorns"):
        m.reporter_value("unicorns")
    with pytest.raises(EngineError, match="sheep"):
        m.count("sheep")
