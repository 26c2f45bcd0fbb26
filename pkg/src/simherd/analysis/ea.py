"""Evolutionary calibration of the predation parameters.

A generational GA maximizes the population-stability score over the seven
numeric sliders: tournament selection, two-point crossover, and uniform
gene reset on each slider's (min, step, max) lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..client import start_server, stop_server
from ..engine import Workspace
from ..prng import Xoshiro256
from .batch import RunSpec, run_batch
from .stability import stability_score


def _wsp_numeric_sliders():
    ws = Workspace(seed=0)
    ws.open_model("wolf-sheep-predation")
    names = ws.get_param_names()[:-2]
    lattices = tuple(tuple(r) for r in ws.get_param_ranges()[:-2])
    return names, lattices


WSP_GENE_NAMES, WSP_GENE_LATTICES = _wsp_numeric_sliders()


@dataclass(frozen=True)
class EAConfig:
    population_size: int = 200
    generations: int = 100
    cxpb: float = 0.8
    mutpb: float = 0.2
    indpb: float = 0.1
    tournament_size: int = 3
    hall_of_fame_size: int = 1
    lattices: tuple = field(default_factory=lambda: WSP_GENE_LATTICES)
    seed: int = 0
    # reproduce the published listing's mutation bounds, which read the step
    # column as the lower bound and draw plain integers from [step, max]
    strict_listing_bounds: bool = False


class Individual(list):
    """Integer gene vector with an optional fitness (maximized)."""

    def __init__(self, genes=()):
        super().__init__(genes)
        self.fitness: float | None = None


def _validate(config: EAConfig) -> None:
    if config.population_size < 2:
        raise ValueError("population_size must be at least 2")
    if config.generations < 0:
        raise ValueError("generations must be >= 0")
    if not config.lattices:
        raise ValueError("lattices must name at least one gene")
    for triple in config.lattices:
        lo, step, hi = triple
        if step < 1 or hi < lo:
            raise ValueError(f"invalid lattice {triple!r}")


def _random_individual(rng: Xoshiro256, lattices) -> Individual:
    return Individual(
        lo + step * rng.randbelow((hi - lo) // step + 1) for lo, step, hi in lattices
    )


def _clone(ind: Individual) -> Individual:
    copy = Individual(ind)
    copy.fitness = ind.fitness
    return copy


def _tournament(rng: Xoshiro256, population: list, k: int) -> Individual:
    best = population[rng.randbelow(len(population))]
    for _ in range(k - 1):
        challenger = population[rng.randbelow(len(population))]
        if challenger.fitness > best.fitness:
            best = challenger
    return best


def _cross_two_point(rng: Xoshiro256, a: Individual, b: Individual) -> None:
    size = len(a)
    if size >= 2:
        p1 = 1 + rng.randbelow(size)
        p2 = 1 + rng.randbelow(size - 1)
        if p2 >= p1:
            p2 += 1
        else:
            p1, p2 = p2, p1
        a[p1:p2], b[p1:p2] = b[p1:p2], a[p1:p2]
    a.fitness = None
    b.fitness = None


def _mutate(rng: Xoshiro256, ind: Individual, config: EAConfig) -> None:
    for i, (lo, step, hi) in enumerate(config.lattices):
        if rng.random() < config.indpb:
            if config.strict_listing_bounds:
                ind[i] = step + rng.randbelow(max(hi - step + 1, 1))
            else:
                ind[i] = lo + step * rng.randbelow((hi - lo) // step + 1)
    ind.fitness = None


def _evaluate(population: list, evaluator) -> None:
    invalid = [ind for ind in population if ind.fitness is None]
    if not invalid:
        return
    fitnesses = evaluator([list(ind) for ind in invalid])
    for ind, fitness in zip(invalid, fitnesses):
        ind.fitness = float(fitness)


def _update_hof(hof: list, population: list, size: int) -> None:
    for ind in population:
        if any(tuple(ind) == tuple(kept) for kept in hof):
            continue
        if len(hof) < size or ind.fitness > hof[-1].fitness:
            hof.append(_clone(ind))
            hof.sort(key=lambda kept: kept.fitness, reverse=True)
            del hof[size:]


def _stats(gen: int, population: list) -> dict:
    fits = [ind.fitness for ind in population]
    return {"gen": gen, "max": max(fits), "mean": sum(fits) / len(fits)}


def ea_calibrate(config: EAConfig, evaluator=None, workers: int = 1, session=None):
    """Evolve the configured lattice and return (hall_of_fame, log).

    The log holds one {"gen", "max", "mean"} row per generation, starting
    with the evaluated seed population as generation 0. Without an explicit
    evaluator the genes are scored by stability of a 500-tick predation run
    against a server session (spawned here when none is passed).
    """
    _validate(config)
    owned = False
    try:
        if evaluator is None:
            if session is None:
                session = start_server()
                owned = True
            evaluator = wsp_evaluator(
                session, workers=workers, stop_at_tick=500, seed=config.seed
            )
        return _evolve(config, evaluator)
    finally:
        if owned:
            stop_server(session)


def _evolve(config: EAConfig, evaluator):
    rng = Xoshiro256(config.seed)
    population = [
        _random_individual(rng, config.lattices)
        for _ in range(config.population_size)
    ]
    hof: list = []
    log: list = []
    _evaluate(population, evaluator)
    _update_hof(hof, population, config.hall_of_fame_size)
    log.append(_stats(0, population))
    for gen in range(1, config.generations + 1):
        offspring = [
            _clone(_tournament(rng, population, config.tournament_size))
            for _ in range(config.population_size)
        ]
        for a, b in zip(offspring[::2], offspring[1::2]):
            if rng.random() < config.cxpb:
                _cross_two_point(rng, a, b)
        for ind in offspring:
            if rng.random() < config.mutpb:
                _mutate(rng, ind, config)
        _evaluate(offspring, evaluator)
        population = offspring
        _update_hof(hof, population, config.hall_of_fame_size)
        log.append(_stats(gen, population))
    return hof, log


def wsp_evaluator(session=None, workers: int = 1, stop_at_tick: int = 500, seed: int = 0):
    """Build an evaluator scoring gene vectors by predation-run stability.

    Each evaluation draws the run's random-seed from a dedicated stream, so
    a fresh evaluator with the same seed reproduces the same scores.
    """
    stream = Xoshiro256(seed)
    spec = RunSpec(fixed={}, stop_at_tick=stop_at_tick)

    def evaluate(population):
        rows = []
        for genes in population:
            row = {"random-seed": 1 + stream.randbelow(100000)}
            row.update(zip(WSP_GENE_NAMES, (int(g) for g in genes)))
            rows.append(row)
        return run_batch(rows, spec=spec, workers=workers, session=session)

    return evaluate


def best_params_replay(genes, seed: int = 1, ticks: int = 500):
    """Replay one parameter vector headlessly; returns (series, score).

    The series holds (sheep, wolves) count pairs from tick 0 until the model
    stops or `ticks` go-steps complete; the score is the stability measure
    (zero when the run ends before producing a derivative).
    """
    genes = list(genes)
    if len(genes) != len(WSP_GENE_NAMES):
        raise ValueError(f"expected {len(WSP_GENE_NAMES)} genes, got {len(genes)}")
    ws = Workspace(seed=0)
    ws.open_model("wolf-sheep-predation")
    ws.reseed(seed)
    for name, gene in zip(WSP_GENE_NAMES, genes):
        ws.set_param(name, gene)
    ws.setup()
    model = ws.model
    rows = [(model.count("sheep"), model.count("wolves"))]
    for _ in range(ticks):
        if model.stopped():
            break
        ws.step()
        rows.append((model.count("sheep"), model.count("wolves")))
    if len(rows) < 2:
        return rows, 0.0
    return rows, stability_score([s for s, _ in rows], [w for _, w in rows])
