"""Parallel batch execution of parameterized model runs.

Each row of a batch is one run: the row's random-seed value reseeds the
workspace, every other entry sets a parameter (after the spec's fixed
settings, so rows win), then the model is set up and driven while the
population reporters are sampled every tick. Rows that carry a random-seed
produce the same score for any worker count, because the run's randomness
is then fully determined by the row itself.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from ..client import ClientError, start_server, stop_server
from .stability import stability_score


class BatchError(RuntimeError):
    """A batch aborted partway; carries the completed prefix of scores."""

    def __init__(self, message: str, completed: list):
        super().__init__(message)
        self.completed = completed


def _score_counts(rows: list) -> float:
    if len(rows) < 2:
        return 0.0
    sheep = [int(r[0]) for r in rows]
    wolves = [int(r[1]) for r in rows]
    return stability_score(sheep, wolves)


@dataclass(frozen=True)
class RunSpec:
    """What one parameter row means: model, fixed settings, schedule, score.

    With start_at_tick 0 every run yields at least the tick-0 sample row,
    which is what the polling loop relies on to detect completion.
    """

    model: str = "Wolf Sheep Predation.nlogo"
    fixed: dict = field(
        default_factory=lambda: {
            "initial-number-sheep": 100,
            "initial-number-wolves": 100,
        }
    )
    reporters: tuple = ("count sheep", "count wolves")
    start_at_tick: int = 0
    interval_ticks: int = 1
    stop_at_tick: int = 100
    go_command: str = "go"
    score: Callable[[list], float] = _score_counts


def _setup_command(spec: RunSpec, row: dict) -> str:
    parts = []
    if "random-seed" in row:
        parts.append(f"random-seed {row['random-seed']}")
    for name, value in spec.fixed.items():
        parts.append(f"set {name} {value}")
    for name, value in row.items():
        if name != "random-seed":
            parts.append(f"set {name} {value}")
    parts.append("setup")
    return " ".join(parts)


class _Slot:
    def __init__(self, workspace):
        self.workspace = workspace
        self.index: int | None = None


def _launch(slot: _Slot, spec: RunSpec, row: dict) -> None:
    # a fresh open resets the parameters, so each run sees only its own row
    slot.workspace.open_model(spec.model)
    slot.workspace.command(_setup_command(spec, row))
    slot.workspace.schedule_reporters_and_run(
        list(spec.reporters),
        spec.start_at_tick,
        spec.interval_ticks,
        spec.stop_at_tick,
        spec.go_command,
    )


def run_batch(rows, spec: RunSpec | None = None, workers: int = 1, session=None):
    """Run every row and return its score, in input order.

    Keeps up to `workers` server workspaces busy at once; a session is
    spawned (and stopped) here when none is passed in.
    """
    rows = list(rows)
    if not rows:
        return []
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if spec is None:
        spec = RunSpec()
    owned = session is None
    if owned:
        session = start_server()
    try:
        return _drive(session, spec, rows, min(workers, len(rows)))
    finally:
        if owned:
            stop_server(session)


def _drive(session, spec: RunSpec, rows: list, workers: int) -> list:
    scores: list = [None] * len(rows)
    slots: list[_Slot] = []
    try:
        try:
            for _ in range(workers):
                slots.append(_Slot(session.new_workspace()))
            next_row = 0
            pending = len(rows)
            while pending:
                progress = False
                for slot in slots:
                    if slot.index is None:
                        if next_row < len(rows):
                            slot.index = next_row
                            _launch(slot, spec, rows[next_row])
                            next_row += 1
                            progress = True
                        continue
                    got = slot.workspace.get_scheduled_reporter_results()
                    if got:
                        scores[slot.index] = spec.score(got)
                        slot.index = None
                        pending -= 1
                        progress = True
                if pending and not progress:
                    time.sleep(0.002)
        except (ClientError, OSError) as exc:
            done = 0
            for value in scores:
                if value is None:
                    break
                done += 1
            raise BatchError(
                f"batch aborted after {done} of {len(rows)} runs: {exc}",
                completed=scores[:done],
            ) from exc
    finally:
        for slot in slots:
            try:
                session.delete_workspace(slot.workspace)
            except Exception:
                pass
    return scores
