"""Operator entry points: serve, bench, sa, calibrate.

Exit codes: 0 ok, 1 runtime failure, 2 usage error. The bench, sa and
calibrate commands reach the server through SIMHERD_SERVER_ADDR when set
and spawn a private one otherwise.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from pathlib import Path

from .analysis import (
    BatchError,
    EAConfig,
    SobolProblem,
    ea_calibrate,
    run_batch,
    saltelli_sample,
    sobol_analyze,
    wsp_evaluator,
)
from .analysis.ea import _validate as _validate_ea_config
from .client import ClientError, start_server, stop_server
from .engine import EngineError, resolve_model_key
from .protocol import DEFAULT_PORT
from .server import Server

BENCH_HEADER = "model,runs,connector,millis"
CONNECTOR = "simherd"
DISPLAY_NAMES = {"fire": "Fire", "wolf-sheep-predation": "Wolf Sheep Predation"}


class UsageError(Exception):
    pass


# -- serve ---------------------------------------------------------------------


def cmd_serve(args) -> int:
    server = Server(
        host=args.host,
        port=args.port,
        workers=args.workers,
        max_workspaces=args.max_workspaces,
    )
    try:
        address = server.start()
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 2
    print(f"listening {address}", flush=True)
    try:
        server.wait()
    except KeyboardInterrupt:
        server.stop()
    return 0


# -- bench ---------------------------------------------------------------------


def _ensure_bench_header(path: Path) -> None:
    if not path.exists() or path.stat().st_size == 0:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(BENCH_HEADER + "\n")


def cmd_bench(args) -> int:
    try:
        key = resolve_model_key(args.model)
    except EngineError as exc:
        raise UsageError(str(exc)) from None
    display = DISPLAY_NAMES[key]
    out = Path(args.out)
    _ensure_bench_header(out)
    if args.runs == 0:
        return 0
    if args.runs < 0:
        raise UsageError("--runs must be >= 0")
    session = start_server()
    slots = []
    try:
        started = time.perf_counter()
        slots = [[session.new_workspace(), False] for _ in range(min(args.workers, args.runs))]
        launched = 0
        remaining = args.runs
        while remaining:
            progress = False
            for slot in slots:
                workspace, busy = slot
                if not busy:
                    if launched < args.runs:
                        workspace.open_model(key)
                        workspace.set_params_random()
                        workspace.command("setup")
                        workspace.schedule_reporters_and_run(
                            ["ticks"], 0, 1, args.ticks, "go"
                        )
                        slot[1] = True
                        launched += 1
                        progress = True
                    continue
                if workspace.get_scheduled_reporter_results():
                    slot[1] = False
                    remaining -= 1
                    progress = True
            if remaining and not progress:
                time.sleep(0.002)
        millis = int((time.perf_counter() - started) * 1000)
    finally:
        for workspace, _ in slots:
            try:
                session.delete_workspace(workspace)
            except Exception:
                pass
        stop_server(session)
    with out.open("a") as handle:
        handle.write(f"{display},{args.runs},{CONNECTOR},{millis}\n")
    print(f"{display},{args.runs},{CONNECTOR},{millis}")
    return 0


# -- sa ------------------------------------------------------------------------


def _load_config_file(path: str, allowed: set) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")
    for key in raw:
        if key not in allowed:
            raise UsageError(f"unknown config field {key!r}")
    return raw


def _wire_problem(session) -> SobolProblem:
    """The sensitivity problem the way the analysis scripts build it: every
    numeric slider except the two fixed population sizes, plus the seed."""
    workspace = session.new_workspace()
    try:
        workspace.open_model("Wolf Sheep Predation.nlogo")
        names = workspace.get_param_names()[:-2]
        bounds = [r[0::2] for r in workspace.get_param_ranges()[:-2]]
    finally:
        session.delete_workspace(workspace)
    fixed = {"initial-number-sheep", "initial-number-wolves"}
    kept = [(n, b) for n, b in zip(names, bounds) if n not in fixed]
    return SobolProblem.coerce(
        {
            "num_vars": 1 + len(kept),
            "names": ["random-seed"] + [n for n, _ in kept],
            "bounds": [[1, 100000]] + [list(b) for _, b in kept],
        }
    )


def cmd_sa(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise UsageError(f"--sizes must be comma-separated integers, got {args.sizes!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise UsageError("--sizes needs at least one positive sample size")
    session = start_server()
    try:
        if args.config:
            raw = _load_config_file(args.config, {"num_vars", "names", "bounds"})
            try:
                problem = SobolProblem.coerce(raw)
            except (ValueError, KeyError, TypeError) as exc:
                raise UsageError(f"bad problem config: {exc}") from None
        else:
            problem = _wire_problem(session)
        s1_rows = []
        st_rows = []
        for size in sizes:
            sample = saltelli_sample(problem, size, seed=args.seed)
            rows = [dict(zip(problem.names, map(float, row))) for row in sample]
            scores = run_batch(rows, workers=args.workers, session=session)
            result = sobol_analyze(problem, scores)
            s1_rows.append([size, *result["s1_with_interactions"]])
            st_rows.append([size, *result["st_relative"]])
            print(f"sample size {size}: {len(rows)} runs analyzed")
    finally:
        stop_server(session)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(out_dir / "sa_s1.csv", ["sample_size", *problem.names, "interactions"], s1_rows)
    _write_csv(out_dir / "sa_st_relative.csv", ["sample_size", *problem.names], st_rows)
    return 0


def _write_csv(path: Path, header: list, rows: list) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


# -- calibrate -------------------------------------------------------------------


def _ea_config(args) -> EAConfig:
    values = {"population_size": 20, "generations": 10}
    if args.config:
        allowed = {f.name for f in dataclasses.fields(EAConfig)}
        values.update(_load_config_file(args.config, allowed))
    if args.pop is not None:
        values["population_size"] = args.pop
    if args.gen is not None:
        values["generations"] = args.gen
    if args.seed is not None:
        values["seed"] = args.seed
    if "lattices" in values:
        try:
            values["lattices"] = tuple(
                (int(lo), int(step), int(hi)) for lo, step, hi in values["lattices"]
            )
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad lattices: {exc}") from None
    config = EAConfig(**values)
    try:
        _validate_ea_config(config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return config


def cmd_calibrate(args) -> int:
    config = _ea_config(args)
    session = start_server()
    try:
        evaluator = wsp_evaluator(
            session, workers=args.workers, stop_at_tick=args.ticks, seed=config.seed
        )
        hall_of_fame, log = ea_calibrate(config, evaluator)
    finally:
        stop_server(session)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out_dir / "calibration_log.csv",
        ["gen", "max", "mean"],
        [[row["gen"], row["max"], row["mean"]] for row in log[1:]],
    )
    payload = [
        {"genes": [int(g) for g in ind], "fitness": ind.fitness}
        for ind in hall_of_fame
    ]
    (out_dir / "hall_of_fame.json").write_text(json.dumps(payload, indent=2) + "\n")
    best = hall_of_fame[0]
    print(f"best fitness {best.fitness:.1f} with genes {list(best)}")
    return 0


# -- entry ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simherd", description="headless model server and analysis drivers"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the workspace server")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=DEFAULT_PORT)
    serve.add_argument("--workers", type=int, default=None)
    serve.add_argument("--max-workspaces", type=int, default=256)
    serve.set_defaults(func=cmd_serve)

    bench = sub.add_parser("bench", help="time a batch of randomized runs")
    bench.add_argument("--model", required=True)
    bench.add_argument("--runs", type=int, default=200)
    bench.add_argument("--workers", type=int, default=8)
    bench.add_argument("--ticks", type=int, default=100)
    bench.add_argument("--out", default="bench.csv")
    bench.set_defaults(func=cmd_bench)

    sa = sub.add_parser("sa", help="sensitivity analysis over the predation model")
    sa.add_argument("--sizes", default="8,16,32")
    sa.add_argument("--workers", type=int, default=4)
    sa.add_argument("--seed", type=int, default=0)
    sa.add_argument("--config", default=None)
    sa.add_argument("--out-dir", default=".")
    sa.set_defaults(func=cmd_sa)

    calibrate = sub.add_parser("calibrate", help="evolve stable predation settings")
    calibrate.add_argument("--config", default=None)
    calibrate.add_argument("--pop", type=int, default=None)
    calibrate.add_argument("--gen", type=int, default=None)
    calibrate.add_argument("--seed", type=int, default=None)
    calibrate.add_argument("--ticks", type=int, default=100)
    calibrate.add_argument("--workers", type=int, default=4)
    calibrate.add_argument("--out-dir", default=".")
    calibrate.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 0
    except (ClientError, BatchError, EngineError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
