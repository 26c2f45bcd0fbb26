"""TCP controller owning a pool of headless workspaces.

Connections are handled by threads; simulation work runs in a process pool
because the models are pure-Python and CPU-bound. Long commands and
scheduled runs execute in fixed chunks of CHUNK_TICKS go-steps: between
chunks the workspace state is installed back into the registry, which is
what lets `report` observe a run in flight, lets `stop` take effect at a
tick boundary, and keeps results bit-identical for any worker count (the
random stream travels inside the state and chunking consumes no draws).

Short commands (no `repeat`) execute inline in the connection thread when
the workspace is idle, so their errors surface in the response; anything
else is enqueued and acknowledged immediately. Per workspace, jobs run
strictly in submission order.
"""

from __future__ import annotations

import logging
import multiprocessing
import os
import socket
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import protocol
from .cmdlang import (
    ParseError,
    ProgramRunner,
    Stop,
    evaluate,
    execute_program,
    parse_commands,
    parse_reporter,
    program_has_repeat,
)
from .engine import EngineError, NoModelError, Workspace

log = logging.getLogger("simherd.server")

CHUNK_TICKS = 16


class RequestError(Exception):
    """Carries a client-facing error string for the response envelope."""


@dataclass
class ScheduledRun:
    reporters: tuple
    start_at: int
    interval: int
    stop_at: int
    go_program: tuple
    sampled_initial: bool = False
    status: str = "running"
    buffer: list = field(default_factory=list)


@dataclass
class _CommandJob:
    runner: ProgramRunner


@dataclass
class _Entry:
    state: Workspace
    jobs: list = field(default_factory=list)
    busy: bool = False
    stop_requested: bool = False
    scheduled: ScheduledRun | None = None


def _eligible(run: ScheduledRun, tick: int) -> bool:
    if tick < run.start_at:
        return False
    if run.stop_at >= 0 and tick > run.stop_at:
        return False
    return (tick - run.start_at) % run.interval == 0


def _sample(ws: Workspace, run: ScheduledRun, rows: list) -> None:
    if _eligible(run, ws.model.ticks):
        rows.append([evaluate(ws, rep) for rep in run.reporters])


def _run_command_chunk(ws: Workspace, runner: ProgramRunner, max_ticks: int):
    """Pool task: advance a command program by at most max_ticks go-steps."""
    runner.run(ws, max_ticks=max_ticks)
    return ws, runner, None


def _run_scheduled_chunk(ws: Workspace, run: ScheduledRun, max_iters: int):
    """Pool task: drive a scheduled run for at most max_iters go rounds.

    Sampling happens once before the first go and then after every go while
    the tick is in the schedule window; the run completes when the model's
    stop condition fires or the tick reaches stop_at.
    """
    rows: list = []
    finished = False
    if not run.sampled_initial:
        _sample(ws, run, rows)
        run.sampled_initial = True
    for _ in range(max_iters):
        model = ws.require_model()
        if model.stopped() or (0 <= run.stop_at <= model.ticks):
            finished = True
            break
        before = model.ticks
        execute_program(ws, run.go_program)
        model = ws.require_model()
        if model.ticks == before and not model.stopped():
            # the go command advances nothing on a live model, so the run
            # can never progress; finish instead of spinning
            finished = True
            break
        _sample(ws, run, rows)
    else:
        model = ws.require_model()
        if model.stopped() or (0 <= run.stop_at <= model.ticks):
            finished = True
    return ws, run, (rows, finished)


class Server:
    """The controller: registry, process pool, and the TCP listener."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = protocol.DEFAULT_PORT,
        workers: int | None = None,
        max_workspaces: int = 256,
    ):
        self.host = host
        self.port = port
        self.workers = workers if workers else (os.cpu_count() or 1)
        self.max_workspaces = max_workspaces
        self._lock = threading.Lock()
        self._registry: dict[int, _Entry] = {}
        self._next_id = 0
        self._pool: ProcessPoolExecutor | None = None
        self._listener: socket.socket | None = None
        self._accept_thread: threading.Thread | None = None
        self._connections: set[socket.socket] = set()
        self._stopping = False
        self._shutdown_requested = False
        self._stopped = threading.Event()

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> str:
        """Bind, warm the worker pool, and begin accepting. Returns address."""
        self._pool = ProcessPoolExecutor(
            max_workers=self.workers,
            mp_context=multiprocessing.get_context("fork"),
        )
        # fork the workers now, before any connection threads exist
        warmups = [self._pool.submit(os.getpid) for _ in range(self.workers)]
        for fut in warmups:
            fut.result()
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        try:
            listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            listener.bind((self.host, self.port))
            listener.listen(64)
        except OSError:
            listener.close()
            self._pool.shutdown(wait=False)
            self._pool = None
            raise
        self._listener = listener
        self.port = listener.getsockname()[1]
        self._accept_thread = threading.Thread(
            target=self._accept_loop, name="simherd-accept", daemon=True
        )
        self._accept_thread.start()
        log.info("listening on %s", self.address)
        return self.address

    @property
    def address(self) -> str:
        return f"{self.host}:{self.port}"

    def stop(self) -> None:
        with self._lock:
            if self._stopping:
                return
            self._stopping = True
            connections = list(self._connections)
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        for conn in connections:
            try:
                conn.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            try:
                conn.close()
            except OSError:
                pass
        if self._pool is not None:
            # wait=True joins the worker processes; otherwise the pool's
            # management thread can outlive us and trip over closed pipes
            # at interpreter exit.
            self._pool.shutdown(wait=True, cancel_futures=True)
            self._pool = None
        self._stopped.set()

    def wait(self, timeout: float | None = None) -> bool:
        """Block until stop() has run (the serve CLI parks on this)."""
        return self._stopped.wait(timeout)

    # -- connection handling -------------------------------------------------

    def _accept_loop(self) -> None:
        assert self._listener is not None
        while True:
            try:
                conn, peer = self._listener.accept()
            except OSError:
                return  # listener closed
            with self._lock:
                if self._stopping:
                    conn.close()
                    return
                self._connections.add(conn)
            thread = threading.Thread(
                target=self._serve_connection,
                args=(conn, peer),
                name=f"simherd-conn-{peer[1]}",
                daemon=True,
            )
            thread.start()

    def _serve_connection(self, conn: socket.socket, peer) -> None:
        log.debug("connection from %s:%s", *peer)
        try:
            reader = conn.makefile("rb")
            for line in reader:
                if not line.strip():
                    continue
                response = self._respond_to_line(line)
                conn.sendall(protocol.encode(response))
                if self._shutdown_requested:
                    self.stop()
                    return
        except (OSError, ValueError):
            pass
        finally:
            try:
                conn.close()
            except OSError:
                pass
            with self._lock:
                self._connections.discard(conn)

    def _respond_to_line(self, line: bytes) -> dict:
        try:
            message = protocol.decode(line)
        except protocol.ProtocolError as exc:
            return protocol.error_response(None, f"parse: {exc}")
        raw_id = message.get("id")
        echo_id = raw_id if isinstance(raw_id, int) and not isinstance(raw_id, bool) else None
        try:
            request_id, op, args = protocol.parse_request(message)
        except protocol.ProtocolError as exc:
            return protocol.error_response(echo_id, f"parse: {exc}")
        try:
            result = self._dispatch(op, args)
        except RequestError as exc:
            return protocol.error_response(request_id, str(exc))
        except ParseError as exc:
            return protocol.error_response(request_id, f"parse: {exc}")
        except NoModelError as exc:
            return protocol.error_response(request_id, f"no-model: {exc}")
        except EngineError as exc:
            return protocol.error_response(request_id, f"error: {exc}")
        except Exception:
            log.exception("internal error handling %s", op)
            return protocol.error_response(request_id, f"error: internal failure in {op!r}")
        return protocol.ok_response(request_id, result)

    # -- request dispatch ------------------------------------------------------

    def _dispatch(self, op: str, args: dict):
        handler = _HANDLERS.get(op)
        if handler is None:
            raise RequestError(f"unknown-op: {op!r} is not a server operation")
        return handler(self, args)

    def _entry(self, args: dict) -> tuple[int, _Entry]:
        workspace = args.get("workspace")
        if not isinstance(workspace, int) or isinstance(workspace, bool):
            raise RequestError("parse: 'workspace' must be an integer id")
        entry = self._registry.get(workspace)
        if entry is None:
            raise RequestError(f"not-found: workspace {workspace}")
        return workspace, entry

    @staticmethod
    def _require_idle(workspace: int, entry: _Entry) -> None:
        if entry.busy or entry.jobs:
            raise RequestError(f"busy: workspace {workspace} is running")

    def _op_new_workspace(self, args: dict) -> int:
        with self._lock:
            if len(self._registry) >= self.max_workspaces:
                raise RequestError(
                    f"capacity: workspace pool is full ({self.max_workspaces})"
                )
            workspace = self._next_id
            self._next_id += 1
            self._registry[workspace] = _Entry(state=Workspace(seed=workspace))
        return workspace

    def _abandon(self, entry: _Entry) -> None:
        entry.stop_requested = True
        entry.jobs.clear()
        if entry.scheduled is not None and entry.scheduled.status == "running":
            entry.scheduled.status = "stopped-early"

    def _op_delete_workspace(self, args: dict) -> bool:
        with self._lock:
            workspace, entry = self._entry(args)
            self._abandon(entry)
            del self._registry[workspace]
        return True

    def _op_delete_all_workspaces(self, args: dict) -> bool:
        with self._lock:
            for entry in self._registry.values():
                self._abandon(entry)
            self._registry.clear()
        return True

    def _op_list_workspaces(self, args: dict) -> list:
        with self._lock:
            return sorted(self._registry)

    def _op_open_model(self, args: dict) -> str:
        path = args.get("path")
        if not isinstance(path, str):
            raise RequestError("parse: 'path' must be a string")
        with self._lock:
            workspace, entry = self._entry(args)
            self._require_idle(workspace, entry)
            return entry.state.open_model(path)

    def _op_close_model(self, args: dict) -> bool:
        with self._lock:
            workspace, entry = self._entry(args)
            self._require_idle(workspace, entry)
            entry.state.close_model()
        return True

    def _op_command(self, args: dict) -> bool:
        text = args.get("command")
        if not isinstance(text, str):
            raise RequestError("parse: 'command' must be a string")
        program = parse_commands(text)
        with self._lock:
            workspace, entry = self._entry(args)
            if len(program) == 1 and isinstance(program[0], Stop):
                # `stop` never queues: it halts whatever is running at the
                # next chunk boundary, and is a no-op on an idle workspace
                if entry.busy or entry.jobs:
                    entry.stop_requested = True
                return True
            if not entry.busy and not entry.jobs and not program_has_repeat(program):
                execute_program(entry.state, program)
                return True
            entry.jobs.append(_CommandJob(ProgramRunner(program)))
            self._maybe_submit(workspace, entry)
        return True

    def _op_report(self, args: dict) -> str:
        text = args.get("reporter")
        if not isinstance(text, str):
            raise RequestError("parse: 'reporter' must be a string")
        reporter = parse_reporter(text)
        with self._lock:
            _, entry = self._entry(args)
            # reads the latest installed state; never queues behind a run
            return evaluate(entry.state, reporter)

    def _op_set_params_random(self, args: dict) -> dict:
        with self._lock:
            workspace, entry = self._entry(args)
            self._require_idle(workspace, entry)
            return entry.state.set_params_random()

    def _op_get_param_names(self, args: dict) -> list:
        with self._lock:
            _, entry = self._entry(args)
            return entry.state.get_param_names()

    def _op_get_param_ranges(self, args: dict) -> list:
        with self._lock:
            _, entry = self._entry(args)
            return entry.state.get_param_ranges()

    def _op_schedule(self, args: dict) -> bool:
        reporters = args.get("reporters")
        if (
            not isinstance(reporters, list)
            or not reporters
            or not all(isinstance(r, str) for r in reporters)
        ):
            raise RequestError("parse: 'reporters' must be a non-empty list of strings")
        start_at = args.get("start_at_tick", 0)
        interval = args.get("interval_ticks", 1)
        stop_at = args.get("stop_at_tick", -1)
        go_command = args.get("go_command", "go")
        for name, value in (
            ("start_at_tick", start_at),
            ("interval_ticks", interval),
            ("stop_at_tick", stop_at),
        ):
            if not isinstance(value, int) or isinstance(value, bool):
                raise RequestError(f"parse: {name!r} must be an integer")
        if start_at < 0:
            raise RequestError("parse: 'start_at_tick' must be >= 0")
        if interval < 1:
            raise RequestError("parse: 'interval_ticks' must be >= 1")
        if stop_at < -1:
            raise RequestError("parse: 'stop_at_tick' must be >= -1")
        if not isinstance(go_command, str):
            raise RequestError("parse: 'go_command' must be a string")
        parsed = tuple(parse_reporter(r) for r in reporters)
        go_program = parse_commands(go_command)
        with self._lock:
            workspace, entry = self._entry(args)
            if entry.busy or entry.jobs:
                raise RequestError(f"busy: workspace {workspace} is running")
            entry.state.require_model()
            # a completed-but-undrained buffer is replaced by the new run
            entry.scheduled = ScheduledRun(
                reporters=parsed,
                start_at=start_at,
                interval=interval,
                stop_at=stop_at,
                go_program=go_program,
            )
            entry.stop_requested = False
            entry.jobs.append(entry.scheduled)
            self._maybe_submit(workspace, entry)
        return True

    def _op_get_results(self, args: dict) -> list:
        with self._lock:
            _, entry = self._entry(args)
            run = entry.scheduled
            if run is None or run.status == "running":
                return []
            entry.scheduled = None
            return run.buffer

    def _op_shutdown(self, args: dict) -> bool:
        # the connection loop initiates the stop after flushing the response
        self._shutdown_requested = True
        return True

    # -- job scheduling ---------------------------------------------------------

    def _maybe_submit(self, workspace: int, entry: _Entry) -> None:
        """Submit the next chunk for a workspace. Caller holds the lock."""
        if self._stopping or entry.busy or not entry.jobs:
            return
        job = entry.jobs[0]
        entry.busy = True
        if isinstance(job, _CommandJob):
            future = self._pool.submit(
                _run_command_chunk, entry.state, job.runner, CHUNK_TICKS
            )
        else:
            # ship a slim copy: the result buffer stays server-side
            lite = ScheduledRun(
                reporters=job.reporters,
                start_at=job.start_at,
                interval=job.interval,
                stop_at=job.stop_at,
                go_program=job.go_program,
                sampled_initial=job.sampled_initial,
            )
            future = self._pool.submit(
                _run_scheduled_chunk, entry.state, lite, CHUNK_TICKS
            )
        future.add_done_callback(
            lambda fut, workspace=workspace: self._on_chunk_done(workspace, fut)
        )

    def _on_chunk_done(self, workspace: int, future) -> None:
        if future.cancelled():
            return
        exc = future.exception()
        with self._lock:
            entry = self._registry.get(workspace)
            if entry is None:
                return  # deleted while the chunk was in flight
            entry.busy = False
            current = entry.jobs[0] if entry.jobs else None
            if exc is not None:
                # a job that cannot run (e.g. setup error inside a queued
                # program) is dropped; the workspace keeps its last state
                log.warning("workspace %d job failed: %s", workspace, exc)
                if current is not None:
                    entry.jobs.pop(0)
                    if isinstance(current, ScheduledRun):
                        current.status = "stopped-early"
            else:
                # the pool hands back pickled copies of the state and job;
                # fold the copy's progress into the queued original
                state, job_copy, extra = future.result()
                entry.state = state
                if isinstance(job_copy, ProgramRunner):
                    if isinstance(current, _CommandJob):
                        if job_copy.done:
                            entry.jobs.pop(0)
                        else:
                            current.runner = job_copy
                else:
                    rows, finished = extra
                    if isinstance(current, ScheduledRun) and entry.scheduled is current:
                        current.buffer.extend(rows)
                        current.sampled_initial = job_copy.sampled_initial
                        if finished:
                            current.status = "complete"
                            entry.jobs.pop(0)
            if entry.stop_requested:
                entry.stop_requested = False
                entry.jobs.clear()
                if entry.scheduled is not None and entry.scheduled.status == "running":
                    entry.scheduled.status = "stopped-early"
            self._maybe_submit(workspace, entry)


_HANDLERS = {
    "new_workspace": Server._op_new_workspace,
    "delete_workspace": Server._op_delete_workspace,
    "delete_all_workspaces": Server._op_delete_all_workspaces,
    "list_workspaces": Server._op_list_workspaces,
    "open_model": Server._op_open_model,
    "close_model": Server._op_close_model,
    "command": Server._op_command,
    "report": Server._op_report,
    "set_params_random": Server._op_set_params_random,
    "get_param_names": Server._op_get_param_names,
    "get_param_ranges": Server._op_get_param_ranges,
    "schedule_reporters_and_run": Server._op_schedule,
    "get_scheduled_reporter_results": Server._op_get_results,
    "shutdown": Server._op_shutdown,
}
