"""Client for the controller server: session, workspace proxies, lifecycle.

A `ServerSession` owns one TCP connection. Calls are serialized under a
lock so a session can be shared between threads; the server answers in
request order per connection. `start_server` either attaches to a running
server (`addr:host:port`, plain `host:port`, or the SIMHERD_SERVER_ADDR
environment variable) or spawns one from a binary path and adopts the
process; `stop_server` sends shutdown only to a server it spawned.
"""

from __future__ import annotations

import os
import socket
import subprocess
import sys
import threading

from . import protocol


class ClientError(Exception):
    pass


class DisconnectedError(ClientError):
    pass


class ServerError(ClientError):
    """An ok:false envelope from the server; `error` is the wire string."""

    def __init__(self, error: str):
        self.error = error
        super().__init__(error)


def _parse_address(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise ClientError(f"bad server address {text!r}; expected host:port")
    return host, int(port)


class ServerSession:
    def __init__(self, host: str, port: int, process: subprocess.Popen | None = None):
        self.address = f"{host}:{port}"
        self._process = process
        self._lock = threading.Lock()
        self._next_id = 0
        self._workspaces: dict[int, RemoteWorkspace] = {}
        try:
            self._sock = socket.create_connection((host, port), timeout=30)
        except OSError as exc:
            if process is not None:
                process.kill()
            raise ClientError(
                f"cannot connect to server at {host}:{port}: {exc}"
            ) from None
        self._sock.settimeout(None)
        self._reader = self._sock.makefile("rb")
        self._closed = False

    @property
    def spawned(self) -> bool:
        return self._process is not None

    def rpc(self, op: str, args: dict | None = None):
        """One request/response round trip; raises ServerError on ok:false."""
        with self._lock:
            if self._closed:
                raise DisconnectedError("session is closed")
            request_id = self._next_id
            self._next_id += 1
            message = {"id": request_id, "op": op, "args": args or {}}
            try:
                self._sock.sendall(protocol.encode(message))
                line = self._reader.readline()
            except OSError as exc:
                self._closed = True
                raise DisconnectedError(f"connection lost: {exc}") from None
            if not line:
                self._closed = True
                raise DisconnectedError("connection closed by server")
        response = protocol.decode(line)
        if response.get("id") != request_id:
            raise ClientError(
                f"response id {response.get('id')} does not match request {request_id}"
            )
        if response.get("ok"):
            return response.get("result")
        raise ServerError(str(response.get("error")))

    # -- Table 1 surface -------------------------------------------------------

    def new_workspace(self) -> "RemoteWorkspace":
        handle = self.rpc("new_workspace")
        workspace = RemoteWorkspace(self, handle)
        self._workspaces[handle] = workspace
        return workspace

    def delete_workspace(self, workspace: "RemoteWorkspace | int") -> None:
        handle = workspace.handle if isinstance(workspace, RemoteWorkspace) else workspace
        self.rpc("delete_workspace", {"workspace": handle})
        self._workspaces.pop(handle, None)

    def delete_all_workspaces(self) -> None:
        self.rpc("delete_all_workspaces")
        self._workspaces.clear()

    def get_all_workspaces(self) -> list:
        """Workspaces created by this session, in creation order."""
        return [self._workspaces[h] for h in sorted(self._workspaces)]

    def list_workspaces(self) -> list:
        return self.rpc("list_workspaces")

    def shutdown_server(self) -> None:
        self.rpc("shutdown")

    def close(self) -> None:
        with self._lock:
            if self._closed:
                return
            self._closed = True
            try:
                self._sock.close()
            except OSError:
                pass

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        stop_server(self)


class RemoteWorkspace:
    """1:1 proxy for one server-side workspace."""

    def __init__(self, session: ServerSession, handle: int):
        self.session = session
        self.handle = handle

    def _rpc(self, op: str, **args):
        args["workspace"] = self.handle
        return self.session.rpc(op, args)

    def open_model(self, path: str) -> str:
        return self._rpc("open_model", path=path)

    def close_model(self) -> None:
        self._rpc("close_model")

    def command(self, command: str) -> None:
        self._rpc("command", command=command)

    def report(self, reporter: str) -> str:
        return self._rpc("report", reporter=reporter)

    def set_params_random(self) -> dict:
        return self._rpc("set_params_random")

    def get_param_names(self) -> list:
        return self._rpc("get_param_names")

    def get_param_ranges(self) -> list:
        return self._rpc("get_param_ranges")

    def schedule_reporters_and_run(
        self,
        reporters: list,
        start_at_tick: int = 0,
        interval_ticks: int = 1,
        stop_at_tick: int = -1,
        go_command: str = "go",
    ) -> None:
        self._rpc(
            "schedule_reporters_and_run",
            reporters=list(reporters),
            start_at_tick=start_at_tick,
            interval_ticks=interval_ticks,
            stop_at_tick=stop_at_tick,
            go_command=go_command,
        )

    def get_scheduled_reporter_results(self) -> list:
        return self._rpc("get_scheduled_reporter_results")


def _spawn(argv: list) -> tuple[subprocess.Popen, str]:
    """Launch a server process and wait for its "listening <addr>" line."""
    try:
        process = subprocess.Popen(
            argv,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
        )
    except OSError as exc:
        raise ClientError(f"cannot launch server {argv[0]!r}: {exc}") from None
    assert process.stdout is not None
    while True:
        line = process.stdout.readline()
        if not line:
            process.kill()
            raise ClientError(
                f"server {argv[0]!r} exited before printing its address"
            )
        if line.startswith("listening "):
            return process, line.split(None, 1)[1].strip()


def start_server(locator: str | None = None) -> ServerSession:
    """Connect to a server, spawning one when the locator is a binary path.

    The SIMHERD_SERVER_ADDR environment variable overrides the locator;
    `addr:host:port` or a plain `host:port` attaches without spawning.
    Anything else is treated as a path to a server binary, which is run as
    `<binary> serve --port 0` and owned by the returned session.
    """
    env_addr = os.environ.get(protocol.ADDR_ENV_VAR)
    if env_addr:
        host, port = _parse_address(env_addr)
        return ServerSession(host, port)
    if locator is None:
        argv = [sys.executable, "-m", "simherd", "serve", "--port", "0"]
    elif locator.startswith("addr:"):
        host, port = _parse_address(locator[len("addr:"):])
        return ServerSession(host, port)
    else:
        head, _, tail = locator.rpartition(":")
        if head and tail.isdigit() and "/" not in locator and "\\" not in locator:
            return ServerSession(head, int(tail))
        argv = [locator, "serve", "--port", "0"]
        if locator.endswith(".py"):
            argv.insert(0, sys.executable)
    process, address = _spawn(argv)
    host, port = _parse_address(address)
    return ServerSession(host, port, process=process)


def stop_server(session: ServerSession) -> None:
    """Shut the server down iff this session spawned it, then disconnect."""
    process = session._process
    if process is not None:
        try:
            session.shutdown_server()
        except ClientError:
            pass
    session.close()
    if process is not None:
        try:
            process.wait(timeout=10)
        except subprocess.TimeoutExpired:
            process.kill()
            process.wait(timeout=10)
        session._process = None
