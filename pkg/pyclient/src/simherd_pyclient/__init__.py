"""Client bindings for driving a simherd controller server.

startServer attaches to a running server when given a `host:port` or
`addr:host:port` locator (or when SIMHERD_SERVER_ADDR is set), spawns
`python -m simherd serve` when given nothing, and otherwise treats its
argument as a server executable to launch. Workspace controllers made
through newNetLogoHeadlessWorkspace are tracked client-side, so
getAllHeadlessWorkspaces returns the objects this process knows about.

Typical session:

    import simherd_pyclient as client
    client.startServer()
    ws = client.newNetLogoHeadlessWorkspace()
    ws.openModel("Fire.nlogo")
    ws.command("setup")
    ws.scheduleReportersAndRun(["ticks", "burned-trees"], 0, 1, 100, "go")
    rows = ws.getScheduledReporterResults()   # [] until the run finishes
    client.stopServer()
"""

import os
import subprocess
import sys

from .connection import Connection, ControllerError
from .workspace import NetLogoHeadlessWorkspace

__all__ = [
    "ControllerError",
    "NetLogoApp",
    "NetLogoHeadlessWorkspace",
    "deleteAllHeadlessWorkspaces",
    "deleteHeadlessWorkspace",
    "getAllHeadlessWorkspaces",
    "newNetLogoHeadlessWorkspace",
    "startServer",
    "stopServer",
]

_connection = None
_process = None
_workspaces = []


def _looks_like_address(text):
    if text.startswith("addr:"):
        return True
    if "/" in text or "\\" in text:
        return False
    host, _, port = text.rpartition(":")
    return bool(host) and port.isdigit()


def _address_parts(text):
    if text.startswith("addr:"):
        text = text[len("addr:"):]
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise ControllerError(f"bad server address {text!r}; expected host:port")
    return host, int(port)


def _spawn(argv):
    process = subprocess.Popen(
        argv,
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        text=True,
    )
    # the server announces its bound address on stdout once it is ready
    while True:
        line = process.stdout.readline()
        if not line:
            process.wait(timeout=10)
            raise ControllerError(
                f"server process exited before announcing an address: {argv}"
            )
        if line.startswith("listening "):
            host, port = _address_parts(line.split()[1])
            try:
                return Connection(host, port), process
            except ControllerError:
                process.kill()
                raise


def _require_connection():
    if _connection is None:
        raise ControllerError("startServer has not been called")
    return _connection


def startServer(path_to_netlogo=None):
    """Connect this module to a controller server, spawning one if needed."""
    global _connection, _process
    if _connection is not None:
        raise ControllerError("server already started; call stopServer first")
    override = os.environ.get("SIMHERD_SERVER_ADDR")
    if override:
        _connection = Connection(*_address_parts(override))
    elif path_to_netlogo is None:
        _connection, _process = _spawn(
            [sys.executable, "-m", "simherd", "serve", "--port", "0"]
        )
    elif _looks_like_address(path_to_netlogo):
        _connection = Connection(*_address_parts(path_to_netlogo))
    else:
        _connection, _process = _spawn([path_to_netlogo])


def stopServer():
    """Disconnect; a server this module spawned is also shut down."""
    global _connection, _process
    if _connection is None:
        return
    if _process is not None:
        try:
            _connection.rpc("shutdown")
        except ControllerError:
            pass
    _connection.close()
    _connection = None
    _workspaces.clear()
    if _process is not None:
        try:
            _process.wait(timeout=10)
        except subprocess.TimeoutExpired:
            _process.kill()
            _process.wait(timeout=10)
        _process = None


def newNetLogoHeadlessWorkspace():
    connection = _require_connection()
    handle = connection.rpc("new_workspace")
    workspace = NetLogoHeadlessWorkspace(connection, handle)
    _workspaces.append(workspace)
    return workspace


def getAllHeadlessWorkspaces():
    return list(_workspaces)


def deleteHeadlessWorkspace(workspace):
    handle = getattr(workspace, "handle", workspace)
    _require_connection().rpc("delete_workspace", workspace=handle)
    _workspaces[:] = [w for w in _workspaces if w.handle != handle]


def deleteAllHeadlessWorkspaces():
    _require_connection().rpc("delete_all_workspaces")
    _workspaces.clear()


def NetLogoApp():
    raise NotImplementedError(
        "unsupported: there is no GUI application behind this server"
    )
