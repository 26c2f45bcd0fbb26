"""Socket plumbing for the controller server's line protocol.

One JSON object per LF-terminated UTF-8 line in each direction. Request
ids are issued sequentially per connection, and keys are serialized
sorted with compact separators so every request has exactly one wire
form.
"""

import json
import socket


class ControllerError(RuntimeError):
    """Raised for ok:false envelopes, carrying the server's error string."""


class Connection:
    def __init__(self, host, port):
        self.host = host
        self.port = int(port)
        try:
            self._sock = socket.create_connection((host, self.port), timeout=30)
        except OSError as exc:
            raise ControllerError(
                f"cannot connect to controller server at {host}:{port}: {exc}"
            ) from None
        self._sock.settimeout(None)
        self._reader = self._sock.makefile("rb")
        self._next_id = 0

    def rpc(self, op, **args):
        request = {"id": self._next_id, "op": op, "args": args}
        self._next_id += 1
        payload = json.dumps(request, sort_keys=True, separators=(",", ":"))
        try:
            self._sock.sendall(payload.encode("utf-8") + b"\n")
            line = self._reader.readline()
        except OSError as exc:
            raise ControllerError(f"connection lost: {exc}") from None
        if not line:
            raise ControllerError("server closed the connection")
        response = json.loads(line)
        if not response.get("ok"):
            raise ControllerError(response.get("error", "unknown server error"))
        return response["result"]

    def close(self):
        for closer in (self._reader.close, self._sock.close):
            try:
                closer()
            except OSError:
                pass
