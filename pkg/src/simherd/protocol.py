"""Wire protocol: one JSON object per LF-terminated UTF-8 line.

Requests look like `{"id": 1, "op": "new_workspace", "args": {}}` and every
request gets exactly one response, `{"id": 1, "ok": true, "result": ...}` or
`{"id": 1, "ok": false, "error": "..."}`. Encoding is canonical (sorted
keys, no spaces) so a session transcript is byte-reproducible across client
implementations.
"""

from __future__ import annotations

import json

DEFAULT_PORT = 8923
ADDR_ENV_VAR = "SIMHERD_SERVER_ADDR"


class ProtocolError(ValueError):
    pass


def encode(message: dict) -> bytes:
    """Canonical single-line encoding of one protocol message."""
    return (json.dumps(message, sort_keys=True, separators=(",", ":")) + "\n").encode(
        "utf-8"
    )


def decode(line: bytes | str) -> dict:
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProtocolError(f"invalid UTF-8: {exc}") from None
    try:
        message = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"invalid JSON: {exc.msg}") from None
    if not isinstance(message, dict):
        raise ProtocolError("message must be a JSON object")
    return message


def parse_request(message: dict) -> tuple[int, str, dict]:
    """Validate a request envelope, returning (id, op, args)."""
    request_id = message.get("id")
    if not isinstance(request_id, int) or isinstance(request_id, bool):
        raise ProtocolError("request 'id' must be an integer")
    op = message.get("op")
    if not isinstance(op, str):
        raise ProtocolError("request 'op' must be a string")
    args = message.get("args", {})
    if not isinstance(args, dict):
        raise ProtocolError("request 'args' must be an object")
    return request_id, op, args


def ok_response(request_id: int, result) -> dict:
    return {"id": request_id, "ok": True, "result": result}


def error_response(request_id, error: str) -> dict:
    return {"id": request_id, "ok": False, "error": error}
