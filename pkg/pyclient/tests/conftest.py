"""Shared fixtures: a real controller server from the primary package.

The client package under test never imports the primary package; these
fixtures may, to give the scripts something to talk to.
"""

import pytest

from simherd.server import Server


@pytest.fixture
def controller():
    srv = Server(host="127.0.0.1", port=0, workers=2)
    srv.start()
    yield srv
    srv.stop()


@pytest.fixture
def attached(controller, monkeypatch):
    """Point startServer at the in-process controller via the env override."""
    monkeypatch.setenv("SIMHERD_SERVER_ADDR", f"127.0.0.1:{controller.port}")
    yield controller
