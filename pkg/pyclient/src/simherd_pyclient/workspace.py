"""Proxy controller for one headless workspace on the server."""


class NetLogoHeadlessWorkspace:
    """Wire proxy for a single server-side workspace.

    `report` and `getScheduledReporterResults` hand back strings exactly
    as the server produced them; callers cast as needed. Result polling
    stays on the caller's side: `getScheduledReporterResults` returns an
    empty list while a scheduled run is still in flight.
    """

    def __init__(self, connection, handle):
        self._connection = connection
        self._handle = handle

    @property
    def handle(self):
        return self._handle

    def __repr__(self):
        return f"NetLogoHeadlessWorkspace({self._handle})"

    def openModel(self, modelPath):
        self._connection.rpc("open_model", workspace=self._handle, path=modelPath)

    def closeModel(self):
        self._connection.rpc("close_model", workspace=self._handle)

    def command(self, command):
        self._connection.rpc("command", workspace=self._handle, command=command)

    def report(self, reporter):
        return self._connection.rpc(
            "report", workspace=self._handle, reporter=reporter
        )

    def setParamsRandom(self):
        self._connection.rpc("set_params_random", workspace=self._handle)

    def getParamNames(self):
        return self._connection.rpc("get_param_names", workspace=self._handle)

    def getParamRanges(self):
        return self._connection.rpc("get_param_ranges", workspace=self._handle)

    def scheduleReportersAndRun(
        self,
        reporters,
        startAtTick=0,
        intervalTicks=1,
        stopAtTick=-1,
        goCommand="go",
    ):
        self._connection.rpc(
            "schedule_reporters_and_run",
            workspace=self._handle,
            reporters=list(reporters),
            start_at_tick=startAtTick,
            interval_ticks=intervalTicks,
            stop_at_tick=stopAtTick,
            go_command=goCommand,
        )

    def getScheduledReporterResults(self):
        return self._connection.rpc(
            "get_scheduled_reporter_results", workspace=self._handle
        )
