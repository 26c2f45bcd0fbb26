"""Command/reporter language: golden parses, round-trips, and evaluation."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simherd.cmdlang import (
    BooleanLiteral,
    Count,
    Go,
    NamedReporter,
    NotAnyTurtles,
    NumberLiteral,
    ParseError,
    ProgramRunner,
    Random,
    RandomSeed,
    Repeat,
    Set,
    Setup,
    Stop,
    StringLiteral,
    Ticks,
    command_to_text,
    evaluate,
    execute_program,
    parse_command,
    parse_commands,
    parse_reporter,
    reporter_to_text,
)
from simherd.engine import Workspace

# Every command string that appears in a client script, with its parse.
COMMAND_GOLDENS = [
    ("stop", Stop()),
    ("setup", Setup()),
    ("go", Go()),
    ("repeat 100 [go]", Repeat(100, (Go(),))),
    ("repeat 1000 [go]", Repeat(1000, (Go(),))),
    ("set density random 99", Set("density", Random(99))),
    ("random-seed 999", RandomSeed(999)),
    ("set initial-number-sheep 150", Set("initial-number-sheep", NumberLiteral(150))),
    ("set initial-number-wolves 150", Set("initial-number-wolves", NumberLiteral(150))),
    ("set grass-regrowth-time 50", Set("grass-regrowth-time", NumberLiteral(50))),
    ("set sheep-gain-from-food 25", Set("sheep-gain-from-food", NumberLiteral(25))),
    ("set wolf-gain-from-food 50", Set("wolf-gain-from-food", NumberLiteral(50))),
    ("set sheep-reproduce 10", Set("sheep-reproduce", NumberLiteral(10))),
    ("set wolf-reproduce 10", Set("wolf-reproduce", NumberLiteral(10))),
    ("set show-energy? false", Set("show-energy?", BooleanLiteral(False))),
    ('set model-version "sheep-wolves-grass"',
     Set("model-version", StringLiteral("sheep-wolves-grass"))),
    ("set initial-number-sheep 100", Set("initial-number-sheep", NumberLiteral(100))),
]

REPORTER_GOLDENS = [
    ("ticks", Ticks()),
    ("count sheep", Count("sheep")),
    ("count wolves", Count("wolves")),
    ("not any? turtles", NotAnyTurtles()),
    ("burned-trees", NamedReporter("burned-trees")),
    ("initial-trees", NamedReporter("initial-trees")),
]


@pytest.mark.parametrize("text,expected", COMMAND_GOLDENS)
def test_command_goldens(text, expected):
    assert parse_command(text) == expected


@pytest.mark.parametrize("text,expected", REPORTER_GOLDENS)
def test_reporter_goldens(text, expected):
    assert parse_reporter(text) == expected


def test_random_seed_decimal_truncates_toward_zero():
    # batch scripts format float samples straight into the command text
    assert parse_command("random-seed 123.456") == RandomSeed(123)
    assert parse_command("random-seed 99999.99") == RandomSeed(99999)
    assert parse_command("random-seed -3.7") == RandomSeed(-3)


def test_whitespace_insensitive():
    assert parse_command("  repeat\t2 [ go  go ]\n") == Repeat(2, (Go(), Go()))
    assert parse_reporter("   count    sheep ") == Count("sheep")


def test_nested_repeat():
    assert parse_command("repeat 2 [repeat 3 [go] setup]") == Repeat(
        2, (Repeat(3, (Go(),)), Setup())
    )


def test_repeat_zero_allowed():
    assert parse_command("repeat 0 [go]") == Repeat(0, (Go(),))


def test_number_literal_forms():
    assert parse_command("set density -5") == Set("density", NumberLiteral(-5))
    assert parse_command("set density 57.5") == Set("density", NumberLiteral(57.5))
    assert parse_command("set density 0.25") == Set("density", NumberLiteral(0.25))


def test_parse_commands_sequence():
    assert parse_commands("setup repeat 2 [go] stop") == (
        Setup(),
        Repeat(2, (Go(),)),
        Stop(),
    )


def test_true_literal():
    assert parse_command("set show-energy? true") == Set(
        "show-energy?", BooleanLiteral(True)
    )


PARSE_ERRORS = [
    "",
    "   ",
    "ask turtles [die]",
    "repeat [go]",
    "repeat 2 [go",
    "repeat 2 go]",
    "repeat -1 [go]",
    "repeat 2.5 [go]",
    "set density",
    "set 5 5",
    'set model-version "unterminated',
    "set density random 0",
    "set density random -4",
    "set density random 2.5",
    "random-seed",
    "random-seed go",
    "SETUP",
    "go go extra" + "]",
    "[go]",
    "set density 1 2",  # via parse_command: trailing token
]


@pytest.mark.parametrize("text", PARSE_ERRORS)
def test_parse_command_errors(text):
    with pytest.raises(ParseError):
        parse_command(text)


def test_parse_error_carries_position_and_token():
    with pytest.raises(ParseError) as exc:
        parse_command("set density frobnicate 5")
    err = exc.value
    assert err.position == len("set density ")
    assert err.token == "frobnicate"
    assert "frobnicate" in str(err)
    assert str(err.position) in str(err)


def test_unsupported_construct_message():
    with pytest.raises(ParseError, match="unsupported NetLogo construct"):
        parse_command("ask turtles [die]")


@pytest.mark.parametrize(
    "text",
    ["", "count", "count sheep wolves", "not any? sheep", "any? turtles",
     "not any?", "ticks sheep", "42", '"hello"'],
)
def test_parse_reporter_errors(text):
    with pytest.raises(ParseError):
        parse_reporter(text)


# -- round-trip property ----------------------------------------------------

idents = st.from_regex(r"[a-z][a-z0-9-]{0,14}\??", fullmatch=True)
numbers = st.one_of(
    st.integers(min_value=-(10**9), max_value=10**9),
    st.integers(min_value=-(10**7), max_value=10**7).map(lambda n: n / 100),
)
strings = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyz0123456789-_ .", max_size=20
)
exprs = st.one_of(
    numbers.map(NumberLiteral),
    strings.map(StringLiteral),
    st.booleans().map(BooleanLiteral),
    st.integers(min_value=1, max_value=10**6).map(Random),
)

commands = st.recursive(
    st.one_of(
        st.just(Setup()),
        st.just(Go()),
        st.just(Stop()),
        st.integers(min_value=-(10**9), max_value=10**9).map(RandomSeed),
        st.builds(Set, idents, exprs),
    ),
    lambda inner: st.builds(
        Repeat,
        st.integers(min_value=0, max_value=1000),
        st.lists(inner, min_size=1, max_size=3).map(tuple),
    ),
    max_leaves=8,
)

# bare reporter names must not collide with reporter grammar heads
bare_names = idents.filter(lambda s: s not in {"count", "not", "ticks"})
reporters = st.one_of(
    st.just(Ticks()),
    st.just(NotAnyTurtles()),
    idents.map(Count),
    bare_names.map(NamedReporter),
)


@given(commands)
@settings(max_examples=200, deadline=None)
def test_command_round_trip(cmd):
    text = command_to_text(cmd)
    assert parse_command(text) == cmd


@given(reporters)
@settings(max_examples=100, deadline=None)
def test_reporter_round_trip(rep):
    text = reporter_to_text(rep)
    reparsed = parse_reporter(text)
    # bare identifiers like "sheep" legitimately parse as NamedReporter;
    # Count round-trips through its two-token form
    assert reporter_to_text(reparsed) == text


@given(st.text(max_size=60))
@settings(max_examples=300, deadline=None)
def test_parser_never_panics(text):
    for fn in (parse_command, parse_reporter, parse_commands):
        try:
            fn(text)
        except ParseError:
            pass


@given(st.binary(max_size=40))
@settings(max_examples=100, deadline=None)
def test_parser_never_panics_on_bytes(data):
    text = data.decode("utf-8", errors="replace")
    try:
        parse_commands(text)
    except ParseError:
        pass


# -- execution and evaluation -------------------------------------------------


def fire_ws(seed=7):
    ws = Workspace(seed=seed)
    ws.open_model("fire")
    return ws


def wsp_ws(seed=7):
    ws = Workspace(seed=seed)
    ws.open_model("wolf-sheep-predation")
    return ws


def run_text(ws, text):
    execute_program(ws, parse_commands(text))


def report_text(ws, text):
    return evaluate(ws, parse_reporter(text))


def test_set_and_setup_and_go():
    ws = fire_ws()
    run_text(ws, "set density 99")
    assert ws.model.params["density"] == 99
    run_text(ws, "setup")
    before = report_text(ws, "burned-trees")
    run_text(ws, "go")
    assert ws.model.ticks == 1
    assert int(report_text(ws, "burned-trees")) > int(before)


def test_set_random_draws_from_workspace_stream():
    a, b = fire_ws(seed=11), fire_ws(seed=11)
    run_text(a, "set density random 99")
    run_text(b, "set density random 99")
    assert a.model.params["density"] == b.model.params["density"]
    assert 0 <= a.model.params["density"] < 99
    seen = set()
    for _ in range(50):
        run_text(a, "set density random 99")
        seen.add(a.model.params["density"])
    assert len(seen) > 10


def test_repeat_zero_no_tick_advance():
    ws = fire_ws()
    run_text(ws, "setup")
    run_text(ws, "repeat 0 [go]")
    assert ws.model.ticks == 0


def test_repeat_advances_ticks():
    ws = fire_ws()
    run_text(ws, "set density 99 setup repeat 5 [go]")
    assert ws.model.ticks == 5


def test_random_seed_determinism():
    a, b = fire_ws(seed=1), fire_ws(seed=2)
    for ws in (a, b):
        run_text(ws, "set density 60 random-seed 999 setup repeat 3 [go]")
    assert (a.model.tree == b.model.tree).all()
    assert report_text(a, "burned-trees") == report_text(b, "burned-trees")


def test_stop_halts_enclosing_repeat():
    ws = fire_ws()
    run_text(ws, "set density 99 setup")
    run_text(ws, "repeat 100 [go stop]")
    assert ws.model.ticks == 1
    # and a stop mid-sequence skips the rest of the program
    run_text(ws, "stop go")
    assert ws.model.ticks == 1


def test_standalone_stop_is_noop():
    ws = fire_ws()
    run_text(ws, "stop")  # nothing running, nothing set up
    assert ws.model.ticks == 0
    run_text(ws, "setup stop")
    assert ws.model.ticks == 0


def test_program_runner_pauses_on_tick_budget():
    ws = fire_ws()
    run_text(ws, "set density 99 setup")
    runner = ProgramRunner(parse_commands("repeat 10 [go]"))
    advanced = runner.run(ws, max_ticks=4)
    assert advanced == 4
    assert not runner.done
    assert ws.model.ticks == 4
    advanced = runner.run(ws, max_ticks=4)
    assert (advanced, ws.model.ticks) == (4, 8)
    advanced = runner.run(ws)
    assert (advanced, ws.model.ticks, runner.done) == (2, 10, True)


def test_program_runner_resumes_nested_repeat():
    ws = fire_ws()
    run_text(ws, "set density 99 setup")
    runner = ProgramRunner(parse_commands("repeat 3 [repeat 2 [go] go]"))
    total = 0
    while not runner.done:
        total += runner.run(ws, max_ticks=2)
    assert total == 9
    assert ws.model.ticks == 9


def test_evaluate_formats():
    ws = wsp_ws()
    run_text(ws, "random-seed 5 setup")
    assert report_text(ws, "ticks") == "0"
    assert report_text(ws, "count sheep") == "100"
    assert report_text(ws, "count wolves") == "50"
    assert report_text(ws, "not any? turtles") == "false"


def test_not_any_turtles_after_burnout():
    ws = fire_ws()
    run_text(ws, "set density 1 setup repeat 300 [go]")
    assert ws.model.stopped()
    assert report_text(ws, "not any? turtles") == "true"


def test_evaluation_errors_become_error_strings():
    ws = wsp_ws()
    run_text(ws, "setup")
    msg = report_text(ws, "count unicorns")
    assert msg == "ERROR: nothing named 'unicorns' to count in this model"
    msg = report_text(ws, "burned-trees")
    assert msg.startswith("ERROR: nothing named 'burned-trees'")
    ws2 = fire_ws()
    assert report_text(ws2, "count sheep").startswith("ERROR:")


def test_execute_setup_error_propagates():
    from simherd.engine import EngineError

    ws = wsp_ws()
    run_text(ws, 'set model-version "sheep-wolves"')
    with pytest.raises(EngineError, match="unsupported model-version"):
        run_text(ws, "setup")
