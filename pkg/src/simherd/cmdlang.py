"""The command and reporter string language clients send over the wire.

The grammar is deliberately tiny: it is the closure of the command and
reporter strings that orchestration scripts actually send (`setup`,
`go`, `stop`, `repeat n [...]`, `random-seed n`, `set <param> <expr>`,
and the reporters `ticks`, `count <breed>`, `not any? turtles`, plus
bare reporter names like `burned-trees`). Anything outside it is a
parse error; there are no procedures, agentsets, or arithmetic.

Parsing is pure and raises `ParseError` with the offending position and
token. Execution runs against an engine `Workspace`; `ProgramRunner`
makes long programs resumable so a server can pause between ticks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .engine import EngineError

# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class NumberLiteral:
    value: float


@dataclass(frozen=True)
class StringLiteral:
    value: str


@dataclass(frozen=True)
class BooleanLiteral:
    value: bool


@dataclass(frozen=True)
class Random:
    """`random n`: uniform integer in [0, n). Bound is fixed at parse time."""

    bound: int


@dataclass(frozen=True)
class Set:
    name: str
    value: object


@dataclass(frozen=True)
class Setup:
    pass


@dataclass(frozen=True)
class Go:
    pass


@dataclass(frozen=True)
class Stop:
    pass


@dataclass(frozen=True)
class Repeat:
    count: int
    body: tuple


@dataclass(frozen=True)
class RandomSeed:
    seed: int


@dataclass(frozen=True)
class Ticks:
    pass


@dataclass(frozen=True)
class Count:
    breed: str


@dataclass(frozen=True)
class NamedReporter:
    name: str


@dataclass(frozen=True)
class NotAnyTurtles:
    pass


class ParseError(ValueError):
    def __init__(self, message: str, position: int, token: str = ""):
        self.position = position
        self.token = token
        super().__init__(f"{message} at position {position}")


# -- tokenizer ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<number>-?\d+(?:\.\d+)?)
      | (?P<ident>[a-z][a-z0-9-]*\??)
      | (?P<string>"[^"]*")
      | (?P<lbracket>\[)
      | (?P<rbracket>\])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    if not isinstance(text, str):
        raise ParseError("input must be a string", 0)
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == '"':
                raise ParseError("unterminated string literal", pos, '"')
            raise ParseError(
                f"unexpected character {text[pos]!r}", pos, text[pos]
            )
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


# -- parser ---------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> _Token | None:
        tok = self.peek()
        if tok is not None:
            self.i += 1
        return tok

    def fail(self, message: str, tok: _Token | None):
        if tok is None:
            raise ParseError(message + ", found end of input", len(self.text))
        raise ParseError(f"{message}, found {tok.text!r}", tok.position, tok.text)

    def integer(self, what: str, minimum: int) -> int:
        tok = self.take()
        if tok is None or tok.kind != "number" or "." in tok.text:
            self.fail(f"expected {what} (an integer)", tok)
        value = int(tok.text)
        if value < minimum:
            raise ParseError(
                f"{what} must be >= {minimum}, found {tok.text}",
                tok.position,
                tok.text,
            )
        return value

    def command(self):
        tok = self.take()
        if tok is None or tok.kind != "ident":
            self.fail("expected a command", tok)
        word = tok.text
        if word == "setup":
            return Setup()
        if word == "go":
            return Go()
        if word == "stop":
            return Stop()
        if word == "random-seed":
            seed = self.take()
            if seed is None or seed.kind != "number":
                self.fail("expected a seed number after 'random-seed'", seed)
            # scripts format float samples straight into the command text;
            # int() truncates the decimals toward zero
            return RandomSeed(int(float(seed.text)))
        if word == "repeat":
            count = self.integer("repeat count", 0)
            opener = self.take()
            if opener is None or opener.kind != "lbracket":
                self.fail("expected '[' after repeat count", opener)
            return Repeat(count, self.sequence(bracketed=True))
        if word == "set":
            name = self.take()
            if name is None or name.kind != "ident":
                self.fail("expected a parameter name after 'set'", name)
            return Set(name.text, self.expression())
        raise ParseError(
            f"unsupported NetLogo construct {word!r}", tok.position, word
        )

    def expression(self):
        tok = self.take()
        if tok is None:
            self.fail("expected an expression", tok)
        if tok.kind == "number":
            return NumberLiteral(float(tok.text) if "." in tok.text else int(tok.text))
        if tok.kind == "string":
            return StringLiteral(tok.text[1:-1])
        if tok.kind == "ident":
            if tok.text == "true":
                return BooleanLiteral(True)
            if tok.text == "false":
                return BooleanLiteral(False)
            if tok.text == "random":
                return Random(self.integer("random bound", 1))
        self.fail("expected an expression", tok)

    def sequence(self, bracketed: bool) -> tuple:
        commands = []
        while True:
            tok = self.peek()
            if tok is None:
                if bracketed:
                    raise ParseError(
                        "missing ']' to close repeat", len(self.text)
                    )
                return tuple(commands)
            if tok.kind == "rbracket":
                if bracketed:
                    self.take()
                    return tuple(commands)
                self.fail("expected a command", tok)
            commands.append(self.command())

    def reporter(self):
        tok = self.take()
        if tok is None or tok.kind != "ident":
            self.fail("expected a reporter", tok)
        if tok.text == "ticks":
            return Ticks()
        if tok.text == "count":
            breed = self.take()
            if breed is None or breed.kind != "ident":
                self.fail("expected a breed name after 'count'", breed)
            return Count(breed.text)
        if tok.text == "not":
            for expected in ("any?", "turtles"):
                nxt = self.take()
                if nxt is None or nxt.kind != "ident" or nxt.text != expected:
                    self.fail(f"expected {expected!r} in 'not any? turtles'", nxt)
            return NotAnyTurtles()
        return NamedReporter(tok.text)

    def done_or_fail(self):
        tok = self.peek()
        if tok is not None:
            self.fail("unexpected trailing input", tok)


def parse_commands(text: str) -> tuple:
    """Parse a whitespace-separated command sequence."""
    parser = _Parser(text)
    commands = parser.sequence(bracketed=False)
    if not commands:
        raise ParseError("expected a command", len(parser.text))
    return commands


def parse_command(text: str):
    """Parse exactly one command."""
    parser = _Parser(text)
    tok = parser.peek()
    if tok is None:
        raise ParseError("expected a command", len(parser.text))
    command = parser.command()
    parser.done_or_fail()
    return command


def parse_reporter(text: str):
    """Parse exactly one reporter."""
    parser = _Parser(text)
    reporter = parser.reporter()
    parser.done_or_fail()
    return reporter


# -- pretty printer ---------------------------------------------------------------


def _expr_to_text(expr) -> str:
    if isinstance(expr, NumberLiteral):
        return repr(expr.value)
    if isinstance(expr, StringLiteral):
        return f'"{expr.value}"'
    if isinstance(expr, BooleanLiteral):
        return "true" if expr.value else "false"
    if isinstance(expr, Random):
        return f"random {expr.bound}"
    raise TypeError(f"not an expression: {expr!r}")


def command_to_text(command) -> str:
    if isinstance(command, Setup):
        return "setup"
    if isinstance(command, Go):
        return "go"
    if isinstance(command, Stop):
        return "stop"
    if isinstance(command, RandomSeed):
        return f"random-seed {command.seed}"
    if isinstance(command, Set):
        return f"set {command.name} {_expr_to_text(command.value)}"
    if isinstance(command, Repeat):
        body = " ".join(command_to_text(c) for c in command.body)
        return f"repeat {command.count} [{body}]"
    raise TypeError(f"not a command: {command!r}")


def reporter_to_text(reporter) -> str:
    if isinstance(reporter, Ticks):
        return "ticks"
    if isinstance(reporter, Count):
        return f"count {reporter.breed}"
    if isinstance(reporter, NotAnyTurtles):
        return "not any? turtles"
    if isinstance(reporter, NamedReporter):
        return reporter.name
    raise TypeError(f"not a reporter: {reporter!r}")


# -- execution ---------------------------------------------------------------------


def _eval_expr(ws, expr):
    if isinstance(expr, Random):
        return ws.rng.randbelow(expr.bound)
    return expr.value


class ProgramRunner:
    """Resumable interpreter over a parsed command sequence.

    `run` executes until the program finishes or `max_ticks` go-commands
    have run, whichever comes first; calling it again resumes where the
    previous call paused (including inside nested repeats). A frozen
    model's go still counts against the budget, so `repeat n [go]` on a
    stopped model terminates after n no-ops rather than spinning.
    """

    def __init__(self, commands):
        # frame: [body, next index, iterations left including the current one]
        self._stack = [[tuple(commands), 0, 1]]
        self.done = False

    def run(self, ws, max_ticks: int | None = None) -> int:
        """Execute, advancing at most max_ticks gos; returns gos executed."""
        ticks = 0
        while self._stack:
            frame = self._stack[-1]
            body, index, repeats_left = frame
            if index >= len(body):
                if repeats_left > 1:
                    frame[1] = 0
                    frame[2] = repeats_left - 1
                else:
                    self._stack.pop()
                continue
            command = body[index]
            if isinstance(command, Go):
                if max_ticks is not None and ticks >= max_ticks:
                    return ticks
                ws.step()
                ticks += 1
            elif isinstance(command, Repeat):
                frame[1] = index + 1
                if command.count > 0:
                    self._stack.append([command.body, 0, command.count])
                continue
            elif isinstance(command, Stop):
                self._stack.clear()
                break
            elif isinstance(command, Setup):
                ws.setup()
            elif isinstance(command, RandomSeed):
                ws.reseed(command.seed)
            elif isinstance(command, Set):
                ws.set_param(command.name, _eval_expr(ws, command.value))
            else:
                raise TypeError(f"not a command: {command!r}")
            frame[1] = index + 1
        self.done = True
        return ticks


def program_has_repeat(commands) -> bool:
    """True when the sequence contains a Repeat anywhere (a long command)."""
    for command in commands:
        if isinstance(command, Repeat):
            return True
    return False


def execute_program(ws, commands) -> None:
    """Run a command sequence to completion on a workspace."""
    ProgramRunner(commands).run(ws)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def evaluate(ws, reporter) -> str:
    """Evaluate a reporter against a workspace, as a string.

    Evaluation failures (unknown names, wrong model) come back as
    "ERROR: ..." strings rather than exceptions: the reporter value is
    the place scripts look for them, and the workspace stays usable.
    """
    model = ws.require_model()
    try:
        if isinstance(reporter, Ticks):
            value = model.ticks
        elif isinstance(reporter, Count):
            value = model.count(reporter.breed)
        elif isinstance(reporter, NotAnyTurtles):
            value = not model.any_turtles()
        elif isinstance(reporter, NamedReporter):
            value = model.reporter_value(reporter.name)
        else:
            raise TypeError(f"not a reporter: {reporter!r}")
    except EngineError as exc:
        return f"ERROR: {exc}"
    return _format_value(value)
