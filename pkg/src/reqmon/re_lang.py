"""Restricted English (RE): a five-slot requirement template with exactly
one parse and a deterministic lowering to LTLf.

Template:  <scope>, [when <trigger>,] the <component> shall <timing> satisfy <response>

  scope    := "globally" | "while" <bool-expr>
  timing   := "always" | "eventually" | "immediately"
            | "within" <k> "frame"/"frames" | "until" <bool-expr>

Bool-exprs are the propositional fragment of the LTLf grammar. The full
lowering table lives in docs/re-grammar.md.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from . import ltlf
from .ltlf import Formula, always, eventually, implies, next_, or_, until


class ReError(Exception):
    pass


class ReParseError(ReError):
    def __init__(self, message: str, position: int, text: str):
        super().__init__(f"{message} (at offset {position}: ...{text[position:position + 30]!r})")
        self.position = position


@dataclass(frozen=True)
class Globally:
    def render(self) -> str:
        return "globally"


@dataclass(frozen=True)
class While:
    condition: Formula

    def render(self) -> str:
        return f"while {ltlf.print_formula(self.condition)}"


Scope = Union[Globally, While]


@dataclass(frozen=True)
class TimingAlways:
    def render(self) -> str:
        return "always"


@dataclass(frozen=True)
class TimingEventually:
    def render(self) -> str:
        return "eventually"


@dataclass(frozen=True)
class TimingImmediately:
    def render(self) -> str:
        return "immediately"


@dataclass(frozen=True)
class TimingWithin:
    frames: int

    def __post_init__(self):
        if self.frames < 1:
            raise ReError("within requires a positive frame count")

    def render(self) -> str:
        return f"within {self.frames} frames"


@dataclass(frozen=True)
class TimingUntil:
    release: Formula

    def render(self) -> str:
        return f"until {ltlf.print_formula(self.release)}"


Timing = Union[TimingAlways, TimingEventually, TimingImmediately, TimingWithin, TimingUntil]

_COMPONENT_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


@dataclass(frozen=True)
class ReSpec:
    """A parsed Restricted English requirement."""

    scope: Scope
    condition: Optional[Formula]
    component: str
    timing: Timing
    response: Formula

    def __post_init__(self):
        if not _COMPONENT_RE.match(self.component):
            raise ReError(f"invalid component name {self.component!r}")
        for part in (self.condition, self.response) + (
            (self.scope.condition,) if isinstance(self.scope, While) else ()
        ):
            if part is not None and not ltlf.is_propositional(part):
                raise ReError("RE bool-expressions must be propositional")
        if isinstance(self.timing, TimingUntil) and not ltlf.is_propositional(self.timing.release):
            raise ReError("RE bool-expressions must be propositional")


# ---------------------------------------------------------------------------
# Parsing

_WORD_RE = re.compile(r"\s*([a-z0-9_]+|->|[~&|(),])")

_KEYWORDS = {
    "globally", "while", "when", "the", "shall", "satisfy",
    "always", "eventually", "immediately", "within", "until", "frame", "frames",
}


def _scan(text: str):
    """Tokens with their character offsets."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _WORD_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            at = len(text) - len(stripped)
            raise ReParseError("unexpected character", at, text)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _ReParser:
    def __init__(self, text: str, props: Optional[frozenset]):
        self.text = text
        self.tokens = _scan(text.lower())
        self.pos = 0
        self.furthest = 0
        self.props = props

    def peek(self):
        return self.tokens[self.pos][0]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        self.furthest = max(self.furthest, self.pos)
        return tok[0]

    def fail(self, message):
        offset = self.tokens[min(self.furthest, len(self.tokens) - 1)][1]
        raise ReParseError(message, offset, self.text)

    def expect(self, word):
        if self.peek() != word:
            self.fail(f"expected {word!r}")
        return self.advance()

    # bool-exprs reuse the propositional fragment of the LTLf grammar;
    # any RE keyword ends the expression
    def parse_bexpr(self) -> Formula:
        start = self.pos
        depth = 0
        parts = []
        while True:
            tok = self.peek()
            if tok == "":
                break
            if tok in _KEYWORDS and depth == 0 and tok not in ("true", "false"):
                break
            if tok == ",":
                break
            if tok == "(":
                depth += 1
            elif tok == ")":
                depth -= 1
            parts.append(tok)
            self.advance()
        if not parts:
            self.fail("expected a boolean expression")
        text = " ".join(parts)
        try:
            return ltlf.parse_propositional(text, self.props)
        except ltlf.UnknownPropositionError:
            raise
        except ltlf.LtlfError as exc:
            offset = self.tokens[start][1]
            raise ReParseError(f"bad boolean expression: {exc}", offset, self.text) from exc

    def parse(self) -> ReSpec:
        tok = self.peek()
        if tok == "globally":
            self.advance()
            scope: Scope = Globally()
        elif tok == "while":
            self.advance()
            scope = While(self.parse_bexpr())
        else:
            self.fail("expected 'globally' or 'while'")
        self.expect(",")

        condition = None
        if self.peek() == "when":
            self.advance()
            condition = self.parse_bexpr()
            self.expect(",")

        self.expect("the")
        component = self.peek()
        if component in _KEYWORDS or not _COMPONENT_RE.match(component or ""):
            self.fail("expected a component name")
        self.advance()
        self.expect("shall")

        tok = self.peek()
        if tok == "always":
            self.advance()
            timing: Timing = TimingAlways()
        elif tok == "eventually":
            self.advance()
            timing = TimingEventually()
        elif tok == "immediately":
            self.advance()
            timing = TimingImmediately()
        elif tok == "within":
            self.advance()
            count = self.peek()
            if not count.isdigit() or int(count) < 1:
                self.fail("expected a positive frame count")
            self.advance()
            if self.peek() not in ("frame", "frames"):
                self.fail("expected 'frames'")
            self.advance()
            timing = TimingWithin(int(count))
        elif tok == "until":
            self.advance()
            timing = TimingUntil(self.parse_bexpr())
        else:
            self.fail("expected a timing (always/eventually/immediately/within/until)")

        self.expect("satisfy")
        response = self.parse_bexpr()
        if self.peek() != "":
            self.fail("trailing input after requirement")
        return ReSpec(scope, condition, component, timing, response)


def parse_re(text: str, props: Optional[Iterable[str]] = None) -> ReSpec:
    """Parse an RE statement. Raises ReParseError carrying the furthest
    position the parser reached, or UnknownPropositionError."""
    prop_set = frozenset(props) if props is not None else None
    return _ReParser(text, prop_set).parse()


def render_re(spec: ReSpec) -> str:
    """Canonical rendering; parse_re(render_re(s)) == s."""
    parts = [spec.scope.render()]
    if spec.condition is not None:
        parts.append(f"when {ltlf.print_formula(spec.condition)}")
    parts.append(
        f"the {spec.component} shall {spec.timing.render()} "
        f"satisfy {ltlf.print_formula(spec.response)}"
    )
    return ", ".join(parts)


# ---------------------------------------------------------------------------
# Lowering

def _within(response: Formula, k: int) -> Formula:
    # response within k frames, counted inclusively from the trigger frame,
    # with strong Next: truncation does not satisfy the deadline
    f = response
    for _ in range(k - 1):
        f = or_(response, next_(f))
    return f


def _timing_core(timing: Timing, response: Formula) -> Formula:
    if isinstance(timing, TimingAlways):
        return response
    if isinstance(timing, TimingEventually):
        return eventually(response)
    if isinstance(timing, TimingImmediately):
        return response
    if isinstance(timing, TimingWithin):
        return _within(response, timing.frames)
    if isinstance(timing, TimingUntil):
        return until(response, timing.release)
    raise AssertionError


def lower_to_ltlf(spec: ReSpec) -> Formula:
    """Deterministic, total lowering per the template table in docs."""
    core = _timing_core(spec.timing, spec.response)
    if isinstance(spec.scope, While):
        body = implies(spec.condition, core) if spec.condition is not None else core
        return always(implies(spec.scope.condition, body))
    # Globally scope
    if spec.condition is not None:
        return always(implies(spec.condition, core))
    if isinstance(spec.timing, TimingAlways):
        return always(core)
    return core
