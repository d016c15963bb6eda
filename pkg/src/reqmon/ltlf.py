"""LTLf formulas over finite, nonempty traces.

Abstract syntax, a concrete-syntax parser/printer, negation normal form,
and a deliberately naive evaluation function that serves as the trusted
semantics oracle for everything built on top (automata, monitoring,
test generation).
"""

from __future__ import annotations

import re
import sys
from typing import Iterable, Optional, Sequence

PROP_NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")

# Node kinds.
TRUE = "true"
FALSE = "false"
ATOM = "atom"
NOT = "not"
AND = "and"
OR = "or"
IMPLIES = "implies"
NEXT = "next"
WNEXT = "wnext"
EVENTUALLY = "eventually"
ALWAYS = "always"
UNTIL = "until"
RELEASE = "release"

UNARY_KINDS = frozenset({NOT, NEXT, WNEXT, EVENTUALLY, ALWAYS})
BINARY_KINDS = frozenset({AND, OR, IMPLIES, UNTIL, RELEASE})
TEMPORAL_KINDS = frozenset({NEXT, WNEXT, EVENTUALLY, ALWAYS, UNTIL, RELEASE})


class LtlfError(Exception):
    """Base class for formula-layer errors."""


class FormulaSyntaxError(LtlfError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownPropositionError(LtlfError):
    def __init__(self, name: str, line: int = 0, column: int = 0):
        loc = f" (line {line}, column {column})" if line else ""
        super().__init__(f"unknown proposition '{name}'{loc}")
        self.name = name


class InvalidPropositionError(LtlfError):
    pass


def check_prop_name(name: str) -> str:
    if not isinstance(name, str) or not PROP_NAME_RE.match(name):
        raise InvalidPropositionError(
            f"invalid proposition name {name!r}: must match [a-z][a-z0-9_]*"
        )
    return sys.intern(name)


class Formula:
    """An immutable, interned LTLf syntax tree node.

    Instances are created through the factory functions below; structurally
    equal trees are the same object, so equality and hashing are O(1).
    """

    __slots__ = ("kind", "name", "left", "right", "_size", "_str")

    def __init__(self, kind, name, left, right, size):
        self.kind = kind
        self.name = name
        self.left = left
        self.right = right
        self._size = size
        self._str = None

    @property
    def size(self) -> int:
        return self._size

    def __str__(self) -> str:
        return print_formula(self)

    def __repr__(self) -> str:
        return f"<Formula {print_formula(self)}>"


_INTERN: dict = {}


def _mk(kind, name=None, left=None, right=None) -> Formula:
    key = (kind, name, id(left), id(right))
    node = _INTERN.get(key)
    if node is None:
        size = 1
        if left is not None:
            size += left._size
        if right is not None:
            size += right._size
        node = Formula(kind, name, left, right, size)
        _INTERN[key] = node
    return node


TRUE_F = _mk(TRUE)
FALSE_F = _mk(FALSE)


def atom(name: str) -> Formula:
    return _mk(ATOM, check_prop_name(name))


def not_(f: Formula) -> Formula:
    return _mk(NOT, left=f)


def and_(l: Formula, r: Formula) -> Formula:
    return _mk(AND, left=l, right=r)


def or_(l: Formula, r: Formula) -> Formula:
    return _mk(OR, left=l, right=r)


def implies(l: Formula, r: Formula) -> Formula:
    return _mk(IMPLIES, left=l, right=r)


def next_(f: Formula) -> Formula:
    return _mk(NEXT, left=f)


def weak_next(f: Formula) -> Formula:
    return _mk(WNEXT, left=f)


def eventually(f: Formula) -> Formula:
    return _mk(EVENTUALLY, left=f)


def always(f: Formula) -> Formula:
    return _mk(ALWAYS, left=f)


def until(l: Formula, r: Formula) -> Formula:
    return _mk(UNTIL, left=l, right=r)


def release(l: Formula, r: Formula) -> Formula:
    return _mk(RELEASE, left=l, right=r)


_ATOMS_CACHE: dict = {}


def atoms_of(f: Formula) -> frozenset:
    """Set of proposition names occurring in f."""
    got = _ATOMS_CACHE.get(id(f))
    if got is not None:
        return got
    if f.kind == ATOM:
        result = frozenset((f.name,))
    else:
        result = frozenset()
        if f.left is not None:
            result |= atoms_of(f.left)
        if f.right is not None:
            result |= atoms_of(f.right)
    _ATOMS_CACHE[id(f)] = result
    return result


def is_propositional(f: Formula) -> bool:
    if f.kind in TEMPORAL_KINDS:
        return False
    for child in (f.left, f.right):
        if child is not None and not is_propositional(child):
            return False
    return True


# ---------------------------------------------------------------------------
# Printing

# Precedence levels, loosest first.
_LEVEL = {
    IMPLIES: 1,
    OR: 2,
    AND: 3,
    UNTIL: 4,
    RELEASE: 4,
    NOT: 5,
    NEXT: 5,
    WNEXT: 5,
    EVENTUALLY: 5,
    ALWAYS: 5,
    TRUE: 6,
    FALSE: 6,
    ATOM: 6,
}

_UNARY_TOKEN = {NOT: "~", NEXT: "X", WNEXT: "N", EVENTUALLY: "F", ALWAYS: "G"}
_BINARY_TOKEN = {AND: "&", OR: "|", IMPLIES: "->", UNTIL: "U", RELEASE: "R"}


def print_formula(f: Formula) -> str:
    """Concrete syntax for f; parses back to the identical tree."""
    if f._str is not None:
        return f._str

    def wrap(child: Formula, need: int) -> str:
        s = print_formula(child)
        if _LEVEL[child.kind] < need:
            return f"({s})"
        return s

    kind = f.kind
    if kind == TRUE:
        s = "true"
    elif kind == FALSE:
        s = "false"
    elif kind == ATOM:
        s = f.name
    elif kind in _UNARY_TOKEN:
        tok = _UNARY_TOKEN[kind]
        inner = wrap(f.left, 5)
        s = tok + inner if tok == "~" else f"{tok} {inner}"
    else:
        lvl = _LEVEL[kind]
        if kind in (AND, OR):
            # Left-nested chains print flat; right nesting keeps parens.
            s = f"{wrap(f.left, lvl)} {_BINARY_TOKEN[kind]} {wrap(f.right, lvl + 1)}"
        else:
            # ->, U, R are right-associative.
            s = f"{wrap(f.left, lvl + 1)} {_BINARY_TOKEN[kind]} {wrap(f.right, lvl)}"
    f._str = s
    return s


def canonical_key(f: Formula):
    """Deterministic sort key, independent of interpreter hash seeds."""
    return (f._size, print_formula(f))


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[a-z][a-z0-9_]*)
  | (?P<op>[XNFGUR])(?![a-z0-9_])
  | (?P<implies>->)
  | (?P<punct>[~&|()])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"true", "false"}


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        value = m.group(0)
        if m.lastgroup != "ws":
            if m.lastgroup == "ident" and value in _KEYWORDS:
                tokens.append((value, value, line, col))
            elif m.lastgroup == "ident":
                tokens.append(("ident", value, line, col))
            else:
                tokens.append((value, value, line, col))
        for ch in value:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos = m.end()
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens, props: Optional[frozenset], allow_temporal: bool):
        self.tokens = tokens
        self.pos = 0
        self.props = props
        self.allow_temporal = allow_temporal

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message):
        typ, value, line, col = self.peek()
        shown = value if typ != "eof" else "end of input"
        raise FormulaSyntaxError(f"{message}, found {shown!r}" if typ != "eof"
                                 else f"{message}, found end of input", line, col)

    def expect(self, typ):
        if self.peek()[0] != typ:
            self.error(f"expected {typ!r}")
        return self.advance()

    def parse_expr(self) -> Formula:
        return self.parse_implies()

    def parse_implies(self) -> Formula:
        left = self.parse_or()
        if self.peek()[0] == "->":
            self.advance()
            right = self.parse_implies()
            return implies(left, right)
        return left

    def parse_or(self) -> Formula:
        f = self.parse_and()
        while self.peek()[0] == "|":
            self.advance()
            f = or_(f, self.parse_and())
        return f

    def parse_and(self) -> Formula:
        f = self.parse_until()
        while self.peek()[0] == "&":
            self.advance()
            f = and_(f, self.parse_until())
        return f

    def parse_until(self) -> Formula:
        left = self.parse_unary()
        typ = self.peek()[0]
        if typ in ("U", "R"):
            self._check_temporal()
            self.advance()
            right = self.parse_until()
            return until(left, right) if typ == "U" else release(left, right)
        return left

    def parse_unary(self) -> Formula:
        typ, value, line, col = self.peek()
        if typ == "~":
            self.advance()
            return not_(self.parse_unary())
        if typ in ("X", "N", "F", "G"):
            self._check_temporal()
            self.advance()
            inner = self.parse_unary()
            return {"X": next_, "N": weak_next, "F": eventually, "G": always}[typ](inner)
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        typ, value, line, col = self.peek()
        if typ == "true":
            self.advance()
            return TRUE_F
        if typ == "false":
            self.advance()
            return FALSE_F
        if typ == "ident":
            self.advance()
            if self.props is not None and value not in self.props:
                raise UnknownPropositionError(value, line, col)
            return atom(value)
        if typ == "(":
            self.advance()
            f = self.parse_expr()
            self.expect(")")
            return f
        self.error("expected a formula")

    def _check_temporal(self):
        if not self.allow_temporal:
            typ, value, line, col = self.peek()
            raise FormulaSyntaxError(
                f"temporal operator {value!r} not allowed here", line, col
            )


def parse_formula(text: str, props: Optional[Iterable[str]] = None) -> Formula:
    """Parse concrete LTLf syntax.

    props, when given, is the declared proposition set; identifiers outside
    it raise UnknownPropositionError. Raises FormulaSyntaxError with
    line/column on malformed input.
    """
    prop_set = frozenset(props) if props is not None else None
    parser = _Parser(_tokenize(text), prop_set, allow_temporal=True)
    f = parser.parse_expr()
    if parser.peek()[0] != "eof":
        parser.error("trailing input after formula")
    return f


def parse_propositional(text: str, props: Optional[Iterable[str]] = None) -> Formula:
    """Like parse_formula but rejects temporal operators."""
    prop_set = frozenset(props) if props is not None else None
    parser = _Parser(_tokenize(text), prop_set, allow_temporal=False)
    f = parser.parse_expr()
    if parser.peek()[0] != "eof":
        parser.error("trailing input after formula")
    return f


# ---------------------------------------------------------------------------
# Negation normal form

_NNF_POS: dict = {}
_NNF_NEG: dict = {}


def to_nnf(f: Formula) -> Formula:
    """Push negations to atoms and eliminate ->, using finite-trace duals
    (notably ~X phi == N ~phi)."""
    got = _NNF_POS.get(id(f))
    if got is not None:
        return got
    k = f.kind
    if k in (TRUE, FALSE, ATOM):
        result = f
    elif k == NOT:
        result = _nnf_neg(f.left)
    elif k == AND:
        result = and_(to_nnf(f.left), to_nnf(f.right))
    elif k == OR:
        result = or_(to_nnf(f.left), to_nnf(f.right))
    elif k == IMPLIES:
        result = or_(_nnf_neg(f.left), to_nnf(f.right))
    elif k == NEXT:
        result = next_(to_nnf(f.left))
    elif k == WNEXT:
        result = weak_next(to_nnf(f.left))
    elif k == EVENTUALLY:
        result = eventually(to_nnf(f.left))
    elif k == ALWAYS:
        result = always(to_nnf(f.left))
    elif k == UNTIL:
        result = until(to_nnf(f.left), to_nnf(f.right))
    else:
        result = release(to_nnf(f.left), to_nnf(f.right))
    _NNF_POS[id(f)] = result
    return result


def _nnf_neg(f: Formula) -> Formula:
    got = _NNF_NEG.get(id(f))
    if got is not None:
        return got
    k = f.kind
    if k == TRUE:
        result = FALSE_F
    elif k == FALSE:
        result = TRUE_F
    elif k == ATOM:
        result = not_(f)
    elif k == NOT:
        result = to_nnf(f.left)
    elif k == AND:
        result = or_(_nnf_neg(f.left), _nnf_neg(f.right))
    elif k == OR:
        result = and_(_nnf_neg(f.left), _nnf_neg(f.right))
    elif k == IMPLIES:
        result = and_(to_nnf(f.left), _nnf_neg(f.right))
    elif k == NEXT:
        result = weak_next(_nnf_neg(f.left))
    elif k == WNEXT:
        result = next_(_nnf_neg(f.left))
    elif k == EVENTUALLY:
        result = always(_nnf_neg(f.left))
    elif k == ALWAYS:
        result = eventually(_nnf_neg(f.left))
    elif k == UNTIL:
        result = release(_nnf_neg(f.left), _nnf_neg(f.right))
    else:
        result = until(_nnf_neg(f.left), _nnf_neg(f.right))
    _NNF_NEG[id(f)] = result
    return result


# ---------------------------------------------------------------------------
# Traces

class TraceError(LtlfError):
    pass


class Valuation:
    """A total truth assignment over a declared proposition set."""

    __slots__ = ("props", "values")

    def __init__(self, props: Sequence[str], values: Sequence[bool]):
        props = tuple(props)
        values = tuple(bool(v) for v in values)
        if len(props) != len(values):
            raise TraceError("valuation arity mismatch")
        self.props = props
        self.values = values

    @classmethod
    def from_true_set(cls, props: Sequence[str], true_props: Iterable[str]) -> "Valuation":
        props = tuple(sorted(props))
        true_set = set(true_props)
        extra = true_set - set(props)
        if extra:
            raise TraceError(f"propositions outside declared set: {sorted(extra)}")
        return cls(props, tuple(p in true_set for p in props))

    def __getitem__(self, name: str) -> bool:
        try:
            return self.values[self.props.index(name)]
        except ValueError:
            raise TraceError(f"proposition {name!r} not in valuation domain") from None

    def true_props(self) -> tuple:
        return tuple(p for p, v in zip(self.props, self.values) if v)

    def as_dict(self) -> dict:
        return dict(zip(self.props, self.values))

    def __eq__(self, other):
        return (
            isinstance(other, Valuation)
            and self.props == other.props
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.props, self.values))

    def __repr__(self):
        inside = ", ".join(p if v else f"~{p}" for p, v in zip(self.props, self.values))
        return "{" + inside + "}"


class Trace:
    """A nonempty finite sequence of valuations over one proposition set."""

    __slots__ = ("props", "steps")

    def __init__(self, props: Sequence[str], steps: Sequence[Valuation]):
        props = tuple(sorted(props))
        steps = tuple(steps)
        if not steps:
            raise TraceError("traces must be nonempty")
        for i, v in enumerate(steps):
            if v.props != props:
                raise TraceError(f"valuation {i} domain differs from trace propositions")
        self.props = props
        self.steps = steps

    @classmethod
    def from_true_sets(cls, props: Sequence[str], rows: Sequence[Iterable[str]]) -> "Trace":
        props = tuple(sorted(props))
        return cls(props, [Valuation.from_true_set(props, row) for row in rows])

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, i) -> Valuation:
        return self.steps[i]

    def __iter__(self):
        return iter(self.steps)

    def __eq__(self, other):
        return (
            isinstance(other, Trace)
            and self.props == other.props
            and self.steps == other.steps
        )

    def __hash__(self):
        return hash((self.props, self.steps))

    def __repr__(self):
        return "Trace" + repr(list(self.steps))

    def key(self) -> str:
        """Stable identity string (used for trace ids in elicitation)."""
        rows = ";".join(",".join(v.true_props()) for v in self.steps)
        return "|".join(self.props) + "::" + rows


def render_trace_table(trace: Trace) -> str:
    """Per-frame truth table, one row per proposition."""
    width = max((len(p) for p in trace.props), default=5)
    header = " " * width + " | " + " ".join(f"{i:>5}" for i in range(len(trace)))
    lines = [header, "-" * len(header)]
    for p in trace.props:
        cells = " ".join(f"{'T' if v[p] else '.':>5}" for v in trace.steps)
        lines.append(f"{p:<{width}} | {cells}")
    if not trace.props:
        lines.append("(no propositions)")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Reference semantics

def eval_oracle(f: Formula, trace: Trace, i: int = 0) -> bool:
    """Standard LTLf semantics by naive structural recursion.

    Intentionally unoptimized: this is the trusted oracle every other
    evaluation path is tested against.
    """
    n = len(trace)
    if not (0 <= i < n):
        raise IndexError(f"position {i} out of range for trace of length {n}")
    k = f.kind
    if k == TRUE:
        return True
    if k == FALSE:
        return False
    if k == ATOM:
        return trace[i][f.name]
    if k == NOT:
        return not eval_oracle(f.left, trace, i)
    if k == AND:
        return eval_oracle(f.left, trace, i) and eval_oracle(f.right, trace, i)
    if k == OR:
        return eval_oracle(f.left, trace, i) or eval_oracle(f.right, trace, i)
    if k == IMPLIES:
        return (not eval_oracle(f.left, trace, i)) or eval_oracle(f.right, trace, i)
    if k == NEXT:
        return i + 1 < n and eval_oracle(f.left, trace, i + 1)
    if k == WNEXT:
        return i + 1 >= n or eval_oracle(f.left, trace, i + 1)
    if k == EVENTUALLY:
        return any(eval_oracle(f.left, trace, j) for j in range(i, n))
    if k == ALWAYS:
        return all(eval_oracle(f.left, trace, j) for j in range(i, n))
    if k == UNTIL:
        for j in range(i, n):
            if eval_oracle(f.right, trace, j):
                return all(eval_oracle(f.left, trace, kk) for kk in range(i, j))
        return False
    if k == RELEASE:
        # a R b: b holds up to and including the step where a first holds;
        # if a never holds, b holds everywhere.
        for j in range(i, n):
            if not eval_oracle(f.right, trace, j):
                return any(eval_oracle(f.left, trace, kk) for kk in range(i, j))
        return True
    raise AssertionError(f"unhandled kind {k}")
