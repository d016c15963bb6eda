"""LTLf-to-DFA compilation and automaton algebra.

Compilation works by formula progression: a DFA state is the residual
obligation left after consuming a prefix, kept in a canonical monotone-DNF
form (an antichain of implicant sets over closure subformulas). Acceptance
of a state is its end-of-trace evaluation: strong residual obligations
(X, F, U, bare literals) fail on a nonexistent next position, weak ones
(N, G, R) succeed.

Correctness is pinned by oracle-equivalence tests against ltlf.eval_oracle,
not by the normalization details.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from . import ltlf
from .ltlf import (
    ALWAYS, AND, ATOM, EVENTUALLY, FALSE, NEXT, NOT, OR, RELEASE, TRUE,
    UNTIL, WNEXT, FALSE_F, TRUE_F, Formula, Trace, Valuation, and_, atoms_of,
    eventually, always, not_, or_, to_nnf,
)

DEFAULT_PROP_LIMIT = 10


class AutomataError(Exception):
    pass


class PropositionLimitError(AutomataError):
    def __init__(self, count: int, limit: int):
        super().__init__(f"{count} propositions exceed the limit of {limit}")
        self.count = count
        self.limit = limit


# Marker subformulas used by progression: "there is a next position" and
# "there is no next position".
_NOT_END = eventually(TRUE_F)
_END = always(FALSE_F)

# Monotone DNF over closure formulas: a frozenset of implicants, each a
# frozenset of base formulas (literals and temporal subformulas).
_TRUE_DNF = frozenset({frozenset()})
_FALSE_DNF = frozenset()


def _dnf_minimize(imps: Iterable[frozenset]) -> frozenset:
    kept: List[frozenset] = []
    for imp in sorted(set(imps), key=len):
        if not any(k <= imp for k in kept):
            kept.append(imp)
    return frozenset(kept)


def _contradictory(imp: frozenset) -> bool:
    for f in imp:
        if f.kind == NOT and f.left in imp:
            return True
    return False


def _dnf_or(a: frozenset, b: frozenset) -> frozenset:
    if a == _TRUE_DNF or b == _TRUE_DNF:
        return _TRUE_DNF
    return _dnf_minimize(a | b)


def _dnf_and(a: frozenset, b: frozenset) -> frozenset:
    if not a or not b:
        return _FALSE_DNF
    out = set()
    for i in a:
        for j in b:
            k = i | j
            if not _contradictory(k):
                out.add(k)
    return _dnf_minimize(out)


_DNF_CACHE: dict = {}


def _dnf_of(f: Formula) -> frozenset:
    """DNF of an NNF formula over literal/temporal bases."""
    got = _DNF_CACHE.get(id(f))
    if got is not None:
        return got
    k = f.kind
    if k == TRUE:
        result = _TRUE_DNF
    elif k == FALSE:
        result = _FALSE_DNF
    elif k == AND:
        result = _dnf_and(_dnf_of(f.left), _dnf_of(f.right))
    elif k == OR:
        result = _dnf_or(_dnf_of(f.left), _dnf_of(f.right))
    else:
        # atoms, negated atoms, temporal nodes are opaque bases
        result = frozenset({frozenset({f})})
    _DNF_CACHE[id(f)] = result
    return result


# End-of-trace evaluation per base kind: True means the obligation is
# discharged when the trace stops here.
_ETA = {
    ATOM: False,
    NOT: False,
    NEXT: False,
    WNEXT: True,
    EVENTUALLY: False,
    ALWAYS: True,
    UNTIL: False,
    RELEASE: True,
}


def _eta_state(state: frozenset) -> bool:
    return any(all(_ETA[b.kind] for b in imp) for imp in state)


_PROGRESS_CACHE: dict = {}


def _progress_base(base: Formula, props: tuple, vidx: int) -> frozenset:
    key = (id(base), props, vidx)
    got = _PROGRESS_CACHE.get(key)
    if got is not None:
        return got
    k = base.kind
    if k == ATOM:
        bit = (vidx >> (len(props) - 1 - props.index(base.name))) & 1
        result = _TRUE_DNF if bit else _FALSE_DNF
    elif k == NOT:
        bit = (vidx >> (len(props) - 1 - props.index(base.left.name))) & 1
        result = _FALSE_DNF if bit else _TRUE_DNF
    elif k == NEXT:
        result = _dnf_and(frozenset({frozenset({_NOT_END})}), _dnf_of(base.left))
    elif k == WNEXT:
        result = _dnf_or(frozenset({frozenset({_END})}), _dnf_of(base.left))
    elif k == EVENTUALLY:
        now = _progress_state(_dnf_of(base.left), props, vidx)
        result = _dnf_or(now, frozenset({frozenset({base})}))
    elif k == ALWAYS:
        now = _progress_state(_dnf_of(base.left), props, vidx)
        result = _dnf_and(now, frozenset({frozenset({base})}))
    elif k == UNTIL:
        now_r = _progress_state(_dnf_of(base.right), props, vidx)
        now_l = _progress_state(_dnf_of(base.left), props, vidx)
        result = _dnf_or(now_r, _dnf_and(now_l, frozenset({frozenset({base})})))
    elif k == RELEASE:
        now_r = _progress_state(_dnf_of(base.right), props, vidx)
        now_l = _progress_state(_dnf_of(base.left), props, vidx)
        result = _dnf_and(now_r, _dnf_or(now_l, frozenset({frozenset({base})})))
    else:
        raise AssertionError(f"unexpected base kind {k}")
    _PROGRESS_CACHE[key] = result
    return result


def _progress_state(state: frozenset, props: tuple, vidx: int) -> frozenset:
    result = _FALSE_DNF
    for imp in state:
        conj = _TRUE_DNF
        for base in imp:
            conj = _dnf_and(conj, _progress_base(base, props, vidx))
            if not conj:
                break
        result = _dnf_or(result, conj)
        if result == _TRUE_DNF:
            break
    return result


# ---------------------------------------------------------------------------
# Valuations as integers

def valuation_count(props: Sequence[str]) -> int:
    return 1 << len(props)


def valuation_from_index(props: Sequence[str], vidx: int) -> Valuation:
    """Valuations are ordered lexicographically over sorted proposition
    names, false before true: index 0 is all-false."""
    n = len(props)
    return Valuation(props, tuple(bool((vidx >> (n - 1 - i)) & 1) for i in range(n)))


def valuation_index(v: Valuation, props: Sequence[str]) -> int:
    if tuple(v.props) != tuple(props):
        raise AutomataError(f"valuation domain {v.props} differs from {tuple(props)}")
    n = len(props)
    idx = 0
    for i, val in enumerate(v.values):
        if val:
            idx |= 1 << (n - 1 - i)
    return idx


def trace_to_indices(trace: Trace, props: Sequence[str]) -> List[int]:
    """Indices of a trace's valuations over a (possibly larger) prop set."""
    props = tuple(props)
    if trace.props == props:
        return [valuation_index(v, props) for v in trace.steps]
    missing = set(trace.props) - set(props)
    if missing:
        raise AutomataError(f"trace propositions {sorted(missing)} not in target set")
    out = []
    n = len(props)
    for v in trace.steps:
        idx = 0
        d = v.as_dict()
        for i, p in enumerate(props):
            if d.get(p, False):
                idx |= 1 << (n - 1 - i)
        out.append(idx)
    return out


# ---------------------------------------------------------------------------
# The DFA

class Dfa:
    """Complete deterministic automaton over the 2^props alphabet.

    The dense table maps (state, valuation index) -> state; guard-labeled
    transitions are derived from it on demand. State 0 is always initial.
    """

    __slots__ = ("props", "table", "accepting", "_guards")

    def __init__(self, props: Sequence[str], table: Sequence[Sequence[int]],
                 accepting: Iterable[int]):
        self.props = tuple(props)
        self.table = tuple(tuple(row) for row in table)
        self.accepting = frozenset(accepting)
        self._guards = None
        nv = valuation_count(self.props)
        for s, row in enumerate(self.table):
            if len(row) != nv:
                raise AutomataError(f"state {s} row has {len(row)} entries, expected {nv}")
            for t in row:
                if not (0 <= t < len(self.table)):
                    raise AutomataError(f"state {s} references missing state {t}")

    @property
    def n_states(self) -> int:
        return len(self.table)

    @property
    def initial(self) -> int:
        return 0

    def successors(self, state: int) -> frozenset:
        return frozenset(self.table[state])

    def transitions(self, state: int) -> List[Tuple[Formula, int]]:
        """Ordered (guard, target) pairs: pairwise exclusive, jointly
        exhaustive. Targets ordered by first valuation index reaching them."""
        if self._guards is None:
            self._guards = [None] * self.n_states
        if self._guards[state] is None:
            row = self.table[state]
            order: List[int] = []
            buckets: dict = {}
            for vidx, target in enumerate(row):
                if target not in buckets:
                    buckets[target] = []
                    order.append(target)
                buckets[target].append(vidx)
            nv = len(row)
            result = []
            for target in order:
                vidxs = buckets[target]
                if len(vidxs) == nv:
                    guard = TRUE_F
                else:
                    guard = self._minterm(vidxs[0])
                    for vidx in vidxs[1:]:
                        guard = or_(guard, self._minterm(vidx))
                result.append((guard, target))
            self._guards[state] = result
        return self._guards[state]

    def _minterm(self, vidx: int) -> Formula:
        if not self.props:
            return TRUE_F
        n = len(self.props)
        lits = []
        for i, p in enumerate(self.props):
            a = ltlf.atom(p)
            lits.append(a if (vidx >> (n - 1 - i)) & 1 else not_(a))
        guard = lits[0]
        for lit in lits[1:]:
            guard = and_(guard, lit)
        return guard

    def run(self, trace: Trace) -> int:
        state = 0
        for vidx in trace_to_indices(trace, self.props):
            state = self.table[state][vidx]
        return state

    def accepts(self, trace: Trace) -> bool:
        return self.run(trace) in self.accepting

    def export_text(self) -> str:
        """One line per guard-grouped transition, tab separated."""
        lines = [
            f"props:\t{' '.join(self.props)}",
            f"initial:\ts0",
            "accepting:\t" + " ".join(f"s{s}" for s in sorted(self.accepting)),
        ]
        for s in range(self.n_states):
            for guard, target in self.transitions(s):
                lines.append(f"s{s}\t{ltlf.print_formula(guard)}\ts{target}")
        return "\n".join(lines) + "\n"

    def signature(self) -> tuple:
        """Hashable identity: used to deduplicate language checks."""
        return (self.props, self.table, tuple(sorted(self.accepting)))

    def __repr__(self):
        return f"<Dfa states={self.n_states} props={self.props}>"


_COMPILE_CACHE: dict = {}


def compile_formula(f: Formula, props: Optional[Sequence[str]] = None,
                    prop_limit: int = DEFAULT_PROP_LIMIT) -> Dfa:
    """Compile an LTLf formula to a DFA whose language over nonempty traces
    is exactly { t : eval_oracle(f, t, 0) }."""
    if props is None:
        props = sorted(atoms_of(f))
    props = tuple(sorted(props))
    missing = atoms_of(f) - set(props)
    if missing:
        raise AutomataError(f"formula uses propositions outside the set: {sorted(missing)}")
    if len(props) > prop_limit:
        raise PropositionLimitError(len(props), prop_limit)

    g = to_nnf(f)
    cache_key = (id(g), props)
    cached = _COMPILE_CACHE.get(cache_key)
    if cached is not None:
        return cached

    nv = valuation_count(props)
    init = _dnf_of(g)
    index = {init: 0}
    states = [init]
    table: List[List[int]] = []
    # states are discovered in BFS order and processed in index order,
    # so rows line up with state numbers
    while len(table) < len(states):
        state = states[len(table)]
        row = []
        for vidx in range(nv):
            nxt = _progress_state(state, props, vidx)
            t = index.get(nxt)
            if t is None:
                t = len(states)
                index[nxt] = t
                states.append(nxt)
            row.append(t)
        table.append(row)
    accepting = [s for s, st in enumerate(states) if _eta_state(st)]
    dfa = Dfa(props, table, accepting)
    _COMPILE_CACHE[cache_key] = dfa
    return dfa


# ---------------------------------------------------------------------------
# Minimization

def _reachable(table, initial=0) -> List[int]:
    seen = {initial}
    order = [initial]
    queue = deque([initial])
    while queue:
        s = queue.popleft()
        for t in table[s]:
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    return order


def _hopcroft(table, accepting, n, nv) -> List[int]:
    """Classic partition refinement; returns state -> block id."""
    inv = [[[] for _ in range(nv)] for _ in range(n)]
    for s in range(n):
        for a in range(nv):
            inv[table[s][a]][a].append(s)

    acc = frozenset(accepting) & set(range(n))
    rej = frozenset(range(n)) - acc
    partition = [set(b) for b in (acc, rej) if b]
    work = [frozenset(b) for b in partition]
    while work:
        splitter = work.pop()
        for a in range(nv):
            x = set()
            for t in splitter:
                x.update(inv[t][a])
            if not x:
                continue
            new_partition = []
            for block in partition:
                inter = block & x
                diff = block - x
                if inter and diff:
                    new_partition.append(inter)
                    new_partition.append(diff)
                    fb = frozenset(block)
                    if fb in work:
                        work.remove(fb)
                        work.append(frozenset(inter))
                        work.append(frozenset(diff))
                    else:
                        work.append(frozenset(inter if len(inter) <= len(diff) else diff))
                else:
                    new_partition.append(block)
            partition = new_partition
    block_of = [0] * n
    for bid, block in enumerate(partition):
        for s in block:
            block_of[s] = bid
    return block_of


def minimize(d: Dfa) -> Dfa:
    """Language-preserving minimization (over nonempty traces).

    Unreachable states are dropped, Hopcroft partition refinement merges
    equivalent states, and — because the empty trace is outside the
    language domain — the initial state's own acceptance bit is treated as
    unobservable when it has no incoming transitions, which lets e.g. a
    tautology collapse to a single state.
    """
    nv = valuation_count(d.props)

    # restrict to reachable states
    order = _reachable(d.table)
    remap = {old: new for new, old in enumerate(order)}
    table = [[remap[d.table[old][a]] for a in range(nv)] for old in order]
    accepting = {remap[s] for s in d.accepting if s in remap}
    n = len(table)

    block_of = _hopcroft(table, accepting, n, nv)
    # quotient
    blocks = sorted(set(block_of))
    bmap = {b: i for i, b in enumerate(blocks)}
    qn = len(blocks)
    qtable = [[0] * nv for _ in range(qn)]
    qacc = set()
    for s in range(n):
        b = bmap[block_of[s]]
        for a in range(nv):
            qtable[b][a] = bmap[block_of[table[s][a]]]
        if s in accepting:
            qacc.add(b)
    qinit = bmap[block_of[0]]

    # initial-state acceptance is unobservable when nothing re-enters it
    has_incoming = any(qtable[s][a] == qinit for s in range(qn) for a in range(nv))
    if not has_incoming:
        flipped = qinit not in qacc
        for s in range(qn):
            if s == qinit:
                continue
            if ((s in qacc) == flipped) and qtable[s] == qtable[qinit]:
                qinit = s
                break

    # deterministic renumbering by BFS from the initial state
    seen = {qinit: 0}
    order2 = [qinit]
    queue = deque([qinit])
    while queue:
        s = queue.popleft()
        for a in range(nv):
            t = qtable[s][a]
            if t not in seen:
                seen[t] = len(order2)
                order2.append(t)
                queue.append(t)
    ftable = [[seen[qtable[old][a]] for a in range(nv)] for old in order2]
    facc = [seen[s] for s in qacc if s in seen]
    return Dfa(d.props, ftable, facc)


# ---------------------------------------------------------------------------
# Products and queries

_PRODUCT_MODES: dict = {
    "intersection": lambda a, b: a and b,
    "union": lambda a, b: a or b,
    "difference": lambda a, b: a and not b,
    "symdiff": lambda a, b: a != b,
}


def product(a: Dfa, b: Dfa, mode: str = "intersection") -> Dfa:
    """Synchronous product; proposition sets are unified by union, with
    missing propositions unconstrained."""
    try:
        combine: Callable[[bool, bool], bool] = _PRODUCT_MODES[mode]
    except KeyError:
        raise AutomataError(f"unknown product mode {mode!r}") from None
    props = tuple(sorted(set(a.props) | set(b.props)))
    nv = valuation_count(props)
    proj_a = _projection(props, a.props)
    proj_b = _projection(props, b.props)

    index = {(0, 0): 0}
    pairs = [(0, 0)]
    table: List[List[int]] = []
    while len(table) < len(pairs):
        sa, sb = pairs[len(table)]
        row = []
        for vidx in range(nv):
            ta = a.table[sa][proj_a[vidx]]
            tb = b.table[sb][proj_b[vidx]]
            key = (ta, tb)
            t = index.get(key)
            if t is None:
                t = len(pairs)
                index[key] = t
                pairs.append(key)
            row.append(t)
        table.append(row)
    accepting = [
        s for s, (sa, sb) in enumerate(pairs)
        if combine(sa in a.accepting, sb in b.accepting)
    ]
    return Dfa(props, table, accepting)


def _projection(props: tuple, sub: tuple) -> List[int]:
    """For each valuation index over props, its index over sub ⊆ props."""
    n = len(props)
    m = len(sub)
    positions = [props.index(p) for p in sub]
    out = []
    for vidx in range(1 << n):
        sidx = 0
        for j, pos in enumerate(positions):
            if (vidx >> (n - 1 - pos)) & 1:
                sidx |= 1 << (m - 1 - j)
        out.append(sidx)
    return out


def shortest_accepted(d: Dfa) -> Optional[Trace]:
    """Minimum-length accepted (nonempty) trace, or None if the language is
    empty. Valuations are expanded in index order, so witnesses are
    reproducible: lexicographic over proposition names, false before true."""
    nv = valuation_count(d.props)
    parent: dict = {}
    queue = deque()
    # depth-1 frontier: acceptance of the initial state itself concerns only
    # the empty trace, which is outside the language
    for vidx in range(nv):
        t = d.table[0][vidx]
        if t not in parent:
            parent[t] = (None, vidx)
            queue.append(t)
    goal = None
    for s in list(queue):
        if s in d.accepting:
            goal = s
            break
    while goal is None and queue:
        s = queue.popleft()
        for vidx in range(nv):
            t = d.table[s][vidx]
            if t not in parent:
                parent[t] = (s, vidx)
                if t in d.accepting:
                    goal = t
                    queue.clear()
                    break
                queue.append(t)
    if goal is None:
        return None
    vidxs = []
    cur = goal
    while cur is not None:
        prev, vidx = parent[cur]
        vidxs.append(vidx)
        cur = prev
    vidxs.reverse()
    return Trace(d.props, [valuation_from_index(d.props, v) for v in vidxs])


def is_empty(d: Dfa) -> bool:
    """True when no nonempty trace is accepted."""
    return shortest_accepted(d) is None


def equivalent(a: Dfa, b: Dfa) -> bool:
    """Language equality over nonempty traces."""
    return is_empty(product(a, b, "symdiff"))


def states_reaching_accepting(d: Dfa) -> frozenset:
    """States from which some accepting state is reachable (including by
    staying put)."""
    rev = [set() for _ in range(d.n_states)]
    for s, row in enumerate(d.table):
        for t in row:
            rev[t].add(s)
    seen = set(d.accepting)
    queue = deque(seen)
    while queue:
        s = queue.popleft()
        for p in rev[s]:
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return frozenset(seen)


def states_always_accepting(d: Dfa) -> frozenset:
    """States whose entire forward cone (including themselves) is accepting:
    greatest fixpoint of acc(s) and all successors inside."""
    inside = set(d.accepting)
    changed = True
    while changed:
        changed = False
        for s in list(inside):
            if any(t not in inside for t in d.table[s]):
                inside.discard(s)
                changed = True
    return frozenset(inside)
