"""Shared machinery for the exhaustive sweeps.

Enumerates every formula over two atoms up to a size bound and evaluates
each one, via an independent vectorized semantics, on every trace of length
up to four. The vectorized semantics is anchored to the reference evaluator
by a sampled cross-check inside the acceptance suite.
"""

from __future__ import annotations

from typing import Dict, Iterator, List, Tuple

import numpy as np

from reqmon import ltlf
from reqmon.ltlf import (
    Formula, Trace, Valuation, and_, always, atom, eventually, implies,
    next_, not_, or_, release, until, weak_next,
)

PROPS = ("p", "q")
NV = 4  # valuations over two propositions
MAX_LEN = 4
MAX_SIZE = 6


def trace_layout(max_len: int = MAX_LEN, nv: int = NV):
    """Block offsets for traces grouped by length; index within a block is
    the base-nv numeral of the valuation sequence, first frame most
    significant."""
    offsets = {}
    total = 0
    for length in range(1, max_len + 1):
        offsets[length] = total
        total += nv ** length
    return offsets, total


_OFFSETS, TOTAL_TRACES = trace_layout()


def _build_tables():
    head = np.zeros(TOTAL_TRACES, dtype=np.int64)
    tail = np.full(TOTAL_TRACES, -1, dtype=np.int64)
    for length in range(1, MAX_LEN + 1):
        base = _OFFSETS[length]
        stride = NV ** (length - 1)
        for i in range(NV ** length):
            head[base + i] = i // stride
            if length > 1:
                tail[base + i] = _OFFSETS[length - 1] + (i % stride)
    return head, tail


HEAD, TAIL = _build_tables()
_HAS_TAIL = TAIL >= 0

_BLOCKS = [np.arange(_OFFSETS[length],
                     _OFFSETS[length] + NV ** length)
           for length in range(2, MAX_LEN + 1)]


def trace_index(vidxs: Tuple[int, ...]) -> int:
    length = len(vidxs)
    i = 0
    for v in vidxs:
        i = i * NV + v
    return _OFFSETS[length] + i


def trace_vidxs(index: int) -> Tuple[int, ...]:
    for length in range(MAX_LEN, 0, -1):
        if index >= _OFFSETS[length]:
            i = index - _OFFSETS[length]
            out = []
            for _ in range(length):
                out.append(i % NV)
                i //= NV
            return tuple(reversed(out))
    raise ValueError(index)


def trace_object(index: int) -> Trace:
    from reqmon.automata import valuation_from_index

    return Trace(PROPS, [valuation_from_index(PROPS, v)
                         for v in trace_vidxs(index)])


def all_trace_objects() -> List[Trace]:
    return [trace_object(i) for i in range(TOTAL_TRACES)]


# ---------------------------------------------------------------------------
# Vectorized semantics: one bool per trace, "does the formula hold at
# position 0". Temporal operators recurse on the tail blocks in increasing
# length order, so tail entries are already final.

SEM_TRUE = np.ones(TOTAL_TRACES, dtype=bool)
SEM_FALSE = np.zeros(TOTAL_TRACES, dtype=bool)
SEM_P = ((HEAD >> 1) & 1).astype(bool)  # p is the first sorted proposition
SEM_Q = (HEAD & 1).astype(bool)


def vec_next(c: np.ndarray) -> np.ndarray:
    out = np.zeros(TOTAL_TRACES, dtype=bool)
    out[_HAS_TAIL] = c[TAIL[_HAS_TAIL]]
    return out


def vec_wnext(c: np.ndarray) -> np.ndarray:
    out = np.ones(TOTAL_TRACES, dtype=bool)
    out[_HAS_TAIL] = c[TAIL[_HAS_TAIL]]
    return out


def vec_eventually(c: np.ndarray) -> np.ndarray:
    out = c.copy()
    for block in _BLOCKS:
        out[block] = c[block] | out[TAIL[block]]
    return out


def vec_always(c: np.ndarray) -> np.ndarray:
    out = c.copy()
    for block in _BLOCKS:
        out[block] = c[block] & out[TAIL[block]]
    return out


def vec_until(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = b.copy()
    for block in _BLOCKS:
        out[block] = b[block] | (a[block] & out[TAIL[block]])
    return out


def vec_release(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = b.copy()
    for block in _BLOCKS:
        out[block] = b[block] & (a[block] | out[TAIL[block]])
    return out


_UNARY = (
    (not_, np.logical_not),
    (next_, vec_next),
    (weak_next, vec_wnext),
    (eventually, vec_eventually),
    (always, vec_always),
)

_BINARY = (
    (and_, np.logical_and),
    (or_, np.logical_or),
    (implies, lambda a, b: ~a | b),
    (until, vec_until),
    (release, vec_release),
)


def enumerate_formulas(max_size: int = MAX_SIZE) -> Iterator[Tuple[Formula, np.ndarray]]:
    """Every distinct formula structure over PROPS up to max_size nodes,
    paired with its semantic vector."""
    by_size: Dict[int, List[Tuple[Formula, np.ndarray]]] = {
        1: [
            (ltlf.TRUE_F, SEM_TRUE),
            (ltlf.FALSE_F, SEM_FALSE),
            (atom("p"), SEM_P),
            (atom("q"), SEM_Q),
        ]
    }
    yield from by_size[1]
    for size in range(2, max_size + 1):
        level: List[Tuple[Formula, np.ndarray]] = []
        for make, vec in _UNARY:
            for child, cv in by_size[size - 1]:
                level.append((make(child), vec(cv)))
        for make, vec in _BINARY:
            for lsize in range(1, size - 1):
                rsize = size - 1 - lsize
                for left, lv in by_size[lsize]:
                    for right, rv in by_size[rsize]:
                        level.append((make(left, right), vec(lv, rv)))
        by_size[size] = level
        yield from level


def count_formulas(max_size: int = MAX_SIZE) -> int:
    counts = {1: 4}
    for size in range(2, max_size + 1):
        n = 5 * counts[size - 1]
        for lsize in range(1, size - 1):
            n += 5 * counts[lsize] * counts[size - 1 - lsize]
        counts[size] = n
    return sum(counts.values())


def dfa_vector(dfa) -> np.ndarray:
    """DFA acceptance over every trace, by simulating all shared prefixes
    level by level."""
    table = np.asarray(dfa.table, dtype=np.int64)
    acc = np.zeros(dfa.n_states, dtype=bool)
    acc[list(dfa.accepting)] = True
    cur = table[0]  # states after each length-1 trace
    blocks = [acc[cur]]
    for _ in range(2, MAX_LEN + 1):
        cur = table[cur].reshape(-1)  # row-major matches the trace numbering
        blocks.append(acc[cur])
    return np.concatenate(blocks)
