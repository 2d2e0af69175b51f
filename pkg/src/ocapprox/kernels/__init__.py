"""Per-string acceptance kernels.

The comparison harness runs one acceptance test per enumerated string, which
makes these two small loops the hot path of the whole package.  A compiled
Cython variant (:mod:`._speedups`) is used when it was built; otherwise the
pure-Python twin (:mod:`.pure`) takes over.  Set ``OCAPPROX_PURE=1`` to force
the fallback.  Both operate on the same pre-compiled integer form of an
automaton produced by :func:`compile_oca` / :func:`compile_nfa`.
"""

from __future__ import annotations

import os
from array import array
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from ..automaton import COND_ZERO, FINITE, ONE_COUNTER, Automaton
from . import pure

try:
    from . import _speedups
except ImportError:  # not built; the pure twin is always available
    _speedups = None

_active = pure if (_speedups is None or os.environ.get("OCAPPROX_PURE")) else _speedups


def backend_name() -> str:
    return "pure" if _active is pure else "compiled"


@dataclass(frozen=True, eq=False)
class CompiledOca:
    n_states: int
    start: int
    finals: bytes  # flag per state index
    token_ids: dict[str, int]
    # transitions sorted by token id, CSR layout
    offsets: array  # len(token_ids) + 1
    src: array
    dst: array
    cond_plus: bytes  # 1 when the transition requires a nonzero counter
    action: array
    kernel: object = None  # backend-prepared form, set once after construction


@dataclass(frozen=True, eq=False)
class CompiledNfa:
    n_states: int
    start: int
    finals: bytes
    token_ids: dict[str, int]
    offsets: array
    src: array
    dst: array
    kernel: object = None


@lru_cache(maxsize=128)
def compile_oca(automaton: Automaton) -> CompiledOca:
    if automaton.kind != ONE_COUNTER:
        raise ValueError("compile_oca expects a one-counter automaton")
    state_ids = {s: i for i, s in enumerate(automaton.states)}
    token_ids: dict[str, int] = {}
    for t in automaton.transitions:
        token_ids.setdefault(t.terminal, len(token_ids))
    buckets: list[list[tuple[int, int, int, int]]] = [[] for _ in token_ids]
    for t in automaton.transitions:
        buckets[token_ids[t.terminal]].append(
            (state_ids[t.src], state_ids[t.dst], int(t.cond != COND_ZERO), t.action))
    offsets = array("i", [0])
    src, dst, action = array("i"), array("i"), array("i")
    cond_plus = bytearray()
    for rows in buckets:
        for s, d, c, a in rows:
            src.append(s)
            dst.append(d)
            cond_plus.append(c)
            action.append(a)
        offsets.append(len(src))
    finals = bytearray(len(automaton.states))
    for f in automaton.finals:
        finals[state_ids[f]] = 1
    compiled = CompiledOca(len(automaton.states), state_ids[automaton.start], bytes(finals),
                           token_ids, offsets, src, dst, bytes(cond_plus), action)
    object.__setattr__(compiled, "kernel", _active.prepare_oca(compiled))
    return compiled


@lru_cache(maxsize=128)
def compile_nfa(automaton: Automaton) -> CompiledNfa:
    if automaton.kind != FINITE:
        raise ValueError("compile_nfa expects a finite automaton")
    state_ids = {s: i for i, s in enumerate(automaton.states)}
    token_ids: dict[str, int] = {}
    for t in automaton.transitions:
        token_ids.setdefault(t.terminal, len(token_ids))
    buckets: list[list[tuple[int, int]]] = [[] for _ in token_ids]
    for t in automaton.transitions:
        buckets[token_ids[t.terminal]].append((state_ids[t.src], state_ids[t.dst]))
    offsets = array("i", [0])
    src, dst = array("i"), array("i")
    for rows in buckets:
        for s, d in rows:
            src.append(s)
            dst.append(d)
        offsets.append(len(src))
    finals = bytearray(len(automaton.states))
    for f in automaton.finals:
        finals[state_ids[f]] = 1
    compiled = CompiledNfa(len(automaton.states), state_ids[automaton.start], bytes(finals),
                           token_ids, offsets, src, dst)
    object.__setattr__(compiled, "kernel", _active.prepare_nfa(compiled))
    return compiled


def _token_row(compiled, tokens: Sequence[str]) -> array | None:
    """Map tokens to ids; ``None`` when a token is outside the alphabet, in
    which case the automaton rejects immediately."""
    ids = array("i")
    table = compiled.token_ids
    for tok in tokens:
        tid = table.get(tok)
        if tid is None:
            return None
        ids.append(tid)
    return ids


def oca_accepts(compiled: CompiledOca, tokens: Sequence[str]) -> bool:
    ids = _token_row(compiled, tokens)
    if ids is None:
        return False
    return bool(_active.oca_accepts_ids(compiled.kernel, ids))


def nfa_accepts(compiled: CompiledNfa, tokens: Sequence[str]) -> bool:
    ids = _token_row(compiled, tokens)
    if ids is None:
        return False
    return bool(_active.nfa_accepts_ids(compiled.kernel, ids))
