"""Nondeterministic recognition and acceptance-sequence extraction.

:func:`run_oca` fills a forward dynamic-programming table of reachable
(state, counter) configurations per input position, keeping one back-pointer
per configuration; the table stays within ``(n+1)^2 * |states|`` entries
because the counter can never exceed the number of consumed tokens.
:func:`extract_sequence` then walks the back-pointers to one accepting
transition sequence in linear time.  :func:`accepts` and
:func:`accepted_upto` skip the table and use the fast kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from . import kernels
from .automaton import COND_ZERO, FINITE, ONE_COUNTER, Automaton, AutomatonError

DEFAULT_ENUMERATION_CAP = 10 ** 6

# (previous state, previous counter, transition ident); None marks the
# initial configuration.
BackPointer = tuple[str, int, int] | None


@dataclass(frozen=True)
class AcceptanceSequence:
    """Transition identifiers of one accepting run, in consumption order.
    One transition per input token."""

    transition_ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.transition_ids)

    def __iter__(self) -> Iterator[int]:
        return iter(self.transition_ids)


@dataclass(frozen=True)
class RunTable:
    tokens: tuple[str, ...]
    layers: tuple[dict[tuple[str, int], BackPointer], ...]
    accepted: bool

    def total_configurations(self) -> int:
        return sum(len(layer) for layer in self.layers)


def _require(automaton: Automaton, kind: str, what: str) -> None:
    if automaton.kind != kind:
        raise AutomatonError(f"{what} expects a {kind} automaton, got {automaton.kind}")


def run_oca(automaton: Automaton, tokens: Sequence[str]) -> RunTable:
    """Forward configuration DP.  Unknown input symbols reject (no error).
    The first back-pointer discovered for a configuration is kept, with
    transitions applied in identifier order for a deterministic table."""
    _require(automaton, ONE_COUNTER, "run_oca")
    toks = tuple(tokens)
    n = len(toks)
    layers: list[dict[tuple[str, int], BackPointer]] = [{(automaton.start, 0): None}]
    index = automaton.by_terminal_src
    for pos, tok in enumerate(toks):
        nxt: dict[tuple[str, int], BackPointer] = {}
        for state, counter in layers[pos]:
            for t in index.get((tok, state), ()):
                if (t.cond == COND_ZERO) != (counter == 0):
                    continue
                after = counter + t.action
                assert 0 <= after <= pos + 1, "counter escaped its position bound"
                nxt.setdefault((t.dst, after), (state, counter, t.ident))
        layers.append(nxt)
        if not nxt:
            break
    while len(layers) < n + 1:
        layers.append({})
    accepted = any((f, 0) in layers[n] for f in automaton.finals)
    table = RunTable(toks, tuple(layers), accepted)
    assert table.total_configurations() <= (n + 1) ** 2 * max(len(automaton.states), 1), \
        "configuration table exceeded its quadratic bound"
    return table


def extract_sequence(table: RunTable, automaton: Automaton) -> AcceptanceSequence | None:
    """One accepting transition sequence, or ``None`` when the run rejected.
    Deterministic: the accepting configuration is the first final state in
    state order, and back-pointers already fixed the path."""
    if not table.accepted:
        return None
    n = len(table.tokens)
    last = table.layers[n]
    config = next((f, 0) for f in automaton.finals if (f, 0) in last)
    ids: list[int] = []
    for pos in range(n, 0, -1):
        pointer = table.layers[pos][config]
        assert pointer is not None
        prev_state, prev_counter, ident = pointer
        ids.append(ident)
        config = (prev_state, prev_counter)
    assert config == (automaton.start, 0)
    return AcceptanceSequence(tuple(reversed(ids)))


def replay(automaton: Automaton, sequence: AcceptanceSequence,
           tokens: Sequence[str] | None = None) -> list[int]:
    """Validate a sequence against the automaton and return the counter
    profile after each step.  Raises :class:`AutomatonError` on a transition
    chain that is broken, violates a condition, or ends nonzero/non-final."""
    state, counter = automaton.start, 0
    profile: list[int] = []
    for step, ident in enumerate(sequence):
        t = automaton.transitions[ident]
        if t.src != state:
            raise AutomatonError(f"step {step}: transition {ident} starts in {t.src}, run is in {state}")
        if (t.cond == COND_ZERO) != (counter == 0):
            raise AutomatonError(f"step {step}: counter condition {t.cond} fails at counter {counter}")
        if tokens is not None and t.terminal != tokens[step]:
            raise AutomatonError(f"step {step}: transition consumes {t.terminal!r}, input has {tokens[step]!r}")
        counter += t.action
        if counter < 0:
            raise AutomatonError(f"step {step}: counter went negative")
        state = t.dst
        profile.append(counter)
    if counter != 0:
        raise AutomatonError(f"sequence ends with counter {counter}, not zero")
    if state not in automaton.final_set:
        raise AutomatonError(f"sequence ends in non-final state {state}")
    return profile


def run_nfa(automaton: Automaton, tokens: Sequence[str]) -> bool:
    """Standard subset simulation."""
    _require(automaton, FINITE, "run_nfa")
    states = {automaton.start}
    index = automaton.by_terminal_src
    for tok in tokens:
        states = {t.dst for s in states for t in index.get((tok, s), ())}
        if not states:
            return False
    return bool(states & automaton.final_set)


def accepts(automaton: Automaton, tokens: Sequence[str]) -> bool:
    """Kernel-backed acceptance test (no table, no back-pointers)."""
    if automaton.kind == FINITE:
        return kernels.nfa_accepts(kernels.compile_nfa(automaton), tokens)
    return kernels.oca_accepts(kernels.compile_oca(automaton), tokens)


def count_strings(alphabet_size: int, maxlen: int) -> int:
    if alphabet_size == 0:
        return 1
    return sum(alphabet_size ** length for length in range(maxlen + 1))


def all_strings(alphabet: Sequence[str], maxlen: int) -> Iterator[tuple[str, ...]]:
    """All strings over the alphabet up to the length bound, in length order
    then alphabet order."""
    for length in range(maxlen + 1):
        yield from product(tuple(alphabet), repeat=length)


def accepted_upto(automaton: Automaton, alphabet: Sequence[str], maxlen: int,
                  cap: int = DEFAULT_ENUMERATION_CAP) -> set[tuple[str, ...]]:
    """Accepted strings over ``alphabet`` of length at most ``maxlen``, by a
    per-string kernel run.  Guards against combinatorial blow-up via ``cap``."""
    if maxlen < 0:
        raise ValueError("maxlen must be non-negative")
    total = count_strings(len(alphabet), maxlen)
    if total > cap:
        raise ValueError(f"enumeration cap exceeded: {total} strings > cap {cap}")
    if automaton.kind == FINITE:
        compiled = kernels.compile_nfa(automaton)
        test = kernels.nfa_accepts
    else:
        compiled = kernels.compile_oca(automaton)
        test = kernels.oca_accepts
    return {w for w in all_strings(alphabet, maxlen) if test(compiled, w)}


def enumerate_sequences(automaton: Automaton, tokens: Sequence[str],
                        limit: int = 100) -> list[AcceptanceSequence]:
    """Up to ``limit`` accepting sequences for one input, for inspecting
    ambiguity.  Deterministic order: accepting states in state order, then
    predecessor transitions by identifier."""
    _require(automaton, ONE_COUNTER, "enumerate_sequences")
    table = run_oca(automaton, tokens)
    if not table.accepted:
        return []
    n = len(table.tokens)
    by_dst = automaton.by_dst
    results: list[AcceptanceSequence] = []

    def walk(pos: int, config: tuple[str, int], suffix: tuple[int, ...]) -> None:
        if len(results) >= limit:
            return
        if pos == 0:
            if config == (automaton.start, 0):
                results.append(AcceptanceSequence(suffix))
            return
        state, counter = config
        tok = table.tokens[pos - 1]
        for t in sorted(by_dst.get(state, ()), key=lambda t: t.ident):
            if t.terminal != tok:
                continue
            before = counter - t.action
            if before < 0 or (t.cond == COND_ZERO) != (before == 0):
                continue
            if (t.src, before) in table.layers[pos - 1]:
                walk(pos - 1, (t.src, before), (t.ident,) + suffix)

    for f in automaton.finals:
        if (f, 0) in table.layers[n]:
            walk(n, (f, 0), ())
    return results
