"""One-counter automata: model, construction from grammars, serialization.

Transitions have the shape ``src, terminal, cond -> dst, action`` where
``cond`` tests the counter (``0`` means zero, ``+`` means nonzero) and
``action`` adjusts it by +1, 0, or -1.  A transition testing zero may not
decrement.  Acceptance requires ending in a final state with the counter at
zero.  Stripping conditions and actions yields an ordinary NFA over the same
states.

File format (line oriented, ``#`` starts a comment)::

    kind: oca | nfa
    states: <state> ...
    start: <state>
    finals: <state> ...
    <src> <terminal> <0|+> -> <dst> <+1|-1|0> [marked] [# origin p<i>:<role>]

NFA transition lines omit the condition and action fields.  The ``states:``
line makes automata with isolated states round-trip; files without it are
accepted and the state set is inferred.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

from .grammar import GNF, LID, Branch, Gnf, Grammar, KindError, Unit, last_sets, nullables

ONE_COUNTER = "oca"
FINITE = "nfa"

COND_ZERO = "0"
COND_PLUS = "+"

INC = 1
KEEP = 0
DEC = -1

ROLE_UNIT = "unit"
ROLE_BRANCH_OPEN = "branch-open"
ROLE_BRANCH_CLOSE = "branch-close"
ROLE_GNF_OPEN = "gnf-open"
ROLE_GNF_SIBLING = "gnf-sibling"
ROLE_GNF_CLOSE = "gnf-close"
ROLE_GNF_FINAL = "gnf-final"

ROLES = frozenset({ROLE_UNIT, ROLE_BRANCH_OPEN, ROLE_BRANCH_CLOSE, ROLE_GNF_OPEN,
                   ROLE_GNF_SIBLING, ROLE_GNF_CLOSE, ROLE_GNF_FINAL})

# The single accepting state of automata built from Greibach-form grammars.
FINAL_STATE = "Z"


class AutomatonError(ValueError):
    """Invalid automaton structure or misuse of an automaton operation."""


class AutomatonSyntaxError(AutomatonError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message + (f" (line {line})" if line is not None else ""))


@dataclass(frozen=True)
class Origin:
    """Link from a transition back to the grammar production that generated
    it, with the generation rule that fired."""

    production: int
    role: str


@dataclass(frozen=True)
class Transition:
    ident: int
    src: str
    terminal: str
    cond: str | None  # COND_ZERO | COND_PLUS, or None on NFA edges
    dst: str
    action: int  # INC | KEEP | DEC
    marked: bool = False
    origin: Origin | None = None

    def __post_init__(self) -> None:
        if self.cond == COND_ZERO and self.action == DEC:
            raise AutomatonError(
                f"transition {self.src},{self.terminal} may not decrement on a zero counter")
        if self.cond is None and self.action != KEEP:
            raise AutomatonError("finite-automaton edges cannot change a counter")
        if self.action not in (INC, KEEP, DEC):
            raise AutomatonError(f"invalid counter action {self.action!r}")
        if self.cond not in (COND_ZERO, COND_PLUS, None):
            raise AutomatonError(f"invalid counter condition {self.cond!r}")

    def key(self) -> tuple[str, str, str | None, str, int]:
        """The behavioural tuple, ignoring identity, mark, and origin."""
        return (self.src, self.terminal, self.cond, self.dst, self.action)

    def render(self) -> str:
        action = {INC: "+1", DEC: "-1", KEEP: "0"}[self.action]
        if self.cond is None:
            text = f"{self.src} {self.terminal} -> {self.dst}"
        else:
            text = f"{self.src} {self.terminal} {self.cond} -> {self.dst} {action}"
            if self.marked:
                text += " marked"
        if self.origin is not None:
            text += f"  # origin p{self.origin.production}:{self.origin.role}"
        return text


@dataclass(frozen=True)
class Automaton:
    kind: str  # ONE_COUNTER | FINITE
    states: tuple[str, ...]
    start: str
    finals: tuple[str, ...]
    transitions: tuple[Transition, ...]

    def __post_init__(self) -> None:
        state_set = set(self.states)
        if self.start not in state_set:
            raise AutomatonError(f"start state {self.start!r} not in state set")
        for f in self.finals:
            if f not in state_set:
                raise AutomatonError(f"final state {f!r} not in state set")
        for i, t in enumerate(self.transitions):
            if t.ident != i:
                raise AutomatonError("transition identifiers must be dense indices")
            if t.src not in state_set or t.dst not in state_set:
                raise AutomatonError(f"transition {t.render()!r} references an unknown state")
            if self.kind == FINITE and t.cond is not None:
                raise AutomatonError("finite automaton carries a counter condition")
            if self.kind == ONE_COUNTER and t.cond is None:
                raise AutomatonError("one-counter transition lacks a counter condition")

    @cached_property
    def final_set(self) -> frozenset[str]:
        return frozenset(self.finals)

    @cached_property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(t.terminal for t in self.transitions))

    @cached_property
    def by_terminal_src(self) -> dict[tuple[str, str], tuple[Transition, ...]]:
        grouped: dict[tuple[str, str], list[Transition]] = {}
        for t in self.transitions:
            grouped.setdefault((t.terminal, t.src), []).append(t)
        return {k: tuple(v) for k, v in grouped.items()}

    @cached_property
    def by_dst(self) -> dict[str, tuple[Transition, ...]]:
        grouped: dict[str, list[Transition]] = {}
        for t in self.transitions:
            grouped.setdefault(t.dst, []).append(t)
        return {k: tuple(v) for k, v in grouped.items()}


def build_lid_oca(grammar: Grammar) -> Automaton:
    """Construct the approximating one-counter automaton of a lid grammar.

    States are the nonterminals; the start nonterminal is the start state.
    ``A -> t B`` yields counter-keeping transitions for both counter
    conditions; ``A -> u B v C`` yields incrementing transitions into B plus,
    for every nullable D that can end a sentential form of B, a decrementing
    transition ``D, v, + -> C, -1``.  A state is final iff it is nullable and
    can end a sentential form of the start nonterminal.
    """
    if grammar.kind != LID:
        raise KindError("build_lid_oca requires a lid grammar")
    last = last_sets(grammar)
    nullable = nullables(grammar)
    states = grammar.nonterminals
    transitions: list[Transition] = []

    def add(src: str, terminal: str, cond: str, dst: str, action: int,
            role: str, production: int, marked: bool = False) -> None:
        transitions.append(Transition(len(transitions), src, terminal, cond, dst, action,
                                      marked=marked, origin=Origin(production, role)))

    for i, p in enumerate(grammar.productions):
        r = p.rhs
        if isinstance(r, Unit):
            add(p.lhs, r.terminal, COND_ZERO, r.target, KEEP, ROLE_UNIT, i)
            add(p.lhs, r.terminal, COND_PLUS, r.target, KEEP, ROLE_UNIT, i)
        elif isinstance(r, Branch):
            add(p.lhs, r.opener, COND_ZERO, r.inner, INC, ROLE_BRANCH_OPEN, i)
            add(p.lhs, r.opener, COND_PLUS, r.inner, INC, ROLE_BRANCH_OPEN, i)
            for d in states:
                if d in last[r.inner] and d in nullable:
                    add(d, r.closer, COND_PLUS, r.continuation, DEC, ROLE_BRANCH_CLOSE, i)
    finals = tuple(s for s in states if s in nullable and s in last[grammar.start])
    return Automaton(ONE_COUNTER, states, grammar.start, finals, tuple(transitions))


def build_gnf_oca(grammar: Grammar) -> Automaton:
    """Construct the approximating one-counter automaton of a Greibach-form
    grammar.

    States are the nonterminals plus the single final state ``Z``.  A
    production ``A -> b B1`` keeps the counter; ``A -> b B1 ... Bk`` (k > 1)
    increments into B1, and every terminal-only production ``D -> d`` with D
    in the last-set of the preceding body position contributes a *marked*
    counter-keeping transition into each intermediate position and a
    decrementing transition into the last one.  Terminal-only productions of
    the start's last-set feed ``Z`` on a zero counter.
    """
    if grammar.kind != GNF:
        raise KindError("build_gnf_oca requires a gnf grammar")
    if FINAL_STATE in grammar.nonterminal_set:
        raise AutomatonError(
            f"nonterminal {FINAL_STATE!r} collides with the reserved final state")
    last = last_sets(grammar)
    terminal_only = [(i, p) for i, p in enumerate(grammar.productions)
                     if isinstance(p.rhs, Gnf) and not p.rhs.body]
    states = grammar.nonterminals + (FINAL_STATE,)
    transitions: list[Transition] = []

    def add(src: str, terminal: str, cond: str, dst: str, action: int,
            role: str, production: int, marked: bool = False) -> None:
        transitions.append(Transition(len(transitions), src, terminal, cond, dst, action,
                                      marked=marked, origin=Origin(production, role)))

    for i, p in enumerate(grammar.productions):
        r = p.rhs
        assert isinstance(r, Gnf)
        body = r.body
        k = len(body)
        if k == 0:
            if p.lhs in last[grammar.start]:
                add(p.lhs, r.terminal, COND_ZERO, FINAL_STATE, KEEP, ROLE_GNF_FINAL, i)
            continue
        if k == 1:
            add(p.lhs, r.terminal, COND_ZERO, body[0], KEEP, ROLE_UNIT, i)
            add(p.lhs, r.terminal, COND_PLUS, body[0], KEEP, ROLE_UNIT, i)
            continue
        add(p.lhs, r.terminal, COND_ZERO, body[0], INC, ROLE_GNF_OPEN, i)
        add(p.lhs, r.terminal, COND_PLUS, body[0], INC, ROLE_GNF_OPEN, i)
        for n in range(2, k):  # intermediate body positions, 1-indexed
            for _, q in terminal_only:
                if q.lhs in last[body[n - 2]]:
                    add(q.lhs, q.rhs.terminal, COND_PLUS, body[n - 1], KEEP,
                        ROLE_GNF_SIBLING, i, marked=True)
        for _, q in terminal_only:
            if q.lhs in last[body[k - 2]]:
                add(q.lhs, q.rhs.terminal, COND_PLUS, body[k - 1], DEC, ROLE_GNF_CLOSE, i)
    return Automaton(ONE_COUNTER, states, grammar.start, (FINAL_STATE,), tuple(transitions))


def strip_to_nfa(automaton: Automaton) -> Automaton:
    """Drop counter conditions and actions, collapsing duplicate edges.
    The result accepts a superset of the one-counter language."""
    if automaton.kind != ONE_COUNTER:
        raise KindError("strip_to_nfa expects a one-counter automaton")
    edges: list[Transition] = []
    seen: set[tuple[str, str, str]] = set()
    for t in automaton.transitions:
        key = (t.src, t.terminal, t.dst)
        if key in seen:
            continue
        seen.add(key)
        edges.append(Transition(len(edges), t.src, t.terminal, None, t.dst, KEEP))
    return Automaton(FINITE, automaton.states, automaton.start, automaton.finals, tuple(edges))


_ORIGIN_RE = re.compile(r"origin\s+p(\d+):([a-z-]+)")
_ACTIONS = {"+1": INC, "-1": DEC, "0": KEEP}


def serialize_automaton(automaton: Automaton) -> str:
    lines = [
        f"kind: {automaton.kind}",
        "states: " + " ".join(automaton.states),
        f"start: {automaton.start}",
        "finals: " + " ".join(automaton.finals) if automaton.finals else "finals:",
    ]
    lines.extend(t.render() for t in automaton.transitions)
    return "\n".join(lines) + "\n"


def parse_automaton(text: str) -> Automaton:
    headers: dict[str, tuple[str, int]] = {}
    rows: list[tuple[int, list[str], Origin | None]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        code, _, comment = raw.partition("#")
        if not code.strip():
            continue
        origin = None
        m = _ORIGIN_RE.search(comment)
        if m:
            role = m.group(2)
            if role not in ROLES:
                raise AutomatonSyntaxError(f"unknown origin role {role!r}", lineno)
            origin = Origin(int(m.group(1)), role)
        toks = code.split()
        if "->" in toks:
            rows.append((lineno, toks, origin))
            continue
        key, sep, value = code.partition(":")
        key = key.strip()
        if not sep or key not in ("kind", "states", "start", "finals"):
            raise AutomatonSyntaxError(
                "expected 'kind:', 'states:', 'start:', 'finals:', or a transition", lineno)
        if key in headers:
            raise AutomatonSyntaxError(f"duplicate {key!r} line", lineno)
        headers[key] = (value.strip(), lineno)

    if "kind" not in headers:
        raise AutomatonSyntaxError("missing 'kind:' declaration")
    kind, kind_line = headers["kind"]
    if kind not in (ONE_COUNTER, FINITE):
        raise AutomatonSyntaxError(f"kind must be 'oca' or 'nfa', got {kind!r}", kind_line)
    if "start" not in headers:
        raise AutomatonSyntaxError("missing 'start:' declaration")
    start = headers["start"][0]
    finals = tuple(headers["finals"][0].split()) if "finals" in headers else ()

    transitions: list[Transition] = []
    for lineno, toks, origin in rows:
        try:
            if kind == FINITE:
                if len(toks) != 4 or toks[2] != "->":
                    raise AutomatonSyntaxError("expected '<src> <terminal> -> <dst>'", lineno)
                transitions.append(Transition(len(transitions), toks[0], toks[1], None,
                                              toks[3], KEEP, origin=origin))
                continue
            marked = False
            if toks and toks[-1] == "marked":
                marked = True
                toks = toks[:-1]
            if len(toks) != 6 or toks[3] != "->":
                raise AutomatonSyntaxError(
                    "expected '<src> <terminal> <0|+> -> <dst> <+1|-1|0>'", lineno)
            src, terminal, cond, _, dst, action_tok = toks
            if cond not in (COND_ZERO, COND_PLUS):
                raise AutomatonSyntaxError(f"invalid counter condition {cond!r}", lineno)
            if action_tok not in _ACTIONS:
                raise AutomatonSyntaxError(f"invalid counter action {action_tok!r}", lineno)
            transitions.append(Transition(len(transitions), src, terminal, cond, dst,
                                          _ACTIONS[action_tok], marked=marked, origin=origin))
        except AutomatonError as exc:
            if isinstance(exc, AutomatonSyntaxError):
                raise
            raise AutomatonSyntaxError(str(exc), lineno) from exc

    if "states" in headers:
        states = tuple(headers["states"][0].split())
    else:
        inferred: dict[str, None] = {start: None}
        for t in transitions:
            inferred.setdefault(t.src, None)
            inferred.setdefault(t.dst, None)
        for f in finals:
            inferred.setdefault(f, None)
        states = tuple(inferred)
    try:
        return Automaton(kind, states, start, finals, tuple(transitions))
    except AutomatonError as exc:
        raise AutomatonSyntaxError(str(exc)) from exc
