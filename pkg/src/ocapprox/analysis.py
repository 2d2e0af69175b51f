"""Decidable conditions on grammars that control automaton accuracy.

For ``lid`` grammars the key question is when the constructed one-counter
automaton recognizes *exactly* the grammar's language rather than a superset.
:func:`exactness_condition` checks the sufficient pairwise condition on
bracketing productions; :func:`normalizability_condition` checks the weaker
condition under which the grammar can be rewritten (see :mod:`.transform`)
into one that satisfies the former.  Both kinds of grammar also admit a
notion of *regular* nonterminal: one whose sub-grammar is right-linear in
effect, computed here as a least fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .grammar import GNF, LID, Branch, Gnf, Grammar, KindError, last_sets, nullables

MAX_WITNESSES = 100


class PreconditionError(ValueError):
    """An operation's precondition does not hold for the given grammar."""


class AmbiguityError(ValueError):
    """A uniqueness guarantee failed; indicates a violated precondition."""


@dataclass(frozen=True)
class Witness:
    """A pair of production indices violating a condition, with the shared
    nonterminals that witness the violation."""

    first: int
    second: int
    shared: tuple[str, ...]

    def render(self, grammar: Grammar) -> str:
        shown = ", ".join(self.shared)
        return (f"productions {self.first} ({grammar.productions[self.first].render()}) and "
                f"{self.second} ({grammar.productions[self.second].render()}) share {{{shown}}}")


@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    witnesses: tuple[Witness, ...]
    truncated: bool = False

    def render(self, grammar: Grammar) -> str:
        if self.holds:
            return "holds"
        lines = ["violated:"] + ["  " + w.render(grammar) for w in self.witnesses]
        if self.truncated:
            lines.append(f"  ... (truncated to {MAX_WITNESSES} witnesses)")
        return "\n".join(lines)


def _require_kind(grammar: Grammar, kind: str, what: str) -> None:
    if grammar.kind != kind:
        raise KindError(f"{what} requires a {kind} grammar, got {grammar.kind}")


def _branch_productions(grammar: Grammar) -> list[tuple[int, Branch]]:
    return [(i, p.rhs) for i, p in enumerate(grammar.productions) if isinstance(p.rhs, Branch)]


def _report(witnesses: list[Witness]) -> ConditionReport:
    truncated = len(witnesses) > MAX_WITNESSES
    return ConditionReport(holds=not witnesses, witnesses=tuple(witnesses[:MAX_WITNESSES]),
                           truncated=truncated)


def exactness_condition(grammar: Grammar) -> ConditionReport:
    """Check that any two bracketing productions either close identically
    (same closer terminal and continuation) or have disjoint last-sets of
    their inner nonterminals.

    When this holds, the one-counter automaton built from the grammar accepts
    exactly the grammar's language, and reconstructed trees are genuine parse
    trees.
    """
    _require_kind(grammar, LID, "exactness_condition")
    last = last_sets(grammar)
    witnesses: list[Witness] = []
    for (i, a), (j, b) in combinations(_branch_productions(grammar), 2):
        if a.closer == b.closer and a.continuation == b.continuation:
            continue
        shared = last[a.inner] & last[b.inner]
        if shared:
            witnesses.append(Witness(i, j, tuple(sorted(shared))))
    return _report(witnesses)


def regular_nonterminals_lid(grammar: Grammar) -> frozenset[str]:
    """Nonterminals whose associated sub-grammar is effectively right-linear.

    Least fixpoint of: A is regular if no member of its last-set has a
    bracketing production, or if every nonterminal on the right-hand side of
    every A-production is regular.  The least fixpoint rules out circular
    justification of a nonterminal through itself.
    """
    _require_kind(grammar, LID, "regular_nonterminals_lid")
    last = last_sets(grammar)
    has_branch = {a: any(isinstance(p.rhs, Branch) for p in grammar.productions_of(a))
                  for a in grammar.nonterminals}
    regular = {a for a in grammar.nonterminals if not any(has_branch[d] for d in last[a])}
    return _close_regular(grammar, regular)


def regular_nonterminals_gnf(grammar: Grammar) -> frozenset[str]:
    """Greibach-form analogue of :func:`regular_nonterminals_lid`: the base
    case admits A when every member of its last-set has only productions with
    body length at most one."""
    _require_kind(grammar, GNF, "regular_nonterminals_gnf")
    last = last_sets(grammar)

    def short(a: str) -> bool:
        return all(isinstance(p.rhs, Gnf) and len(p.rhs.body) <= 1
                   for p in grammar.productions_of(a))

    regular = {a for a in grammar.nonterminals if all(short(d) for d in last[a])}
    return _close_regular(grammar, regular)


def _close_regular(grammar: Grammar, regular: set[str]) -> frozenset[str]:
    changed = True
    while changed:
        changed = False
        for a in grammar.nonterminals:
            if a in regular:
                continue
            prods = grammar.productions_of(a)
            if prods and all(all(n in regular for n in p.rhs_nonterminals()) for p in prods):
                regular.add(a)
                changed = True
    return frozenset(regular)


def closing_pair(grammar: Grammar, nonterminal: str) -> tuple[str, str] | None:
    """The unique (closer terminal, continuation nonterminal) of any
    bracketing production whose inner nonterminal can end in ``nonterminal``;
    ``None`` when no such production exists.

    Only meaningful for nullable nonterminals of grammars satisfying
    :func:`exactness_condition`, which guarantees uniqueness.
    """
    _require_kind(grammar, LID, "closing_pair")
    if not exactness_condition(grammar).holds:
        raise PreconditionError("closing_pair requires the exactness condition to hold")
    if nonterminal not in nullables(grammar):
        raise PreconditionError(f"{nonterminal!r} is not nullable")
    last = last_sets(grammar)
    pairs = {(b.closer, b.continuation) for _, b in _branch_productions(grammar)
             if nonterminal in last[b.inner]}
    if not pairs:
        return None
    if len(pairs) > 1:
        raise AmbiguityError(
            f"multiple closing pairs for {nonterminal!r}: {sorted(pairs)}")
    return next(iter(pairs))


def normalizability_condition(grammar: Grammar) -> ConditionReport:
    """Check that for every pair of bracketing productions that close
    differently, all nonterminals shared by their inner last-sets are
    regular.  Grammars passing this can be transformed (replicating the
    regular parts) into an equivalent grammar passing
    :func:`exactness_condition`.

    Witnesses carry the non-regular members of the offending intersection.
    """
    _require_kind(grammar, LID, "normalizability_condition")
    last = last_sets(grammar)
    regular = regular_nonterminals_lid(grammar)
    witnesses: list[Witness] = []
    for (i, a), (j, b) in combinations(_branch_productions(grammar), 2):
        if a.closer == b.closer and a.continuation == b.continuation:
            continue
        bad = (last[a.inner] & last[b.inner]) - regular
        if bad:
            witnesses.append(Witness(i, j, tuple(sorted(bad))))
    return _report(witnesses)
