"""Language-preserving replication transformations.

Three rewrites make approximable grammars exactly recognizable:

* :func:`eliminate_regular_tails_lid` removes bracketing productions
  ``A -> b B c C`` whose inner part can never open another bracket, by
  replicating the inner sub-grammar and splicing ``c C`` onto its epsilon
  ends.
* :func:`disjoint_r_sets` replicates inner sub-grammars of bracketing
  productions whose last-sets collide with a differently-closing production,
  until colliding pairs are gone.
* :func:`eliminate_regular_prefix_gnf` removes long Greibach productions
  whose non-final body positions are right-linear, by chaining replicas.

All replicas are fresh nonterminals named ``<original>$<step>``; every
transformation leaves the original nonterminals and their productions in
place, so unreachable leftovers are reported by grammar diagnostics rather
than silently dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .analysis import PreconditionError, normalizability_condition, exactness_condition
from .grammar import (GNF, LID, Branch, Epsilon, Gnf, Grammar, KindError, Production,
                      Rhs, Unit, last_sets)


class TransformError(ValueError):
    """A transformation could not be completed soundly."""


@dataclass(frozen=True)
class ReplicaMap:
    """Fresh nonterminals introduced by one replication step."""

    production: int  # index of the rewritten production
    step: int
    mapping: tuple[tuple[str, str], ...]  # (original, replica) pairs

    def comments(self) -> list[str]:
        return [f"{rep} replica of {orig}, step {self.step}" for orig, rep in self.mapping]


def provenance_comments(log: Iterable[ReplicaMap]) -> list[str]:
    out: list[str] = []
    for entry in log:
        out.extend(entry.comments())
    return out


def _fresh_mapping(grammar: Grammar, members: tuple[str, ...], step: int) -> tuple[dict[str, str], int]:
    """Replica names for one step, bumping the step number until every name
    is unused (user grammars may already contain ``$`` names)."""
    taken = set(grammar.nonterminal_set) | set(grammar.terminals)
    while True:
        mapping = {m: f"{m}${step}" for m in members}
        if all(name not in taken for name in mapping.values()):
            return mapping, step
        step += 1


def _ordered(grammar: Grammar, names: frozenset[str]) -> tuple[str, ...]:
    return tuple(a for a in grammar.nonterminals if a in names)


def eliminate_regular_tails_lid(grammar: Grammar, *, only_conflicting: bool = False,
                                log: list[ReplicaMap] | None = None) -> Grammar:
    """Iteratively eliminate bracketing productions ``A -> b B c C`` whose
    inner last-set contains no bracketing nonterminal.

    The inner sub-grammar (all of B's last-set, with productions) is
    replicated with internal references rewired; replica epsilon productions
    become ``-> c C`` (C stays original); the production itself becomes
    ``A -> b B'``.  With ``only_conflicting`` the scan is limited to the
    nonterminals that can reach a last-set shared by two differently-closing
    bracketing productions, the minimum the later disjointness stage needs.
    The language is unchanged and no bracketing production is ever created.
    """
    if grammar.kind != LID:
        raise KindError("eliminate_regular_tails_lid requires a lid grammar")
    step = 0
    while True:
        target = _find_eliminable_tail(grammar, only_conflicting)
        if target is None:
            return grammar
        grammar, step = _eliminate_tail(grammar, target, step + 1, log)


def _branchers(grammar: Grammar) -> frozenset[str]:
    return frozenset(p.lhs for p in grammar.productions if isinstance(p.rhs, Branch))


def _conflict_members(grammar: Grammar, last: dict[str, frozenset[str]]) -> frozenset[str]:
    """Union of last-set intersections over differently-closing pairs of
    bracketing productions."""
    branch = [p.rhs for p in grammar.productions if isinstance(p.rhs, Branch)]
    shared: set[str] = set()
    for i, a in enumerate(branch):
        for b in branch[i + 1:]:
            if a.closer == b.closer and a.continuation == b.continuation:
                continue
            shared |= last[a.inner] & last[b.inner]
    return frozenset(shared)


def _find_eliminable_tail(grammar: Grammar, only_conflicting: bool) -> int | None:
    last = last_sets(grammar)
    branchers = _branchers(grammar)
    scope: frozenset[str] | None = None
    if only_conflicting:
        members = _conflict_members(grammar, last)
        scope = frozenset().union(*(last[d] for d in members)) if members else frozenset()
    for i, p in enumerate(grammar.productions):
        if not isinstance(p.rhs, Branch):
            continue
        if scope is not None and p.lhs not in scope:
            continue
        if not (last[p.rhs.inner] & branchers):
            return i
    return None


def _eliminate_tail(grammar: Grammar, index: int, step: int,
                    log: list[ReplicaMap] | None) -> tuple[Grammar, int]:
    last = last_sets(grammar)
    prod = grammar.productions[index]
    rhs = prod.rhs
    assert isinstance(rhs, Branch)
    members = _ordered(grammar, last[rhs.inner])
    mapping, step = _fresh_mapping(grammar, members, step)

    replicas: list[Production] = []
    for m in members:
        for q in grammar.productions_of(m):
            r = q.rhs
            if isinstance(r, Unit):
                # Unit targets stay inside the replicated last-set closure.
                new_rhs: Rhs = Unit(r.terminal, mapping.get(r.target, r.target))
            elif isinstance(r, Epsilon):
                new_rhs = Unit(rhs.closer, rhs.continuation)
            else:
                raise AssertionError("eliminable tails contain no bracketing productions")
            replicas.append(Production(mapping[m], new_rhs))

    productions = list(grammar.productions)
    productions[index] = Production(prod.lhs, Unit(rhs.opener, mapping[rhs.inner]))
    productions.extend(replicas)
    if log is not None:
        log.append(ReplicaMap(index, step, tuple(sorted(mapping.items()))))
    return replace(grammar, productions=tuple(productions)), step


def disjoint_r_sets(grammar: Grammar, log: list[ReplicaMap] | None = None) -> Grammar:
    """Make the exactness condition hold by replication.

    For each bracketing production ``A -> b B c C`` whose inner last-set
    shares nonterminals with a differently-closing bracketing production,
    the part of B's last-set that can reach those shared nonterminals is
    replicated (the shared nonterminals themselves must have no bracketing
    productions, else :class:`~.analysis.PreconditionError`), internal
    last-position references are rewired to the replicas while nested inner
    positions keep pointing at originals, and B is replaced by its replica.
    The language is unchanged.
    """
    if grammar.kind != LID:
        raise KindError("disjoint_r_sets requires a lid grammar")
    step = 0
    rounds = 0
    limit = 64 + 16 * len(grammar.productions)
    while True:
        rounds += 1
        if rounds > limit:
            raise TransformError(
                "replication did not converge; the grammar re-creates colliding "
                "bracketing pairs faster than they are resolved")
        found = _find_conflicted(grammar)
        if found is None:
            return grammar
        index, conflict = found
        grammar, step = _replicate_conflicted(grammar, index, conflict, step + 1, log)


def _find_conflicted(grammar: Grammar) -> tuple[int, frozenset[str]] | None:
    last = last_sets(grammar)
    branch = [(i, p.rhs) for i, p in enumerate(grammar.productions) if isinstance(p.rhs, Branch)]
    branchers = _branchers(grammar)
    for i, a in branch:
        conflict: set[str] = set()
        for j, b in branch:
            if i == j or (a.closer == b.closer and a.continuation == b.continuation):
                continue
            conflict |= last[a.inner] & last[b.inner]
        if conflict:
            offenders = sorted(conflict & branchers)
            if offenders:
                raise PreconditionError(
                    f"shared nonterminals {offenders} of production {i} "
                    f"({grammar.productions[i].render()}) have bracketing productions; "
                    "eliminate regular tails first")
            return i, frozenset(conflict)
    return None


def _replicate_conflicted(grammar: Grammar, index: int, conflict: frozenset[str],
                          step: int, log: list[ReplicaMap] | None) -> tuple[Grammar, int]:
    last = last_sets(grammar)
    prod = grammar.productions[index]
    rhs = prod.rhs
    assert isinstance(rhs, Branch)
    # Everything in B's last-set that can still reach a conflicting
    # nonterminal must move to the replica side; the rest may stay shared.
    needed = frozenset(x for x in last[rhs.inner] if last[x] & conflict)
    members = _ordered(grammar, needed)
    assert rhs.inner in needed
    mapping, step = _fresh_mapping(grammar, members, step)

    replicas: list[Production] = []
    for m in members:
        for q in grammar.productions_of(m):
            r = q.rhs
            if isinstance(r, Unit):
                new_rhs: Rhs = Unit(r.terminal, mapping.get(r.target, r.target))
            elif isinstance(r, Branch):
                new_rhs = Branch(r.opener, r.inner, r.closer,
                                 mapping.get(r.continuation, r.continuation))
            else:
                new_rhs = Epsilon()
            replicas.append(Production(mapping[m], new_rhs))

    productions = list(grammar.productions)
    productions[index] = Production(prod.lhs, replace(rhs, inner=mapping[rhs.inner]))
    productions.extend(replicas)
    if log is not None:
        log.append(ReplicaMap(index, step, tuple(sorted(mapping.items()))))
    return replace(grammar, productions=tuple(productions)), step


def normalize_to_exact(grammar: Grammar, log: list[ReplicaMap] | None = None) -> Grammar:
    """Rewrite a grammar passing :func:`~.analysis.normalizability_condition`
    into an equivalent one passing :func:`~.analysis.exactness_condition`:
    regular-tail elimination restricted to what the disjointness stage needs,
    then the disjointness stage itself."""
    if grammar.kind != LID:
        raise KindError("normalize_to_exact requires a lid grammar")
    report = normalizability_condition(grammar)
    if not report.holds:
        raise PreconditionError(
            "grammar is not normalizable: " + report.render(grammar))
    try:
        out = _tails_then_disjoint(grammar, only_conflicting=True, log=log)
    except (PreconditionError, TransformError):
        # The restricted tail pass can leave differently-closing bracketing
        # productions that the unrestricted pass would have dissolved
        # entirely; retry before giving up.
        retry_log: list[ReplicaMap] = []
        out = _tails_then_disjoint(grammar, only_conflicting=False, log=retry_log)
        if log is not None:
            log.clear()
            log.extend(retry_log)
    final = exactness_condition(out)
    if not final.holds:  # defensive; disjoint_r_sets already converged
        raise TransformError("normalization finished without establishing exactness")
    return out


def _tails_then_disjoint(grammar: Grammar, *, only_conflicting: bool,
                         log: list[ReplicaMap] | None) -> Grammar:
    staged: list[ReplicaMap] = []
    out = eliminate_regular_tails_lid(grammar, only_conflicting=only_conflicting, log=staged)
    out = disjoint_r_sets(out, log=staged)
    if log is not None:
        log.extend(staged)
    return out


def eliminate_regular_prefix_gnf(grammar: Grammar, log: list[ReplicaMap] | None = None) -> Grammar:
    """Iteratively eliminate Greibach productions ``A -> b B1 ... Bm``
    (m > 1) whose non-final body positions reach only nonterminals with
    productions ``E -> f`` or ``E -> f F``.

    Working from the next-to-last position down, each position's last-set is
    replicated (fresh copies per position); replica terminal-only productions
    are extended with the following position's replica (the last position
    stays original), and the production collapses to ``A -> b B1'``.  The
    language is unchanged and no long production is ever created.
    """
    if grammar.kind != GNF:
        raise KindError("eliminate_regular_prefix_gnf requires a gnf grammar")
    step = 0
    while True:
        target = _find_eliminable_prefix(grammar)
        if target is None:
            return grammar
        grammar, step = _eliminate_prefix(grammar, target, step, log)


def _short(grammar: Grammar, nonterminal: str) -> bool:
    return all(isinstance(p.rhs, Gnf) and len(p.rhs.body) <= 1
               for p in grammar.productions_of(nonterminal))


def _find_eliminable_prefix(grammar: Grammar) -> int | None:
    last = last_sets(grammar)
    for i, p in enumerate(grammar.productions):
        r = p.rhs
        if not isinstance(r, Gnf) or len(r.body) <= 1:
            continue
        prefix: set[str] = set()
        for b in r.body[:-1]:
            prefix |= last[b]
        if all(_short(grammar, e) for e in prefix):
            return i
    return None


def _eliminate_prefix(grammar: Grammar, index: int, step: int,
                      log: list[ReplicaMap] | None) -> tuple[Grammar, int]:
    last = last_sets(grammar)
    prod = grammar.productions[index]
    rhs = prod.rhs
    assert isinstance(rhs, Gnf)
    body = rhs.body
    m = len(body)

    replicas: list[Production] = []
    mappings: dict[int, dict[str, str]] = {}
    for i in range(m - 1, 0, -1):  # 1-indexed body positions m-1 .. 1
        members = _ordered(grammar, last[body[i - 1]])
        mapping, step = _fresh_mapping(grammar, members, step + 1)
        mappings[i] = mapping
        follower = body[m - 1] if i == m - 1 else mappings[i + 1][body[i]]
        for e in members:
            for q in grammar.productions_of(e):
                r = q.rhs
                assert isinstance(r, Gnf) and len(r.body) <= 1
                if not r.body:
                    new_rhs = Gnf(r.terminal, (follower,))
                else:
                    new_rhs = Gnf(r.terminal, (mapping[r.body[0]],))
                replicas.append(Production(mapping[e], new_rhs))
        if log is not None:
            log.append(ReplicaMap(index, step, tuple(sorted(mapping.items()))))

    productions = list(grammar.productions)
    productions[index] = Production(prod.lhs, Gnf(rhs.terminal, (mappings[1][body[0]],)))
    productions.extend(replicas)
    return replace(grammar, productions=tuple(productions)), step
