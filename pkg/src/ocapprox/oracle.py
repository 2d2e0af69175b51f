"""Ground-truth membership, parsing, and bounded language enumeration.

This module is the independent reference the automaton pipeline is checked
against, so it deliberately shares no recognition machinery with
:mod:`.runtime`: membership is a memoized top-down derivation search over the
grammar itself.  Both supported grammar kinds emit one terminal per
derivation step (epsilon aside), which bounds the recursion by the input
length; no normal-form conversion is involved.
"""

from __future__ import annotations

from itertools import product
from typing import Iterator, Sequence

from .grammar import GNF, Branch, Epsilon, Gnf, Grammar, Unit, nullables
from .trees import Tree, leaf

DEFAULT_ENUMERATION_CAP = 10 ** 6


def member(grammar: Grammar, tokens: Sequence[str]) -> bool:
    """True iff the start nonterminal derives the token sequence."""
    toks = tuple(tokens)
    if grammar.kind == GNF:
        return _member_gnf(grammar, toks)
    return _member_lid(grammar, toks)


def _member_lid(grammar: Grammar, toks: tuple[str, ...]) -> bool:
    nullable = nullables(grammar)
    memo: dict[tuple[str, int, int], bool] = {}

    def derives(a: str, i: int, j: int) -> bool:
        key = (a, i, j)
        hit = memo.get(key)
        if hit is not None:
            return hit
        memo[key] = False  # cycles cannot succeed: every recursion consumes input
        result = False
        if i == j:
            result = a in nullable
        else:
            for p in grammar.productions_of(a):
                r = p.rhs
                if isinstance(r, Unit):
                    if toks[i] == r.terminal and derives(r.target, i + 1, j):
                        result = True
                        break
                elif isinstance(r, Branch):
                    if toks[i] != r.opener:
                        continue
                    if any(toks[m] == r.closer and derives(r.inner, i + 1, m)
                           and derives(r.continuation, m + 1, j)
                           for m in range(i + 1, j)):
                        result = True
                        break
        memo[key] = result
        return result

    return derives(grammar.start, 0, len(toks))


def _member_gnf(grammar: Grammar, toks: tuple[str, ...]) -> bool:
    memo: dict[tuple[str, int, int], bool] = {}
    seq_memo: dict[tuple[tuple[str, ...], int, int], bool] = {}

    def derives(a: str, i: int, j: int) -> bool:
        # Greibach productions always emit a terminal, so nothing derives
        # the empty span.
        if j <= i:
            return False
        key = (a, i, j)
        hit = memo.get(key)
        if hit is not None:
            return hit
        memo[key] = False
        result = any(toks[i] == p.rhs.terminal and derives_body(p.rhs.body, i + 1, j)
                     for p in grammar.productions_of(a)
                     if isinstance(p.rhs, Gnf))
        memo[key] = result
        return result

    def derives_body(body: tuple[str, ...], i: int, j: int) -> bool:
        if not body:
            return i == j
        key = (body, i, j)
        hit = seq_memo.get(key)
        if hit is not None:
            return hit
        seq_memo[key] = False
        rest = len(body) - 1
        result = any(derives(body[0], i, m) and derives_body(body[1:], m, j)
                     for m in range(i + 1, j - rest + 1))
        seq_memo[key] = result
        return result

    return derives(grammar.start, 0, len(toks))


def parse(grammar: Grammar, tokens: Sequence[str]) -> Tree | None:
    """A witness parse tree when the input is in the language, otherwise
    ``None``.  Deterministic: first production in declaration order, leftmost
    split."""
    toks = tuple(tokens)
    if grammar.kind == GNF:
        return _parse_gnf(grammar, toks)
    return _parse_lid(grammar, toks)


def _parse_lid(grammar: Grammar, toks: tuple[str, ...]) -> Tree | None:
    nullable = nullables(grammar)
    memo: dict[tuple[str, int, int], Tree | None] = {}

    def derive(a: str, i: int, j: int) -> Tree | None:
        key = (a, i, j)
        if key in memo:
            return memo[key]
        memo[key] = None
        result: Tree | None = None
        if i == j:
            if a in nullable:
                result = Tree(a)
        else:
            for p in grammar.productions_of(a):
                r = p.rhs
                if isinstance(r, Unit) and toks[i] == r.terminal:
                    sub = derive(r.target, i + 1, j)
                    if sub is not None:
                        result = Tree(a, (leaf(toks[i]), sub))
                        break
                elif isinstance(r, Branch) and toks[i] == r.opener:
                    for m in range(i + 1, j):
                        if toks[m] != r.closer:
                            continue
                        inner = derive(r.inner, i + 1, m)
                        if inner is None:
                            continue
                        cont = derive(r.continuation, m + 1, j)
                        if cont is not None:
                            result = Tree(a, (leaf(toks[i]), inner, leaf(toks[m]), cont))
                            break
                    if result is not None:
                        break
        memo[key] = result
        return result

    return derive(grammar.start, 0, len(toks))


def _parse_gnf(grammar: Grammar, toks: tuple[str, ...]) -> Tree | None:
    memo: dict[tuple[str, int, int], Tree | None] = {}

    def derive(a: str, i: int, j: int) -> Tree | None:
        if j <= i:
            return None
        key = (a, i, j)
        if key in memo:
            return memo[key]
        memo[key] = None
        result: Tree | None = None
        for p in grammar.productions_of(a):
            r = p.rhs
            if not isinstance(r, Gnf) or toks[i] != r.terminal:
                continue
            subs = derive_body(r.body, i + 1, j)
            if subs is not None:
                result = Tree(a, (leaf(toks[i]),) + subs)
                break
        memo[key] = result
        return result

    def derive_body(body: tuple[str, ...], i: int, j: int) -> tuple[Tree, ...] | None:
        if not body:
            return () if i == j else None
        rest = len(body) - 1
        for m in range(i + 1, j - rest + 1):
            head = derive(body[0], i, m)
            if head is None:
                continue
            tail = derive_body(body[1:], m, j)
            if tail is not None:
                return (head,) + tail
        return None

    return derive(grammar.start, 0, len(toks))


def all_strings(alphabet: Sequence[str], maxlen: int) -> Iterator[tuple[str, ...]]:
    for length in range(maxlen + 1):
        yield from product(tuple(alphabet), repeat=length)


def enumerate_language(grammar: Grammar, maxlen: int,
                       cap: int = DEFAULT_ENUMERATION_CAP) -> set[tuple[str, ...]]:
    """All member strings of length at most ``maxlen``, by exhaustive sweep
    over the terminal alphabet filtered through :func:`member`."""
    if maxlen < 0:
        raise ValueError("maxlen must be non-negative")
    size = len(grammar.terminals)
    total = 1 if size == 0 else sum(size ** length for length in range(maxlen + 1))
    if total > cap:
        raise ValueError(f"enumeration cap exceeded: {total} strings > cap {cap}")
    return {w for w in all_strings(grammar.terminals, maxlen) if member(grammar, w)}
