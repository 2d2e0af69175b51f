"""Grammar data model, text format, and the basic structural analyses.

Two restricted grammar kinds are supported:

``lid``
    Every production is one of ``A -> t B``, ``A -> u B v C``, or
    ``A -> eps`` (an input-driven-style shape without the requirement that
    the alphabet splits into neutral/opening/closing terminals).

``gnf``
    Greibach normal form: every production is ``A -> b B1 ... Bk`` with
    ``b`` a terminal and ``k >= 0``.

File format (UTF-8, line oriented, ``#`` starts a comment)::

    kind: lid | gnf
    start: <nonterminal>
    terminals: <tok> <tok> ...
    <A> -> <tok> <tok> ...
    <A> -> eps          # epsilon production, lid grammars only

Symbols are whitespace-separated tokens.  Nonterminals are inferred from
production left-hand sides; every other token on a right-hand side must be
declared in the ``terminals`` line.  ``eps`` is reserved.  Nonterminal names
may not contain ``(``, ``)``, or ``"`` (they appear bare in rendered parse
trees).
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

LID = "lid"
GNF = "gnf"
EPSILON_TOKEN = "eps"

_FORBIDDEN_IN_NONTERMINALS = set('()"')


class GrammarError(ValueError):
    """Base class for grammar construction and analysis errors."""


class GrammarSyntaxError(GrammarError):
    """Malformed grammar text; carries the offending line (and column)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class KindError(GrammarError):
    """An operation was applied to a grammar of the wrong kind."""


class DuplicateProductionWarning(UserWarning):
    """A textually duplicated production was collapsed during parsing."""


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str  # "terminal" | "nonterminal"


@dataclass(frozen=True)
class Unit:
    """Right-hand side ``t B``: emit one terminal, continue in B."""

    terminal: str
    target: str


@dataclass(frozen=True)
class Branch:
    """Right-hand side ``u B v C``: a bracketing construct.

    ``opener`` starts the nested part derived from ``inner``; ``closer``
    terminates it and derivation continues with ``continuation``.
    """

    opener: str
    inner: str
    closer: str
    continuation: str


@dataclass(frozen=True)
class Epsilon:
    """Empty right-hand side."""


@dataclass(frozen=True)
class Gnf:
    """Right-hand side ``b B1 ... Bk`` of a Greibach normal form production."""

    terminal: str
    body: tuple[str, ...] = ()


Rhs = Union[Unit, Branch, Epsilon, Gnf]


@dataclass(frozen=True)
class Production:
    lhs: str
    rhs: Rhs

    def rhs_nonterminals(self) -> tuple[str, ...]:
        r = self.rhs
        if isinstance(r, Unit):
            return (r.target,)
        if isinstance(r, Branch):
            return (r.inner, r.continuation)
        if isinstance(r, Gnf):
            return r.body
        return ()

    def last_nonterminal(self) -> str | None:
        """The nonterminal ending this right-hand side, if any."""
        r = self.rhs
        if isinstance(r, Unit):
            return r.target
        if isinstance(r, Branch):
            return r.continuation
        if isinstance(r, Gnf) and r.body:
            return r.body[-1]
        return None

    def render(self) -> str:
        r = self.rhs
        if isinstance(r, Unit):
            body = f"{r.terminal} {r.target}"
        elif isinstance(r, Branch):
            body = f"{r.opener} {r.inner} {r.closer} {r.continuation}"
        elif isinstance(r, Epsilon):
            body = EPSILON_TOKEN
        else:
            body = " ".join((r.terminal,) + r.body)
        return f"{self.lhs} -> {body}"


@dataclass(frozen=True)
class Grammar:
    """An immutable grammar.  All derived views are cached; treat instances
    as values and build modified copies with :func:`dataclasses.replace`."""

    kind: str
    start: str
    terminals: tuple[str, ...]
    productions: tuple[Production, ...]

    @cached_property
    def nonterminals(self) -> tuple[str, ...]:
        """Left-hand sides in order of first appearance."""
        return tuple(dict.fromkeys(p.lhs for p in self.productions))

    @cached_property
    def nonterminal_set(self) -> frozenset[str]:
        return frozenset(self.nonterminals)

    @cached_property
    def terminal_set(self) -> frozenset[str]:
        return frozenset(self.terminals)

    @cached_property
    def by_lhs(self) -> dict[str, tuple[tuple[int, Production], ...]]:
        grouped: dict[str, list[tuple[int, Production]]] = {}
        for i, p in enumerate(self.productions):
            grouped.setdefault(p.lhs, []).append((i, p))
        return {a: tuple(ps) for a, ps in grouped.items()}

    def productions_of(self, nonterminal: str) -> tuple[Production, ...]:
        return tuple(p for _, p in self.by_lhs.get(nonterminal, ()))

    @cached_property
    def symbols(self) -> frozenset[Symbol]:
        terms = {Symbol(t, "terminal") for t in self.terminals}
        nts = {Symbol(a, "nonterminal") for a in self.nonterminals}
        return frozenset(terms | nts)


@dataclass(frozen=True)
class Diagnostic:
    code: str  # "form" | "symbol" | "start" | "namespace" | "duplicate"
    message: str
    production: int | None = None

    def render(self) -> str:
        where = f"production {self.production}: " if self.production is not None else ""
        return f"{self.code}: {where}{self.message}"


def nullables(grammar: Grammar) -> frozenset[str]:
    """Nonterminals possessing an epsilon production.

    The two single-terminal-emitting production shapes of a ``lid`` grammar
    can never erase to the empty string, so direct possession of ``A -> eps``
    and derivability of the empty string coincide.
    """
    if grammar.kind != LID:
        raise KindError("nullables is defined for lid grammars only")
    return frozenset(p.lhs for p in grammar.productions if isinstance(p.rhs, Epsilon))


def last_sets(grammar: Grammar) -> dict[str, frozenset[str]]:
    """For every nonterminal A, the set of nonterminals that can end a
    sentential form derived from A (A itself included).

    Computed as the reflexive-transitive closure of the last-symbol successor
    relation: ``A -> t B`` contributes B, ``A -> u B v C`` contributes C, and
    ``A -> b B1 ... Bk`` (k >= 1) contributes Bk.
    """
    succ: dict[str, set[str]] = {a: set() for a in grammar.nonterminals}
    for p in grammar.productions:
        last = p.last_nonterminal()
        if last is not None:
            succ.setdefault(p.lhs, set()).add(last)
    closed: dict[str, frozenset[str]] = {}
    for a in grammar.nonterminals:
        seen = {a}
        work = [a]
        while work:
            b = work.pop()
            for c in succ.get(b, ()):
                if c not in seen:
                    seen.add(c)
                    work.append(c)
        closed[a] = frozenset(seen)
    return closed


def last_set(grammar: Grammar, nonterminal: str) -> frozenset[str]:
    if nonterminal not in grammar.nonterminal_set:
        raise GrammarError(f"unknown nonterminal {nonterminal!r}")
    return last_sets(grammar)[nonterminal]


def _rhs_matches_kind(kind: str, rhs: Rhs) -> bool:
    if kind == GNF:
        return isinstance(rhs, Gnf)
    return isinstance(rhs, (Unit, Branch, Epsilon))


def validate(grammar: Grammar) -> list[Diagnostic]:
    """Structural diagnostics: production-form/kind mismatches, undeclared
    symbols, a missing start nonterminal, namespace clashes, and duplicates.
    An empty list means the grammar is well formed."""
    diags: list[Diagnostic] = []
    terms = grammar.terminal_set
    nts = grammar.nonterminal_set

    for name in sorted(terms & nts):
        diags.append(Diagnostic("namespace", f"{name!r} is declared both terminal and nonterminal"))

    seen: dict[Production, int] = {}
    for i, p in enumerate(grammar.productions):
        if not _rhs_matches_kind(grammar.kind, p.rhs):
            diags.append(Diagnostic("form", f"{p.render()!r} is not a valid {grammar.kind} production", i))
            continue
        r = p.rhs
        rhs_terms: tuple[str, ...]
        if isinstance(r, Unit):
            rhs_terms = (r.terminal,)
        elif isinstance(r, Branch):
            rhs_terms = (r.opener, r.closer)
        elif isinstance(r, Gnf):
            rhs_terms = (r.terminal,)
        else:
            rhs_terms = ()
        for t in rhs_terms:
            if t not in terms:
                diags.append(Diagnostic("symbol", f"undeclared terminal {t!r}", i))
        for n in p.rhs_nonterminals():
            if n not in nts:
                diags.append(Diagnostic("symbol", f"undeclared nonterminal {n!r}", i))
        if p in seen:
            diags.append(Diagnostic("duplicate", f"duplicate of production {seen[p]}", i))
        else:
            seen[p] = i

    if grammar.start not in nts:
        diags.append(Diagnostic("start", f"start nonterminal {grammar.start!r} has no productions"))
    return diags


_TOKEN_RE = re.compile(r"\S+")


def _tokens_with_columns(line: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start() + 1) for m in _TOKEN_RE.finditer(line)]


def _classify_lid(lhs: str, toks: Sequence[tuple[str, int]], terms: frozenset[str],
                  nts: frozenset[str], lineno: int) -> Rhs:
    names = [t for t, _ in toks]
    if names == [EPSILON_TOKEN]:
        return Epsilon()
    for name, col in toks:
        if name not in terms and name not in nts:
            raise GrammarSyntaxError(f"undeclared symbol {name!r}", lineno, col)
    kinds = ["t" if n in terms else "N" for n in names]
    if kinds == ["t", "N"]:
        return Unit(names[0], names[1])
    if kinds == ["t", "N", "t", "N"]:
        return Branch(names[0], names[1], names[2], names[3])
    raise GrammarSyntaxError(
        f"{lhs} -> {' '.join(names)} matches no lid production form "
        "(expected 't B', 'u B v C', or 'eps')", lineno)


def _classify_gnf(lhs: str, toks: Sequence[tuple[str, int]], terms: frozenset[str],
                  nts: frozenset[str], lineno: int) -> Rhs:
    names = [t for t, _ in toks]
    if names == [EPSILON_TOKEN]:
        raise GrammarSyntaxError(f"{lhs} -> eps: gnf productions must start with a terminal", lineno)
    for name, col in toks:
        if name not in terms and name not in nts:
            raise GrammarSyntaxError(f"undeclared symbol {name!r}", lineno, col)
    head, col0 = toks[0]
    if head not in terms:
        raise GrammarSyntaxError(f"gnf production must start with a terminal, got {head!r}", lineno, col0)
    for name, col in toks[1:]:
        if name not in nts:
            raise GrammarSyntaxError(f"gnf production body must be nonterminals, got {name!r}", lineno, col)
    return Gnf(head, tuple(names[1:]))


def parse_grammar(text: str) -> Grammar:
    """Parse grammar text into a :class:`Grammar`.

    Raises :class:`GrammarSyntaxError` on malformed input.  Duplicate
    productions are collapsed and reported via
    :class:`DuplicateProductionWarning`.
    """
    headers: dict[str, tuple[str, int]] = {}
    raw_productions: list[tuple[int, list[tuple[str, int]]]] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        toks = _tokens_with_columns(line)
        if any(t == "->" for t, _ in toks):
            raw_productions.append((lineno, toks))
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in ("kind", "start", "terminals"):
            raise GrammarSyntaxError("expected 'kind:', 'start:', 'terminals:', or a production", lineno)
        if key in headers:
            raise GrammarSyntaxError(f"duplicate {key!r} line", lineno)
        headers[key] = (value.strip(), lineno)

    if "kind" not in headers:
        raise GrammarSyntaxError("missing 'kind:' declaration")
    kind, kind_line = headers["kind"]
    if kind not in (LID, GNF):
        raise GrammarSyntaxError(f"kind must be 'lid' or 'gnf', got {kind!r}", kind_line)
    if "start" not in headers:
        raise GrammarSyntaxError("missing 'start:' declaration")
    start, start_line = headers["start"]
    if not start or len(start.split()) != 1:
        raise GrammarSyntaxError("start must be a single nonterminal", start_line)
    if "terminals" not in headers:
        raise GrammarSyntaxError("missing 'terminals:' declaration")
    terminals_value, terminals_line = headers["terminals"]
    terminals = tuple(terminals_value.split())
    if len(set(terminals)) != len(terminals):
        raise GrammarSyntaxError("duplicate terminal declaration", terminals_line)
    if EPSILON_TOKEN in terminals:
        raise GrammarSyntaxError(f"{EPSILON_TOKEN!r} is reserved and cannot be a terminal", terminals_line)
    term_set = frozenset(terminals)

    lhs_list: list[tuple[str, int, int]] = []
    for lineno, toks in raw_productions:
        if len(toks) < 3 or toks[1][0] != "->":
            raise GrammarSyntaxError("expected '<nonterminal> -> <symbols>'", lineno)
        lhs, col = toks[0]
        if lhs == EPSILON_TOKEN:
            raise GrammarSyntaxError(f"{EPSILON_TOKEN!r} is reserved and cannot be a nonterminal", lineno, col)
        if set(lhs) & _FORBIDDEN_IN_NONTERMINALS:
            raise GrammarSyntaxError(f"nonterminal name {lhs!r} contains a forbidden character", lineno, col)
        if lhs in term_set:
            raise GrammarSyntaxError(f"{lhs!r} is declared as a terminal", lineno, col)
        lhs_list.append((lhs, lineno, col))
    nt_set = frozenset(lhs for lhs, _, _ in lhs_list)

    productions: list[Production] = []
    seen: dict[Production, int] = {}
    classify = _classify_gnf if kind == GNF else _classify_lid
    for (lhs, lineno, _), (_, toks) in zip(lhs_list, raw_productions):
        rhs = classify(lhs, toks[2:], term_set, nt_set, lineno)
        prod = Production(lhs, rhs)
        if prod in seen:
            warnings.warn(
                f"line {lineno}: duplicate production {prod.render()!r} collapsed "
                f"(first declared on line {seen[prod]})",
                DuplicateProductionWarning, stacklevel=2)
            continue
        seen[prod] = lineno
        productions.append(prod)

    if start not in nt_set:
        raise GrammarSyntaxError(f"start nonterminal {start!r} has no productions", start_line)
    return Grammar(kind=kind, start=start, terminals=terminals, productions=tuple(productions))


def serialize_grammar(grammar: Grammar, comments: Iterable[str] = ()) -> str:
    """Canonical text for a grammar.  ``parse_grammar`` of the result equals
    the input grammar; comments (one line each) are informational only."""
    lines = [f"kind: {grammar.kind}", f"start: {grammar.start}"]
    lines.append("terminals: " + " ".join(grammar.terminals) if grammar.terminals else "terminals:")
    for comment in comments:
        lines.append(f"# {comment}")
    lines.extend(p.render() for p in grammar.productions)
    return "\n".join(lines) + "\n"
