"""Shared fixtures: the three anchor grammars, handmade condition fixtures,
and deterministic random-grammar families."""

from __future__ import annotations

import random

import pytest

from ocapprox.grammar import (GNF, LID, Branch, Epsilon, Gnf, Grammar, Production, Unit,
                              parse_grammar)

ARITH_GNF_TEXT = """\
kind: gnf
start: E
terminals: i + * ( )
E -> i
E -> i P
E -> ( E R
E -> ( E R P
P -> + E
P -> * T
P -> * T L E
T -> i
T -> i Q
T -> ( E R
T -> ( E R Q
Q -> * T
R -> )
L -> +
"""

ANBN_TEXT = """\
kind: lid
start: S
terminals: a b
S -> a S b T
S -> eps
T -> eps
"""

TWO_WORD_TEXT = """\
kind: lid
start: S
terminals: a b c d
S -> a A b X
S -> c A d Y
A -> eps
X -> eps
Y -> eps
"""

# Two bracketing productions that close differently over a shared, non-regular
# inner nonterminal: not normalizable.
NOT_NORMALIZABLE_TEXT = """\
kind: lid
start: S
terminals: a b c d
S -> a S b X
S -> c S d Y
X -> eps
Y -> eps
"""

# Shared nonterminal C reached through a chain; normalizable, and exercises
# the disjointness replication directly.
CHAIN_CONFLICT_TEXT = """\
kind: lid
start: S
terminals: a b c d t
S -> a A b X
S -> c C d Y
A -> t C
C -> eps
X -> eps
Y -> eps
"""

# Exactness-passing grammars with real bracketing, for the tree theorem.
SHARED_CLOSER_TEXT = """\
kind: lid
start: S
terminals: a b c
S -> a S b T
S -> c S b T
S -> eps
T -> eps
"""

NESTED_DISJOINT_TEXT = """\
kind: lid
start: S
terminals: a b c d
S -> a A b B
A -> c C d D
A -> eps
B -> eps
C -> eps
D -> eps
"""


@pytest.fixture(scope="session")
def arith_gnf() -> Grammar:
    return parse_grammar(ARITH_GNF_TEXT)


@pytest.fixture(scope="session")
def anbn() -> Grammar:
    return parse_grammar(ANBN_TEXT)


@pytest.fixture(scope="session")
def two_word() -> Grammar:
    return parse_grammar(TWO_WORD_TEXT)


@pytest.fixture(scope="session")
def not_normalizable() -> Grammar:
    return parse_grammar(NOT_NORMALIZABLE_TEXT)


@pytest.fixture(scope="session")
def chain_conflict() -> Grammar:
    return parse_grammar(CHAIN_CONFLICT_TEXT)


@pytest.fixture(scope="session")
def shared_closer() -> Grammar:
    return parse_grammar(SHARED_CLOSER_TEXT)


@pytest.fixture(scope="session")
def nested_disjoint() -> Grammar:
    return parse_grammar(NESTED_DISJOINT_TEXT)


_NT_POOL = ("S", "A", "B", "C", "D")
_TERM_POOL = ("a", "b", "c")


def random_lid_grammar(seed: int, max_nonterminals: int = 5, max_productions: int = 8,
                       max_terminals: int = 3) -> Grammar:
    rng = random.Random(seed)
    nts = _NT_POOL[: rng.randint(1, max_nonterminals)]
    terms = _TERM_POOL[: rng.randint(1, max_terminals)]

    def rand_rhs():
        roll = rng.random()
        if roll < 0.30:
            return Epsilon()
        if roll < 0.70:
            return Unit(rng.choice(terms), rng.choice(nts))
        return Branch(rng.choice(terms), rng.choice(nts), rng.choice(terms), rng.choice(nts))

    productions = [Production(a, rand_rhs()) for a in nts]
    for _ in range(rng.randint(0, max(0, max_productions - len(nts)))):
        productions.append(Production(rng.choice(nts), rand_rhs()))
    productions = list(dict.fromkeys(productions))
    return Grammar(LID, "S", tuple(terms), tuple(productions))


def random_gnf_grammar(seed: int, max_nonterminals: int = 4, max_productions: int = 8,
                       max_terminals: int = 3) -> Grammar:
    rng = random.Random(seed)
    nts = _NT_POOL[: rng.randint(1, max_nonterminals)]
    terms = _TERM_POOL[: rng.randint(1, max_terminals)]

    def rand_rhs():
        k = rng.choice((0, 0, 0, 1, 1, 2, 2, 3))
        return Gnf(rng.choice(terms), tuple(rng.choice(nts) for _ in range(k)))

    productions = [Production(a, rand_rhs()) for a in nts]
    for _ in range(rng.randint(0, max(0, max_productions - len(nts)))):
        productions.append(Production(rng.choice(nts), rand_rhs()))
    productions = list(dict.fromkeys(productions))
    return Grammar(GNF, "S", tuple(terms), tuple(productions))


@pytest.fixture(scope="session")
def random_lid_family() -> list[Grammar]:
    """120 small lid grammars over up to three terminals."""
    return [random_lid_grammar(seed) for seed in range(120)]


@pytest.fixture(scope="session")
def random_lid_family_2t() -> list[Grammar]:
    """100 small lid grammars over at most two terminals; cheap enough for
    length-10 sweeps."""
    return [random_lid_grammar(10_000 + seed, max_terminals=2) for seed in range(100)]


@pytest.fixture(scope="session")
def random_gnf_family() -> list[Grammar]:
    return [random_gnf_grammar(20_000 + seed) for seed in range(60)]
