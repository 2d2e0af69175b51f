"""Automaton construction rules, invariants, and serialization."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocapprox.automaton import (COND_PLUS, COND_ZERO, DEC, FINITE, INC, KEEP, ONE_COUNTER,
                                Automaton, AutomatonError, AutomatonSyntaxError, Origin,
                                ROLE_BRANCH_CLOSE, ROLE_BRANCH_OPEN, ROLE_GNF_CLOSE,
                                ROLE_GNF_FINAL, ROLE_GNF_OPEN, ROLE_GNF_SIBLING, ROLE_UNIT,
                                Transition, build_gnf_oca, build_lid_oca, parse_automaton,
                                serialize_automaton, strip_to_nfa)
from ocapprox.grammar import Branch, Epsilon, KindError, Unit, last_sets, nullables, parse_grammar

from conftest import random_gnf_grammar, random_lid_grammar

# The expected arithmetic-grammar transition set, one behavioural tuple per
# line, with the counter-condition shorthand expanded to both conditions.
ARITH_EXPECTED = """\
E i 0 -> P 0
E i + -> P 0
E i + -> R 0 marked
E i + -> R -1
E i 0 -> Z 0
E ( 0 -> E +1
E ( + -> E +1
T i + -> R -1
T i + -> R 0 marked
T i + -> L 0 marked
T i 0 -> Q 0
T i + -> Q 0
T i 0 -> Z 0
T ( 0 -> E +1
T ( + -> E +1
R ) + -> R -1
R ) + -> R 0 marked
R ) + -> P -1
R ) + -> Q -1
R ) + -> L 0 marked
R ) 0 -> Z 0
P + 0 -> E 0
P + + -> E 0
P * 0 -> T 0
P * + -> T 0
P * 0 -> T +1
P * + -> T +1
Q * 0 -> T 0
Q * + -> T 0
L + + -> E -1
"""

GOLDEN_ANBN_OCA = """\
kind: oca
states: S T
start: S
finals: S T
S a 0 -> S +1  # origin p0:branch-open
S a + -> S +1  # origin p0:branch-open
S b + -> T -1  # origin p0:branch-close
T b + -> T -1  # origin p0:branch-close
"""

_ACTION = {"+1": INC, "-1": DEC, "0": KEEP}


def expected_tuples(block: str) -> set[tuple]:
    out = set()
    for line in block.strip().splitlines():
        toks = line.split()
        marked = toks[-1] == "marked"
        if marked:
            toks = toks[:-1]
        src, term, cond, _, dst, action = toks
        out.add((src, term, cond, dst, _ACTION[action], marked))
    return out


def built_tuples(automaton: Automaton) -> set[tuple]:
    return {t.key() + (t.marked,) for t in automaton.transitions}


class TestBuildLid:
    def test_anbn_exact_transition_set(self, anbn):
        a = build_lid_oca(anbn)
        assert built_tuples(a) == expected_tuples(
            "S a 0 -> S +1\nS a + -> S +1\nS b + -> T -1\nT b + -> T -1")
        assert a.finals == ("S", "T")
        assert a.start == "S"

    def test_epsilon_only_grammar(self):
        g = parse_grammar("kind: lid\nstart: S\nterminals:\nS -> eps\n")
        a = build_lid_oca(g)
        assert a.transitions == ()
        assert a.finals == ("S",)

    def test_two_word_transitions_and_finals(self, two_word):
        a = build_lid_oca(two_word)
        assert built_tuples(a) == expected_tuples(
            "S a 0 -> A +1\nS a + -> A +1\nS c 0 -> A +1\nS c + -> A +1\n"
            "A b + -> X -1\nA d + -> Y -1")
        # Final iff nullable and reachable in last position from the start:
        # S is not nullable, so only X and Y are final.
        assert a.finals == ("X", "Y")

    def test_no_marks(self, anbn, two_word):
        for g in (anbn, two_word):
            assert not any(t.marked for t in build_lid_oca(g).transitions)

    def test_wrong_kind(self, arith_gnf):
        with pytest.raises(KindError):
            build_lid_oca(arith_gnf)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_transition_count_formula(self, seed):
        g = random_lid_grammar(seed)
        a = build_lid_oca(g)
        last = last_sets(g)
        nullable = nullables(g)
        units = sum(isinstance(p.rhs, Unit) for p in g.productions)
        branches = sum(isinstance(p.rhs, Branch) for p in g.productions)
        closes = sum(len(last[p.rhs.inner] & nullable)
                     for p in g.productions if isinstance(p.rhs, Branch))
        assert len(a.transitions) == 2 * units + 2 * branches + closes

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_origins_regenerate_transitions(self, seed):
        g = random_lid_grammar(seed)
        a = build_lid_oca(g)
        last = last_sets(g)
        nullable = nullables(g)
        for t in a.transitions:
            p = g.productions[t.origin.production]
            if t.origin.role == ROLE_UNIT:
                assert p.rhs == Unit(t.terminal, t.dst) and t.src == p.lhs
            elif t.origin.role == ROLE_BRANCH_OPEN:
                assert isinstance(p.rhs, Branch) and (t.src, t.terminal, t.dst) == \
                    (p.lhs, p.rhs.opener, p.rhs.inner) and t.action == INC
            else:
                assert t.origin.role == ROLE_BRANCH_CLOSE
                assert isinstance(p.rhs, Branch)
                assert t.terminal == p.rhs.closer and t.dst == p.rhs.continuation
                assert t.src in last[p.rhs.inner] and t.src in nullable


class TestBuildGnf:
    def test_arith_exact_tuple_set(self, arith_gnf):
        a = build_gnf_oca(arith_gnf)
        assert built_tuples(a) == expected_tuples(ARITH_EXPECTED)

    def test_no_final_transition_for_unreachable_tail(self, arith_gnf):
        # L never ends a sentential form of E, so its terminal-only
        # production feeds no zero-counter transition into Z.
        a = build_gnf_oca(arith_gnf)
        assert not any(t.src == "L" and t.dst == "Z" for t in a.transitions)

    def test_duplicate_tuples_kept_distinct(self, arith_gnf):
        # E ( n -> E +1 arises from two different productions and stays two
        # transitions with distinct identifiers and origins.
        a = build_gnf_oca(arith_gnf)
        opens = [t for t in a.transitions
                 if t.key() == ("E", "(", COND_ZERO, "E", INC)]
        assert len(opens) == 2
        assert {t.origin.production for t in opens} == {2, 3}

    def test_all_sibling_transitions_marked_and_vice_versa(self, arith_gnf):
        a = build_gnf_oca(arith_gnf)
        for t in a.transitions:
            assert t.marked == (t.origin.role == ROLE_GNF_SIBLING)
            if t.marked:
                assert t.cond == COND_PLUS and t.action == KEEP

    def test_single_production_grammar(self):
        g = parse_grammar("kind: gnf\nstart: S\nterminals: a\nS -> a\n")
        a = build_gnf_oca(g)
        assert built_tuples(a) == expected_tuples("S a 0 -> Z 0")
        assert a.finals == ("Z",)

    def test_reserved_state_name_rejected(self):
        g = parse_grammar("kind: gnf\nstart: Z\nterminals: a\nZ -> a\n")
        with pytest.raises(AutomatonError, match="reserved"):
            build_gnf_oca(g)

    def test_wrong_kind(self, anbn):
        with pytest.raises(KindError):
            build_gnf_oca(anbn)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_roles_partition_and_marks_follow_rule(self, seed):
        g = random_gnf_grammar(seed)
        a = build_gnf_oca(g)
        for t in a.transitions:
            role = t.origin.role
            assert role in (ROLE_UNIT, ROLE_GNF_OPEN, ROLE_GNF_SIBLING,
                            ROLE_GNF_CLOSE, ROLE_GNF_FINAL)
            assert t.marked == (role == ROLE_GNF_SIBLING)
            if role == ROLE_GNF_FINAL:
                assert t.cond == COND_ZERO and t.dst == "Z" and t.action == KEEP


class TestZeroDecBan:
    def test_transition_constructor_rejects(self):
        with pytest.raises(AutomatonError):
            Transition(0, "S", "a", COND_ZERO, "T", DEC)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10 ** 6), st.booleans())
    def test_never_generated(self, seed, gnf):
        g = random_gnf_grammar(seed) if gnf else random_lid_grammar(seed)
        a = build_gnf_oca(g) if gnf else build_lid_oca(g)
        assert not any(t.cond == COND_ZERO and t.action == DEC for t in a.transitions)


class TestStripToNfa:
    def test_anbn_edges(self, anbn):
        nfa = strip_to_nfa(build_lid_oca(anbn))
        assert nfa.kind == FINITE
        edges = {(t.src, t.terminal, t.dst) for t in nfa.transitions}
        assert edges == {("S", "a", "S"), ("S", "b", "T"), ("T", "b", "T")}
        assert all(t.cond is None and t.action == KEEP and not t.marked
                   for t in nfa.transitions)

    def test_empty_automaton(self):
        g = parse_grammar("kind: lid\nstart: S\nterminals:\nS -> eps\n")
        assert strip_to_nfa(build_lid_oca(g)).transitions == ()

    def test_wrong_kind(self, anbn):
        nfa = strip_to_nfa(build_lid_oca(anbn))
        with pytest.raises(KindError):
            strip_to_nfa(nfa)


class TestSerialization:
    def test_golden_anbn(self, anbn):
        assert serialize_automaton(build_lid_oca(anbn)) == GOLDEN_ANBN_OCA

    def test_round_trip_fixture_automata(self, anbn, two_word, arith_gnf):
        for a in (build_lid_oca(anbn), build_lid_oca(two_word), build_gnf_oca(arith_gnf),
                  strip_to_nfa(build_gnf_oca(arith_gnf))):
            assert parse_automaton(serialize_automaton(a)) == a

    def test_round_trip_keeps_isolated_states(self):
        g = parse_grammar("kind: lid\nstart: S\nterminals: a\nS -> a S\nU -> a U\n")
        a = build_lid_oca(g)
        assert "U" in a.states
        assert parse_automaton(serialize_automaton(a)) == a

    def test_zero_dec_rejected_on_parse(self):
        text = "kind: oca\nstates: S\nstart: S\nfinals: S\nS a 0 -> S -1\n"
        with pytest.raises(AutomatonSyntaxError):
            parse_automaton(text)

    def test_states_line_optional(self):
        text = "kind: oca\nstart: S\nfinals: T\nS a 0 -> T 0\n"
        a = parse_automaton(text)
        assert set(a.states) == {"S", "T"}

    def test_syntax_errors(self):
        for text in ("start: S\nfinals: S\n", "kind: oca\nfinals:\n",
                     "kind: oca\nstart: S\nfinals: S\nS a -> T\n",
                     "kind: oca\nstart: S\nfinals: S\nS a ? -> T 0\n"):
            with pytest.raises(AutomatonSyntaxError):
                parse_automaton(text)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 6), st.booleans())
    def test_round_trip_random(self, seed, gnf):
        g = random_gnf_grammar(seed) if gnf else random_lid_grammar(seed)
        a = build_gnf_oca(g) if gnf else build_lid_oca(g)
        assert parse_automaton(serialize_automaton(a)) == a
        nfa = strip_to_nfa(a)
        assert parse_automaton(serialize_automaton(nfa)) == nfa
