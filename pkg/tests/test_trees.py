"""Tree reconstruction disciplines, validation, and text round-trips."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocapprox import oracle
from ocapprox.analysis import exactness_condition
from ocapprox.automaton import DEC, build_gnf_oca, build_lid_oca
from ocapprox.runtime import AcceptanceSequence, extract_sequence, replay, run_oca
from ocapprox.trees import (MalformedSequenceError, Tree, frontier, leaf, parse_tree,
                            pretty_tree, reconstruct_generic, reconstruct_gnf,
                            reconstruct_lid, render_tree, validate_tree)

from conftest import random_lid_grammar

PAPER_TREE = '(E "a" (P "*" (T "d") (L "+") (E "(" (E "b" (P "+" (E "c"))) (R ")"))))'


def toks(s: str) -> tuple[str, ...]:
    return tuple(s)


def sequence_for(automaton, word):
    seq = extract_sequence(run_oca(automaton, word), automaton)
    assert seq is not None
    return seq


class TestReconstructLid:
    def test_aabb(self, anbn):
        a = build_lid_oca(anbn)
        tree = reconstruct_lid(sequence_for(a, toks("aabb")), a)
        assert render_tree(tree) == '(S "a" (S "a" (S) "b" (T)) "b" (T))'
        assert validate_tree(anbn, tree, toks("aabb"))

    def test_empty_sequence_is_bare_start(self, anbn):
        a = build_lid_oca(anbn)
        tree = reconstruct_lid(AcceptanceSequence(()), a)
        assert tree == Tree("S")

    def test_overapproximated_tree_fails_validation(self, two_word):
        a = build_lid_oca(two_word)
        tree = reconstruct_lid(sequence_for(a, toks("ad")), a)
        assert render_tree(tree) == '(S "a" (A) "d" (Y))'
        assert not validate_tree(two_word, tree, toks("ad"))

    def test_malformed_sequence_rejected(self, anbn):
        a = build_lid_oca(anbn)
        with pytest.raises(MalformedSequenceError):
            reconstruct_lid(AcceptanceSequence((0,)), a)  # unclosed construct
        with pytest.raises(MalformedSequenceError):
            reconstruct_lid(AcceptanceSequence((2,)), a)  # close without open

    def test_frontier_matches_input(self, anbn):
        a = build_lid_oca(anbn)
        for word in [(), toks("ab"), toks("aabb"), toks("aaabbb")]:
            tree = reconstruct_lid(sequence_for(a, word), a)
            assert frontier(tree) == word


class TestReconstructGnf:
    def test_paper_tree_with_aliases(self, arith_gnf):
        a = build_gnf_oca(arith_gnf)
        surface = toks("a*d+(b+c)")
        alias = {"a": "i", "b": "i", "c": "i", "d": "i"}
        word = tuple(alias.get(t, t) for t in surface)
        tree = reconstruct_gnf(sequence_for(a, word), a, tokens=surface)
        assert render_tree(tree) == PAPER_TREE

    def test_single_terminal(self):
        from ocapprox.grammar import parse_grammar
        g = parse_grammar("kind: gnf\nstart: S\nterminals: a\nS -> a\n")
        a = build_gnf_oca(g)
        tree = reconstruct_gnf(sequence_for(a, toks("a")), a)
        assert render_tree(tree) == '(S "a")'

    def test_i_plus_i(self, arith_gnf):
        a = build_gnf_oca(arith_gnf)
        tree = reconstruct_gnf(sequence_for(a, toks("i+i")), a)
        assert render_tree(tree) == '(E "i" (P "+" (E "i")))'
        assert validate_tree(arith_gnf, tree, toks("i+i"))

    def test_matches_oracle_tree_on_language_members(self, arith_gnf):
        a = build_gnf_oca(arith_gnf)
        for word in sorted(oracle.enumerate_language(arith_gnf, 5)):
            tree = reconstruct_gnf(sequence_for(a, word), a)
            assert frontier(tree) == word
            assert validate_tree(arith_gnf, tree, word)

    def test_empty_sequence_rejected(self, arith_gnf):
        a = build_gnf_oca(arith_gnf)
        with pytest.raises(MalformedSequenceError):
            reconstruct_gnf(AcceptanceSequence(()), a)


class TestReconstructGeneric:
    def test_ab_shape(self, anbn):
        a = build_lid_oca(anbn)
        tree = reconstruct_generic(sequence_for(a, toks("ab")), a)
        # Opened construct S with leaf a, closed by the decrement's source
        # state and terminal as leaves.
        assert render_tree(tree) == '(S "a" (S) "b")'

    def test_empty_sequence(self, anbn):
        a = build_lid_oca(anbn)
        assert reconstruct_generic(AcceptanceSequence(()), a) == Tree("S")

    def test_state_multiset_matches_lid_tree(self, anbn):
        # The generic tree records transition source states, so it carries
        # every state of the lid tree except the final transition's target.
        a = build_lid_oca(anbn)
        for word in [toks("ab"), toks("aabb"), toks("aaabbb"), toks("aaaabbbb")]:
            seq = sequence_for(a, word)
            generic = reconstruct_generic(seq, a)
            lid = reconstruct_lid(seq, a)
            final_target = a.transitions[seq.transition_ids[-1]].dst

            def labels(t: Tree) -> list[str]:
                out = [] if t.terminal else [t.label]
                for c in t.children:
                    out.extend(labels(c))
                return out

            lid_labels = sorted(labels(lid))
            lid_labels.remove(final_target)
            assert sorted(labels(generic)) == lid_labels

    def test_frontier_matches_input(self, arith_gnf):
        a = build_gnf_oca(arith_gnf)
        for word in sorted(oracle.enumerate_language(arith_gnf, 4)):
            tree = reconstruct_generic(sequence_for(a, word), a)
            assert frontier(tree) == word

    def test_stack_depth_equals_counter(self, arith_gnf):
        # Constructs open on increments and close on decrements, so the
        # number of open constructs equals the replayed counter.
        a = build_gnf_oca(arith_gnf)
        word = toks("i*i+(i+i)")
        seq = sequence_for(a, word)
        profile = replay(a, seq, tokens=word)
        depth = 0
        for ident, counter in zip(seq, profile):
            t = a.transitions[ident]
            depth += t.action
            assert depth == counter


class TestValidateTree:
    def test_paper_tree_valid(self, arith_gnf):
        word = toks("i*i+(i+i)")
        tree = oracle.parse(arith_gnf, word)
        assert validate_tree(arith_gnf, tree, word)

    def test_single_node_epsilon(self, anbn):
        assert validate_tree(anbn, Tree("S"), ())

    def test_wrong_root(self, anbn):
        assert not validate_tree(anbn, Tree("T"), ())

    def test_wrong_frontier(self, anbn):
        tree = oracle.parse(anbn, toks("ab"))
        assert not validate_tree(anbn, tree, toks("aabb"))

    def test_childless_node_without_epsilon_production(self, arith_gnf):
        assert not validate_tree(arith_gnf, Tree("E"), ())


class TestTreeText:
    def test_render_examples(self):
        assert render_tree(Tree("S", (leaf("a"),))) == '(S "a")'
        assert render_tree(Tree("S")) == "(S)"

    def test_escaping(self):
        t = Tree("S", (leaf('quo"te'), leaf("back\\slash")))
        assert parse_tree(render_tree(t)) == t

    def test_parse_paper_tree(self):
        tree = parse_tree(PAPER_TREE)
        assert tree.label == "E"
        assert frontier(tree) == toks("a*d+(b+c)")
        assert render_tree(tree) == PAPER_TREE

    def test_pretty_contains_all_labels(self, anbn):
        a = build_lid_oca(anbn)
        tree = reconstruct_lid(sequence_for(a, toks("ab")), a)
        text = pretty_tree(tree)
        for token in ('"a"', '"b"', "S", "T"):
            assert token in text

    @pytest.mark.parametrize("text", ["", "(", "(S", ")", '(S "a" ))', '("a")', "(S) x"])
    def test_malformed_text_rejected(self, text):
        with pytest.raises(ValueError):
            parse_tree(text)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10 ** 9))
    def test_round_trip_random_trees(self, seed):
        rng = random.Random(seed)

        def rand_tree(depth: int) -> Tree:
            if depth == 0 or rng.random() < 0.3:
                if rng.random() < 0.5:
                    return leaf(rng.choice(["a", "b", "(", '"', "\\", "tok en"]))
                return Tree(rng.choice(["S", "A", "B$1"]))
            kids = tuple(rand_tree(depth - 1) for _ in range(rng.randint(1, 3)))
            return Tree(rng.choice(["S", "A", "B"]), kids)

        tree = rand_tree(4)
        assert parse_tree(render_tree(tree)) == tree


class TestTreeTheorem:
    def test_exactness_passing_fixtures(self, anbn, shared_closer, nested_disjoint):
        # For grammars passing the exactness condition, every reconstructed
        # tree for an accepted input is a genuine parse tree.
        for g in (anbn, shared_closer, nested_disjoint):
            assert exactness_condition(g).holds
            a = build_lid_oca(g)
            accepted = [w for w in oracle.all_strings(g.terminals, 7)
                        if run_oca(a, w).accepted]
            assert accepted
            for word in accepted:
                tree = reconstruct_lid(sequence_for(a, word), a)
                assert validate_tree(g, tree, word)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_random_exactness_passing(self, seed):
        g = random_lid_grammar(seed, max_terminals=2)
        if not exactness_condition(g).holds:
            return
        a = build_lid_oca(g)
        for word in oracle.all_strings(g.terminals, 6):
            table = run_oca(a, word)
            if not table.accepted:
                continue
            tree = reconstruct_lid(extract_sequence(table, a), a)
            assert validate_tree(g, tree, word)
