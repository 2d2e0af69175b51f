"""Approximation of context-free languages by one-counter automata.

Restricted context-free grammars (input-driven-style ``lid`` productions or
Greibach normal form) are compiled into nondeterministic one-counter
automata whose language is a superset of the grammar's.  Acceptance
transition sequences map back to parse trees of the source grammar in linear
time; decidable conditions identify grammars for which the approximation is
exact, and replication transformations rewrite suitable grammars into exact
ones.  A brute-force oracle provides ground truth for all of it.
"""

from .analysis import (AmbiguityError, ConditionReport, PreconditionError, Witness,
                       closing_pair, exactness_condition, normalizability_condition,
                       regular_nonterminals_gnf, regular_nonterminals_lid)
from .automaton import (Automaton, AutomatonError, Origin, Transition, build_gnf_oca,
                        build_lid_oca, parse_automaton, serialize_automaton, strip_to_nfa)
from .grammar import (GNF, LID, Branch, Diagnostic, Epsilon, Gnf, Grammar, GrammarError,
                      GrammarSyntaxError, KindError, Production, Symbol, Unit, last_set,
                      last_sets, nullables, parse_grammar, serialize_grammar, validate)
from .runtime import (AcceptanceSequence, RunTable, accepted_upto, accepts,
                      enumerate_sequences, extract_sequence, replay, run_nfa, run_oca)
from .transform import (ReplicaMap, TransformError, disjoint_r_sets,
                        eliminate_regular_prefix_gnf, eliminate_regular_tails_lid,
                        normalize_to_exact)
from .trees import (MalformedSequenceError, Tree, frontier, parse_tree, pretty_tree,
                    reconstruct_generic, reconstruct_gnf, reconstruct_lid, render_tree,
                    validate_tree)

__version__ = "0.1.0"

__all__ = [
    "AcceptanceSequence", "AmbiguityError", "Automaton", "AutomatonError", "Branch",
    "ConditionReport", "Diagnostic", "Epsilon", "GNF", "Gnf", "Grammar", "GrammarError",
    "GrammarSyntaxError", "KindError", "LID", "MalformedSequenceError", "Origin",
    "PreconditionError", "Production", "ReplicaMap", "RunTable", "Symbol", "TransformError",
    "Transition", "Tree", "Witness", "accepted_upto", "accepts", "build_gnf_oca",
    "build_lid_oca", "closing_pair", "disjoint_r_sets", "eliminate_regular_prefix_gnf",
    "eliminate_regular_tails_lid", "enumerate_sequences", "exactness_condition",
    "extract_sequence", "frontier", "last_set", "last_sets", "normalizability_condition",
    "normalize_to_exact", "nullables", "parse_automaton", "parse_grammar", "parse_tree",
    "pretty_tree", "reconstruct_generic", "reconstruct_gnf", "reconstruct_lid", "render_tree",
    "replay", "regular_nonterminals_gnf", "regular_nonterminals_lid", "run_nfa", "run_oca",
    "serialize_automaton", "serialize_grammar", "strip_to_nfa", "validate", "validate_tree",
]
