"""Command-line front end.

Subcommands: ``check``, ``build``, ``run``, ``transform``, ``compare``,
``oracle``.  Every command renders one report, as human-readable text or as a
single JSON document (``--format json``); both renderings carry the same
content and no timestamps, so identical inputs give identical output.

Exit codes: 0 success/accept, 1 reject or invalid input, 2 precondition
failure, 3 invariant violation detected.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence

from . import analysis, oracle, runtime, transform, trees
from .automaton import (FINITE, ONE_COUNTER, ROLE_BRANCH_CLOSE, ROLE_BRANCH_OPEN,
                        ROLE_GNF_CLOSE, ROLE_GNF_FINAL, ROLE_GNF_OPEN, ROLE_GNF_SIBLING,
                        ROLE_UNIT, Automaton, AutomatonError, build_gnf_oca, build_lid_oca,
                        parse_automaton, serialize_automaton, strip_to_nfa)
from .grammar import (LID, Grammar, GrammarError, parse_grammar, last_sets, nullables,
                      serialize_grammar, validate)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_PRECONDITION = 2
EXIT_INVARIANT = 3

CAP_ENV_VAR = "OCA_APPROX_CAP"


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict = field(default_factory=dict)
    exit_status: int = EXIT_OK

    def to_json(self) -> str:
        doc = {"command": self.command, "inputs": self.inputs,
               "results": self.results, "exit_status": self.exit_status}
        return json.dumps(doc, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        for key, value in self.inputs.items():
            lines.append(f"  {key}: {value}")
        lines.extend(_render_section(self.results, 0))
        lines.append(f"exit status: {self.exit_status}")
        return "\n".join(lines)


def _render_section(mapping: dict, depth: int) -> list[str]:
    pad = "  " * depth
    lines: list[str] = []
    for key, value in mapping.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_render_section(value, depth + 1))
        elif isinstance(value, (list, tuple)):
            lines.append(f"{pad}{key}:")
            for item in value:
                for sub in str(item).splitlines():
                    lines.append(f"{pad}  {sub}")
        else:
            for i, sub in enumerate(str(value).splitlines()):
                lines.append(f"{pad}{key}: {sub}" if i == 0 else f"{pad}  {sub}")
    return lines


def _emit(report: Report, fmt: str) -> int:
    print(report.to_json() if fmt == "json" else report.to_text())
    return report.exit_status


def _load_grammar(path: str) -> Grammar:
    with open(path, encoding="utf-8") as handle:
        return parse_grammar(handle.read())


def _load_automaton(path: str) -> Automaton:
    with open(path, encoding="utf-8") as handle:
        return parse_automaton(handle.read())


def _cap() -> int:
    raw = os.environ.get(CAP_ENV_VAR)
    return int(raw) if raw else runtime.DEFAULT_ENUMERATION_CAP


def _tokenize(text: str) -> tuple[str, ...]:
    # Whitespace-separated tokens; a string without whitespace is split into
    # single characters (covers multi-character terminal names either way).
    parts = text.split()
    if len(parts) > 1:
        return tuple(parts)
    return tuple(text.strip())


def _load_alias(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'surface-token terminal-class'")
            table[parts[0]] = parts[1]
    return table


def _condition_dict(grammar: Grammar, report: analysis.ConditionReport) -> dict:
    return {
        "holds": report.holds,
        "witnesses": [w.render(grammar) for w in report.witnesses],
        "truncated": report.truncated,
    }


def _strings(words) -> list[str]:
    return [" ".join(w) if w else "<empty>" for w in sorted(words, key=lambda w: (len(w), w))]


def cmd_check(args: argparse.Namespace) -> int:
    report = Report("check", {"grammar": args.grammar})
    try:
        grammar = _load_grammar(args.grammar)
    except GrammarError as exc:
        report.results["error"] = str(exc)
        report.exit_status = EXIT_REJECT
        return _emit(report, args.format)
    diagnostics = validate(grammar)
    report.results["kind"] = grammar.kind
    report.results["start"] = grammar.start
    report.results["terminals"] = list(grammar.terminals)
    report.results["nonterminals"] = list(grammar.nonterminals)
    report.results["productions"] = len(grammar.productions)
    if diagnostics:
        report.results["diagnostics"] = [d.render() for d in diagnostics]
        report.exit_status = EXIT_REJECT
        return _emit(report, args.format)

    last = last_sets(grammar)
    report.results["last_sets"] = {a: sorted(last[a]) for a in grammar.nonterminals}
    reachable = _reachable(grammar)
    unreachable = [a for a in grammar.nonterminals if a not in reachable]
    if unreachable:
        report.results["unreachable_nonterminals"] = unreachable
    if grammar.kind == LID:
        report.results["nullables"] = sorted(nullables(grammar))
        report.results["regular_nonterminals"] = sorted(analysis.regular_nonterminals_lid(grammar))
        report.results["exactness_condition"] = _condition_dict(
            grammar, analysis.exactness_condition(grammar))
        report.results["normalizability_condition"] = _condition_dict(
            grammar, analysis.normalizability_condition(grammar))
    else:
        report.results["regular_nonterminals"] = sorted(analysis.regular_nonterminals_gnf(grammar))
    return _emit(report, args.format)


def _reachable(grammar: Grammar) -> set[str]:
    seen = {grammar.start}
    work = [grammar.start]
    while work:
        a = work.pop()
        for p in grammar.productions_of(a):
            for n in p.rhs_nonterminals():
                if n not in seen:
                    seen.add(n)
                    work.append(n)
    return seen


def _build(grammar: Grammar, target: str) -> Automaton:
    oca = build_lid_oca(grammar) if grammar.kind == LID else build_gnf_oca(grammar)
    return strip_to_nfa(oca) if target == FINITE else oca


def cmd_build(args: argparse.Namespace) -> int:
    report = Report("build", {"grammar": args.grammar, "target": args.target})
    try:
        grammar = _load_grammar(args.grammar)
        automaton = _build(grammar, args.target)
    except (GrammarError, AutomatonError) as exc:
        report.results["error"] = str(exc)
        report.exit_status = EXIT_REJECT
        return _emit(report, args.format)
    text = serialize_automaton(automaton)
    report.results["states"] = len(automaton.states)
    report.results["finals"] = list(automaton.finals)
    report.results["transitions"] = len(automaton.transitions)
    marked = sum(1 for t in automaton.transitions if t.marked)
    if automaton.kind == ONE_COUNTER:
        report.results["marked_transitions"] = marked
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        report.results["written"] = args.out
    else:
        report.results["automaton"] = text.rstrip("\n")
    return _emit(report, args.format)


def _pick_tree_mode(automaton: Automaton) -> str:
    roles = {t.origin.role for t in automaton.transitions if t.origin is not None}
    if roles & {ROLE_GNF_SIBLING, ROLE_GNF_FINAL, ROLE_GNF_OPEN, ROLE_GNF_CLOSE}:
        return "gnf"
    if roles & {ROLE_BRANCH_OPEN, ROLE_BRANCH_CLOSE, ROLE_UNIT}:
        return "lid"
    return "generic"


def cmd_run(args: argparse.Namespace) -> int:
    report = Report("run", {"automaton": args.automaton, "input": args.input})
    try:
        automaton = _load_automaton(args.automaton)
        alias = _load_alias(args.alias)
        surface = _tokenize(args.input)
        tokens = tuple(alias.get(t, t) for t in surface)
    except (AutomatonError, ValueError, OSError) as exc:
        report.results["error"] = str(exc)
        report.exit_status = EXIT_REJECT
        return _emit(report, args.format)
    if alias:
        report.inputs["alias"] = args.alias
        report.results["tokens"] = " ".join(tokens)

    if automaton.kind == FINITE:
        accepted = runtime.run_nfa(automaton, tokens)
        report.results["accepted"] = accepted
        report.exit_status = EXIT_OK if accepted else EXIT_REJECT
        return _emit(report, args.format)

    table = runtime.run_oca(automaton, tokens)
    report.results["accepted"] = table.accepted
    if not table.accepted:
        report.exit_status = EXIT_REJECT
        return _emit(report, args.format)
    sequence = runtime.extract_sequence(table, automaton)
    assert sequence is not None
    profile = runtime.replay(automaton, sequence, tokens=tokens)
    report.results["sequence"] = [
        f"{pos}: {automaton.transitions[ident].render().split('  #')[0]}   ; counter={profile[pos]}"
        for pos, ident in enumerate(sequence)]
    mode = args.tree if args.tree != "auto" else _pick_tree_mode(automaton)
    builder = {"lid": trees.reconstruct_lid, "gnf": trees.reconstruct_gnf,
               "generic": trees.reconstruct_generic}[mode]
    tree = builder(sequence, automaton, tokens=surface)
    report.results["tree_mode"] = mode
    report.results["tree"] = trees.render_tree(tree)
    report.results["tree_pretty"] = trees.pretty_tree(tree)
    if args.grammar:
        grammar = _load_grammar(args.grammar)
        # Validation is in terms of the grammar's terminal classes, so the
        # alias-mapped tree is checked even though the surface tree is shown.
        class_tree = tree if not alias else builder(sequence, automaton, tokens=tokens)
        report.results["tree_valid_for_grammar"] = trees.validate_tree(grammar, class_tree, tokens)
    return _emit(report, args.format)


def cmd_transform(args: argparse.Namespace) -> int:
    report = Report("transform", {"grammar": args.grammar, "mode": args.mode})
    try:
        grammar = _load_grammar(args.grammar)
    except GrammarError as exc:
        report.results["error"] = str(exc)
        report.exit_status = EXIT_REJECT
        return _emit(report, args.format)
    log: list[transform.ReplicaMap] = []
    try:
        if args.mode == "lid-exact":
            result = transform.normalize_to_exact(grammar, log=log)
        else:
            result = transform.eliminate_regular_prefix_gnf(grammar, log=log)
    except analysis.PreconditionError as exc:
        report.results["error"] = str(exc)
        report.exit_status = EXIT_PRECONDITION
        return _emit(report, args.format)
    except (transform.TransformError, GrammarError) as exc:
        report.results["error"] = str(exc)
        report.exit_status = EXIT_PRECONDITION
        return _emit(report, args.format)

    comments = transform.provenance_comments(log)
    text = serialize_grammar(result, comments=comments)
    report.results["replicas"] = sum(len(entry.mapping) for entry in log)
    report.results["productions_before"] = len(grammar.productions)
    report.results["productions_after"] = len(result.productions)
    if args.mode == "lid-exact":
        report.results["exactness_condition"] = _condition_dict(
            result, analysis.exactness_condition(result))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        report.results["written"] = args.out
    else:
        report.results["grammar_text"] = text.rstrip("\n")
    return _emit(report, args.format)


def cmd_compare(args: argparse.Namespace) -> int:
    report = Report("compare", {"grammar": args.grammar, "maxlen": args.maxlen})
    try:
        grammar = _load_grammar(args.grammar)
        oca = _build(grammar, ONE_COUNTER)
        nfa = strip_to_nfa(oca)
        cap = _cap()
        language = oracle.enumerate_language(grammar, args.maxlen, cap=cap)
        oca_accepted = runtime.accepted_upto(oca, grammar.terminals, args.maxlen, cap=cap)
        nfa_accepted = runtime.accepted_upto(nfa, grammar.terminals, args.maxlen, cap=cap)
    except (GrammarError, AutomatonError, ValueError) as exc:
        report.results["error"] = str(exc)
        report.exit_status = EXIT_REJECT
        return _emit(report, args.format)

    missing_oca = language - oca_accepted
    missing_nfa = oca_accepted - nfa_accepted
    report.results["counts"] = {
        "oracle": len(language), "oca": len(oca_accepted), "nfa": len(nfa_accepted)}
    report.results["oca_overapproximation"] = len(oca_accepted - language)
    report.results["nfa_overapproximation"] = len(nfa_accepted - oca_accepted)
    report.results["oca_extra_examples"] = _strings(oca_accepted - language)[:20]
    report.results["oca_equals_oracle"] = language == oca_accepted
    if missing_oca or missing_nfa:
        report.results["subset_violations"] = {
            "oracle_not_oca": _strings(missing_oca), "oca_not_nfa": _strings(missing_nfa)}
        report.exit_status = EXIT_INVARIANT
    else:
        report.results["subset_violations"] = {}
    return _emit(report, args.format)


def cmd_oracle(args: argparse.Namespace) -> int:
    report = Report("oracle", {"grammar": args.grammar})
    try:
        grammar = _load_grammar(args.grammar)
    except GrammarError as exc:
        report.results["error"] = str(exc)
        report.exit_status = EXIT_REJECT
        return _emit(report, args.format)
    if args.input is not None:
        tokens = _tokenize(args.input)
        report.inputs["input"] = args.input
        inside = oracle.member(grammar, tokens)
        report.results["member"] = inside
        if inside:
            tree = oracle.parse(grammar, tokens)
            assert tree is not None
            report.results["tree"] = trees.render_tree(tree)
        else:
            report.exit_status = EXIT_REJECT
    else:
        report.inputs["enumerate"] = args.enumerate
        try:
            words = oracle.enumerate_language(grammar, args.enumerate, cap=_cap())
        except ValueError as exc:
            report.results["error"] = str(exc)
            report.exit_status = EXIT_PRECONDITION
            return _emit(report, args.format)
        report.results["count"] = len(words)
        report.results["strings"] = _strings(words)
    return _emit(report, args.format)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocapprox",
        description="Approximate context-free languages with one-counter automata.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("human", "json"), default="human")

    p = sub.add_parser("check", help="validate a grammar and report its analyses")
    p.add_argument("grammar")
    add_format(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("build", help="build the approximating automaton")
    p.add_argument("grammar")
    p.add_argument("--target", choices=(ONE_COUNTER, FINITE), default=ONE_COUNTER)
    p.add_argument("--out")
    add_format(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("run", help="run an automaton on an input")
    p.add_argument("automaton")
    p.add_argument("--input", required=True)
    p.add_argument("--grammar")
    p.add_argument("--alias")
    p.add_argument("--tree", choices=("auto", "lid", "gnf", "generic"), default="auto")
    add_format(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("transform", help="apply a language-preserving transformation")
    p.add_argument("grammar")
    p.add_argument("--mode", choices=("lid-exact", "gnf-prefix"), required=True)
    p.add_argument("--out")
    add_format(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("compare", help="compare oracle, one-counter, and finite languages")
    p.add_argument("grammar")
    p.add_argument("--maxlen", type=int, required=True)
    add_format(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", help="brute-force membership or enumeration")
    p.add_argument("grammar")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--input")
    group.add_argument("--enumerate", type=int)
    add_format(p)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
