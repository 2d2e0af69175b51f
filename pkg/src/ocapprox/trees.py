"""Parse trees: reconstruction from acceptance sequences and validation.

Reconstruction is a single left-to-right pass over the transition sequence
with a stack, one stack operation set per transition, so it runs in time
linear in the input length.  Three disciplines are provided:

* :func:`reconstruct_lid` for automata built from lid grammars,
* :func:`reconstruct_gnf` for automata built from Greibach-form grammars
  (this one needs the transition marks and roles, which is why sequences
  carry transition identifiers rather than bare tuples),
* :func:`reconstruct_generic` which needs no grammar at all: source states
  of counter-keeping/incrementing transitions become interior nodes, source
  states of decrementing transitions become leaves, an increment opens a
  construct and the matching decrement closes it, and keeps chain
  right-linearly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .automaton import (COND_ZERO, DEC, INC, KEEP, ROLE_GNF_FINAL, Automaton, Transition)
from .grammar import Branch, Epsilon, Gnf, Grammar, Production, Unit
from .runtime import AcceptanceSequence


class MalformedSequenceError(ValueError):
    """The transition sequence cannot be interpreted as an accepting run;
    genuine extractions never trigger this."""


@dataclass(frozen=True)
class Tree:
    label: str
    children: tuple["Tree", ...] = ()
    terminal: bool = False

    def __post_init__(self) -> None:
        if self.terminal and self.children:
            raise ValueError("terminal leaves cannot have children")


def leaf(token: str) -> Tree:
    return Tree(token, (), True)


class _Node:
    __slots__ = ("label", "children")

    def __init__(self, label: str):
        self.label = label
        self.children: list[_Node | Tree] = []

    def freeze(self) -> Tree:
        return Tree(self.label, tuple(c if isinstance(c, Tree) else c.freeze()
                                      for c in self.children))


def frontier(tree: Tree) -> tuple[str, ...]:
    """Terminal leaves, left to right."""
    if tree.terminal:
        return (tree.label,)
    out: list[str] = []
    for child in tree.children:
        out.extend(frontier(child))
    return tuple(out)


def _sequence_transitions(sequence: AcceptanceSequence, automaton: Automaton) -> list[Transition]:
    try:
        return [automaton.transitions[i] for i in sequence]
    except IndexError as exc:
        raise MalformedSequenceError("sequence references an unknown transition") from exc


def _surface(tokens: Sequence[str] | None, step: int, transition: Transition) -> str:
    # Tree leaves carry the surface token when the caller ran the automaton
    # through an alias map; each transition consumes exactly one token.
    if tokens is None:
        return transition.terminal
    return tokens[step]


def reconstruct_lid(sequence: AcceptanceSequence, automaton: Automaton,
                    tokens: Sequence[str] | None = None) -> Tree:
    """Stack interpretation for lid-built automata: a counter-keeping
    transition from A appends the terminal and the target under A; an
    increment does the same but pushes A; a decrement pops a node and appends
    the closer terminal and the target under it.  Nullable nonterminals end
    up as childless interior nodes."""
    transitions = _sequence_transitions(sequence, automaton)
    if tokens is not None and len(tokens) != len(transitions):
        raise MalformedSequenceError("token count does not match sequence length")
    root = _Node(automaton.start)
    if not transitions:
        return root.freeze()
    current = root
    stack: list[_Node] = []
    steps = 0
    for i, t in enumerate(transitions):
        if t.src != current.label:
            raise MalformedSequenceError(
                f"step {i}: transition leaves {t.src}, run is in {current.label}")
        token = leaf(_surface(tokens, i, t))
        target = _Node(t.dst)
        if t.action == KEEP:
            current.children += [token, target]
        elif t.action == INC:
            current.children += [token, target]
            stack.append(current)
        else:
            if not stack:
                raise MalformedSequenceError(f"step {i}: close without an open construct")
            parent = stack.pop()
            parent.children += [token, target]
        current = target
        steps += 1
    if stack:
        raise MalformedSequenceError("sequence ends with unclosed constructs")
    assert steps == len(transitions)
    return root.freeze()


def reconstruct_gnf(sequence: AcceptanceSequence, automaton: Automaton,
                    tokens: Sequence[str] | None = None) -> Tree:
    """Stack interpretation for Greibach-built automata.  Marked transitions
    attach their terminal under the source and the target as a sibling under
    the stack top; decrements close the stack top the same way; the final
    zero-counter transition into the accepting state contributes only its
    terminal (the accepting state never appears in the tree)."""
    transitions = _sequence_transitions(sequence, automaton)
    if not transitions:
        raise MalformedSequenceError("an accepting Greibach-form run consumes at least one token")
    if tokens is not None and len(tokens) != len(transitions):
        raise MalformedSequenceError("token count does not match sequence length")
    root = _Node(automaton.start)
    current: _Node | None = root
    stack: list[_Node] = []
    for i, t in enumerate(transitions):
        if current is None:
            raise MalformedSequenceError(f"step {i}: run continues past the accepting state")
        if t.src != current.label:
            raise MalformedSequenceError(
                f"step {i}: transition leaves {t.src}, run is in {current.label}")
        token = leaf(_surface(tokens, i, t))
        if t.action == INC:
            target = _Node(t.dst)
            current.children += [token, target]
            stack.append(current)
            current = target
        elif t.action == DEC:
            current.children.append(token)
            if not stack:
                raise MalformedSequenceError(f"step {i}: close without an open construct")
            parent = stack.pop()
            target = _Node(t.dst)
            parent.children.append(target)
            current = target
        elif t.marked:
            current.children.append(token)
            if not stack:
                raise MalformedSequenceError(f"step {i}: sibling attachment without an open construct")
            target = _Node(t.dst)
            stack[-1].children.append(target)
            current = target
        elif (t.origin is not None and t.origin.role == ROLE_GNF_FINAL) or \
                (t.origin is None and t.cond == COND_ZERO and t.dst in automaton.final_set):
            current.children.append(token)
            current = None
        else:
            target = _Node(t.dst)
            current.children += [token, target]
            current = target
    if stack or current is not None:
        raise MalformedSequenceError("sequence does not end at the accepting state with balance")
    return root.freeze()


def reconstruct_generic(sequence: AcceptanceSequence, automaton: Automaton,
                        tokens: Sequence[str] | None = None) -> Tree:
    """Grammar-free interpretation usable on any one-counter acceptance
    sequence.  Terminals always become leaves; a decrementing transition also
    leaves its source state as a leaf; every other transition contributes an
    interior node labeled with its source state."""
    transitions = _sequence_transitions(sequence, automaton)
    if tokens is not None and len(tokens) != len(transitions):
        raise MalformedSequenceError("token count does not match sequence length")
    if not transitions:
        return Tree(automaton.start)
    root: _Node | None = None
    attach: _Node | None = None
    stack: list[_Node] = []
    for i, t in enumerate(transitions):
        token = leaf(_surface(tokens, i, t))
        if t.action == DEC:
            if not stack:
                raise MalformedSequenceError(f"step {i}: close without an open construct")
            top = stack.pop()
            top.children += [Tree(t.src), token]
            attach = top
        else:
            node = _Node(t.src)
            if attach is None:
                root = node
            else:
                attach.children.append(node)
            node.children.append(token)
            if t.action == INC:
                stack.append(node)
            attach = node
    if stack:
        raise MalformedSequenceError("sequence ends with unclosed constructs")
    assert root is not None
    return root.freeze()


def validate_tree(grammar: Grammar, tree: Tree, tokens: Sequence[str]) -> bool:
    """True iff the tree is a genuine parse tree: rooted at the start
    nonterminal, every interior node's child sequence matches one of its
    productions (a childless node needs an epsilon production), and the
    frontier equals the input."""
    if tree.terminal or tree.label != grammar.start:
        return False
    if frontier(tree) != tuple(tokens):
        return False
    return _node_valid(grammar, tree)


def _node_valid(grammar: Grammar, node: Tree) -> bool:
    if node.terminal:
        return True
    productions = grammar.productions_of(node.label)
    if not productions:
        return False
    if not any(_matches(p, node.children) for p in productions):
        return False
    return all(_node_valid(grammar, child) for child in node.children)


def _matches(production: Production, children: tuple[Tree, ...]) -> bool:
    r = production.rhs
    if isinstance(r, Epsilon):
        return not children
    if isinstance(r, Unit):
        expected: tuple[tuple[str, bool], ...] = ((r.terminal, True), (r.target, False))
    elif isinstance(r, Branch):
        expected = ((r.opener, True), (r.inner, False), (r.closer, True), (r.continuation, False))
    else:
        assert isinstance(r, Gnf)
        expected = ((r.terminal, True),) + tuple((b, False) for b in r.body)
    if len(children) != len(expected):
        return False
    return all(c.terminal == is_term and c.label == label
               for c, (label, is_term) in zip(children, expected))


def render_tree(tree: Tree) -> str:
    """Bracketed one-line form: interior nodes as ``(Label child ...)``,
    terminals double-quoted."""
    if tree.terminal:
        escaped = tree.label.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if not tree.children:
        return f"({tree.label})"
    inner = " ".join(render_tree(c) for c in tree.children)
    return f"({tree.label} {inner})"


def pretty_tree(tree: Tree, indent: int = 0) -> str:
    """Indented multi-line rendering for humans."""
    pad = "  " * indent
    if tree.terminal:
        return f'{pad}"{tree.label}"'
    lines = [pad + tree.label]
    lines.extend(pretty_tree(c, indent + 1) for c in tree.children)
    return "\n".join(lines)


_TREE_TOKEN_RE = re.compile(r'\(|\)|"(?:[^"\\]|\\.)*"|[^\s()"]+')


def parse_tree(text: str) -> Tree:
    """Inverse of :func:`render_tree`."""
    tokens = _TREE_TOKEN_RE.findall(text)
    if not tokens or _TREE_TOKEN_RE.sub("", text).strip():
        raise ValueError("malformed tree text")
    pos = 0

    def parse_node() -> Tree:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of tree text")
        tok = tokens[pos]
        if tok.startswith('"'):
            pos += 1
            body = tok[1:-1].replace('\\"', '"').replace("\\\\", "\\")
            return leaf(body)
        if tok != "(":
            raise ValueError(f"unexpected token {tok!r}")
        pos += 1
        if pos >= len(tokens) or tokens[pos] in ('(', ')') or tokens[pos].startswith('"'):
            raise ValueError("expected a node label after '('")
        label = tokens[pos]
        pos += 1
        children: list[Tree] = []
        while pos < len(tokens) and tokens[pos] != ")":
            children.append(parse_node())
        if pos >= len(tokens):
            raise ValueError("unbalanced parentheses in tree text")
        pos += 1
        return Tree(label, tuple(children))

    tree = parse_node()
    if pos != len(tokens):
        raise ValueError("trailing content after tree")
    return tree
