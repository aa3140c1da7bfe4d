"""Constituency trees as token sequences with typed closing brackets.

``(S (NP the dog ) barks )`` style input is written as
``(S (NP the dog )NP barks )S``: every nonterminal opens with ``(LABEL`` and
closes with ``)LABEL``; terminals are plain tokens.
"""

from dataclasses import dataclass, field

from ..errors import DataError, ParseError


@dataclass
class Tree:
    label: str
    children: list = field(default_factory=list)   # Tree or str (terminal)

    def nonterminals(self):
        return 1 + sum(c.nonterminals() for c in self.children if isinstance(c, Tree))

    def leaves(self):
        out = []
        for c in self.children:
            out.extend(c.leaves() if isinstance(c, Tree) else [c])
        return out

    def to_brackets(self):
        """Penn-Treebank style ``(S (NP (DT the)) ...)``."""
        inner = " ".join(c.to_brackets() if isinstance(c, Tree) else c for c in self.children)
        return f"({self.label} {inner})" if inner else f"({self.label})"


def _check_label(label):
    if not label or any(ch.isspace() or ch in "()" for ch in label):
        raise DataError(f"invalid nonterminal label {label!r}")


def linearize_tree(tree, mask_terminals=None):
    """Flatten ``tree``. With ``mask_terminals`` (e.g. ``"XX"``) every word is
    replaced, giving a structure-only target sequence (not invertible)."""
    out = []

    def walk(node):
        _check_label(node.label)
        out.append("(" + node.label)
        for c in node.children:
            if isinstance(c, Tree):
                walk(c)
            else:
                if not c or c[0] in "()" or any(ch.isspace() for ch in c):
                    raise DataError(f"terminal {c!r} cannot be linearized")
                out.append(mask_terminals if mask_terminals else c)
        out.append(")" + node.label)

    walk(tree)
    return out


def delinearize_tree(tokens):
    """Inverse of :func:`linearize_tree`; raises :class:`ParseError` with the
    offending token position on malformed input."""
    tokens = list(tokens)
    if not tokens:
        raise ParseError("empty sequence")
    stack = []
    root = None
    for pos, tok in enumerate(tokens):
        if tok.startswith("(") and len(tok) > 1:
            node = Tree(tok[1:])
            if stack:
                stack[-1].children.append(node)
            elif root is not None:
                raise ParseError("content after the root closed", pos)
            stack.append(node)
        elif tok.startswith(")") and len(tok) > 1:
            if not stack:
                raise ParseError(f"unmatched {tok}", pos)
            if stack[-1].label != tok[1:]:
                raise ParseError(f"{tok} closes ({stack[-1].label}", pos)
            node = stack.pop()
            if not stack:
                root = node
        else:
            if not stack:
                raise ParseError(f"terminal {tok!r} outside any constituent", pos)
            stack[-1].children.append(tok)
    if stack:
        raise ParseError(f"unclosed ({stack[-1].label}", len(tokens))
    return root


def parse_brackets(text):
    """Read one Penn-Treebank bracketed tree, e.g. ``(S (NP (DT a)) (VP (VB go)))``.

    An unlabeled outer wrapper ``( (S ...) )`` is unwrapped.
    """
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse():
        nonlocal pos
        if toks[pos] != "(":
            raise ParseError("expected '('", pos)
        pos += 1
        label = ""
        if pos < len(toks) and toks[pos] not in "()":
            label = toks[pos]
            pos += 1
        children = []
        while pos < len(toks) and toks[pos] != ")":
            if toks[pos] == "(":
                children.append(parse())
            else:
                children.append(toks[pos])
                pos += 1
        if pos >= len(toks):
            raise ParseError("unbalanced brackets", pos)
        pos += 1
        return Tree(label, children)

    if not toks:
        raise ParseError("empty tree")
    try:
        tree = parse()
    except IndexError:
        raise ParseError("unbalanced brackets", pos) from None
    if pos != len(toks):
        raise ParseError("trailing tokens after tree", pos)
    if tree.label == "" and len(tree.children) == 1 and isinstance(tree.children[0], Tree):
        tree = tree.children[0]
    return tree
