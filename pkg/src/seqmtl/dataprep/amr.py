"""AMR graphs as depth-first token sequences with re-entrancy pointers.

Encoding rules, applied from the root:

* a concept with outgoing edges is written ``( concept :role child ... )``;
  a concept without outgoing edges is the bare ``concept`` token;
* concepts are numbered 1, 2, ... in the order they are first written;
  any later mention of an already-written concept is the pointer ``*k``.

Outgoing edges are visited in their stored order. Variable names are not
encoded; delinearization names variables ``v1, v2, ...``.
"""

from dataclasses import dataclass, field

from ..errors import DataError, ParseError


@dataclass
class AmrGraph:
    root: str
    concepts: dict                                   # variable -> concept label
    edges: list = field(default_factory=list)        # (source var, role, target var)

    def outgoing(self):
        out = {v: [] for v in self.concepts}
        for src, role, tgt in self.edges:
            out[src].append((role, tgt))
        return out

    def validate(self):
        if self.root not in self.concepts:
            raise DataError(f"root {self.root!r} has no concept")
        for src, role, tgt in self.edges:
            if src not in self.concepts or tgt not in self.concepts:
                raise DataError(f"edge {src} {role} {tgt} references an unknown variable")
            if not role.startswith(":") or len(role) < 2 or any(c.isspace() for c in role):
                raise DataError(f"invalid role {role!r}")
        for var, concept in self.concepts.items():
            if (not concept or concept[0] in "():*"
                    or any(c.isspace() for c in concept)):
                raise DataError(f"concept {concept!r} of {var} cannot be linearized")
        out = self.outgoing()
        seen, stack = {self.root}, [self.root]
        while stack:
            for _, tgt in out[stack.pop()]:
                if tgt not in seen:
                    seen.add(tgt)
                    stack.append(tgt)
        if len(seen) != len(self.concepts):
            missing = sorted(set(self.concepts) - seen)
            raise DataError(f"graph is not connected from the root; unreachable: {missing}")


def linearize_amr(graph):
    graph.validate()
    out_edges = graph.outgoing()
    index = {}
    tokens = []

    def visit(var):
        index[var] = len(index) + 1
        edges = out_edges[var]
        if not edges:
            tokens.append(graph.concepts[var])
            return
        tokens.append("(")
        tokens.append(graph.concepts[var])
        for role, tgt in edges:
            tokens.append(role)
            if tgt in index:
                tokens.append(f"*{index[tgt]}")
            else:
                visit(tgt)
        tokens.append(")")

    visit(graph.root)
    return tokens


def delinearize_amr(tokens):
    tokens = list(tokens)
    if not tokens:
        raise ParseError("empty sequence")
    concepts, edges, order = {}, [], []
    pos = 0

    def new_var(concept):
        var = f"v{len(order) + 1}"
        order.append(var)
        concepts[var] = concept
        return var

    def node():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of sequence", pos)
        tok = tokens[pos]
        if tok.startswith("*"):
            try:
                k = int(tok[1:])
            except ValueError:
                raise ParseError(f"bad pointer {tok!r}", pos) from None
            if not 1 <= k <= len(order):
                raise ParseError(f"pointer {tok} to an unseen concept", pos)
            pos += 1
            return order[k - 1]
        if tok == "(":
            pos += 1
            if pos >= len(tokens) or tokens[pos] in ("(", ")") or tokens[pos][0] in ":*":
                raise ParseError("expected a concept after '('", pos)
            var = new_var(tokens[pos])
            pos += 1
            n_edges = 0
            while pos < len(tokens) and tokens[pos] != ")":
                role = tokens[pos]
                if not role.startswith(":"):
                    raise ParseError(f"expected a role, got {role!r}", pos)
                pos += 1
                edges.append((var, role, node()))
                n_edges += 1
            if pos >= len(tokens):
                raise ParseError("unclosed '('", pos)
            if n_edges == 0:
                raise ParseError("parenthesized concept without edges", pos)
            pos += 1
            return var
        if tok == ")" or tok.startswith(":"):
            raise ParseError(f"unexpected {tok!r}", pos)
        pos += 1
        return new_var(tok)

    root = node()
    if pos != len(tokens):
        raise ParseError("trailing tokens after the root", pos)
    return AmrGraph(root, concepts, edges)


def parse_penman(text):
    """Minimal PENMAN reader: ``(w / want-01 :ARG0 (b / boy) :ARG1 b)``.

    Constants (e.g. ``-`` or ``"Paris"``) become concept-only nodes with
    fresh variables; quotes are kept verbatim.
    """
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0
    concepts, edges, consts = {}, [], [0]

    def node():
        nonlocal pos
        if toks[pos] != "(":
            raise ParseError("expected '('", pos)
        var = toks[pos + 1]
        if toks[pos + 2] != "/":
            raise ParseError("expected '/'", pos + 2)
        concepts[var] = toks[pos + 3]
        pos += 4
        while toks[pos] != ")":
            role = toks[pos]
            if not role.startswith(":"):
                raise ParseError(f"expected role, got {role!r}", pos)
            pos += 1
            if toks[pos] == "(":
                edges.append((var, role, node()))
            else:
                target = toks[pos]
                pos += 1
                edges.append((var, role, ("ref", target)))
        pos += 1
        return var

    try:
        root = node()
    except IndexError:
        raise ParseError("unbalanced PENMAN graph", pos) from None
    resolved = []
    for src, role, tgt in edges:
        if isinstance(tgt, tuple):
            name = tgt[1]
            if name not in concepts:
                consts[0] += 1
                var = f"_c{consts[0]}"
                concepts[var] = name
                name = var
            tgt = name
        resolved.append((src, role, tgt))
    return AmrGraph(root, concepts, resolved)
