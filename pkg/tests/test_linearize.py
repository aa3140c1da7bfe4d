import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqmtl.dataprep import (AmrGraph, Tree, delinearize_amr, delinearize_tree, linearize_amr,
                             linearize_tree, parse_brackets, parse_penman)
from seqmtl.errors import DataError, ParseError

LABELS = ["S", "NP", "VP", "PP", "DT", "NN", "VB", "ADJP", "-NONE-", "NP-SBJ"]
WORDS = ["the", "dog", "barks", "a", "cat", "sat", "on", "mat", ".", ",", "NP", "S"]
CONCEPTS = ["want-01", "boy", "go-02", "girl", "-", "\"Paris\"", "city", "and", "believe-01"]
ROLES = [":ARG0", ":ARG1", ":ARG2", ":mod", ":op1", ":name", ":polarity"]


def random_tree(rng, depth=0):
    label = LABELS[rng.integers(len(LABELS))]
    kids = []
    for _ in range(rng.integers(1, 4)):
        if depth < 4 and rng.random() < 0.45:
            kids.append(random_tree(rng, depth + 1))
        else:
            kids.append(WORDS[rng.integers(len(WORDS))])
    return Tree(label, kids)


def random_amr(rng):
    n = int(rng.integers(1, 9))
    concepts = {f"x{i}": CONCEPTS[rng.integers(len(CONCEPTS))] for i in range(n)}
    edges = [(f"x{rng.integers(i)}", ROLES[rng.integers(len(ROLES))], f"x{i}") for i in range(1, n)]
    for _ in range(rng.integers(0, 4)):       # re-entrancies, possibly cycles
        edges.append((f"x{rng.integers(n)}", ROLES[rng.integers(len(ROLES))], f"x{rng.integers(n)}"))
    rng.shuffle(edges)
    return AmrGraph("x0", concepts, [tuple(e) for e in edges])


def as_nx(g):
    G = nx.MultiDiGraph()
    for v, c in g.concepts.items():
        G.add_node(v, concept=c, root=(v == g.root))
    for s, r, t in g.edges:
        G.add_edge(s, t, role=r)
    return G


def isomorphic(a, b):
    return nx.is_isomorphic(
        as_nx(a), as_nx(b),
        node_match=lambda x, y: x["concept"] == y["concept"] and x["root"] == y["root"],
        edge_match=lambda x, y: sorted(d["role"] for d in x.values()) == sorted(d["role"] for d in y.values()))


def test_tree_typed_brackets():
    t = parse_brackets("(S (NP the dog) barks)")
    assert linearize_tree(t) == ["(S", "(NP", "the", "dog", ")NP", "barks", ")S"]
    assert linearize_tree(t, mask_terminals="XX") == ["(S", "(NP", "XX", "XX", ")NP", "XX", ")S"]


def test_ptb_wrapper_unwrapped():
    t = parse_brackets("( (S (NP (DT a)) (VP (VB go))) )")
    assert t.label == "S"
    assert t.leaves() == ["a", "go"]


@pytest.mark.parametrize("seed", range(100))
def test_tree_round_trip(seed):
    t = random_tree(np.random.default_rng(seed))
    assert delinearize_tree(linearize_tree(t)) == t
    assert parse_brackets(t.to_brackets()) == t


@pytest.mark.parametrize("tokens, pos", [
    (["(S", "a", ")NP"], 2),
    (["(S", "a"], 2),
    (["a"], 0),
    ([")S"], 0),
    (["(S", ")S", "(S", ")S"], 2),
])
def test_tree_parse_errors_carry_position(tokens, pos):
    with pytest.raises(ParseError) as exc:
        delinearize_tree(tokens)
    assert exc.value.position == pos


def test_amr_encoding_rules():
    g = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))")
    assert linearize_amr(g) == ["(", "want-01", ":ARG0", "boy", ":ARG1",
                                "(", "go-02", ":ARG0", "*2", ")", ")"]


@pytest.mark.parametrize("seed", range(100))
def test_amr_round_trip_isomorphic(seed):
    g = random_amr(np.random.default_rng(seed))
    back = delinearize_amr(linearize_amr(g))
    assert isomorphic(g, back)
    # canonical form is a fixed point
    assert linearize_amr(back) == linearize_amr(g)


def test_amr_constants_become_nodes():
    g = parse_penman('(c / city :name (n / name :op1 "Paris") :polarity -)')
    assert sorted(g.concepts.values()) == ['"Paris"', "-", "city", "name"]
    assert isomorphic(g, delinearize_amr(linearize_amr(g)))


def test_amr_validation():
    with pytest.raises(DataError):
        linearize_amr(AmrGraph("a", {"a": "x", "b": "y"}, []))        # disconnected
    with pytest.raises(DataError):
        linearize_amr(AmrGraph("a", {"a": "x"}, [("a", "ARG0", "a")]))  # role without colon
    for bad in (["(", "x", ")"], ["x", "y"], ["(", "x", ":r", "*5", ")"], [":r"], []):
        with pytest.raises(ParseError):
            delinearize_amr(bad)


@given(st.integers(0, 10 ** 6))
def test_amr_round_trip_property(seed):
    g = random_amr(np.random.default_rng(seed))
    assert isomorphic(g, delinearize_amr(linearize_amr(g)))
