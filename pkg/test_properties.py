"""
Test index, isomorphism type, freeness and bases
"""

import math

import pytest

from counting.tables import CountingEngine
from psl2.exceptions import InvalidGraphError
from sampling.rng import RngState
from sampling.subgroups import sample_free, sample_subgroup
from stallings.graphs import (
    TRIVIAL_GRAPH, StallingsGraph, canonical_form, combinatorial_type, membership, read_word,
    stallings_graph,
)
from stallings.properties import (
    IsomorphismType, access_path_length, basis, index, is_free, isomorphism_type, spanning_tree,
)
from stallings.realization import realizable_types, realize_type
from stallings.words import Word, normalize_shortlex

EMPTY = Word()


@pytest.fixture(scope="module")
def h1():
    return stallings_graph(["abaB", "babab"])


@pytest.fixture(scope="module")
def h2():
    return stallings_graph(["babaB", "BabaBab"])


def test_index(h1, h2):
    """Test finite and infinite index on the worked examples"""
    assert index(h1) == 6
    assert index(h2) == math.inf
    assert index(stallings_graph(["a", "b"])) == 1
    assert index(TRIVIAL_GRAPH) == math.inf


def test_index_with_isolated_b_edge():
    """Test that an isolated b-edge makes the index infinite"""
    g = StallingsGraph.create(2, a_loops=[0, 1], b_edges=[(0, 1)], root=0)
    assert index(g) == math.inf


def test_isomorphism_type(h1, h2):
    """Test the Kurosh decomposition of the worked examples"""
    assert isomorphism_type(h1) == IsomorphismType(0, 0, 2)
    assert isomorphism_type(h2) == IsomorphismType(1, 1, 0)


def test_single_vertex_types():
    """Test the four one-vertex subgroups"""
    assert isomorphism_type(TRIVIAL_GRAPH) == (0, 0, 0)
    assert isomorphism_type(stallings_graph(["a"])) == (1, 0, 0)
    assert isomorphism_type(stallings_graph(["b"])) == (0, 1, 0)
    assert isomorphism_type(stallings_graph(["a", "b"])) == (1, 1, 0)


def test_is_free(h1, h2):
    """Test freeness and rank"""
    assert is_free(h1) == (True, 2)
    assert is_free(h2) == (False, None)
    assert is_free(TRIVIAL_GRAPH) == (True, 0)


def test_basis_sizes(h1, h2):
    """Test that the basis matches the isomorphism type"""
    b1 = basis(h1)
    assert b1.b2 == [] and b1.b3 == []
    assert b1.rank == 2
    b2 = basis(h2)
    assert len(b2.b2) == 1 and len(b2.b3) == 1
    assert b2.rank == 0


def test_basis_words_are_members(h1, h2):
    """Test that every basis word is a shortlex element of the subgroup"""
    for g in (h1, h2):
        for w in basis(g).words:
            assert w.is_shortlex
            assert membership(g, w)


def test_basis_generates(h1):
    """Test that the basis generates the same subgroup"""
    words = [str(w) for w in basis(h1).words]
    assert canonical_form(stallings_graph(words)) == canonical_form(h1)


def test_basis_to_dict(h2):
    """Test the keyed basis export"""
    data = basis(h2).to_dict()
    assert set(data) == {"B2", "B3", "B12", "B13"}
    assert len(data["B2"]) == 1


def test_spanning_tree_access_words(h2):
    """Test that each access word leads from the root to its vertex"""
    access, tree = spanning_tree(h2)
    assert len(access) == h2.n
    assert len(tree) == h2.n - 1
    for v, w in access.items():
        assert read_word(h2, h2.root, w) == v


def test_basis_matches_type_on_realized_graphs():
    """Test basis sizes against the rank formula for every small realizable type"""
    for n in range(1, 7):
        for t in realizable_types(n):
            g = realize_type(t).with_root(0)
            iso = isomorphism_type(g)
            b = basis(g)
            assert (len(b.b2), len(b.b3), b.rank) == tuple(iso)


def test_access_path_length(h1, h2):
    """Test the distance from the root to the cyclically reduced core"""
    assert access_path_length(h1) == 0
    assert access_path_length(h2) == 1
    assert access_path_length(stallings_graph(["Bab"])) == 1


def test_properties_require_root():
    """Test that unrooted graphs are refused"""
    unrooted = StallingsGraph.create(1, a_loops=[0], b_loops=[0])
    for query in (index, isomorphism_type, basis, access_path_length):
        with pytest.raises(InvalidGraphError):
            query(unrooted)


def test_basis_on_random_subgroups():
    """Test the basis contract on random subgroups of size at most 20"""
    engine = CountingEngine()
    rng = RngState(2718)
    for i in range(1000):
        if i % 2:
            g = sample_free(2 + rng.randbelow(19), rng, engine)
        else:
            g = sample_subgroup(1 + rng.randbelow(20), rng, engine)
        b = basis(g)
        iso = isomorphism_type(g)
        t = combinatorial_type(g)
        assert (len(b.b2), len(b.b3), b.rank) == (t.l2, t.l3, iso.r)
        for w in b.b2:
            assert w != EMPTY and normalize_shortlex(w ** 2) == EMPTY
        for w in b.b3:
            assert w != EMPTY and normalize_shortlex(w ** 3) == EMPTY
        assert canonical_form(stallings_graph(b.words)) == canonical_form(g)
