from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sidebandit as sb
from sidebandit.errors import InputError, ParseError
from sidebandit.graph import (
    Clique,
    CliqueCover,
    cover_from_sets,
    induced_subgraph,
    parse_graph_kind,
    write_cover,
    write_edge_list,
)


@st.composite
def graphs(draw, max_arms=12):
    k = draw(st.integers(1, max_arms))
    pairs = list(combinations(range(k), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return sb.build_graph(k, chosen)


def test_build_triangle(triangle):
    assert all(len(a) == 2 for a in triangle.adjacency)


def test_build_edgeless():
    g = sb.build_graph(4, [])
    assert all(not a for a in g.adjacency)


def test_build_deduplicates_reversed_pairs():
    assert sb.build_graph(3, [(0, 1), (1, 0)]) == sb.build_graph(3, [(0, 1)])


@pytest.mark.parametrize("edges", [[(0, 3)], [(-1, 0)], [(1, 1)]])
def test_build_rejects_bad_edges(edges):
    with pytest.raises(InputError):
        sb.build_graph(3, edges)


def test_neighborhood(triangle, path3):
    assert sb.neighborhood(triangle, 0) == {0, 1, 2}
    assert sb.neighborhood(sb.build_graph(3, []), 2) == {2}
    assert sb.neighborhood(path3, 1) == {0, 1, 2}
    assert sb.neighborhood(path3, 0) == {0, 1}
    with pytest.raises(InputError):
        sb.neighborhood(path3, 3)


def test_is_clique(triangle, path3):
    assert sb.is_clique(triangle, {0, 1, 2})
    assert not sb.is_clique(path3, {0, 2})
    assert sb.is_clique(path3, {1})
    with pytest.raises(InputError):
        sb.is_clique(path3, set())


def test_maximal_clique_examples():
    assert sb.maximal_clique_containing(sb.generate_graph("complete", 4), 2).members == (0, 1, 2, 3)
    assert sb.maximal_clique_containing(sb.build_graph(3, []), 0).members == (0,)
    g = sb.build_graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert sb.maximal_clique_containing(g, 3).members == (2, 3)


def test_maximal_clique_growth_order():
    # arm 0 sees 1 and 2 (not adjacent to each other); 2 has the higher degree so it wins
    g = sb.build_graph(4, [(0, 1), (0, 2), (2, 3)])
    assert sb.maximal_clique_containing(g, 0).members == (0, 2)


def test_greedy_cover_examples():
    cover = sb.greedy_clique_cover(sb.generate_graph("complete", 5), 1.0)
    assert [c.members for c in cover.cliques] == [(0, 1, 2, 3, 4)]

    cover = sb.greedy_clique_cover(sb.generate_graph("path", 4), 1.0)
    assert [c.members for c in cover.cliques] == [(0, 1), (2, 3)]

    cover = sb.greedy_clique_cover(sb.generate_graph("star", 5), 0.4)
    assert len(cover.cliques) == 1
    (c,) = cover.cliques
    assert 0 in c and len(c) == 2
    assert len(cover.covered) == 2


@pytest.mark.parametrize("fraction", [0.0, -0.1, 1.5])
def test_greedy_cover_rejects_fraction(fraction):
    with pytest.raises(InputError):
        sb.greedy_clique_cover(sb.generate_graph("path", 4), fraction)


def test_cover_threshold_uses_decimal_fraction():
    # 0.1 * 10 must ask for one arm, 0.03 * 100 for three
    g = sb.build_graph(10, [])
    assert len(sb.greedy_clique_cover(g, 0.1).covered) == 1
    g = sb.build_graph(100, [])
    assert len(sb.greedy_clique_cover(g, 0.03).covered) == 3


def test_cover_stats():
    g = sb.build_graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    cover = cover_from_sets(g, [[0, 1, 2], [2, 3]])
    stats = sb.cover_stats(cover)
    assert stats.num_cliques == 2
    assert stats.avg_cliques_per_arm == pytest.approx(1.25)
    assert sb.cover_stats(sb.trivial_cover(7)).avg_cliques_per_arm == 1.0
    full = sb.greedy_clique_cover(sb.generate_graph("complete", 6))
    assert sb.cover_stats(full).avg_cliques_per_arm == 1.0


def test_cover_from_sets_rejects_non_clique(path3):
    with pytest.raises(InputError):
        cover_from_sets(path3, [[0, 2]])


def test_clique_rejects_empty():
    with pytest.raises(InputError):
        Clique(())


def test_generate_graph_examples():
    assert sb.generate_graph("complete", 4, 99).num_edges == 6
    assert sb.generate_graph("erdos_renyi", 10, 3, p=0.0).num_edges == 0
    assert sb.generate_graph("erdos_renyi", 10, 3, p=1.0) == sb.generate_graph("complete", 10)
    assert sb.generate_graph("star", 5).degree(0) == 4
    assert sb.generate_graph("path", 5).num_edges == 4


@pytest.mark.parametrize(
    "kind, kwargs",
    [
        ("erdos_renyi", {"p": 1.5}),
        ("erdos_renyi", {}),
        ("preferential_attachment", {"m": 0}),
        ("preferential_attachment", {"m": 10}),
        ("hypercube", {}),
    ],
)
def test_generate_graph_rejects(kind, kwargs):
    with pytest.raises(InputError):
        sb.generate_graph(kind, 10, 0, **kwargs)


@pytest.mark.parametrize("kind, kwargs", [("erdos_renyi", {"p": 0.3}), ("preferential_attachment", {"m": 2})])
def test_generate_graph_deterministic(kind, kwargs):
    a = sb.generate_graph(kind, 40, 11, **kwargs)
    b = sb.generate_graph(kind, 40, 11, **kwargs)
    assert a == b
    assert a != sb.generate_graph(kind, 40, 12, **kwargs)


def test_parse_graph_kind():
    assert parse_graph_kind("complete:50").num_edges == 50 * 49 // 2
    assert parse_graph_kind("er:30:0.2:seed4") == sb.generate_graph("erdos_renyi", 30, 4, p=0.2)
    assert parse_graph_kind("pa:30:2", default_seed=9) == sb.generate_graph(
        "preferential_attachment", 30, 9, m=2)
    for bad in ("complete", "er:30", "blob:3", "complete:x", "path:4:1"):
        with pytest.raises(InputError):
            parse_graph_kind(bad)


def test_load_edge_list(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("3 2\n0 1\n1 2\n")
    assert sb.load_edge_list(f) == sb.generate_graph("path", 3)
    f.write_text("# comment\n2 0\n")
    assert sb.load_edge_list(f) == sb.build_graph(2, [])


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("3 1\n0 5\n", 2),
        ("3 1\n0 1 2\n", 2),
        ("3\n", 1),
        ("3 1\n1 1\n", 2),
        ("3 1\n0 1\n1 2\n", 3),
        ("3 2\n0 1\n", None),
    ],
)
def test_load_edge_list_errors(tmp_path, text, lineno):
    f = tmp_path / "g.txt"
    f.write_text(text)
    with pytest.raises(ParseError) as info:
        sb.load_edge_list(f)
    assert info.value.lineno == lineno


def test_edge_list_and_cover_roundtrip(tmp_path):
    g = sb.generate_graph("erdos_renyi", 25, 5, p=0.3)
    write_edge_list(g, tmp_path / "g.txt")
    assert sb.load_edge_list(tmp_path / "g.txt") == g
    cover = sb.greedy_clique_cover(g)
    write_cover(cover, tmp_path / "c.txt")
    lines = (tmp_path / "c.txt").read_text().splitlines()
    assert [tuple(int(x) for x in ln.split()) for ln in lines] == [c.members for c in cover.cliques]


def test_induced_subgraph_relabels():
    g = sb.generate_graph("path", 5)
    sub, keep = induced_subgraph(g, [4, 1, 2])
    assert keep == [1, 2, 4]
    assert sub.edges() == [(0, 1)]


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_graph_invariants(g):
    for i in range(g.num_arms):
        assert i not in g.adjacency[i]
        for j in g.adjacency[i]:
            assert i in g.adjacency[j]
        nb = sb.neighborhood(g, i)
        assert i in nb and len(nb) == g.degree(i) + 1


@settings(max_examples=150, deadline=None)
@given(graphs(), st.data())
def test_maximal_clique_is_maximal(g, data):
    i = data.draw(st.integers(0, g.num_arms - 1))
    c = sb.maximal_clique_containing(g, i)
    assert i in c and sb.is_clique(g, c.members)
    for v in set(range(g.num_arms)) - set(c.members):
        assert not sb.is_clique(g, set(c.members) | {v})


@settings(max_examples=100, deadline=None)
@given(graphs(), st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_greedy_cover_properties(g, f1, f2):
    f1, f2 = sorted((f1, f2))
    full = sb.greedy_clique_cover(g, 1.0)
    assert full.covered == frozenset(range(g.num_arms))
    assert all(sb.is_clique(g, c.members) for c in full.cliques)
    a = sb.greedy_clique_cover(g, f1)
    b = sb.greedy_clique_cover(g, f2)
    assert b.cliques[: len(a.cliques)] == a.cliques
    assert len(a.covered) >= np.ceil(f1 * g.num_arms - 1e-9)
    assert a.covered == frozenset(i for c in a.cliques for i in c)
