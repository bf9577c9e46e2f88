"""Hypergraph parsing, validation, metric structure and generators."""

import itertools
import random

import pytest

from hypercurv import (
    clique_expansion,
    degree,
    diameter,
    generate,
    graph_distance,
    parse_hypergraph,
)
from hypercurv.errors import (
    BadParams,
    DuplicateHyperedge,
    EmptyInput,
    LoopFound,
    NotConnected,
    NotSimple,
    UnknownVertex,
)
from hypercurv.hypergraph import GRID9_TEXT

from conftest import random_hypergraph


class TestParse:
    def test_minimal_two_edges(self):
        H = parse_hypergraph("a b c\nb d")
        assert H.n == 4
        assert len(H.edges) == 2
        assert H.validation_report().ok

    def test_grid9_file(self):
        H = parse_hypergraph(GRID9_TEXT)
        assert H.n == 9
        assert len(H.edges) == 4
        assert H.validation_report().ok

    def test_subset_edge_not_simple(self):
        with pytest.raises(NotSimple) as err:
            parse_hypergraph("a b c d\nb c")
        assert "line" in str(err.value)

    def test_loop_rejected(self):
        with pytest.raises(LoopFound) as err:
            parse_hypergraph("a b\nc")
        assert "line 2" in str(err.value)

    def test_duplicate_edge(self):
        with pytest.raises(DuplicateHyperedge):
            parse_hypergraph("a b\nb a")

    def test_disconnected(self):
        with pytest.raises(NotConnected):
            parse_hypergraph("a b\nc d")

    def test_empty(self):
        with pytest.raises(EmptyInput):
            parse_hypergraph("# only a comment\n\n")

    def test_nonstrict_keeps_findings(self):
        H = parse_hypergraph("a b c d\nb c\ne f", strict=False)
        rep = H.validation_report()
        assert not rep.simple
        assert not rep.connected
        assert rep.violations

    def test_nonstrict_parses_loop_demos(self):
        # inspection mode tolerates loops/containment/disconnection
        H = parse_hypergraph("a b c d\nc d\ne\ne f", strict=False)
        rep = H.validation_report()
        assert any("loop" in v for v in rep.violations)
        assert any("contained" in v for v in rep.violations)
        assert not rep.connected

    def test_comments_and_blanks_ignored(self):
        H = parse_hypergraph("# header\n\na b  # trailing\n\nb c\n")
        assert H.n == 3
        assert len(H.edges) == 2


class TestMetric:
    def test_complete_distance(self):
        H = generate("complete", 4)
        for x, y in itertools.combinations(H.vertices, 2):
            assert graph_distance(H, x, y) == 1

    def test_grid9_xy_adjacent(self):
        H = generate("grid9")
        assert graph_distance(H, "x", "y") == 1

    def test_path_end_to_end(self):
        H = generate("path", 2)
        assert graph_distance(H, "v0", "v2") == 2

    def test_unknown_vertex(self):
        H = generate("path", 2)
        with pytest.raises(UnknownVertex):
            graph_distance(H, "v0", "nope")

    def test_metric_axioms_exhaustive(self):
        rng = random.Random(5)
        for _ in range(10):
            H = random_hypergraph(rng)
            mat = H.distance_matrix()
            n = H.n
            for a in range(n):
                assert mat[a][a] == 0
                for b in range(n):
                    assert mat[a][b] == mat[b][a]
                    assert (mat[a][b] == 0) == (a == b)
                    for c in range(n):
                        assert mat[a][c] <= mat[a][b] + mat[b][c]

    def test_same_hyperedge_distance_one(self):
        rng = random.Random(6)
        for _ in range(10):
            H = random_hypergraph(rng)
            for e in H.edges:
                for a, b in itertools.combinations(e, 2):
                    assert H.distance_id(a, b) == 1


class TestDegreeDiameter:
    def test_complete_degree(self):
        H = generate("complete", 5)
        assert degree(H, "v0") == 4

    def test_grid9_degrees(self):
        H = generate("grid9")
        assert degree(H, "x") == 8
        assert degree(H, "y") == 3

    def test_path_endpoint_degree(self):
        H = generate("path", 3)
        assert degree(H, "v0") == 1
        assert degree(H, "v1") == 2

    def test_diameters(self):
        assert diameter(generate("complete", 6)) == 1
        assert diameter(generate("cycle", 6)) == 3
        assert diameter(generate("path", 5)) == 5

    def test_degree_incidence_consistency(self):
        rng = random.Random(7)
        for _ in range(10):
            H = random_hypergraph(rng)
            for v in range(H.n):
                union = set()
                for k in H.incidence[v]:
                    union.update(H.edges[k])
                union.discard(v)
                assert H.degree_id(v) == len(union)


class TestGenerate:
    def test_cycle_2_equals_complete_2(self):
        assert generate("cycle", 2).edges == generate("complete", 2).edges

    def test_grid9_matches_checked_in_file(self):
        import importlib.resources as res

        text = (res.files("hypercurv") / "data" / "grid9.hg").read_text()
        parsed = parse_hypergraph(text)
        gen = generate("grid9")
        assert parsed.vertices == gen.vertices
        assert parsed.edges == gen.edges

    def test_ladder_shape(self):
        H = generate("ladder", 3)
        assert H.n == 8
        assert graph_distance(H, "b0", "b3") == 3
        assert graph_distance(H, "t0", "t3") == 3
        assert degree(H, "b0") == 2

    def test_bad_params(self):
        with pytest.raises(BadParams):
            generate("complete", 1)
        with pytest.raises(BadParams):
            generate("path", 0)
        with pytest.raises(BadParams):
            generate("nope", 3)


class TestCliqueExpansion:
    def test_single_hyperedge_becomes_clique(self):
        H = parse_hypergraph("a b c d")
        G = clique_expansion(H)
        assert len(G.edges) == 6
        assert all(len(e) == 2 for e in G.edges)

    def test_graph_is_fixed_point(self):
        H = generate("cycle", 5)
        G = clique_expansion(H)
        assert sorted(G.edges) == sorted(H.edges)

    def test_grid9_expands_to_twenty_edges(self):
        G = clique_expansion(generate("grid9"))
        assert len(G.edges) == 20

    def test_distances_preserved(self):
        rng = random.Random(8)
        for _ in range(10):
            H = random_hypergraph(rng)
            G = clique_expansion(H)
            for a in range(H.n):
                for b in range(H.n):
                    da = H.distance_id(a, b)
                    db = G.distance_id(G.vertex_id(H.label(a)),
                                       G.vertex_id(H.label(b)))
                    assert da == db
