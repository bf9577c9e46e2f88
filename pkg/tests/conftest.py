"""Shared helpers: seeded random instances and the worked reference plans."""

import random
from fractions import Fraction

import pytest

from hypercurv import (
    Hypergraph,
    ProbMeasure,
    TransportPlan,
    TransportStep,
    lazy_random_walk,
)
from hypercurv.errors import HypercurvError


def random_hypergraph(rng, max_vertices=7, max_edges=4, max_edge_size=4):
    """Connected simple hypergraph drawn from a seeded RNG."""
    while True:
        n = rng.randint(3, max_vertices)
        labels = [f"u{i}" for i in range(n)]
        edges = []
        for _ in range(rng.randint(2, max_edges)):
            size = rng.randint(2, min(max_edge_size, n))
            edges.append(frozenset(rng.sample(labels, size)))
        uniq = []
        for e in edges:
            if not any(e < o or o < e or e == o for o in uniq):
                uniq.append(e)
        try:
            return Hypergraph(labels, [set(e) for e in uniq])
        except HypercurvError:
            continue


def random_measure(rng, H, max_denominator=12, max_support=4):
    """Probability measure with denominator dividing max_denominator."""
    D = rng.choice([d for d in (4, 6, 8, 12) if d <= max_denominator])
    k = rng.randint(1, min(max_support, H.n))
    verts = rng.sample(list(H.vertices), k)
    cuts = sorted(rng.randint(0, D) for _ in range(k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [D])]
    weights = {v: Fraction(p, D) for v, p in zip(verts, parts) if p}
    if not weights:
        weights = {verts[0]: Fraction(1)}
    return ProbMeasure(weights)


@pytest.fixture
def rng():
    return random.Random(20240811)


def edge_index(H, labels):
    ids = tuple(sorted(H.vertex_id(v) for v in labels))
    return H.edges.index(ids)


def ladder_walks(H, d, alpha):
    alpha = Fraction(alpha)
    return (lazy_random_walk(H, "b0", alpha),
            lazy_random_walk(H, f"b{d}", alpha))


def ladder_route_a(H, d, alpha):
    """Top parcel rides the top row; bottom mass convoys along the bottom."""
    alpha = Fraction(alpha)
    b = 1 - alpha
    mu, nu = ladder_walks(H, d, alpha)
    steps = [TransportStep(edge_index(H, {f"t{i}", f"t{i + 1}"}),
                           ((f"t{i}", f"t{i + 1}", b / 2),))
             for i in range(d)]
    steps.append(TransportStep(edge_index(H, {"b0", "b1"}),
                               (("b0", "b1", alpha),)))
    for i in range(1, d - 1):
        steps.append(TransportStep(edge_index(H, {f"b{i}", f"b{i + 1}"}),
                                   ((f"b{i}", f"b{i + 1}", 1 - b / 2),)))
    steps.append(TransportStep(edge_index(H, {f"b{d - 1}", f"b{d}"}),
                               ((f"b{d - 1}", f"b{d}", alpha),)))
    return TransportPlan(mu, nu, tuple(steps))


def ladder_route_b(H, d, alpha):
    """Everything convoys along the bottom; the top corners peel on and off."""
    alpha = Fraction(alpha)
    b = 1 - alpha
    mu, nu = ladder_walks(H, d, alpha)
    steps = [TransportStep(edge_index(H, {"t0", "b0"}), (("t0", "b0", b / 2),)),
             TransportStep(edge_index(H, {"b0", "b1"}),
                           (("b0", "b1", 1 - b / 2),))]
    for i in range(1, d - 1):
        steps.append(TransportStep(edge_index(H, {f"b{i}", f"b{i + 1}"}),
                                   ((f"b{i}", f"b{i + 1}", Fraction(1)),)))
    steps.append(TransportStep(edge_index(H, {f"b{d - 1}", f"b{d}"}),
                               ((f"b{d - 1}", f"b{d}", 1 - b / 2),)))
    steps.append(TransportStep(edge_index(H, {f"b{d}", f"t{d}"}),
                               ((f"b{d}", f"t{d}", b / 2),)))
    return TransportPlan(mu, nu, tuple(steps))


def grid9_walks(H, alpha):
    alpha = Fraction(alpha)
    return (lazy_random_walk(H, "x", alpha), lazy_random_walk(H, "y", alpha))


def grid9_batched_plan(H, alpha):
    """Collect each 2x2 block's surplus onto the block corner nearest the
    target, then sweep everything across the target's block at once."""
    alpha = Fraction(alpha)
    b = 1 - alpha
    mu, nu = grid9_walks(H, alpha)
    cyan = edge_index(H, {"v2", "v3", "x", "v6"})
    orange = edge_index(H, {"v1", "v2", "v4", "x"})
    green = edge_index(H, {"x", "v6", "v8", "v9"})
    red = edge_index(H, {"v4", "x", "y", "v8"})
    steps = (
        TransportStep(cyan, (("v3", "x", b / 8),)),
        TransportStep(orange, (("v1", "v4", b / 8), ("v2", "v4", b / 8))),
        TransportStep(green, (("v6", "v8", b / 8), ("v9", "v8", b / 8))),
        TransportStep(red, (("x", "y", alpha + b / 8 - b / 3),
                            ("v4", "y", b / 24), ("v8", "y", b / 24))),
    )
    return TransportPlan(mu, nu, tuple(steps))


def grid9_spread_plan(H, alpha):
    """Alternative with equalized early batches so the last sweep carries
    only the center's surplus; costlier by concavity."""
    alpha = Fraction(alpha)
    b = 1 - alpha
    mu, nu = grid9_walks(H, alpha)
    cyan = edge_index(H, {"v2", "v3", "x", "v6"})
    orange = edge_index(H, {"v1", "v2", "v4", "x"})
    green = edge_index(H, {"x", "v6", "v8", "v9"})
    red = edge_index(H, {"v4", "x", "y", "v8"})
    steps = (
        TransportStep(cyan, (("v3", "x", b / 8), ("v2", "x", b / 24),
                             ("v6", "x", b / 24))),
        TransportStep(orange, (("v1", "v4", b / 8), ("v2", "v4", b / 12))),
        TransportStep(green, (("v9", "v8", b / 8), ("v6", "v8", b / 12))),
        TransportStep(red, (("x", "y", alpha - b / 8),)),
    )
    return TransportPlan(mu, nu, tuple(steps))
