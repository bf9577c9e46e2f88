"""The concave-discounted stepwise transport distance.

A transport plan is a sequence of steps, each redistributing mass inside a
single hyperedge; a step moving total mass m costs h(m).  The distance is
the minimal total cost over all plans joining two measures.  Masses are
exact rationals throughout; floating point enters only through h.

The exact solver searches measures quantized to a common denominator D
(endpoint lcm times a refine factor).  Optimal plans are assumed to live
on that grid: step-cost minimization for a fixed plan structure is a
concave minimization over a network-flow polytope with rational data, so
extreme-point optima have grid-rational masses.  This is an assumption,
not a theorem; the refine knob and the grid-stability test guard it.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .cost import ConcaveCost
from .errors import (
    EndpointMismatch,
    InfeasibleQuantization,
    NegativeIntermediateMass,
    NotAssociated,
    StepLeavesHyperedge,
)
from .hypergraph import Hypergraph
from .measure import ProbMeasure, SignedDelta, common_denominator
from .wasserstein import Coupling, w1, w1_units

COST_TOL = 1e-12


@dataclass(frozen=True)
class TransportStep:
    """One redistribution inside a hyperedge.

    moves hold (from, to, mass) with both endpoints inside the hyperedge;
    moved_mass is the net half-L1 of the step's difference, which equals
    the sum of move masses whenever no vertex both sends and receives.
    """

    edge: int
    moves: tuple

    def delta(self) -> SignedDelta:
        deltas = {}
        for a, b, m in self.moves:
            deltas[a] = deltas.get(a, Fraction(0)) - m
            deltas[b] = deltas.get(b, Fraction(0)) + m
        return SignedDelta(deltas)

    @property
    def moved_mass(self) -> Fraction:
        return self.delta().half_l1()

    def step_cost(self, h: ConcaveCost) -> float:
        return h.eval(self.moved_mass)


@dataclass(frozen=True)
class TransportPlan:
    start: ProbMeasure
    end: ProbMeasure
    steps: tuple

    def intermediates(self, H: Hypergraph):
        """The measure sequence xi_0..xi_I, validating every step."""
        out = [self.start]
        cur = dict(self.start.weights)
        for n, step in enumerate(self.steps):
            edge_labels = {H.label(v) for v in H.edges[step.edge]}
            outflow = {}
            for a, b, m in step.moves:
                if m <= 0 or a == b:
                    raise StepLeavesHyperedge(
                        f"step {n}: malformed move ({a!r} -> {b!r}, {m})")
                if a not in edge_labels or b not in edge_labels:
                    raise StepLeavesHyperedge(
                        f"step {n}: move {a!r} -> {b!r} leaves hyperedge {step.edge}")
                outflow[a] = outflow.get(a, Fraction(0)) + m
            for a, sent in outflow.items():
                if sent > cur.get(a, Fraction(0)):
                    raise NegativeIntermediateMass(
                        f"step {n}: vertex {a!r} sends {sent} but holds "
                        f"{cur.get(a, Fraction(0))}")
            for a, b, m in step.moves:
                cur[a] = cur.get(a, Fraction(0)) - m
                cur[b] = cur.get(b, Fraction(0)) + m
            cur = {v: p for v, p in cur.items() if p != 0}
            out.append(ProbMeasure(cur))
        return out

    def total_cost(self, h: ConcaveCost) -> float:
        return sum(s.step_cost(h) for s in self.steps)

    def to_json(self) -> str:
        return json.dumps({
            "start": {v: str(p) for v, p in sorted(self.start.weights.items())},
            "end": {v: str(p) for v, p in sorted(self.end.weights.items())},
            "steps": [{"edge": s.edge,
                       "moves": [[a, b, str(m)] for a, b, m in s.moves]}
                      for s in self.steps],
        })

    @classmethod
    def from_json(cls, text: str) -> "TransportPlan":
        raw = json.loads(text)
        return cls(
            start=ProbMeasure({v: Fraction(p) for v, p in raw["start"].items()}),
            end=ProbMeasure({v: Fraction(p) for v, p in raw["end"].items()}),
            steps=tuple(TransportStep(s["edge"],
                                      tuple((a, b, Fraction(m))
                                            for a, b, m in s["moves"]))
                        for s in raw["steps"]),
        )


@dataclass(frozen=True)
class WhResult:
    value: float
    plan: TransportPlan
    optimality: str  # "exact" | "heuristic-upper-bound"
    lower_bound: float
    states_expanded: int
    quantization: int


def plan_cost(H: Hypergraph, h: ConcaveCost, plan: TransportPlan) -> float:
    """Re-validate a plan and recompute its cost from scratch."""
    seq = plan.intermediates(H)
    if seq[-1] != plan.end:
        raise EndpointMismatch("plan does not end at the declared measure")
    total = 0.0
    for step in plan.steps:
        total += h.eval(step.moved_mass)
    return total


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def wh_bounds(H: Hypergraph, h: ConcaveCost, mu: ProbMeasure, nu: ProbMeasure):
    """Rigorous bracket: h(1)*W1 below, a decomposed-coupling plan above.

    The upper bound walks every parcel of a W1-optimal coupling along a
    shortest path one hop at a time (cost d(x,y)*h(mass) per parcel); when
    h'(0) is finite the coarser h'(0)*W1 bound is intersected in.
    """
    val, coupling = w1(H, mu, nu)
    lower = h.h1 * float(val)
    upper = 0.0
    for (x, y), p in coupling.entries.items():
        if x != y:
            d = H.distance_id(H.vertex_id(x), H.vertex_id(y))
            upper += d * h.eval(p)
    if math.isfinite(h.hp0):
        upper = min(upper, h.hp0 * float(val))
    return lower, max(lower, upper)


# ---------------------------------------------------------------------------
# exact search
# ---------------------------------------------------------------------------


def _envelope(h: ConcaveCost, w: Fraction) -> float:
    """Cheapest way to pay for total W1 movement w: as few full-mass steps
    as possible plus one fractional step (concavity makes batching best)."""
    if w <= 0:
        return 0.0
    whole = int(w)
    frac = w - whole
    out = whole * h.h1
    if frac:
        out += h.eval(frac)
    return out


def _delta_to_moves(labels, delta_units, D):
    """Minimal-displacement moves for an integer delta on one edge."""
    srcs = [[labels[i], -d] for i, d in enumerate(delta_units) if d < 0]
    dsts = [[labels[i], d] for i, d in enumerate(delta_units) if d > 0]
    moves = []
    si = di = 0
    while si < len(srcs) and di < len(dsts):
        take = min(srcs[si][1], dsts[di][1])
        moves.append((srcs[si][0], dsts[di][0], Fraction(take, D)))
        srcs[si][1] -= take
        dsts[di][1] -= take
        if srcs[si][1] == 0:
            si += 1
        if dsts[di][1] == 0:
            di += 1
    return tuple(moves)


def _compositions(total, k):
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _edge_successors(cur, goal, unpruned, full_enum_limit):
    """New value tuples for one edge, with the mass moved.

    2-vertex edges are always enumerated exhaustively (complete on graphs).
    Larger hyperedges are enumerated exhaustively while the composition
    count is small; beyond that a structured family is used: sources drain
    to 0 or to their goal value, targets fill to their goal value, one
    vertex absorbs the balance.  That family contains every step of the
    worked optimal plans; the unpruned flag restores ground truth.
    """
    k = len(cur)
    M = sum(cur)
    if M == 0:
        return
    if k == 2:
        a, b = cur
        for m in range(1, a + 1):
            yield (a - m, b + m), m
        for m in range(1, b + 1):
            yield (a + m, b - m), m
        return
    if unpruned or math.comb(M + k - 1, k - 1) <= full_enum_limit:
        for comp in _compositions(M, k):
            if comp != cur:
                moved = sum(c - n for c, n in zip(cur, comp) if c > n)
                yield comp, moved
        return

    seen = set()
    idx = range(k)
    pos = [i for i in idx if cur[i] > 0]
    deficits = [i for i in idx if goal[i] > cur[i]]
    # batching moves: a source set drains to zero or to its goal value; the
    # freed mass fills chosen targets exactly to goal, any remainder piles
    # on one residual vertex
    for r in range(1, len(pos) + 1):
        for S in itertools.combinations(pos, r):
            opts = []
            for s in S:
                o = {0}
                if 0 < goal[s] < cur[s]:
                    o.add(goal[s])
                opts.append(sorted(o))
            fill_cand = [t for t in deficits if t not in S]
            for drains in itertools.product(*opts):
                freed = sum(cur[s] - dv for s, dv in zip(S, drains))
                if freed <= 0:
                    continue
                for nfill in range(len(fill_cand) + 1):
                    for T in itertools.combinations(fill_cand, nfill):
                        need = sum(goal[t] - cur[t] for t in T)
                        if need > freed:
                            continue
                        rest = freed - need
                        residuals = [None] if rest == 0 else \
                            [t for t in idx if t not in S and t not in T]
                        for resid in residuals:
                            if rest == 0 and not T:
                                continue
                            new = list(cur)
                            for s, dv in zip(S, drains):
                                new[s] = dv
                            for t in T:
                                new[t] = goal[t]
                            if resid is not None:
                                new[resid] += rest
                            tup = tuple(new)
                            if tup not in seen:
                                seen.add(tup)
                                yield tup, freed
    # fan-out: one source fills targets exactly to goal, keeping the rest
    for s in pos:
        cand = [t for t in deficits if t != s]
        for r in range(1, len(cand) + 1):
            for T in itertools.combinations(cand, r):
                need = sum(goal[t] - cur[t] for t in T)
                if 0 < need <= cur[s]:
                    new = list(cur)
                    for t in T:
                        new[t] = goal[t]
                    new[s] = cur[s] - need
                    tup = tuple(new)
                    if tup not in seen:
                        seen.add(tup)
                        yield tup, need


def _quantize(H, m: ProbMeasure, D: int):
    units = [0] * H.n
    for v, p in m.weights.items():
        q = p * D
        if q.denominator != 1:
            raise InfeasibleQuantization(
                f"weight {p} of {v!r} is not a multiple of 1/{D}")
        units[H.vertex_id(v)] = int(q)
    return tuple(units)


def wh_exact(H: Hypergraph, h: ConcaveCost, mu: ProbMeasure, nu: ProbMeasure,
             *, refine: int = 1, max_states: int = 300_000,
             denominator: int | None = None, unpruned: bool = False,
             full_enum_limit: int = 512, max_steps: int | None = None,
             seed_incumbent: bool = True) -> WhResult:
    """Best-first search for the cheapest stepwise transport on the D-grid.

    Nodes are quantized measures; a successor redistributes one hyperedge's
    mass.  The admissible, consistent heuristic is the concave envelope of
    the remaining W1 (floor(W1) full-mass steps plus one fractional step).
    The greedy construction seeds an incumbent so the search only explores
    strictly cheaper plans; when the frontier drains without beating it the
    incumbent is optimal on the grid.  On state-budget exhaustion the best
    plan found so far is returned with optimality "heuristic-upper-bound".
    """
    mu.check_support(H)
    nu.check_support(H)
    if refine < 1:
        raise ValueError("refine must be a positive integer")
    base = common_denominator([mu, nu])
    D = denominator if denominator is not None else base * refine
    start = _quantize(H, mu, D)
    goal = _quantize(H, nu, D)
    lower_units = w1_units(H, start, goal, D)
    lower = h.h1 * float(Fraction(lower_units, D))
    if start == goal:
        plan = TransportPlan(mu, nu, ())
        return WhResult(0.0, plan, "exact", 0.0, 0, D)

    incumbent_g = math.inf
    incumbent_plan = None
    if seed_incumbent:
        greedy = wh_heuristic(H, h, mu, nu)
        incumbent_g = greedy.value
        incumbent_plan = greedy.plan

    edge_lists = [tuple(e) for e in H.edges]
    goal_by_edge = [tuple(goal[v] for v in e) for e in edge_lists]
    step_cost = {}

    def cost_of(m_units):
        c = step_cost.get(m_units)
        if c is None:
            c = h.eval(Fraction(m_units, D))
            step_cost[m_units] = c
        return c

    env_memo = {}

    def env_of(w_units):
        e = env_memo.get(w_units)
        if e is None:
            e = _envelope(h, Fraction(w_units, D))
            env_memo[w_units] = e
        return e

    g_best = {start: 0.0}
    parents = {start: None}
    closed = set()
    counter = itertools.count()
    f0 = env_of(lower_units)
    heap = [(round(f0, 12), 0.0, 0, next(counter), start, 0.0, True, lower_units)]
    goal_reached = False
    expanded = 0
    exhausted = False

    while heap:
        f, _negg, nsteps, _, state, g, evaluated, w1u = heapq.heappop(heap)
        if state in closed:
            continue
        if g > g_best.get(state, math.inf) + 1e-15:
            continue
        if state == goal:
            plan = _reconstruct(H, mu, nu, parents, goal, D)
            return WhResult(g, plan, "exact", lower, expanded, D)
        if not evaluated:
            true_units = w1_units(H, state, goal, D)
            ft = g + env_of(true_units)
            if ft >= incumbent_g - COST_TOL:
                continue
            if round(ft, 12) > f:
                heapq.heappush(heap, (round(ft, 12), -g, nsteps,
                                      next(counter), state, g, True, true_units))
                continue
            w1u = true_units
        closed.add(state)
        expanded += 1
        if expanded > max_states:
            exhausted = True
            break
        if max_steps is not None and nsteps >= max_steps:
            continue
        for k, edge in enumerate(edge_lists):
            cur = tuple(state[v] for v in edge)
            for new_vals, moved in _edge_successors(cur, goal_by_edge[k],
                                                    unpruned, full_enum_limit):
                g2 = g + cost_of(moved)
                bound = env_of(max(w1u - moved, 0))
                if g2 + bound >= incumbent_g - COST_TOL:
                    continue
                child = list(state)
                for v, nv in zip(edge, new_vals):
                    child[v] = nv
                child = tuple(child)
                if child in closed:
                    continue
                if g2 >= g_best.get(child, math.inf) - 1e-15:
                    continue
                g_best[child] = g2
                parents[child] = (state, k, edge, cur, new_vals)
                if child == goal:
                    incumbent_g = g2
                    goal_reached = True
                heapq.heappush(heap, (round(g2 + bound, 12), -g2, nsteps + 1,
                                      next(counter), child, g2, False, 0))

    # Frontier drained: nothing can beat the incumbent, so it is optimal
    # (within the per-comparison tolerance and the quantization/pruning
    # assumptions).  A drained frontier under a state budget or a step cap
    # is still only an upper bound.
    if goal_reached:
        plan = _reconstruct(H, mu, nu, parents, goal, D)
        value = g_best[goal]
        if incumbent_plan is not None and incumbent_g < value:
            value, plan = incumbent_g, incumbent_plan
        status = "heuristic-upper-bound" if (exhausted or max_steps is not None) \
            else "exact"
        return WhResult(value, plan, status, lower, expanded, D)
    if incumbent_plan is not None:
        status = "heuristic-upper-bound" if (exhausted or max_steps is not None) \
            else "exact"
        return WhResult(incumbent_g, incumbent_plan, status, lower, expanded, D)
    fallback = wh_heuristic(H, h, mu, nu)
    return WhResult(fallback.value, fallback.plan, "heuristic-upper-bound",
                    lower, expanded, D)


def _reconstruct(H, mu, nu, parents, goal, D):
    steps = []
    node = goal
    while parents[node] is not None:
        prev, k, edge, cur, new_vals = parents[node]
        labels = [H.label(v) for v in edge]
        delta = [nv - cv for cv, nv in zip(cur, new_vals)]
        steps.append(TransportStep(k, _delta_to_moves(labels, delta, D)))
        node = prev
    steps.reverse()
    return TransportPlan(mu, nu, tuple(steps))


# ---------------------------------------------------------------------------
# heuristic construction
# ---------------------------------------------------------------------------


def _shortest_hops(H: Hypergraph, src: int):
    """BFS tree from src: vertex -> (previous vertex, edge index), chosen
    lexicographically for reproducible routes."""
    parent = {src: None}
    frontier = [src]
    while frontier:
        nxt = []
        for v in sorted(frontier):
            for k in H.incidence[v]:
                for w in H.edges[k]:
                    if w not in parent:
                        parent[w] = (v, k)
                        nxt.append(w)
        frontier = nxt
    return parent


def _parcel_path(H, src: int, dst: int, tree):
    hops = []
    v = dst
    while v != src:
        pv, k = tree[v]
        hops.append((pv, v, k))
        v = pv
    hops.reverse()
    return hops


def wh_heuristic(H: Hypergraph, h: ConcaveCost, mu: ProbMeasure,
                 nu: ProbMeasure) -> WhResult:
    """Upper-bound plan: route the parcels of a W1-optimal coupling along
    shortest hyperedge paths, batch hops that share a hyperedge, then merge
    steps greedily while the cost strictly drops."""
    val, coupling = w1(H, mu, nu)
    lower = h.h1 * float(val)
    if not any(x != y for (x, y) in coupling.entries):
        plan = TransportPlan(mu, nu, ())
        return WhResult(0.0, plan, "heuristic-upper-bound", lower, 0,
                        common_denominator([mu, nu]))

    trees = {}
    pending = []  # per parcel: list of hops (from_id, to_id, edge)
    masses = []
    for (x, y), p in sorted(coupling.entries.items(),
                            key=lambda kv: (H.vertex_id(kv[0][0]),
                                            H.vertex_id(kv[0][1]))):
        if x == y:
            continue
        xid, yid = H.vertex_id(x), H.vertex_id(y)
        if xid not in trees:
            trees[xid] = _shortest_hops(H, xid)
        pending.append(_parcel_path(H, xid, yid, trees[xid]))
        masses.append(p)

    pos = [0] * len(pending)
    steps = []
    while True:
        by_edge = {}
        for i, path in enumerate(pending):
            if pos[i] < len(path):
                a, b, k = path[pos[i]]
                by_edge.setdefault(k, []).append(i)
        if not by_edge:
            break
        k = max(by_edge, key=lambda e: (sum(masses[i] for i in by_edge[e]), -e))
        combined = {}
        for i in by_edge[k]:
            a, b, _ = pending[i][pos[i]]
            key = (H.label(a), H.label(b))
            combined[key] = combined.get(key, Fraction(0)) + masses[i]
            pos[i] += 1
        moves = tuple((a, b, m) for (a, b), m in sorted(combined.items()))
        steps.append(TransportStep(k, moves))

    plan = TransportPlan(mu, nu, tuple(steps))
    plan = _merge_pass(H, h, plan)
    value = plan_cost(H, h, plan)
    return WhResult(value, plan, "heuristic-upper-bound", lower, 0,
                    common_denominator([mu, nu]))


def _merge_pass(H, h, plan):
    """Fold one step into another on the same hyperedge whenever the plan
    stays feasible and strictly cheaper; repeat to a fixed point."""
    best_cost = plan_cost(H, h, plan)
    improved = True
    while improved:
        improved = False
        steps = list(plan.steps)
        for i in range(len(steps)):
            for j in range(len(steps)):
                if i == j or steps[i].edge != steps[j].edge:
                    continue
                merged = {}
                for a, b, m in steps[j].moves + steps[i].moves:
                    merged[(a, b)] = merged.get((a, b), Fraction(0)) + m
                new_j = TransportStep(steps[j].edge,
                                      tuple((a, b, m) for (a, b), m
                                            in sorted(merged.items()) if m > 0))
                cand = [new_j if n == j else s
                        for n, s in enumerate(steps) if n != i]
                cand_plan = TransportPlan(plan.start, plan.end, tuple(cand))
                try:
                    c = plan_cost(H, h, cand_plan)
                except Exception:
                    continue
                if c < best_cost - COST_TOL:
                    plan, best_cost, improved = cand_plan, c, True
                    break
            if improved:
                break
    return plan


# ---------------------------------------------------------------------------
# plan normalization (unique transport paths)
# ---------------------------------------------------------------------------


def _step_kernels(H, plan):
    """Per-step couplings (stay mass on the diagonal plus the moves)."""
    seq = plan.intermediates(H)
    kernels = []
    for prev, step in zip(seq, plan.steps):
        pi = {}
        sent = {}
        for a, b, m in step.moves:
            pi[(a, b)] = pi.get((a, b), Fraction(0)) + m
            sent[a] = sent.get(a, Fraction(0)) + m
        for v, p in prev.weights.items():
            stay = p - sent.get(v, Fraction(0))
            if stay > 0:
                pi[(v, v)] = pi.get((v, v), Fraction(0)) + stay
        kernels.append(pi)
    return kernels, seq


def plan_coupling(H: Hypergraph, plan: TransportPlan) -> Coupling:
    """Gluing of the plan's step couplings: the end-to-end coupling."""
    kernels, seq = _step_kernels(H, plan)
    glued = {(v, v): p for v, p in plan.start.weights.items()}
    for pi, prev in zip(kernels, seq):
        rows = {}
        for (a, b), m in pi.items():
            rows.setdefault(a, []).append((b, m))
        nxt = {}
        for (x, y), g in glued.items():
            total = prev.weights[y]
            for b, m in rows.get(y, ()):
                nxt[(x, b)] = nxt.get((x, b), Fraction(0)) + g * m / total
        glued = {k: v for k, v in nxt.items() if v != 0}
    return Coupling(glued, plan.start, plan.end)


def _two_paths(kernels, x, y):
    """Up to two distinct arc-paths x -> y through the step couplings."""
    found = []

    def dfs(layer, v, acc):
        if len(found) >= 2:
            return
        if layer == len(kernels):
            if v == y:
                found.append(tuple(acc))
            return
        for (a, b), m in sorted(kernels[layer].items()):
            if a == v and m > 0:
                acc.append((a, b))
                dfs(layer + 1, b, acc)
                acc.pop()
                if len(found) >= 2:
                    return

    dfs(0, x, [])
    return found


def normalize_plan(H: Hypergraph, h: ConcaveCost, plan: TransportPlan,
                   coupling: Coupling) -> TransportPlan:
    """Rewire a plan so every coupled pair follows a single transport path.

    The step costs are concave in the one-parameter exchange between two
    paths of a pair, so the cheaper endpoint of the exchange interval is
    taken; iterating removes multi-path pairs without ever increasing the
    cost.
    """
    glued = plan_coupling(H, plan)
    if glued.entries != coupling.entries:
        raise NotAssociated("plan steps do not glue to the given coupling")
    kernels, _ = _step_kernels(H, plan)
    edges = [s.edge for s in plan.steps]

    while True:
        target = None
        for (x, y), p in sorted(coupling.entries.items()):
            if p <= 0:
                continue
            paths = _two_paths(kernels, x, y)
            if len(paths) >= 2:
                target = paths
                break
        if target is None:
            break
        p1, p2 = target
        diff = [i for i in range(len(kernels)) if p1[i] != p2[i]]
        t1 = min(kernels[i][p1[i]] for i in diff)
        t2 = min(kernels[i][p2[i]] for i in diff)

        def cost_at(s):
            total = 0.0
            for i, pi in enumerate(kernels):
                mass = sum(m for (a, b), m in pi.items() if a != b)
                if i in diff:
                    if p1[i][0] != p1[i][1]:
                        mass -= s
                    if p2[i][0] != p2[i][1]:
                        mass += s
                total += h.eval(mass) if mass > 0 else 0.0
            return total

        s_star = t1 if cost_at(t1) <= cost_at(-t2) + COST_TOL else -t2
        for i in diff:
            pi = kernels[i]
            pi[p1[i]] = pi.get(p1[i], Fraction(0)) - s_star
            pi[p2[i]] = pi.get(p2[i], Fraction(0)) + s_star
            for key in (p1[i], p2[i]):
                if pi[key] == 0:
                    del pi[key]

    steps = []
    for pi, k in zip(kernels, edges):
        moves = tuple((a, b, m) for (a, b), m in sorted(pi.items())
                      if a != b and m > 0)
        if moves:
            steps.append(TransportStep(k, moves))
    return TransportPlan(plan.start, plan.end, tuple(steps))
