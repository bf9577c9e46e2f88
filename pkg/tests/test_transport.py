"""Stepwise-transport plans, bounds, the exact solver and normalization."""

import math
import random
from fractions import Fraction

import pytest

from hypercurv import (
    ConcaveCost,
    TransportPlan,
    TransportStep,
    dirac,
    generate,
    lazy_random_walk,
    normalize_plan,
    plan_cost,
    plan_coupling,
    w1,
    wh_bounds,
    wh_exact,
    wh_heuristic,
)
from hypercurv.errors import (
    EndpointMismatch,
    InfeasibleQuantization,
    NegativeIntermediateMass,
    NotAssociated,
    StepLeavesHyperedge,
)
from hypercurv.transport import _step_kernels

from conftest import (
    grid9_spread_plan,
    ladder_route_a,
    ladder_route_b,
    ladder_walks,
    random_hypergraph,
    random_measure,
)

H_LOG = ConcaveCost("log", a=1)
H_LIN = ConcaveCost("linear", a=1)
H_TRUNC = ConcaveCost("truncation", a=Fraction(1, 2))


class TestPlanCost:
    @pytest.mark.parametrize("d,alpha", [(3, Fraction(9, 10)),
                                         (4, Fraction(3, 4)),
                                         (5, Fraction(7, 8))])
    def test_ladder_route_a_formula(self, d, alpha):
        H = generate("ladder", d)
        plan = ladder_route_a(H, d, alpha)
        b = 1 - alpha
        for h in (H_LOG, H_TRUNC):
            want = (d * h.eval(b / 2) + 2 * h.eval(alpha)
                    + (d - 2) * h.eval(1 - b / 2))
            assert plan_cost(H, h, plan) == pytest.approx(want, abs=1e-12)

    @pytest.mark.parametrize("d,alpha", [(3, Fraction(9, 10)),
                                         (4, Fraction(3, 4))])
    def test_ladder_route_b_formula(self, d, alpha):
        H = generate("ladder", d)
        plan = ladder_route_b(H, d, alpha)
        b = 1 - alpha
        for h in (H_LOG, H_TRUNC):
            want = (2 * h.eval(b / 2) + 2 * h.eval(1 - b / 2)
                    + (d - 2) * h.h1)
            assert plan_cost(H, h, plan) == pytest.approx(want, abs=1e-12)

    def test_empty_plan(self):
        H = generate("complete", 3)
        mu = dirac(H, "v0")
        plan = TransportPlan(mu, mu, ())
        assert plan_cost(H, H_LOG, plan) == 0.0

    def test_step_leaves_hyperedge(self):
        H = generate("path", 2)
        plan = TransportPlan(dirac(H, "v0"), dirac(H, "v2"),
                             (TransportStep(0, (("v0", "v2", Fraction(1)),)),))
        with pytest.raises(StepLeavesHyperedge):
            plan_cost(H, H_LOG, plan)

    def test_negative_intermediate(self):
        H = generate("path", 2)
        plan = TransportPlan(
            dirac(H, "v0"), dirac(H, "v2"),
            (TransportStep(1, (("v1", "v2", Fraction(1)),)),
             TransportStep(0, (("v0", "v1", Fraction(1)),))))
        with pytest.raises(NegativeIntermediateMass):
            plan_cost(H, H_LOG, plan)

    def test_endpoint_mismatch(self):
        H = generate("path", 2)
        plan = TransportPlan(dirac(H, "v0"), dirac(H, "v2"),
                             (TransportStep(0, (("v0", "v1", Fraction(1)),)),))
        with pytest.raises(EndpointMismatch):
            plan_cost(H, H_LOG, plan)

    def test_cancelling_moves_cost_net_mass(self):
        # a step may shuffle mass both ways; only the net difference costs
        H = generate("complete", 3)
        mu = lazy_random_walk(H, "v0", Fraction(1, 2))
        plan = TransportPlan(mu, mu, (TransportStep(
            0, (("v0", "v1", Fraction(1, 4)), ("v1", "v0", Fraction(1, 4)))),))
        assert plan_cost(H, H_LOG, plan) == 0.0


class TestBounds:
    def test_dirac_pair_tight(self):
        H = generate("cycle", 6)
        lo, hi = wh_bounds(H, H_LOG, dirac(H, "v0"), dirac(H, "v3"))
        assert lo == pytest.approx(3 * H_LOG.h1, abs=1e-12)
        assert hi == pytest.approx(3 * H_LOG.h1, abs=1e-12)

    def test_equal_measures(self):
        H = generate("cycle", 6)
        m = lazy_random_walk(H, "v0", Fraction(1, 3))
        assert wh_bounds(H, H_LOG, m, m) == (0.0, 0.0)

    def test_k3_bracket(self):
        H = generate("complete", 3)
        mu = lazy_random_walk(H, "v0", Fraction(1, 2))
        nu = lazy_random_walk(H, "v1", Fraction(1, 2))
        lo, hi = wh_bounds(H, H_LOG, mu, nu)
        wh = wh_exact(H, H_LOG, mu, nu).value
        assert lo == pytest.approx(math.log(2) / 4, abs=1e-12)
        assert lo <= wh <= hi <= H_LOG.hp0 * 0.25 + 1e-12

    def test_power_family_still_bracketed(self):
        H = generate("cycle", 5)
        h = ConcaveCost("power", a=Fraction(1, 2))
        mu = lazy_random_walk(H, "v0", Fraction(1, 2))
        nu = lazy_random_walk(H, "v1", Fraction(1, 2))
        lo, hi = wh_bounds(H, h, mu, nu)
        assert math.isfinite(hi)
        wh = wh_exact(H, h, mu, nu).value
        assert lo - 1e-12 <= wh <= hi + 1e-12


class TestExact:
    def test_k3_log_closed_form(self):
        H = generate("complete", 3)
        mu = lazy_random_walk(H, "v0", Fraction(1, 2))
        nu = lazy_random_walk(H, "v1", Fraction(1, 2))
        res = wh_exact(H, H_LOG, mu, nu)
        assert res.value == pytest.approx(math.log(5 / 4), abs=1e-12)
        assert res.optimality == "exact"

    def test_dirac_path_two_full_steps(self):
        H = generate("path", 2)
        res = wh_exact(H, H_LOG, dirac(H, "v0"), dirac(H, "v2"))
        assert res.value == pytest.approx(2 * H_LOG.h1, abs=1e-12)
        assert len(res.plan.steps) == 2
        assert all(s.moved_mass == 1 for s in res.plan.steps)

    def test_ladder_route_b_selected(self):
        H = generate("ladder", 3)
        mu, nu = ladder_walks(H, 3, Fraction(9, 10))
        res = wh_exact(H, H_TRUNC, mu, nu)
        assert res.value == pytest.approx(1.6, abs=1e-9)

    def test_plan_revalidates(self):
        rng = random.Random(41)
        for _ in range(15):
            H = random_hypergraph(rng)
            mu = random_measure(rng, H)
            nu = random_measure(rng, H)
            res = wh_exact(H, H_LOG, mu, nu)
            assert plan_cost(H, H_LOG, res.plan) == pytest.approx(
                res.value, abs=1e-12)
            assert res.plan.start == mu and res.plan.end == nu

    def test_linear_equals_scaled_w1(self):
        rng = random.Random(42)
        h = ConcaveCost("linear", a=Fraction(3, 2))
        for _ in range(15):
            H = random_hypergraph(rng)
            mu = random_measure(rng, H)
            nu = random_measure(rng, H)
            val = w1(H, mu, nu)[0]
            res = wh_exact(H, h, mu, nu)
            assert res.value == pytest.approx(1.5 * float(val), abs=1e-12)

    def test_symmetry(self, rng):
        for _ in range(10):
            H = random_hypergraph(rng)
            mu = random_measure(rng, H)
            nu = random_measure(rng, H)
            a = wh_exact(H, H_LOG, mu, nu).value
            b = wh_exact(H, H_LOG, nu, mu).value
            assert a == pytest.approx(b, abs=1e-12)

    def test_triangle_at_shared_denominator(self, rng):
        from hypercurv import common_denominator

        for _ in range(8):
            H = random_hypergraph(rng)
            a = random_measure(rng, H)
            b = random_measure(rng, H)
            c = random_measure(rng, H)
            D = common_denominator([a, b, c])
            ab = wh_exact(H, H_LOG, a, b, denominator=D).value
            bc = wh_exact(H, H_LOG, b, c, denominator=D).value
            ac = wh_exact(H, H_LOG, a, c, denominator=D).value
            assert ac <= ab + bc + 1e-9

    def test_identity_of_indiscernibles(self, rng):
        H = random_hypergraph(rng)
        mu = random_measure(rng, H)
        res = wh_exact(H, H_LOG, mu, mu)
        assert res.value == 0.0 and res.plan.steps == ()
        nu = random_measure(rng, H)
        if nu != mu:
            assert wh_exact(H, H_LOG, mu, nu).value > 0

    def test_grid_stability_refine(self):
        # doubling the quantization grid must not change the optimum
        for alpha in (Fraction(1, 4), Fraction(3, 4)):
            for H, x, y in [(generate("complete", 4), "v0", "v1"),
                            (generate("cycle", 6), "v0", "v1"),
                            (generate("path", 3), "v0", "v3")]:
                mu = lazy_random_walk(H, x, alpha)
                nu = lazy_random_walk(H, y, alpha)
                v1_ = wh_exact(H, H_LOG, mu, nu, refine=1).value
                v2_ = wh_exact(H, H_LOG, mu, nu, refine=2).value
                assert v1_ == pytest.approx(v2_, abs=1e-9)

    def test_unpruned_matches_default(self, rng):
        for _ in range(12):
            H = random_hypergraph(rng)
            mu = random_measure(rng, H, max_denominator=8)
            nu = random_measure(rng, H, max_denominator=8)
            full = wh_exact(H, H_LOG, mu, nu, unpruned=True)
            fast = wh_exact(H, H_LOG, mu, nu, full_enum_limit=0)
            assert full.value == pytest.approx(fast.value, abs=1e-12)

    def test_structured_family_matches_ground_truth(self):
        # the step family used beyond the exhaustive-enumeration threshold
        # must reproduce exhaustive optima across cost families
        rng = random.Random(314159)
        costs = [H_LOG, H_TRUNC, ConcaveCost("trunc_log_combo", a=Fraction(1, 2)),
                 ConcaveCost("power", a=Fraction(1, 2))]
        for trial in range(40):
            H = random_hypergraph(rng)
            mu = random_measure(rng, H, max_denominator=8)
            nu = random_measure(rng, H, max_denominator=8)
            h = costs[trial % len(costs)]
            full = wh_exact(H, h, mu, nu, unpruned=True)
            fast = wh_exact(H, h, mu, nu, full_enum_limit=0)
            assert fast.value == pytest.approx(full.value, abs=1e-9)

    def test_budget_exhaustion_flagged(self):
        H = generate("grid9")
        mu = lazy_random_walk(H, "x", Fraction(9, 10))
        nu = lazy_random_walk(H, "y", Fraction(9, 10))
        res = wh_exact(H, H_LOG, mu, nu, max_states=5)
        assert res.optimality == "heuristic-upper-bound"
        assert plan_cost(H, H_LOG, res.plan) == pytest.approx(res.value,
                                                              abs=1e-12)
        assert res.value >= res.lower_bound - 1e-12

    def test_infeasible_quantization(self):
        H = generate("complete", 3)
        mu = lazy_random_walk(H, "v0", Fraction(1, 3))
        nu = lazy_random_walk(H, "v1", Fraction(1, 3))
        with pytest.raises(InfeasibleQuantization):
            wh_exact(H, H_LOG, mu, nu, denominator=4)

    def test_max_steps_caps_plan_length(self):
        H = generate("path", 3)
        res = wh_exact(H, H_LOG, dirac(H, "v0"), dirac(H, "v3"), max_steps=5)
        assert res.value == pytest.approx(3 * H_LOG.h1, abs=1e-12)
        assert len(res.plan.steps) <= 5


class TestHeuristic:
    def test_lower_bound_respected(self, rng):
        for _ in range(15):
            H = random_hypergraph(rng)
            mu = random_measure(rng, H)
            nu = random_measure(rng, H)
            res = wh_heuristic(H, H_LOG, mu, nu)
            assert res.value >= res.lower_bound - 1e-12
            assert res.optimality == "heuristic-upper-bound"

    def test_matches_exact_on_k3(self):
        H = generate("complete", 3)
        mu = lazy_random_walk(H, "v0", Fraction(1, 2))
        nu = lazy_random_walk(H, "v1", Fraction(1, 2))
        res = wh_heuristic(H, H_LOG, mu, nu)
        assert res.value == pytest.approx(math.log(5 / 4), abs=1e-9)

    def test_grid9_beats_spread_plan(self):
        H = generate("grid9")
        alpha = Fraction(9, 10)
        mu, nu = (lazy_random_walk(H, v, alpha) for v in ("x", "y"))
        res = wh_heuristic(H, H_LOG, mu, nu)
        spread = plan_cost(H, H_LOG, grid9_spread_plan(H, alpha))
        assert res.value <= spread + 1e-12

    def test_plan_revalidates(self, rng):
        for _ in range(10):
            H = random_hypergraph(rng)
            mu = random_measure(rng, H)
            nu = random_measure(rng, H)
            res = wh_heuristic(H, H_LOG, mu, nu)
            assert plan_cost(H, H_LOG, res.plan) == pytest.approx(res.value,
                                                                  abs=1e-12)


class TestSandwich:
    def test_random_suite(self):
        rng = random.Random(2024)
        for trial in range(60):
            H = random_hypergraph(rng)
            mu = random_measure(rng, H)
            nu = random_measure(rng, H)
            val = float(w1(H, mu, nu)[0])
            res = wh_exact(H, H_LOG, mu, nu)
            heur = wh_heuristic(H, H_LOG, mu, nu)
            assert H_LOG.h1 * val - 1e-12 <= res.value
            assert res.value <= H_LOG.hp0 * val + 1e-12
            assert res.value <= heur.value + 1e-12


class TestPlanJson:
    def test_round_trip_bit_exact(self):
        H = generate("ladder", 3)
        plan = ladder_route_b(H, 3, Fraction(9, 10))
        text = plan.to_json()
        again = TransportPlan.from_json(text)
        assert again == plan
        assert '"1/20"' in text
        assert plan_cost(H, H_TRUNC, again) == plan_cost(H, H_TRUNC, plan)


class TestNormalize:
    def test_identity_on_single_path_plan(self):
        H = generate("path", 2)
        res = wh_exact(H, H_LOG, dirac(H, "v0"), dirac(H, "v2"))
        coup = plan_coupling(H, res.plan)
        out = normalize_plan(H, H_LOG, res.plan, coup)
        assert out == res.plan

    def _split_plan_c4(self):
        H = generate("cycle", 4)
        mu, nu = dirac(H, "v0"), dirac(H, "v2")
        half = Fraction(1, 2)
        e = lambda a, b: H.edges.index(tuple(sorted((H.vertex_id(a),
                                                     H.vertex_id(b)))))
        plan = TransportPlan(mu, nu, (
            TransportStep(e("v0", "v1"), (("v0", "v1", half),)),
            TransportStep(e("v0", "v3"), (("v0", "v3", half),)),
            TransportStep(e("v1", "v2"), (("v1", "v2", half),)),
            TransportStep(e("v3", "v2"), (("v3", "v2", half),)),
        ))
        return H, plan

    def test_parallel_split_collapses(self):
        H, plan = self._split_plan_c4()
        coup = plan_coupling(H, plan)
        assert coup.entries == {("v0", "v2"): Fraction(1)}
        out = normalize_plan(H, H_LOG, plan, coup)
        cost_in = plan_cost(H, H_LOG, plan)
        cost_out = plan_cost(H, H_LOG, out)
        assert cost_out <= cost_in + 1e-12
        assert cost_out == pytest.approx(2 * H_LOG.h1, abs=1e-12)
        assert len(out.steps) == 2

    def test_endpoint_choice_on_asymmetric_split(self):
        # routes of length 2 and 3 around a 5-cycle; the cheaper endpoint
        # of the exchange family keeps the short route
        H = generate("cycle", 5)
        mu, nu = dirac(H, "v0"), dirac(H, "v2")
        half = Fraction(1, 2)
        e = lambda a, b: H.edges.index(tuple(sorted((H.vertex_id(a),
                                                     H.vertex_id(b)))))
        plan = TransportPlan(mu, nu, (
            TransportStep(e("v0", "v1"), (("v0", "v1", half),)),
            TransportStep(e("v0", "v4"), (("v0", "v4", half),)),
            TransportStep(e("v1", "v2"), (("v1", "v2", half),)),
            TransportStep(e("v4", "v3"), (("v4", "v3", half),)),
            TransportStep(e("v3", "v2"), (("v3", "v2", half),)),
        ))
        coup = plan_coupling(H, plan)
        out = normalize_plan(H, H_LOG, plan, coup)
        # endpoints cost 2h(1) (short route) vs 3h(1) (long route)
        assert plan_cost(H, H_LOG, out) == pytest.approx(2 * H_LOG.h1,
                                                         abs=1e-12)
        assert len(out.steps) == 2

    def test_transport_path_mass_bound(self):
        H, plan = self._split_plan_c4()
        coup = plan_coupling(H, plan)
        out = normalize_plan(H, H_LOG, plan, coup)
        kernels, _ = _step_kernels(H, out)
        # the unique path of the single coupled pair carries at least its mass
        for pi in kernels:
            assert max(pi.values()) >= Fraction(1)

    def test_idempotent(self):
        H, plan = self._split_plan_c4()
        coup = plan_coupling(H, plan)
        out = normalize_plan(H, H_LOG, plan, coup)
        again = normalize_plan(H, H_LOG, out, plan_coupling(H, out))
        assert again == out

    def test_not_associated(self):
        H, plan = self._split_plan_c4()
        from hypercurv import Coupling

        wrong = Coupling({("v0", "v1"): Fraction(1)}, plan.start, plan.end)
        with pytest.raises(NotAssociated):
            normalize_plan(H, H_LOG, plan, wrong)
