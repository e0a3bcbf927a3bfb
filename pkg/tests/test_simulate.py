import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from chorepick._simplex import maximize
from chorepick.model import ChoreInstance, PickingOrder, PickingSequence, to_sequence
from chorepick.shares import chore_share, mms_oracle
from chorepick.simulate import (evaluate_order, greedy_play, guaranteed_disvalue,
                                nonridge_witness, worst_case_bundle,
                                worst_case_ratio_cs)


def make(ents, costs):
    return ChoreInstance(tuple(F(e) for e in ents),
                         tuple(tuple(F(c) for c in row) for row in costs))


class TestGreedyPlay:
    def test_identical_costs_follow_the_order(self):
        inst = make(["1/2", "1/2"], [[3, 2, 1]] * 2)
        played = greedy_play(to_sequence(PickingOrder((1, 2, 2)), 3), inst)
        assert played.bundle(1) == {1} and played.bundle(2) == {2, 3}

    def test_opposed_preferences(self):
        inst = make(["1/2", "1/2"], [[1, 2, 3], [3, 2, 1]])
        played = greedy_play(PickingSequence((1, 2, 1)), inst)
        assert played.bundle(1) == {1, 2} and played.bundle(2) == {3}
        assert inst.bundle_cost(1, played.bundle(1)) == 3
        assert inst.bundle_cost(2, played.bundle(2)) == 1

    def test_empty_instance(self):
        inst = ChoreInstance((F(1),), ((),))
        assert greedy_play(PickingSequence(()), inst).bundle(1) == frozenset()

    def test_picker_out_of_range(self):
        inst = make(["1"], [[1]])
        with pytest.raises(ValueError, match="out of range"):
            greedy_play(PickingSequence((2,)), inst)


class TestGuaranteedDisvalue:
    def test_worked_example(self):
        assert guaranteed_disvalue([6, 4, 4], [1, 2]) == 8
        assert guaranteed_disvalue([6, 4, 4], [3]) == 6
        assert guaranteed_disvalue([6, 2, 2], [1, 2]) == 4

    def test_all_rounds_give_total(self):
        assert guaranteed_disvalue([5, 1, 2], [1, 2, 3]) == 8

    def test_round_out_of_range(self):
        with pytest.raises(ValueError):
            guaranteed_disvalue([1, 2], [3])


def _lp_oracle(positions, m, cap, budget):
    """Independent exact evaluation of the same LP via the simplex solver."""
    objective = [F(1) if j in set(positions) else F(0) for j in range(1, m + 1)]
    a_ub, b_ub = [], []
    for j in range(m - 1):  # monotone: v[j+1] <= v[j]
        row = [F(0)] * m
        row[j], row[j + 1] = F(-1), F(1)
        a_ub.append(row)
        b_ub.append(F(0))
    top = [F(0)] * m
    top[0] = F(1)
    a_ub.append(top)
    b_ub.append(F(1))
    if cap + 1 <= m:
        mid = [F(0)] * m
        mid[cap] = F(1)
        a_ub.append(mid)
        b_ub.append(F(1, 2))
    a_ub.append([F(1)] * m)
    b_ub.append(F(budget))
    value, _ = maximize(objective, a_ub, b_ub)
    return value


class TestWorstCase:
    def test_single_top_position(self):
        assert worst_case_ratio_cs([1], 2, 4).value == 1

    def test_head_and_tail(self):
        wc = worst_case_ratio_cs([1, 4], 2, 4)
        assert wc.value == F(4, 3)
        assert wc.valuation == (F(1), F(1, 3), F(1, 3), F(1, 3))

    def test_three_agent_head_and_tail(self):
        wc = worst_case_ratio_cs([1, 6], 3, 6)
        assert wc.value == F(7, 5)
        assert wc.valuation == (F(1), F(2, 5), F(2, 5), F(2, 5), F(2, 5), F(2, 5))

    def test_mid_block_vertex_is_found(self):
        # Optimum (3/4, 3/4, 1/2, 0) sits above 1/2 without touching 1.
        wc = worst_case_ratio_cs([2, 3], 2, 4)
        assert wc.value == F(5, 4)
        assert wc.valuation == (F(3, 4), F(3, 4), F(1, 2), F(0))

    def test_empty_positions(self):
        assert worst_case_ratio_cs([], 3, 5).value == 0

    def test_valuation_is_feasible_and_attains(self):
        wc = worst_case_ratio_cs([2, 5, 6], 3, 8)
        v = wc.valuation
        assert all(v[i] >= v[i + 1] for i in range(7))
        assert v[0] <= 1 and v[3] <= F(1, 2) and sum(v) <= 3
        assert sum(v[j - 1] for j in (2, 5, 6)) == wc.value

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_matches_independent_simplex(self, data):
        m = data.draw(st.integers(1, 10))
        n = data.draw(st.integers(1, 4))
        positions = data.draw(st.lists(st.integers(1, m), unique=True, min_size=1))
        mine = worst_case_ratio_cs(positions, n, m).value
        assert mine == _lp_oracle(positions, m, n, F(n))

    @settings(max_examples=25, deadline=None)
    @given(st.data())
    def test_matches_simplex_with_general_budget(self, data):
        m = data.draw(st.integers(1, 9))
        cap = data.draw(st.integers(1, 12))
        budget = data.draw(st.fractions(1, 9, max_denominator=7))
        positions = data.draw(st.lists(st.integers(1, m), unique=True, min_size=1))
        mine = worst_case_bundle(positions, m, cap, budget).value
        assert mine == _lp_oracle(positions, m, min(cap, m), budget)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_random_feasible_points_never_beat_it(self, data):
        m = data.draw(st.integers(2, 10))
        n = data.draw(st.integers(1, 4))
        positions = data.draw(st.lists(st.integers(1, m), unique=True, min_size=1))
        best = worst_case_ratio_cs(positions, n, m).value
        draws = sorted((data.draw(st.fractions(0, 1, max_denominator=8))
                        for _ in range(m)), reverse=True)
        v = [min(x, F(1) if j < n else F(1, 2)) for j, x in enumerate(draws)]
        total = sum(v)
        if total > n:
            v = [x * n / total for x in v]
        assert sum(v[j - 1] for j in positions) <= best

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_monotone_in_positions(self, data):
        m = data.draw(st.integers(2, 10))
        n = data.draw(st.integers(1, 4))
        positions = data.draw(st.lists(st.integers(1, m), unique=True, min_size=1, max_size=m - 1))
        extra = data.draw(st.integers(1, m).filter(lambda j: j not in set(positions)))
        base = worst_case_ratio_cs(positions, n, m).value
        assert worst_case_ratio_cs(list(positions) + [extra], n, m).value >= base


class TestEvaluateOrder:
    def test_single_agent_is_exactly_proportional(self):
        assert evaluate_order(PickingOrder((1, 1, 1)), 1, 3).ratio == 1

    def test_two_agent_ridge_order(self):
        assert evaluate_order(PickingOrder((1, 2, 2, 1)), 2, 4).ratio == F(4, 3)

    def test_relabeling_invariance(self):
        order = PickingOrder((1, 2, 2, 1), (2, 2, 1))
        swapped = PickingOrder((2, 1, 1, 2), (1, 1, 2))
        m = 13
        assert evaluate_order(order, 2, m).ratio == evaluate_order(swapped, 2, m).ratio

    def test_breakdown_names_the_binding_agent(self):
        ev = evaluate_order(PickingOrder((1, 2, 2, 1), (2, 2, 1)), 2, 10)
        assert ev.per_agent[ev.worst_agent()].ratio == ev.ratio

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 3), st.integers(4, 9), st.randoms(), st.integers(0, 10 ** 6))
    def test_greedy_never_beats_the_bound(self, n, m, rng, seed):
        rng = random.Random(seed)
        order = PickingOrder(tuple(rng.randint(1, n) for _ in range(m)))
        rows = []
        for _ in range(n):
            row = sorted((F(rng.randint(0, 40), 8) for _ in range(m)), reverse=True)
            rows.append(tuple(row))
        inst = ChoreInstance(tuple(F(1, n) for _ in range(n)), tuple(rows))
        played = greedy_play(to_sequence(order, m), inst)
        ev = evaluate_order(order, n, m)
        for i in range(1, n + 1):
            cs = chore_share(inst.row(i), F(1, n))
            if cs == 0:
                continue
            held = inst.bundle_cost(i, played.bundle(i))
            assert held / cs <= ev.per_agent[i].ratio


def _all_orders(n, m):
    total = n ** m
    for code in range(total):
        out = []
        c = code
        for _ in range(m):
            out.append(c % n + 1)
            c //= n
        yield tuple(out)


class TestNonridgeWitness:
    def test_ridge_orders_pass(self):
        assert nonridge_witness(PickingOrder((1, 2, 3, 3, 2, 1)), 3) is None

    def test_double_prefix_pick(self):
        w = nonridge_witness(PickingOrder((1, 1, 2, 2)), 2)
        assert w.kind == "double-prefix"
        assert w.valuation == (F(1), F(1), F(0), F(0))
        held = sum(w.valuation[r - 1] for r in w.positions)
        assert held / mms_oracle(w.valuation, 2) >= 2

    def test_early_second_pick(self):
        w = nonridge_witness(PickingOrder((1, 2, 1, 2)), 2)
        assert w.kind == "early-second"
        assert w.valuation == (F(1), F(1, 2), F(1, 2), F(0))
        held = sum(w.valuation[r - 1] for r in w.positions)
        assert held / mms_oracle(w.valuation, 2) == F(3, 2)

    def test_triple_pick(self):
        w = nonridge_witness(PickingOrder((1, 2, 2, 2)), 2)
        assert w.kind == "triple"
        held = sum(w.valuation[r - 1] for r in w.positions)
        assert held / mms_oracle(w.valuation, 2) >= F(3, 2)

    @pytest.mark.parametrize("n", [2, 3])
    def test_exhaustive_certification(self, n):
        relabelings = ((1, 2), (2, 1)) if n == 2 else (
            (1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1))
        ridges = set()
        base = tuple(range(1, n + 1)) + tuple(range(n, 0, -1))
        for relabel in relabelings:
            ridges.add(tuple(relabel[a - 1] for a in base))
        for assignment in _all_orders(n, 2 * n):
            w = nonridge_witness(PickingOrder(assignment), n)
            if assignment in ridges:
                assert w is None
            else:
                assert w is not None
                held = sum(w.valuation[r - 1] for r in w.positions)
                assert held / mms_oracle(w.valuation, n) >= w.ratio_floor >= F(3, 2)
