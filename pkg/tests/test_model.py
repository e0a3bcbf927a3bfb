import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from chorepick.model import (Allocation, ChoreInstance, InstanceError, PickingOrder,
                             PickingSequence, load_instance, parse_rational,
                             save_instance, to_ido, to_order, to_sequence)
from chorepick.simulate import greedy_play


def make(ents, costs):
    return ChoreInstance(tuple(F(e) for e in ents),
                         tuple(tuple(F(c) for c in row) for row in costs))


class TestParsing:
    def test_rational_strings(self):
        assert parse_rational("3/7") == F(3, 7)
        assert parse_rational("0.25") == F(1, 4)
        assert parse_rational(3) == F(3)

    @pytest.mark.parametrize("bad", ["x", "1/0", 1.5, None, True])
    def test_rejects_non_rationals(self, bad):
        with pytest.raises(InstanceError):
            parse_rational(bad)


class TestInstance:
    def test_valid_symmetric_instance_is_ido(self):
        inst = make(["1/2", "1/2"], [[3, 2, 1], [3, 2, 1]])
        assert inst.n == 2 and inst.m == 3
        assert inst.is_ido

    def test_entitlement_sum_diagnostic(self):
        with pytest.raises(InstanceError, match="entitlements sum to 5/6"):
            make(["1/2", "1/3"], [[1, 1], [1, 1]])

    def test_unequal_entitlements_accepted(self):
        inst = make(["1/8", "3/8", "1/2"], [[1] * 4] * 3)
        assert inst.entitlements == (F(1, 8), F(3, 8), F(1, 2))

    def test_negative_cost_diagnostic(self):
        with pytest.raises(InstanceError, match="chore 2 for agent 1 is negative"):
            make(["1"], [[1, -1]])

    def test_ragged_rows_diagnostic(self):
        with pytest.raises(InstanceError, match="agent 2 has 1 costs"):
            make(["1/2", "1/2"], [[1, 2], [1]])

    def test_non_ido_detected(self):
        assert not make(["1/2", "1/2"], [[1, 2], [2, 1]]).is_ido

    def test_from_dict_schema_errors(self):
        with pytest.raises(InstanceError, match="missing field 'costs'"):
            ChoreInstance.from_dict({"agents": 1, "chores": 1, "entitlements": ["1"]})
        with pytest.raises(InstanceError, match="cost row of agent 1"):
            ChoreInstance.from_dict({"agents": 1, "chores": 2,
                                     "entitlements": ["1"], "costs": [[1]]})


class TestSerialization:
    def test_file_round_trip(self, tmp_path):
        inst = make(["1/8", "3/8", "1/2"], [["3/7", "1/3", 0]] * 3)
        path = tmp_path / "inst.json"
        save_instance(inst, path)
        assert load_instance(path) == inst

    def test_bad_json_diagnostic(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        with pytest.raises(InstanceError, match="invalid JSON"):
            load_instance(path)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 4), st.integers(0, 5), st.data())
    def test_round_trip_preserves_exact_rationals(self, n, m, data):
        weights = data.draw(st.lists(st.integers(1, 9), min_size=n, max_size=n))
        total = sum(weights)
        ents = [F(w, total) for w in weights]
        ents[-1] = 1 - sum(ents[:-1])
        costs = [[F(data.draw(st.integers(0, 50)), data.draw(st.integers(1, 9)))
                  for _ in range(m)] for _ in range(n)]
        inst = make(ents, costs)
        assert ChoreInstance.from_dict(json.loads(json.dumps(inst.to_dict()))) == inst


class TestCommonOrderReduction:
    def test_already_ordered_gives_identity(self):
        inst = make(["1/2", "1/2"], [[3, 2, 1], [3, 2, 1]])
        surrogate, perms = to_ido(inst)
        assert surrogate == inst
        assert perms == ((1, 2, 3), (1, 2, 3))

    def test_single_agent_sort(self):
        inst = make(["1"], [[1, 3, 2]])
        surrogate, perms = to_ido(inst)
        assert surrogate.row(1) == (3, 2, 1)
        assert perms == ((2, 3, 1),)

    def test_two_agents_opposed(self):
        inst = make(["1/2", "1/2"], [[1, 2], [2, 1]])
        surrogate, perms = to_ido(inst)
        assert surrogate.is_ido
        assert surrogate.row(1) == (2, 1) and surrogate.row(2) == (2, 1)
        # column totals tie, so the shared tie-break is the original index
        assert perms == ((2, 1), (1, 2))

    def test_surrogate_rows_are_sorted_multisets(self):
        inst = make(["1/4", "1/4", "1/2"], [[5, 1, 4, 1], [2, 2, 2, 2], [0, 9, 1, 3]])
        surrogate, perms = to_ido(inst)
        assert surrogate.is_ido
        for i in range(1, 4):
            assert sorted(surrogate.row(i)) == sorted(inst.row(i))
            assert tuple(inst.row(i)[p - 1] for p in perms[i - 1]) == surrogate.row(i)


class TestOrderSequenceDuality:
    def test_reversal(self):
        assert to_sequence(PickingOrder((1, 2, 2))).rounds == (2, 2, 1)

    def test_palindrome(self):
        assert to_sequence(PickingOrder((1, 2, 2, 1))).rounds == (1, 2, 2, 1)

    def test_periodic_expand_then_reverse(self):
        order = PickingOrder((1, 2, 2, 1), (2, 2, 1))
        assert order.expand(7) == (1, 2, 2, 1, 2, 2, 1)
        assert to_sequence(order, 7).rounds == tuple(reversed(order.expand(7)))

    def test_finite_order_cannot_grow(self):
        with pytest.raises(InstanceError):
            PickingOrder((1, 2)).expand(3)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(1, 3), min_size=1, max_size=8),
           st.lists(st.integers(1, 3), max_size=4), st.integers(0, 20), st.integers(0, 20))
    def test_expansions_agree_on_common_prefix(self, prefix, cycle, m1, m2):
        order = PickingOrder(tuple(prefix), tuple(cycle))
        if not cycle:
            m1, m2 = min(m1, len(prefix)), min(m2, len(prefix))
        k = min(m1, m2)
        assert order.expand(m1)[:k] == order.expand(m2)[:k]

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(1, 4), min_size=1, max_size=10))
    def test_convert_is_an_involution(self, rounds):
        seq = PickingSequence(tuple(rounds))
        assert to_sequence(to_order(seq)).rounds == seq.rounds


class TestAllocation:
    def test_partition_enforced(self):
        with pytest.raises(InstanceError, match="assigned twice"):
            Allocation.from_lists([[1, 2], [2, 3]])

    def test_bundles_accessible(self):
        alloc = Allocation.from_lists([[1, 3], [2]])
        assert alloc.bundle(1) == {1, 3}
        assert alloc.chores() == {1, 2, 3}


def _exhaustive_orders(n, m):
    def build(so_far):
        if len(so_far) == m:
            yield tuple(so_far)
            return
        for who in range(1, n + 1):
            yield from build(so_far + [who])
    yield from build([])


class TestGreedyCorrespondence:
    """With one shared strictly-decreasing cost row, greedy play of the
    mirrored sequence hands every agent exactly her order positions."""

    @pytest.mark.parametrize("n,m", [(2, 8), (3, 6)])
    def test_exhaustive(self, n, m):
        row = tuple(F(m - j) for j in range(m))
        inst = make([F(1, n)] * n, [row] * n)
        for assignment in _exhaustive_orders(n, m):
            order = PickingOrder(assignment)
            played = greedy_play(to_sequence(order, m), inst)
            for agent in range(1, n + 1):
                expected = {r for r, who in enumerate(assignment, start=1) if who == agent}
                assert played.bundle(agent) == expected

    def test_with_cost_ties_disvalue_matches(self):
        # Equal costs can swap chore identities but never bundle disvalue.
        row = (F(2), F(2), F(1))
        inst = make([F(1, 2)] * 2, [row] * 2)
        order = PickingOrder((1, 2, 2))
        played = greedy_play(to_sequence(order, 3), inst)
        assert inst.bundle_cost(1, played.bundle(1)) == 2
        assert inst.bundle_cost(2, played.bundle(2)) == 3
