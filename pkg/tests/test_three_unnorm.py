import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import alloc
from twotype_ef1.core import (
    Instance,
    InstanceError,
    InvariantViolation,
    build_preference_order,
    is_complete,
    is_ef1,
    is_envied,
    social_welfare,
)
from twotype_ef1.oracle import brute_force_opt_ef1, gen_random
from twotype_ef1.three_unnorm import (
    Case,
    WellDefinedAllocation,
    algo4,
    algo5,
    algo6,
    algo8,
    approx3,
    approx7,
    approx9,
    classify_case,
    critical_set,
    critical_set_problems,
    shuffle_to_well_defined,
    solve_three_unnorm,
    well_defined_problems,
)


def fr(text):
    return tuple(F(x) for x in text.split())


# Small instances that drive the rarer branches (agent 0 alone in the first type).
PERM_312 = Instance(3, 1, fr("3/2 11/6 0 1/8 11/3 4/5 5/6"), fr("1/2 1 11/3 1/6 6 0 1/5"))
SWAP_FROM_ALGO7 = Instance(3, 1, fr("6/11 4/3 11/2 5"), fr("0 1/5 11/10 5/6"))
SWAP_FROM_ALGO9 = Instance(3, 1, fr("3 2 4/3 0 2/5 2/3"), fr("9/4 9/10 6/7 1/7 1/2 5/7"))
ECE_BRANCH = Instance(3, 1, fr("10/3 11/2 1/8 0 11/5 10/3 6/11 6"), fr("3/4 1/4 12/11 2/3 2/11 5/2 2/3 4/11"))
ALL_ENVIED = Instance(3, 1, fr("11 2 1 11/6 1/4 0 6/11 8"), fr("12/7 0 0 11/8 1/10 9/7 4/11 3/5"))
ALGO8_TO_ALGO5 = Instance(3, 1, fr("11/9 0 6/5 4/3 2 2"), fr("3/7 5/11 1/11 4 6/11 11/9"))


def cs_for(inst, g):
    order = build_preference_order(inst)
    return order, critical_set(inst, order, g)


class TestCriticalSet:
    def test_g3_reorders(self, t_unnorm):
        _, cs = cs_for(t_unnorm, 2)
        assert cs.members == {0, 1, 2}
        assert cs.s_prime == (0, 2, 1, 3, 4)

    def test_g4_is_case2(self, t_unnorm):
        _, cs = cs_for(t_unnorm, 3)
        assert cs.members == {0, 1, 2, 3}
        assert cs.s_prime == (0, 1, 3, 2, 4)
        assert cs.case is Case.CASE2

    def test_g1_is_case3(self, t_unnorm):
        _, cs = cs_for(t_unnorm, 0)
        assert cs.members == {0, 1, 2}
        assert cs.s_prime == (0, 1, 2, 3, 4)
        assert cs.case is Case.CASE3

    def test_singleton_is_case1(self):
        inst = Instance(3, 1, (1, 1), (0, 2))
        _, cs = cs_for(inst, 0)
        assert cs.members == {0}
        assert classify_case(inst, cs) is Case.CASE1

    def test_properties_on_tightness(self, t_unnorm):
        order = build_preference_order(t_unnorm)
        for g in range(5):
            assert critical_set_problems(t_unnorm, order, critical_set(t_unnorm, order, g)) == []

    def test_rejects_non_canonical(self):
        inst = Instance(3, 2, (1,), (1,))
        with pytest.raises(InstanceError):
            critical_set(inst, build_preference_order(inst), 0)


class TestWellDefined:
    def test_approx3_g1_path(self, t_unnorm, eps):
        wd = WellDefinedAllocation(alloc({1, 2}, {3}, ()), (1, 2, 3), frozenset({0, 1, 2}))
        out = approx3(t_unnorm, wd)
        assert out == alloc({1, 2}, {3, 5}, {4})
        assert social_welfare(t_unnorm, out) == 1 + 5 * eps

    def test_approx3_g3_path(self, t_unnorm, eps):
        wd = WellDefinedAllocation(alloc({1, 3}, {2}, ()), (1, 2, 3), frozenset({0, 1, 2}))
        out = approx3(t_unnorm, wd)
        assert out == alloc({1, 3}, {2, 5}, {4})
        assert social_welfare(t_unnorm, out) == 1 + 4 * eps

    def test_approx3_nothing_left(self, t_unnorm):
        start = alloc({1, 2, 3}, {4}, {5})
        wd = WellDefinedAllocation(start, (1, 2, 3), frozenset({0, 1, 2}))
        assert approx3(t_unnorm, wd) == start

    def test_approx3_refuses_bad_input(self, t_unnorm):
        wd = WellDefinedAllocation(alloc({4}, {1, 2, 3}, ()), (1, 2, 3), frozenset({0, 1, 2}))
        assert well_defined_problems(t_unnorm, wd)
        with pytest.raises(InvariantViolation):
            approx3(t_unnorm, wd)

    def test_shuffle_identity(self, t_unnorm):
        wd = shuffle_to_well_defined(t_unnorm, alloc({1, 2}, {3}, ()), {0, 1, 2})
        assert wd.alloc == alloc({1, 2}, {3}, ())
        assert wd.permutation == (1, 2, 3)

    def test_shuffle_all_worthless(self):
        inst = Instance(3, 1, (0, 0, 1), (0, 0, 1))
        wd = shuffle_to_well_defined(inst, alloc({1}, {2}, ()), {0, 1})
        assert wd.alloc == alloc({1}, {2}, ())
        assert wd.permutation == (1, 2, 3)

    def test_shuffle_312_branch(self):
        inst = PERM_312
        _, cs = cs_for(inst, 2)
        assert cs.case is Case.CASE3
        partial, k1, k2, _ = algo8(inst, cs)
        assert k1 > k2
        wd = shuffle_to_well_defined(inst, partial, cs.members)
        assert wd.permutation == (3, 1, 2)
        assert well_defined_problems(inst, wd) == []
        out = approx3(inst, wd)
        assert is_complete(inst, out) and is_ef1(inst, out)

    def test_shuffle_precondition(self, t_unnorm):
        with pytest.raises(InvariantViolation):
            shuffle_to_well_defined(t_unnorm, alloc({1}, {4}, ()), {0, 1, 2})


class TestCase2:
    def test_algo4_trace(self, t_unnorm):
        _, cs = cs_for(t_unnorm, 3)
        partial, k1, k2 = algo4(t_unnorm, cs)
        assert partial == alloc({1, 2}, {5}, {3})
        assert k1 < cs.k == k2

    def test_algo5_hands_g4_to_first(self, t_unnorm):
        _, cs = cs_for(t_unnorm, 3)
        out = algo5(t_unnorm, alloc({1, 2}, {5}, {3}), cs.s_prime, 3, 3)
        assert out == alloc({1, 2, 4}, {5}, {3})

    def test_algo5_empty_range(self, t_unnorm):
        start = alloc({1, 2}, {5}, {3})
        assert algo5(t_unnorm, start, (0, 1, 3, 2, 4), 4, 3) == start

    def test_algo5_all_envied(self):
        inst = ALL_ENVIED
        s_prime = (1, 2, 7, 0, 4, 6, 3, 5)
        partial = alloc({2, 3, 8}, {6}, {4})
        assert is_ef1(inst, partial)
        # after g1 to agent 0 and g7 to agent 1 both are envied, so g5 goes to agent 0 as the remainder
        mid = alloc({1, 2, 3, 8}, {6, 7}, {4})
        assert is_envied(inst, mid, 0) and is_envied(inst, mid, 1)
        out = algo5(inst, partial, s_prime, 4, 6)
        assert out == alloc({1, 2, 3, 5, 8}, {6, 7}, {4})
        assert is_ef1(inst, out)

    def test_algo6_keeps_trace(self, t_unnorm):
        a = alloc({1, 2, 4}, {5}, {3})
        assert algo6(t_unnorm, a) == a

    def test_algo6_empty_pair(self, t_unnorm):
        a = alloc((), (), {1, 2, 3, 4, 5})
        assert algo6(t_unnorm, a) == a

    def test_algo6_swap_branch(self):
        inst = SWAP_FROM_ALGO7
        order = build_preference_order(inst)
        cs = critical_set(inst, order, 2)
        assert cs.case is Case.CASE2
        partial, k1, k2 = algo4(inst, cs)
        before = algo5(inst, partial, cs.s_prime, k1, cs.k - 1)
        after = algo6(inst, before)
        assert after == (before[1], before[0], before[2])
        assert social_welfare(inst, after) > social_welfare(inst, before)
        assert is_ef1(inst, after)

    def test_approx7_trace(self, t_unnorm, eps):
        for g in (3, 4):
            _, cs = cs_for(t_unnorm, g)
            out = approx7(t_unnorm, cs)
            assert social_welfare(t_unnorm, out) == 1 + 4 * eps
        _, cs = cs_for(t_unnorm, 3)
        assert approx7(t_unnorm, cs) == alloc({1, 2, 4}, {5}, {3})

    def test_ece_branch(self):
        inst = ECE_BRANCH
        _, cs = cs_for(inst, 0)
        assert cs.case is Case.CASE2
        _, k1, k2 = algo4(inst, cs)
        assert k1 == cs.k < k2
        out = approx7(inst, cs)
        assert is_complete(inst, out) and is_ef1(inst, out)


class TestCase3:
    def test_algo8_g1(self, t_unnorm):
        _, cs = cs_for(t_unnorm, 0)
        partial, k1, k2, _ = algo8(t_unnorm, cs)
        assert partial == alloc({1, 2}, {3}, ())
        assert k1 > k2

    def test_algo8_g3(self, t_unnorm):
        _, cs = cs_for(t_unnorm, 2)
        partial, k1, k2, _ = algo8(t_unnorm, cs)
        assert partial == alloc({1, 3}, {2}, ())
        assert k1 > k2

    def test_approx9_trace(self, t_unnorm, eps):
        _, cs = cs_for(t_unnorm, 0)
        out = approx9(t_unnorm, cs)
        assert out == alloc({1, 2}, {3, 5}, {4})
        assert social_welfare(t_unnorm, out) == 1 + 5 * eps
        _, cs = cs_for(t_unnorm, 2)
        out = approx9(t_unnorm, cs)
        assert out == alloc({1, 3}, {2, 5}, {4})
        assert social_welfare(t_unnorm, out) == 1 + 4 * eps

    def test_algo5_branch(self):
        inst = ALGO8_TO_ALGO5
        _, cs = cs_for(inst, 0)
        assert cs.case is Case.CASE3
        _, k1, k2, k3 = algo8(inst, cs)
        assert k1 <= k2 and k3 == cs.k
        out = approx9(inst, cs)
        assert is_complete(inst, out) and is_ef1(inst, out)

    def test_swap_after_algo5(self):
        inst = SWAP_FROM_ALGO9
        _, cs = cs_for(inst, 0)
        assert cs.case is Case.CASE3
        partial, k1, k2, _ = algo8(inst, cs)
        before = algo5(inst, partial, cs.s_prime, k1, k2)
        after = approx9(inst, cs)
        assert after == (before[1], before[0], before[2])
        assert is_ef1(inst, after)


class TestDriver:
    def test_tightness(self, t_unnorm, eps):
        out, cands = solve_three_unnorm(t_unnorm)
        assert social_welfare(t_unnorm, out) == 1 + 5 * eps
        by_item = {c.item: c.welfare for c in cands}
        assert [by_item[g] for g in range(5)] == [1 + 5 * eps, 1 + 5 * eps] + [1 + 4 * eps] * 3

    def test_single_item(self):
        for u1, u3 in ((F(2), F(1)), (F(1), F(3))):
            inst = Instance(3, 1, (u1,), (u3,))
            out, _ = solve_three_unnorm(inst)
            assert social_welfare(inst, out) == max(u1, u3) == brute_force_opt_ef1(inst).opt_ef1

    def test_empty_first_bundle_candidate(self):
        # one Y item: the anchored candidates hand it to agent 0
        inst = Instance(3, 1, (F(1, 6),), (F(5, 9),))
        out, cands = solve_three_unnorm(inst)
        assert cands[0].welfare == F(1, 6)
        assert cands[-1].item is None and cands[-1].welfare == F(5, 9)
        assert social_welfare(inst, out) == F(5, 9)

    def test_rejects_two_agents(self):
        with pytest.raises(InstanceError):
            solve_three_unnorm(Instance(2, 1, (1,), (1,)))

    def test_two_first_type_agents(self):
        inst = gen_random(3, 3, 6, type_split=2)
        out, _ = solve_three_unnorm(inst)
        assert is_complete(inst, out) and is_ef1(inst, out)
        assert 2 * social_welfare(inst, out) >= brute_force_opt_ef1(inst).opt_ef1

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10**6))
    def test_ratio_and_structure(self, seed):
        rng = random.Random(seed)
        inst = gen_random(seed, 3, rng.randint(1, 7), type_split=rng.choice((1, 2)))

        def observe(stage, sub, partial):
            assert is_ef1(sub, partial), stage

        out, cands = solve_three_unnorm(inst, observer=observe)
        assert is_complete(inst, out) and is_ef1(inst, out)
        for c in cands:
            assert is_complete(inst, c.allocation) and is_ef1(inst, c.allocation)
        assert 2 * social_welfare(inst, out) >= brute_force_opt_ef1(inst).opt_ef1
