import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import alloc
from twotype_ef1.approx_n import approx1
from twotype_ef1.core import (
    Instance,
    InstanceError,
    build_preference_order,
    is_complete,
    is_ef1,
    is_good,
    social_welfare,
)
from twotype_ef1.oracle import brute_force_opt_ef1, gen_random


def test_single_item_goes_to_first_agent():
    inst = Instance(4, 2, (1,), (1,), normalized=True)
    assert approx1(inst) == alloc({1}, (), (), ())


def test_identical_thirds():
    t = Fraction(1, 3)
    inst = Instance(3, 1, (t, t, t), (t, t, t), normalized=True)
    out = approx1(inst)
    assert out == alloc({1}, {3}, {2})
    assert social_welfare(inst, out) == 1


def test_normalized_tightness_instance(t_norm):
    out = approx1(t_norm)
    assert is_complete(t_norm, out) and is_ef1(t_norm, out)
    assert 2 * social_welfare(t_norm, out) >= brute_force_opt_ef1(t_norm).opt_ef1


def test_rejects_unnormalized(t_unnorm):
    with pytest.raises(InstanceError):
        approx1(t_unnorm)


def test_zero_items_land_with_first_agent():
    half = Fraction(1, 2)
    inst = Instance(2, 1, (half, 0, half), (0, 0, 1), normalized=True)
    out = approx1(inst)
    assert 1 in out[0]
    assert is_complete(inst, out)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_intermediates_good_and_ef1(seed):
    rng = random.Random(seed)
    inst = gen_random(seed, rng.randint(2, 5), rng.randint(1, 7), normalized=True)
    seen = []

    def observe(sub, partial):
        seen.append(partial)
        order = build_preference_order(sub)
        assert is_good(sub, partial, order)
        assert is_ef1(sub, partial)

    out = approx1(inst, observer=observe)
    assert is_complete(inst, out) and is_ef1(inst, out)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_two_approximation(seed):
    rng = random.Random(seed)
    inst = gen_random(seed, rng.randint(2, 4), rng.randint(1, 6), normalized=True)
    assert 2 * social_welfare(inst, approx1(inst)) >= brute_force_opt_ef1(inst).opt_ef1
