"""5/3-approximation for three agents with two normalized utility functions."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Optional

from .core import (
    Allocation,
    Instance,
    InstanceError,
    InvariantViolation,
    PreferenceOrder,
    as_allocation,
    build_preference_order,
    delta,
    envies,
    reduce_instance,
    utility,
)
from .subroutines import ece_complete

THIRD = Fraction(1, 3)

Observer = Callable[[Instance, Allocation], None]


def _check(inst: Instance):
    if inst.n != 3 or inst.type_split != 1:
        raise InstanceError("expected a canonical three-agent instance (n=3, type_split=1)")
    if not inst.normalized:
        raise InstanceError("three_norm requires normalized utilities")


def max_x_item(inst: Instance, order: PreferenceOrder):
    """Item of X with the largest first-type utility (smallest index on ties), or None if X is empty."""
    xs = sorted(order.x_items)
    if not xs:
        return None
    return max(xs, key=lambda g: (inst.u_first[g], -g))


def _poorer_second(inst, bundles, prefer_last):
    u2, u3 = utility(inst, 1, bundles[1]), utility(inst, 2, bundles[2])
    if u2 == u3:
        return 2 if prefer_last else 1
    return 1 if u2 < u3 else 2


def _two_pointer(inst, order, bundles, k1, k2, skip, stop_at_x, prefer_last, observer):
    """Shared priority-switching loop; 0-based pointers into ``order``.

    While X items remain at the front, agent 0 has priority; afterwards the
    poorer second-type agent does.  With ``stop_at_x`` the loop also halts
    once the back pointer reaches the last X item.
    """
    x = order.x_count

    def advance(p):
        p += 1
        if p < len(order) and order[p] == skip:
            p += 1
        return p

    while k1 <= k2 and (not stop_at_x or k2 >= x):
        t = _poorer_second(inst, bundles, prefer_last)
        if k1 < x:
            take_front = not envies(inst, bundles, t, 0)
        else:
            take_front = envies(inst, bundles, 0, t)
        if take_front:
            bundles[0].add(order[k1])
            k1 = advance(k1)
        else:
            bundles[t].add(order[k2])
            k2 -= 1
        if observer is not None:
            observer(inst, as_allocation(bundles))
    return k1, k2


def approx10(inst: Instance, observer: Optional[Observer] = None) -> Allocation:
    """Small-item case: no X item is worth more than 1/3 to the first type."""
    _check(inst)
    order = build_preference_order(inst)
    g = max_x_item(inst, order)
    if g is not None and inst.u_first[g] > THIRD:
        raise InstanceError("approx10 needs every X item worth at most 1/3 to the first type")
    bundles = [set(), set(), set()]
    _two_pointer(inst, order, bundles, 0, inst.m - 1, None, False, False, observer)
    return as_allocation(bundles)


def approx11(inst: Instance, observer: Optional[Observer] = None,
             on_rotate: Optional[Callable] = None) -> Allocation:
    """Big-item case: agent 0 starts with the X item it values most.

    ``on_rotate`` is called for every envy-cycle rotation after the built-in
    check that agent 0's first-type advantage never drops.
    """
    _check(inst)
    order = build_preference_order(inst)
    star = max_x_item(inst, order)
    if star is None or inst.u_first[star] <= THIRD:
        raise InstanceError("approx11 needs an X item worth more than 1/3 to the first type")
    bundles = [{star}, set(), set()]
    k1 = 1 if order[0] == star else 0
    k1, k2 = _two_pointer(inst, order, bundles, k1, inst.m - 1, star, True, True, observer)
    alloc = as_allocation(bundles)
    if k2 == order.x_count - 1:
        def guarded(before, after, cycle):
            if 0 in cycle and delta(inst, after[0]) < delta(inst, before[0]):
                raise InvariantViolation("rotation lowered agent 0's advantage")
            if on_rotate is not None:
                on_rotate(before, after, cycle)

        pool = [g for g in order.order[k1:k2 + 1] if g != star]
        alloc = ece_complete(inst, alloc, pool, on_rotate=guarded)
    return alloc


def solve_three_norm(inst: Instance, observer: Optional[Observer] = None,
                     on_rotate: Optional[Callable] = None) -> Allocation:
    if inst.n != 3:
        raise InstanceError("three_norm needs exactly 3 agents, got %d" % inst.n)
    if not inst.normalized:
        raise InstanceError("three_norm requires normalized utilities")
    red = reduce_instance(inst, single_first=True)
    sub = red.reduced
    order = build_preference_order(sub)
    star = max_x_item(sub, order)
    if star is not None and sub.u_first[star] > THIRD:
        alloc = approx11(sub, observer, on_rotate)
    else:
        alloc = approx10(sub, observer)
    return red.lift(alloc)
