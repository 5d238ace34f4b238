"""Two-pointer 2-approximation for any number of agents with normalized utilities."""

from __future__ import annotations

from typing import Callable, Optional

from .core import (
    Allocation,
    Instance,
    InstanceError,
    build_preference_order,
    envies,
    reduce_instance,
    utility,
)


def approx1(inst: Instance, observer: Optional[Callable[[Instance, Allocation], None]] = None) -> Allocation:
    """Fill first-type agents from the front of the preference order and
    second-type agents from the back.

    Each round picks the poorest agent of each type (smallest index on ties).
    The first-type agent takes the next front item unless the second-type
    agent envies it, in which case the second-type agent takes the next back
    item.  ``observer(reduced_instance, partial)`` sees the allocation after
    every round, in the reduced item numbering.
    """
    if not inst.normalized:
        raise InstanceError("approx1 requires normalized utilities")
    red = reduce_instance(inst)
    sub = red.reduced
    order = build_preference_order(sub)
    j, n = sub.type_split, sub.n
    bundles = [set() for _ in range(n)]
    k1, k2 = 0, sub.m - 1
    while k1 <= k2:
        s = min(range(j), key=lambda i: (utility(sub, i, bundles[i]), i))
        t = min(range(j, n), key=lambda i: (utility(sub, i, bundles[i]), i))
        if not envies(sub, bundles, t, s):
            bundles[s].add(order[k1])
            k1 += 1
        else:
            bundles[t].add(order[k2])
            k2 -= 1
        if observer is not None:
            observer(sub, tuple(frozenset(b) for b in bundles))
    return red.lift(bundles)
