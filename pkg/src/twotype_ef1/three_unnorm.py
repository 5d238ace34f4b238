"""2-approximation for three agents with two unnormalized utility functions.

All routines here work on a *canonical* instance: three agents, agent 0 alone
in the first type (``type_split == 1``) and no item worth zero to both types.
:func:`solve_three_unnorm` takes any three-agent instance and handles the
relabelling.

Pointers named ``k1``, ``k2``, ``k3`` are 1-based positions in the reordered
item sequence, as in the pseudocode they mirror; ``k`` is the critical-set
size.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
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
    empty_allocation,
    envies,
    is_ef1,
    is_envied,
    reduce_instance,
    social_welfare,
)
from .subroutines import ece_complete, round_robin

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)

Observer = Callable[[str, Instance, Allocation], None]


class Case(enum.Enum):
    CASE1 = 1
    CASE2 = 2
    CASE3 = 3


def _u1(inst, items):
    return sum((inst.u_first[g] for g in items), Fraction(0))


def _u3(inst, items):
    return sum((inst.u_second[g] for g in items), Fraction(0))


def _require_canonical(inst: Instance):
    if inst.n != 3 or inst.type_split != 1:
        raise InstanceError("expected a canonical three-agent instance (n=3, type_split=1)")


@dataclass(frozen=True)
class CriticalSet:
    target: int
    members: frozenset
    s_prime: tuple
    case: Optional[Case] = None

    @property
    def k(self) -> int:
        return len(self.members)

    def item(self, pos: int) -> int:
        """Item at 1-based position ``pos`` of the reordered sequence."""
        return self.s_prime[pos - 1]


def _smallest_prefix(inst, order, threshold) -> int:
    total = Fraction(0)
    if total >= threshold:
        return 0
    for t, g in enumerate(order.order, start=1):
        total += inst.u_second[g]
        if total >= threshold:
            return t
    raise InvariantViolation("no prefix reaches threshold %s" % threshold)


def critical_set(inst: Instance, order: PreferenceOrder, target: int) -> CriticalSet:
    """Critical set for ``target`` plus the reordered sequence it induces."""
    _require_canonical(inst)
    everything = range(inst.m)
    x_items = order.x_items
    rank = order.order.index(target) + 1
    rest_u3 = _u3(inst, everything) - inst.u_second[target]

    t = _smallest_prefix(inst, order, min(_u3(inst, x_items) - (inst.u_second[target] if target in x_items else 0),
                                          THIRD * rest_u3))
    if t < rank:
        members = frozenset(order.order[:t]) | {target}
    else:
        t2 = _smallest_prefix(inst, order, min(_u3(inst, x_items), THIRD * rest_u3 + inst.u_second[target]))
        members = frozenset(order.order[:t2])
    k = len(members)

    seq = list(order.order)
    if k >= 2 and rank >= k:
        seq.remove(target)
        seq.insert(k - 2, target)
    cs = CriticalSet(target, members, tuple(seq))
    return replace(cs, case=classify_case(inst, cs))


def classify_case(inst: Instance, cs: CriticalSet) -> Case:
    if max(inst.u_first[g] for g in cs.members) >= HALF * _u1(inst, cs.members):
        return Case.CASE1
    outside = [g for g in range(inst.m) if g not in cs.members]
    if inst.u_second[cs.item(cs.k)] > _u3(inst, outside):
        return Case.CASE2
    return Case.CASE3


def critical_set_problems(inst: Instance, order: PreferenceOrder, cs: CriticalSet) -> list:
    """Every structural property a critical set must satisfy that fails for ``cs``."""
    problems = []
    g_i, K = cs.target, cs.members
    x = set(order.x_items)
    rest = K - {g_i}
    rest_u3 = _u3(inst, range(inst.m)) - inst.u_second[g_i]
    if g_i not in K:
        problems.append("target not in K")
    if not rest <= x:
        problems.append("K minus target not inside X")
    if _u3(inst, rest) < min(_u3(inst, x - {g_i}), THIRD * rest_u3):
        problems.append("u3(K minus target) below threshold")
    others = [g for g in order.order if g != g_i]
    if set(others[: len(rest)]) != rest:
        problems.append("K minus target is not a prefix of the order without target")
    if cs.case in (Case.CASE2, Case.CASE3):
        k = cs.k
        outside_u3 = _u3(inst, [g for g in range(inst.m) if g not in K])
        last = cs.item(k)
        if k < 3:
            problems.append("k < 3 outside case 1")
        if set(cs.s_prime[:k]) != K:
            problems.append("K is not the first k items of the reordered sequence")
        if last == g_i:
            problems.append("k-th reordered item equals target")
        regular = [g for p, g in enumerate(cs.s_prime) if p != k - 2]
        if regular != [g for g in order.order if g in set(regular)]:
            problems.append("reordered sequence minus position k-1 is not regular")
        if not _u3(inst, cs.s_prime[: k - 1]) < THIRD * rest_u3 + inst.u_second[g_i]:
            problems.append("prefix of length k-1 too heavy for the second type")
        if cs.case is Case.CASE2:
            if not inst.u_second[last] > HALF * _u3(inst, rest):
                problems.append("case 2: k-th item not above half of u3(K minus target)")
            if not inst.u_second[last] > THIRD * rest_u3:
                problems.append("case 2: k-th item not above a third of u3(M minus target)")
            if not THIRD * rest_u3 >= _u3(inst, K - {g_i, last}):
                problems.append("case 2: u3(K minus target and k-th item) above a third of u3(M minus target)")
        else:
            if not outside_u3 > THIRD * rest_u3:
                problems.append("case 3: u3(M minus K) not above a third of u3(M minus target)")
    return problems


# --- well-defined allocations and round-robin completion ----------------------

@dataclass(frozen=True)
class WellDefinedAllocation:
    alloc: Allocation
    permutation: tuple  # (1, 2, 3) or (3, 1, 2), 1-based agents
    reference: frozenset


def well_defined_problems(inst: Instance, wd: WellDefinedAllocation) -> list:
    problems = []
    a = wd.alloc
    if wd.permutation not in ((1, 2, 3), (3, 1, 2)):
        problems.append("permutation %r not allowed" % (wd.permutation,))
        return problems
    if not is_ef1(inst, a):
        problems.append("not EF1")
    if _u1(inst, a[0]) < HALF * _u1(inst, wd.reference):
        problems.append("u1 of first bundle below half of u1(K)")
    if _u3(inst, a[0]) > _u3(inst, wd.reference):
        problems.append("u3 of first bundle above u3(K)")
    i1, i2, i3 = (p - 1 for p in wd.permutation)
    if envies(inst, a, i1, i2) or envies(inst, a, i1, i3):
        problems.append("leading agent envies someone")
    if envies(inst, a, i2, i3):
        problems.append("middle agent envies last agent")
    return problems


def approx3(inst: Instance, wd: WellDefinedAllocation) -> Allocation:
    """Round-robin the unassigned items in reverse permutation order."""
    _require_canonical(inst)
    problems = well_defined_problems(inst, wd)
    if problems:
        raise InvariantViolation("not well-defined: " + "; ".join(problems))
    assigned = set().union(*wd.alloc)
    pool = [g for g in range(inst.m) if g not in assigned]
    picking = [p - 1 for p in reversed(wd.permutation)]
    return round_robin(inst, wd.alloc, pool, picking)


# --- case 2 ------------------------------------------------------------------

def algo4(inst: Instance, cs: CriticalSet, observer: Optional[Observer] = None):
    """Grow agent 0 from the front of K and agent 1 from the back of M - K.

    Agent 2 holds the k-th reordered item throughout.  Returns the partial
    allocation and the final ``(k1, k2)``.
    """
    k, m = cs.k, inst.m
    bundles = [{cs.item(1)}, set(), {cs.item(k)}]
    k1, k2 = 2, m
    while k1 < k < k2:
        if not envies(inst, bundles, 1, 0):
            bundles[0].add(cs.item(k1))
            k1 += 1
        else:
            bundles[1].add(cs.item(k2))
            k2 -= 1
        if observer is not None:
            observer("algo4", inst, as_allocation(bundles))
    return as_allocation(bundles), k1, k2


def algo5(inst: Instance, partial, s_prime, k1: int, k2: int) -> Allocation:
    """Hand out reordered positions ``k1..k2`` to agents 0 and 1, preferring an unenvied agent."""
    bundles = [set(b) for b in partial]
    while k1 <= k2:
        if not is_envied(inst, bundles, 0):
            bundles[0].add(s_prime[k1 - 1])
            k1 += 1
        elif not is_envied(inst, bundles, 1):
            bundles[1].add(s_prime[k2 - 1])
            k2 -= 1
        else:
            bundles[0].update(s_prime[k1 - 1:k2])
            k1 = k2 + 1
    return as_allocation(bundles)


def algo6(inst: Instance, alloc) -> Allocation:
    """Swap the first two bundles when agent 0 envies agent 1 and the swap raises welfare."""
    alloc = as_allocation(alloc)
    if _u1(inst, alloc[0]) >= _u1(inst, alloc[1]):
        return alloc
    swapped = (alloc[1], alloc[0], alloc[2])
    if social_welfare(inst, swapped) > social_welfare(inst, alloc):
        return swapped
    return alloc


def approx7(inst: Instance, cs: CriticalSet, observer: Optional[Observer] = None) -> Allocation:
    _require_canonical(inst)
    k = cs.k
    alloc, k1, k2 = algo4(inst, cs, observer)
    if k1 == k < k2:
        return ece_complete(inst, alloc, cs.s_prime[k:k2])
    alloc = algo5(inst, alloc, cs.s_prime, k1, k - 1)
    return algo6(inst, alloc)


# --- case 3 ------------------------------------------------------------------

def algo8(inst: Instance, cs: CriticalSet, observer: Optional[Observer] = None):
    """Feed K to agents 0 and 1 from both ends and M - K to agent 2 from the back.

    Returns the partial allocation and the final ``(k1, k2, k3)``.
    """
    k, m = cs.k, inst.m
    bundles = [{cs.item(1)}, {cs.item(k)}, set()]
    k1, k2, k3 = 2, k - 1, m
    while k1 <= k2 and k3 >= k + 1:
        if not is_envied(inst, bundles, 0):
            bundles[0].add(cs.item(k1))
            k1 += 1
        elif not is_envied(inst, bundles, 1):
            bundles[1].add(cs.item(k2))
            k2 -= 1
        else:
            bundles[2].add(cs.item(k3))
            k3 -= 1
        if observer is not None:
            observer("algo8", inst, as_allocation(bundles))
    return as_allocation(bundles), k1, k2, k3


def shuffle_to_well_defined(inst: Instance, alloc, reference) -> WellDefinedAllocation:
    """Rearrange the bundles of a finished case-3 partial allocation into a well-defined one."""
    reference = frozenset(reference)
    a1, a2, a3 = as_allocation(alloc)
    if a1 | a2 != reference or a3 & reference:
        raise InvariantViolation("shuffle needs A1 | A2 == K and A3 disjoint from K")
    if _u1(inst, a1) < _u1(inst, a2):
        a1, a2 = a2, a1
    one_envies_three = _u1(inst, a1) < _u1(inst, a3)
    three_envies_one = _u3(inst, a3) < _u3(inst, a1)
    if one_envies_three and three_envies_one:
        if _u3(inst, a2) >= _u3(inst, a1):
            out, perm = (a3, a2, a1), (1, 2, 3)
        else:
            out, perm = (a3, a1, a2), (1, 2, 3)
    elif not one_envies_three:
        if _u3(inst, a2) >= _u3(inst, a3):
            out, perm = (a1, a2, a3), (1, 2, 3)
        else:
            out, perm = (a1, a3, a2), (1, 2, 3)
    elif _u3(inst, a2) >= _u3(inst, a3):
        out, perm = (a3, a2, a1), (1, 2, 3)
    else:
        out, perm = (a1, a2, a3), (3, 1, 2)
    return WellDefinedAllocation(out, perm, reference)


def approx9(inst: Instance, cs: CriticalSet, observer: Optional[Observer] = None) -> Allocation:
    _require_canonical(inst)
    alloc, k1, k2, k3 = algo8(inst, cs, observer)
    if k1 > k2:
        wd = shuffle_to_well_defined(inst, alloc, cs.members)
        return approx3(inst, wd)
    alloc = algo5(inst, alloc, cs.s_prime, k1, k2)
    return algo6(inst, alloc)


# --- driver ------------------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    """Outcome for one guessed anchor item, in the caller's numbering.

    ``item`` is None for the extra candidate that assumes agent 0 gets
    nothing in the optimum.
    """

    item: Optional[int]
    members: frozenset
    case: Optional[Case]
    s_prime: tuple
    allocation: Allocation
    welfare: Fraction


def solve_canonical(inst: Instance, order: PreferenceOrder, target: int,
                    observer: Optional[Observer] = None):
    """Run the case dispatch for one anchor item; returns ``(critical set, allocation)``."""
    cs = critical_set(inst, order, target)
    if cs.case is Case.CASE1:
        anchor = max(sorted(cs.members), key=lambda g: (inst.u_first[g], -g))
        start = (frozenset({anchor}), frozenset(), frozenset())
        alloc = approx3(inst, WellDefinedAllocation(start, (1, 2, 3), cs.members))
    elif cs.case is Case.CASE2:
        alloc = approx7(inst, cs, observer)
    else:
        alloc = approx9(inst, cs, observer)
    return cs, alloc


def solve_three_unnorm(inst: Instance, observer: Optional[Observer] = None):
    """Best allocation over every anchor item; returns ``(allocation, candidates)``.

    ``observer(stage, canonical_instance, partial)`` is forwarded to the
    instrumented loops.
    """
    if inst.n != 3:
        raise InstanceError("three_unnorm needs exactly 3 agents, got %d" % inst.n)
    red = reduce_instance(inst, single_first=True)
    sub = red.reduced
    order = build_preference_order(sub)
    to_orig = red.item_of

    candidates = []
    for target in range(sub.m):
        cs, alloc = solve_canonical(sub, order, target, observer)
        candidates.append(Candidate(
            item=to_orig[target],
            members=frozenset(to_orig[g] for g in cs.members),
            case=cs.case,
            s_prime=tuple(to_orig[g] for g in cs.s_prime),
            allocation=red.lift(alloc),
            welfare=social_welfare(sub, alloc),
        ))
    # covers optima where agent 0 ends up empty-handed
    empty = approx3(sub, WellDefinedAllocation(empty_allocation(3), (1, 2, 3), frozenset()))
    candidates.append(Candidate(None, frozenset(), None, tuple(to_orig[g] for g in order.order),
                                red.lift(empty), social_welfare(sub, empty)))

    best = candidates[0]
    for cand in candidates[1:]:
        if cand.welfare > best.welfare:
            best = cand
    return best.allocation, candidates
