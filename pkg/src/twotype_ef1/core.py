"""Exact data model and allocation predicates for two-type fair division.

Agents ``0 .. type_split-1`` share ``u_first``; the remaining agents share
``u_second``.  Everything is computed with :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Sequence

Bundle = frozenset
Allocation = tuple  # tuple[frozenset[int], ...], one bundle per agent


class InstanceError(ValueError):
    """Raised when an instance or allocation fails validation."""


class InvariantViolation(AssertionError):
    """An algorithm produced a state its correctness argument rules out."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise InstanceError("utilities must be exact; got float %r" % (value,))
    return Fraction(value)


@dataclass(frozen=True)
class Instance:
    n: int
    type_split: int
    u_first: tuple
    u_second: tuple
    normalized: bool = False

    def __post_init__(self):
        u_first = tuple(_as_fraction(v) for v in self.u_first)
        u_second = tuple(_as_fraction(v) for v in self.u_second)
        object.__setattr__(self, "u_first", u_first)
        object.__setattr__(self, "u_second", u_second)
        if self.n < 2:
            raise InstanceError("n must be at least 2, got %d" % self.n)
        if not 1 <= self.type_split < self.n:
            raise InstanceError(
                "type_split must lie in [1, n-1], got %d for n=%d" % (self.type_split, self.n)
            )
        if len(u_first) != len(u_second):
            raise InstanceError("u_first and u_second differ in length")
        for name, row in (("u_first", u_first), ("u_second", u_second)):
            for g, v in enumerate(row):
                if v < 0:
                    raise InstanceError("%s[%d] is negative (%s)" % (name, g, v))
        if self.normalized:
            for name, row in (("u_first", u_first), ("u_second", u_second)):
                if sum(row, Fraction(0)) != 1:
                    raise InstanceError("normalized instance but %s sums to %s" % (name, sum(row, Fraction(0))))

    @property
    def m(self) -> int:
        return len(self.u_first)

    def is_first_type(self, agent: int) -> bool:
        return agent < self.type_split

    def row(self, agent: int) -> tuple:
        return self.u_first if agent < self.type_split else self.u_second

    def value(self, agent: int, item: int) -> Fraction:
        return self.row(agent)[item]


def as_allocation(bundles: Iterable[Iterable[int]]) -> Allocation:
    return tuple(frozenset(b) for b in bundles)


def empty_allocation(n: int) -> Allocation:
    return tuple(frozenset() for _ in range(n))


def check_allocation(inst: Instance, alloc: Sequence[Iterable[int]]) -> Allocation:
    """Validate shape, index range and disjointness; return the canonical tuple form."""
    alloc = as_allocation(alloc)
    if len(alloc) != inst.n:
        raise InstanceError("allocation has %d bundles, instance has %d agents" % (len(alloc), inst.n))
    seen = {}
    for agent, bundle in enumerate(alloc):
        for g in bundle:
            if not 0 <= g < inst.m:
                raise InstanceError("item index %d out of range for m=%d" % (g, inst.m))
            if g in seen:
                raise InstanceError("item %d appears in bundles %d and %d" % (g, seen[g], agent))
            seen[g] = agent
    return alloc


def is_complete(inst: Instance, alloc: Sequence[Iterable[int]]) -> bool:
    items = set()
    for b in alloc:
        items.update(b)
    return items == set(range(inst.m))


# --- preference order -------------------------------------------------------

def compare_preference(g: int, h: int, inst: Instance) -> int:
    """Three-way comparison of rho(g) = u_first(g)/u_second(g) against rho(h).

    Returns -1, 0 or 1.  An item worth nothing to the second type has
    infinite preference; two such items compare equal.
    """
    a, b = inst.u_first[g], inst.u_second[g]
    c, d = inst.u_first[h], inst.u_second[h]
    if b == 0 and d == 0:
        return 0
    if b == 0:
        return 1
    if d == 0:
        return -1
    lhs, rhs = a * d, c * b
    return (lhs > rhs) - (lhs < rhs)


@dataclass(frozen=True)
class PreferenceOrder:
    order: tuple
    x_count: int
    instance: Instance = field(repr=False, compare=False)

    def __len__(self):
        return len(self.order)

    def __getitem__(self, pos):
        return self.order[pos]

    @property
    def rank(self) -> dict:
        return {g: p for p, g in enumerate(self.order)}

    @property
    def x_items(self) -> tuple:
        return self.order[: self.x_count]


def build_preference_order(inst: Instance) -> PreferenceOrder:
    key = cmp_to_key(lambda g, h: compare_preference(h, g, inst))
    order = tuple(sorted(range(inst.m), key=key))  # sorted() is stable
    x_count = sum(1 for g in range(inst.m) if inst.u_first[g] >= inst.u_second[g])
    return PreferenceOrder(order, x_count, inst)


# --- utilities and envy -----------------------------------------------------

def utility(inst: Instance, agent: int, bundle: Iterable[int]) -> Fraction:
    row = inst.row(agent)
    return sum((row[g] for g in bundle), Fraction(0))


def envies(inst: Instance, alloc, i: int, k: int) -> bool:
    return utility(inst, i, alloc[i]) < utility(inst, i, alloc[k])


def strongly_envies(inst: Instance, alloc, i: int, k: int) -> bool:
    other = alloc[k]
    if not other:
        return False
    row = inst.row(i)
    # removing the item i values most is the best single removal
    best = max(row[g] for g in other)
    return utility(inst, i, alloc[i]) < utility(inst, i, other) - best


def ef1_violation(inst: Instance, alloc):
    """First ordered pair ``(i, k)`` where ``i`` strongly envies ``k``, else None."""
    for i in range(inst.n):
        for k in range(inst.n):
            if i != k and strongly_envies(inst, alloc, i, k):
                return i, k
    return None


def is_ef1(inst: Instance, alloc) -> bool:
    return ef1_violation(inst, alloc) is None


def is_envied(inst: Instance, alloc, k: int) -> bool:
    return any(envies(inst, alloc, i, k) for i in range(inst.n) if i != k)


def precedes(a: Iterable[int], b: Iterable[int], order: PreferenceOrder) -> bool:
    """True when every item of ``a - b`` has preference at least that of every item of ``b - a``.

    The empty set has preference both above and below everything, so an
    empty difference on either side makes this vacuously true.
    """
    a, b = set(a), set(b)
    only_a, only_b = a - b, b - a
    if not only_a or not only_b:
        return True
    inst = order.instance
    key = cmp_to_key(lambda g, h: compare_preference(g, h, inst))
    return compare_preference(min(only_a, key=key), max(only_b, key=key), inst) >= 0


def is_good(inst: Instance, alloc, order: PreferenceOrder) -> bool:
    j = inst.type_split
    return all(precedes(alloc[s], alloc[t], order) for s in range(j) for t in range(j, inst.n))


def delta(inst: Instance, bundle: Iterable[int]) -> Fraction:
    bundle = tuple(bundle)
    return sum((inst.u_first[g] for g in bundle), Fraction(0)) - sum(
        (inst.u_second[g] for g in bundle), Fraction(0)
    )


def social_welfare(inst: Instance, alloc) -> Fraction:
    return sum((utility(inst, i, alloc[i]) for i in range(inst.n)), Fraction(0))


# --- preprocessing ----------------------------------------------------------

@dataclass(frozen=True)
class Reduction:
    """Maps a solver-facing instance back to the caller's instance.

    ``agent_of[c]`` is the original agent for reduced agent ``c`` and
    ``item_of[g]`` the original item for reduced item ``g``.  Items worth
    nothing to either type are set aside in ``dropped``.
    """

    original: Instance
    reduced: Instance
    agent_of: tuple
    item_of: tuple
    dropped: tuple

    def lift(self, alloc) -> Allocation:
        bundles = [set() for _ in range(self.original.n)]
        for c, bundle in enumerate(alloc):
            bundles[self.agent_of[c]].update(self.item_of[g] for g in bundle)
        bundles[0].update(self.dropped)
        return as_allocation(bundles)


def reduce_instance(inst: Instance, single_first: bool = False) -> Reduction:
    """Drop all-zero items and, if ``single_first``, relabel so the singleton type is agent 0.

    ``single_first`` applies to three-agent instances with two first-type
    agents: the utility rows are swapped and the lone second-type agent
    becomes agent 0.
    """
    kept = tuple(g for g in range(inst.m) if inst.u_first[g] != 0 or inst.u_second[g] != 0)
    dropped = tuple(g for g in range(inst.m) if g not in set(kept))
    u_first = tuple(inst.u_first[g] for g in kept)
    u_second = tuple(inst.u_second[g] for g in kept)
    agent_of = tuple(range(inst.n))
    split = inst.type_split
    if single_first and split != 1:
        if inst.n - split != 1:
            raise InstanceError("cannot make a singleton first type from split %d of %d" % (split, inst.n))
        u_first, u_second = u_second, u_first
        agent_of = (inst.n - 1,) + tuple(range(inst.n - 1))
        split = 1
    reduced = Instance(inst.n, split, u_first, u_second, inst.normalized)
    return Reduction(inst, reduced, agent_of, kept, dropped)
