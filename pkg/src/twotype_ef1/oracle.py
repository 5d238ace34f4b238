"""Brute-force optimal EF1 search and instance generators."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    Allocation,
    Instance,
    InstanceError,
    as_allocation,
    build_preference_order,
    compare_preference,
    is_ef1,
    social_welfare,
)

SIZE_GUARD = 10 ** 7
_CHUNK = 1 << 16
_INT64_SAFE = 1 << 62


class SizeGuardExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleReport:
    opt_ef1: Fraction
    best_alloc: Allocation
    unconstrained_max: Fraction
    ef1_count: int


def unconstrained_max(inst: Instance) -> Fraction:
    return sum((max(a, b) for a, b in zip(inst.u_first, inst.u_second)), Fraction(0))


def _guard(inst: Instance):
    if inst.n ** inst.m > SIZE_GUARD:
        raise SizeGuardExceeded("n^m = %d^%d exceeds the %d assignment guard" % (inst.n, inst.m, SIZE_GUARD))


def _assignment_to_alloc(n, assignment) -> Allocation:
    bundles = [set() for _ in range(n)]
    for g, agent in enumerate(assignment):
        bundles[agent].add(g)
    return as_allocation(bundles)


def brute_force_opt_ef1_naive(inst: Instance) -> OracleReport:
    """Reference search: every assignment, checked with the scalar predicates."""
    _guard(inst)
    best, best_alloc, count = None, None, 0
    for assignment in itertools.product(range(inst.n), repeat=inst.m):
        alloc = _assignment_to_alloc(inst.n, assignment)
        if not is_ef1(inst, alloc):
            continue
        count += 1
        w = social_welfare(inst, alloc)
        if best is None or w > best:
            best, best_alloc = w, alloc
    return OracleReport(best, best_alloc, unconstrained_max(inst), count)


def _scaled_rows(inst: Instance):
    """Both utility rows times a common denominator, as Python ints."""
    denom = 1
    for v in inst.u_first + inst.u_second:
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    rows = [[int(v * denom) for v in row] for row in (inst.u_first, inst.u_second)]
    return rows, denom


def brute_force_opt_ef1(inst: Instance) -> OracleReport:
    """Exhaustive optimal EF1 search over all ``n^m`` complete assignments.

    Utilities are scaled to integers by a common denominator so the scan can
    run on numpy arrays without losing exactness; if the scaled sums would not
    fit in int64 the naive scalar search is used instead.  Assignments are
    visited in lexicographic order (item 0 most significant) and the first
    optimum found is the witness.
    """
    _guard(inst)
    n, m = inst.n, inst.m
    if m == 0:
        return OracleReport(Fraction(0), as_allocation([()] * n), Fraction(0), 1)
    rows, denom = _scaled_rows(inst)
    if max(sum(r) for r in rows) * 2 >= _INT64_SAFE:
        return brute_force_opt_ef1_naive(inst)

    vals = np.array(rows, dtype=np.int64)  # (2, m)
    agent_type = np.array([0 if inst.is_first_type(a) else 1 for a in range(n)])
    total = n ** m
    radix = n ** np.arange(m - 1, -1, -1, dtype=np.int64)
    best_w, best_idx, count = None, None, 0
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        assign = (idx[:, None] // radix[None, :]) % n  # (c, m)
        onehot = assign[:, None, :] == np.arange(n)[None, :, None]  # (c, n, m)
        # value[c, type, bundle] and best single item per bundle
        value = np.einsum("cnm,tm->ctn", onehot.astype(np.int64), vals)
        best_item = np.where(onehot[:, None, :, :], vals[None, :, None, :], 0).max(axis=3)
        own = value[:, agent_type, np.arange(n)]  # (c, n)
        ok = np.ones(len(idx), dtype=bool)
        for i in range(n):
            ti = agent_type[i]
            for k in range(n):
                if i != k:
                    ok &= own[:, i] >= value[:, ti, k] - best_item[:, ti, k]
        if not ok.any():
            continue
        count += int(ok.sum())
        welfare = own.sum(axis=1)
        welfare = np.where(ok, welfare, -1)
        pos = int(welfare.argmax())
        if best_w is None or welfare[pos] > best_w:
            best_w, best_idx = int(welfare[pos]), int(idx[pos])
    assignment = [(best_idx // n ** (m - 1 - g)) % n for g in range(m)]
    best_alloc = _assignment_to_alloc(n, assignment)
    return OracleReport(Fraction(best_w, denom), best_alloc, unconstrained_max(inst), count)


# --- generators --------------------------------------------------------------

def gen_tightness_unnorm(epsilon) -> Instance:
    """Five-item instance on which the three-agent unnormalized algorithm is off by nearly 2."""
    eps = Fraction(epsilon)
    if not 0 < eps < Fraction(1, 2):
        raise InstanceError("epsilon must lie in (0, 1/2), got %s" % eps)
    inst = Instance(3, 1, (eps, 1, 1, 0, 0), (0, eps, 2 * eps, eps, eps), normalized=False)
    _assert_tight_order(inst)
    return inst


def gen_tightness_norm(epsilon) -> Instance:
    """Five-item normalized instance on which the three-agent algorithm is off by nearly 5/3."""
    eps = Fraction(epsilon)
    if not 0 < eps < Fraction(1, 6):
        raise InstanceError("epsilon must lie in (0, 1/6), got %s" % eps)
    third = Fraction(1, 3)
    inst = Instance(3, 1, (third, third - eps, third + eps, 0, 0),
                    (eps, eps, third, third - eps, third - eps), normalized=True)
    _assert_tight_order(inst)
    return inst


def _assert_tight_order(inst: Instance):
    # rho(g1) > rho(g2) > rho(g3) > 1 > rho(g4) = rho(g5)
    c = compare_preference
    ok = (c(0, 1, inst) > 0 and c(1, 2, inst) > 0 and inst.u_first[2] > inst.u_second[2]
          and inst.u_first[3] < inst.u_second[3] and c(3, 4, inst) == 0)
    order = build_preference_order(inst)
    if not ok or order.order != (0, 1, 2, 3, 4) or order.x_count != 3:
        raise InstanceError("epsilon breaks the preference order of the tightness instance")


def gen_random(seed, n: int, m: int, normalized: bool = False, value_bound: int = 12,
               type_split=None, zero_rate: float = 0.15) -> Instance:
    """Seeded random instance with small-denominator rational utilities.

    Each entry is zero with probability ``zero_rate`` and otherwise ``p/q``
    with ``1 <= p, q <= value_bound``.  Items worth zero to both types are
    redrawn.  Normalized rows are divided by their sums.  ``type_split`` is
    drawn uniformly from ``[1, n-1]`` unless given.
    """
    if n < 2 or m < 0:
        raise InstanceError("need n >= 2 and m >= 0")
    rng = random.Random(seed)
    if type_split is None:
        type_split = rng.randint(1, n - 1)

    def draw():
        if rng.random() < zero_rate:
            return Fraction(0)
        return Fraction(rng.randint(1, value_bound), rng.randint(1, value_bound))

    while True:
        first, second = [], []
        for _ in range(m):
            a, b = draw(), draw()
            while a == 0 and b == 0:
                a, b = draw(), draw()
            first.append(a)
            second.append(b)
        if not normalized or m == 0:
            break
        s1, s2 = sum(first), sum(second)
        if s1 > 0 and s2 > 0:
            first = [v / s1 for v in first]
            second = [v / s2 for v in second]
            break
    if normalized and m == 0:
        raise InstanceError("a normalized instance needs at least one item")
    return Instance(n, type_split, tuple(first), tuple(second), normalized)
