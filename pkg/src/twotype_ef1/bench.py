"""Solver dispatch and the benchmark sweeps behind ``solve`` and ``bench``."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .approx_n import approx1
from .core import Instance, InstanceError, is_complete, is_ef1, social_welfare
from .oracle import brute_force_opt_ef1, gen_random, gen_tightness_norm, gen_tightness_unnorm
from .serialize import SolveReport
from .three_norm import solve_three_norm
from .three_unnorm import solve_three_unnorm

ALGORITHMS = ("approx1", "three-unnorm", "three-norm")
RATIO_BOUND = {"approx1": Fraction(2), "three-unnorm": Fraction(2), "three-norm": Fraction(5, 3)}
TIGHTNESS_EPSILONS = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000), Fraction(1, 10000))


def choose_algorithm(inst: Instance) -> str:
    if inst.n == 3:
        return "three-norm" if inst.normalized else "three-unnorm"
    if inst.normalized:
        return "approx1"
    raise InstanceError("no algorithm applies to an unnormalized instance with n=%d" % inst.n)


def run_algorithm(inst: Instance, algo: str = "auto"):
    """Returns ``(algorithm name, allocation, candidate summaries)``."""
    if algo == "auto":
        algo = choose_algorithm(inst)
    candidates = ()
    if algo == "approx1":
        alloc = approx1(inst)
    elif algo == "three-unnorm":
        alloc, cands = solve_three_unnorm(inst)
        candidates = tuple((c.item, None if c.case is None else c.case.value, c.welfare) for c in cands)
    elif algo == "three-norm":
        alloc = solve_three_norm(inst)
    else:
        raise InstanceError("unknown algorithm %r" % algo)
    return algo, alloc, candidates


def solve_report(inst: Instance, algo: str = "auto", with_oracle: bool = False) -> SolveReport:
    """Run a solver and recompute every reported property from the allocation alone."""
    algo, alloc, candidates = run_algorithm(inst, algo)
    welfare = social_welfare(inst, alloc)
    opt = satisfied = None
    if with_oracle:
        opt = brute_force_opt_ef1(inst).opt_ef1
        satisfied = opt <= RATIO_BOUND[algo] * welfare
    return SolveReport(algo, welfare, is_ef1(inst, alloc), is_complete(inst, alloc), alloc,
                       opt, satisfied, candidates)


@dataclass(frozen=True)
class BenchRow:
    label: str
    family: str
    n: int
    m: int
    sol: Fraction
    opt: Fraction
    ef1: bool
    complete: bool

    @property
    def ratio(self) -> Optional[Fraction]:
        return None if self.sol == 0 else self.opt / self.sol

    @property
    def ok(self) -> bool:
        return self.ef1 and self.complete and self.opt <= RATIO_BOUND[self.family] * self.sol


def _evaluate(label, inst, algo) -> BenchRow:
    report = solve_report(inst, algo, with_oracle=True)
    return BenchRow(label, report.algorithm, inst.n, inst.m, report.welfare, report.oracle_opt,
                    report.ef1, report.complete)


def tightness_suite(epsilons=TIGHTNESS_EPSILONS):
    rows = []
    for eps in epsilons:
        rows.append(_evaluate("tightness-unnorm eps=%s" % eps, gen_tightness_unnorm(eps), "three-unnorm"))
        rows.append(_evaluate("tightness-norm eps=%s" % eps, gen_tightness_norm(eps), "three-norm"))
    return rows


def random_case(seed: int, index: int):
    """Instance ``index`` of the random sweep: families rotate unnorm-3, norm-3, approx1."""
    case_seed = seed * 1_000_003 + index
    rng = random.Random(case_seed)
    m = rng.randint(1, 8)
    family = ALGORITHMS[(index + 1) % 3]
    if family == "three-unnorm":
        return family, gen_random(case_seed, 3, m, normalized=False)
    if family == "three-norm":
        return family, gen_random(case_seed, 3, m, normalized=True)
    return family, gen_random(case_seed, rng.choice((2, 3, 4, 5)), m, normalized=True)


def _random_row(args) -> BenchRow:
    seed, index = args
    family, inst = random_case(seed, index)
    return _evaluate("random #%d" % index, inst, family)


def random_suite(seed: int = 0, count: int = 300, jobs: int = 1):
    tasks = [(seed, i) for i in range(count)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_random_row, tasks, chunksize=16))
    return [_random_row(t) for t in tasks]
