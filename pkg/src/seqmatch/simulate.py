"""Seeded Monte Carlo estimates of error, rejection and correct-match rates.

Every trial draws from its own generator, seeded by ``(seed, n_index,
trial_index)`` through numpy's SeedSequence spawn keys and fed to PCG64.
Results therefore do not depend on how trials are split across threads;
worker results are reduced by summing integer counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence as Seq

import numpy as np

from .decision import (Mode, known_source_test, unconstrained_known_test,
                       unconstrained_unknown_test, unknown_source_test)
from .model import (Alphabet, DecisionOutcome, Distribution, InfeasibleError, InputError, KnownInstance,
                    Matching, Sequence, UnknownInstance, Verdict)

CORRECT, ERROR, REJECT = "correct", "error", "reject"


def trial_rng(seed: int, n_index: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n_index, trial_index)))


def sample_sequence(mu: Distribution, n: int, rng: np.random.Generator) -> Sequence:
    """``n`` i.i.d. draws from ``mu`` by inverse CDF over the symbol order."""
    if n < 1:
        raise InputError("sequence length must be positive")
    cdf = np.cumsum(mu.mass)
    cdf /= cdf[-1]
    return Sequence(np.searchsorted(cdf, rng.random(n), side="right"))


@dataclass(frozen=True)
class TestSelector:
    __test__ = False

    mode: Mode = Mode.KNOWN
    constrained: bool = True

    @property
    def name(self) -> str:
        return f"{self.mode.value}-{'constrained' if self.constrained else 'unconstrained'}"


@dataclass(frozen=True)
class SimPlan:
    """A simulation: data laws, the true hypothesis, and the test to run.

    ``sources`` are the laws of the M known sources (or of the M training
    strings). Observed string ``j`` is drawn from ``sources[i]`` when the
    truth matches ``(i, j)`` and otherwise from the next law in
    ``outsiders``.
    """

    sources: tuple[Distribution, ...]
    truth: Matching
    n_grid: tuple[int, ...]
    trials: int
    lam: float
    seed: int
    test: TestSelector = field(default_factory=TestSelector)
    outsiders: tuple[Distribution, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "outsiders", tuple(self.outsiders))
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise InputError("n_grid must hold positive lengths")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise InputError("n_grid must be strictly increasing")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise InputError("lambda must be finite and positive")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")
        if self.truth.n_left != len(self.sources):
            raise InputError("truth matching does not fit the number of sources")
        if len(self.truth.unmatched_right()) != len(self.outsiders):
            raise InputError(f"{len(self.truth.unmatched_right())} unmatched observations need "
                             f"as many outsider laws, got {len(self.outsiders)}")
        sizes = {mu.size for mu in self.sources + self.outsiders}
        if len(sizes) != 1:
            raise InputError("all laws must share one alphabet")

    @property
    def observation_laws(self) -> tuple[Distribution, ...]:
        mate = self.truth.mate_of_right()
        extra = iter(self.outsiders)
        return tuple(self.sources[mate[j]] if j in mate else next(extra)
                     for j in range(self.truth.n_right))


def _run_test(test: TestSelector, plan: SimPlan, train, obs) -> DecisionOutcome:
    k = plan.truth.k
    if test.mode is Mode.KNOWN:
        inst = KnownInstance(plan.sources, obs, k, require_distinct=False)
        return known_source_test(inst, plan.lam) if test.constrained else \
            unconstrained_known_test(inst, plan.lam)
    inst = UnknownInstance(train, obs, k, alphabet=Alphabet(plan.sources[0].size))
    return unknown_source_test(inst, plan.lam) if test.constrained else \
        unconstrained_unknown_test(inst, plan.lam)


def classify(outcome: DecisionOutcome, truth: Matching) -> str:
    if outcome.verdict is Verdict.REJECT:
        return REJECT
    if outcome.verdict is Verdict.ACCEPT and outcome.matching == truth:
        return CORRECT
    return ERROR


@dataclass(frozen=True)
class Counts:
    correct: int = 0
    error: int = 0
    rejected: int = 0
    infeasible: int = 0

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(self.correct + other.correct, self.error + other.error,
                      self.rejected + other.rejected, self.infeasible + other.infeasible)

    @property
    def trials(self) -> int:
        return self.correct + self.error + self.rejected

    def bump(self, label: str, infeasible: bool = False) -> "Counts":
        return self + Counts(int(label == CORRECT), int(label == ERROR), int(label == REJECT),
                             int(infeasible))


@dataclass(frozen=True)
class RateRow:
    n: int
    counts: Counts

    @property
    def error_rate(self) -> float:
        return self.counts.error / self.counts.trials

    @property
    def rejection_rate(self) -> float:
        return self.counts.rejected / self.counts.trials

    @property
    def correct_rate(self) -> float:
        return self.counts.correct / self.counts.trials


@dataclass(frozen=True)
class RateReport:
    test: str
    rows: tuple[RateRow, ...]
    fitted_exponent: float
    censored: bool

    def row(self, n: int) -> RateRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)


def fit_exponent(ns: Seq[int], errors: Seq[int], trials: Seq[int]) -> tuple[float, bool]:
    """Least-squares slope of -log2(error rate) against n.

    Lengths with no errors are left out. One usable point gives
    -log2(rate)/n; none gives ``(inf, True)``.
    """
    pts = [(n, -math.log2(e / t)) for n, e, t in zip(ns, errors, trials) if e > 0]
    if not pts:
        return math.inf, True
    if len(pts) == 1:
        n, y = pts[0]
        return y / n, False
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope), False


def _trial_counts(plan: SimPlan, tests: Seq[TestSelector], n_index: int, lo: int,
                  hi: int) -> list[Counts]:
    n = plan.n_grid[n_index]
    laws = plan.observation_laws
    out = [Counts() for _ in tests]
    for t in range(lo, hi):
        rng = trial_rng(plan.seed, n_index, t)
        train = [sample_sequence(mu, n, rng) for mu in plan.sources] \
            if plan.test.mode is Mode.UNKNOWN else None
        obs = [sample_sequence(mu, n, rng) for mu in laws]
        for s, test in enumerate(tests):
            try:
                label = classify(_run_test(test, plan, train, obs), plan.truth)
                out[s] = out[s].bump(label)
            except InfeasibleError:
                out[s] = out[s].bump(REJECT, infeasible=True)
    return out


def _simulate(plan: SimPlan, tests: Seq[TestSelector], threads: int) -> list[RateReport]:
    if threads < 1:
        raise InputError("threads must be at least 1")
    chunk = max(1, -(-plan.trials // (4 * threads)))
    per_test_rows: list[list[RateRow]] = [[] for _ in tests]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for n_index, n in enumerate(plan.n_grid):
            jobs = [pool.submit(_trial_counts, plan, tests, n_index, lo, min(lo + chunk, plan.trials))
                    for lo in range(0, plan.trials, chunk)]
            totals = [Counts() for _ in tests]
            for job in jobs:
                totals = [a + b for a, b in zip(totals, job.result())]
            for s, c in enumerate(totals):
                per_test_rows[s].append(RateRow(n, c))
    reports = []
    for test, rows in zip(tests, per_test_rows):
        slope, censored = fit_exponent([r.n for r in rows], [r.counts.error for r in rows],
                                       [r.counts.trials for r in rows])
        reports.append(RateReport(test.name, tuple(rows), slope, censored))
    return reports


def run_plan(plan: SimPlan, threads: int = 1) -> RateReport:
    """Rates of the plan's test at every length in the grid."""
    return _simulate(plan, [plan.test], threads)[0]


@dataclass(frozen=True)
class ComparisonReport:
    constrained: RateReport
    unconstrained: RateReport

    def rejection_gap(self, n: int) -> float:
        """Unconstrained minus constrained rejection rate."""
        return self.unconstrained.row(n).rejection_rate - self.constrained.row(n).rejection_rate

    def z_score(self, n: int) -> float:
        """Pooled two-proportion z for the rejection gap at ``n`` (0 when both rates are degenerate)."""
        a, b = self.constrained.row(n).counts, self.unconstrained.row(n).counts
        pooled = (a.rejected + b.rejected) / (a.trials + b.trials)
        se = math.sqrt(pooled * (1 - pooled) * (1 / a.trials + 1 / b.trials))
        return 0.0 if se == 0 else self.rejection_gap(n) / se


def compare_tests(plan: SimPlan, threads: int = 1) -> ComparisonReport:
    """Run the constrained and unconstrained tests on the same sampled data."""
    mode = plan.test.mode
    c, u = _simulate(plan, [TestSelector(mode, True), TestSelector(mode, False)], threads)
    return ComparisonReport(c, u)
