"""Decision rules with a no-match option, for known and unknown sources.

The constrained tests accept the minimum-weight matching when the
second-best matching weighs at least the finite-n threshold and reject
otherwise. The unconstrained tests match every observed string on its own
and reject when any string has a runner-up below the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence as Seq

import numpy as np

from .divergence import entropy, kl_divergence, weight_matrix_known, weight_matrix_unknown
from .matching import min_weight_matching, second_min_weight_matching
from .model import (DecisionOutcome, Distribution, InfeasibleError, InputError, KnownInstance,
                    Matching, UnknownInstance, Verdict)

TIE_TOLERANCE = 1e-9


class Mode(Enum):
    KNOWN = "known"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class DecisionConfig:
    lam: float
    mode: Mode = Mode.KNOWN
    constrained: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise InputError(f"lambda must be finite and positive, got {self.lam!r}")


def _offset(zsize: int, n: int) -> float:
    return zsize * math.log2(n + 1) / n


def threshold(config: DecisionConfig, M: int, N: int, zsize: int, n: int) -> float:
    """Finite-n acceptance threshold. Negative values are legal and never reject."""
    if n < 1:
        raise InputError("n must be positive")
    if config.mode is Mode.KNOWN:
        copies = N if config.constrained else 1
    else:
        copies = (M + N) if config.constrained else (N + 1)
    return config.lam - copies * _offset(zsize, n)


def threshold_unequal(lam: float, lengths: Seq[int], zsize: int, n: int) -> float:
    """Threshold when strings have individual lengths ``lengths`` around reference ``n``."""
    return lam - zsize * math.fsum(math.log2(m + 1) for m in lengths) / n


def _constrained(w: np.ndarray, k: int, thr: float) -> DecisionOutcome:
    best, best_w = min_weight_matching(w, k)
    second, second_w = second_min_weight_matching(w, k, best)
    verdict = Verdict.ACCEPT if second_w >= thr else Verdict.REJECT
    return DecisionOutcome(verdict, best, best_w, second_w, thr)


def known_source_test(instance: KnownInstance, lam: float) -> DecisionOutcome:
    """Optimal test for known sources.

    Raises InfeasibleError when no hypothesis has finite weight; that is a
    different outcome from rejection.
    """
    cfg = DecisionConfig(lam, Mode.KNOWN, True)
    if instance.unequal_lengths:
        thr = threshold_unequal(lam, instance.lengths, instance.alphabet.size, instance.n)
    else:
        thr = threshold(cfg, instance.M, instance.N, instance.alphabet.size, instance.n)
    return _constrained(weight_matrix_known(instance), instance.k, thr)


def unknown_source_test(instance: UnknownInstance, lam: float) -> DecisionOutcome:
    cfg = DecisionConfig(lam, Mode.UNKNOWN, True)
    if instance.unequal_lengths:
        thr = threshold_unequal(lam, instance.train_lengths + instance.observation_lengths,
                                instance.alphabet.size, instance.n)
    else:
        thr = threshold(cfg, instance.M, instance.N, instance.alphabet.size, instance.n)
    return _constrained(weight_matrix_unknown(instance), instance.k, thr)


def _unconstrained(w: np.ndarray, thr: float) -> DecisionOutcome:
    # w is M x N with sources/training strings on rows; each column is matched alone
    M, N = w.shape
    assignment = []
    runner_up = []
    for j in range(N):
        col = w[:, j]
        if not np.any(np.isfinite(col)):
            raise InfeasibleError(f"observed string {j} has infinite weight to every source")
        i_best = int(np.argmin(col))
        assignment.append(i_best)
        rest = np.delete(col, i_best)
        runner_up.append(float(rest.min()) if rest.size else math.inf)
    best_w = math.fsum(float(w[i, j]) for j, i in enumerate(assignment))
    second_w = min(runner_up)
    sigma = tuple(assignment)
    if second_w < thr:
        return DecisionOutcome(Verdict.REJECT, None, best_w, second_w, thr, sigma, constrained=False)
    if len(set(sigma)) < len(sigma):
        return DecisionOutcome(Verdict.NON_INJECTIVE, None, best_w, second_w, thr, sigma,
                               constrained=False)
    m = Matching(tuple((i, j) for j, i in enumerate(sigma)), M, N)
    return DecisionOutcome(Verdict.ACCEPT, m, best_w, second_w, thr, sigma, constrained=False)


def unconstrained_known_test(instance: KnownInstance, lam: float) -> DecisionOutcome:
    """Per-string classification against the known sources (requires M >= N = K)."""
    if not instance.M >= instance.N == instance.k:
        raise InputError(f"unconstrained known test needs M >= N = K, got M={instance.M}, "
                         f"N={instance.N}, K={instance.k}")
    if instance.unequal_lengths:
        raise InputError("unconstrained tests are defined for equal lengths only")
    thr = threshold(DecisionConfig(lam, Mode.KNOWN, False), instance.M, instance.N,
                    instance.alphabet.size, instance.n)
    return _unconstrained(weight_matrix_known(instance), thr)


def unconstrained_unknown_test(instance: UnknownInstance, lam: float) -> DecisionOutcome:
    """Per-string classification against training strings (requires M = N = K)."""
    if not instance.M == instance.N == instance.k:
        raise InputError(f"unconstrained unknown test needs M = N = K, got M={instance.M}, "
                         f"N={instance.N}, K={instance.k}")
    if instance.unequal_lengths:
        raise InputError("unconstrained tests are defined for equal lengths only")
    thr = threshold(DecisionConfig(lam, Mode.UNKNOWN, False), instance.M, instance.N,
                    instance.alphabet.size, instance.n)
    return _unconstrained(weight_matrix_unknown(instance), thr)


def _check_matching(m: Matching, M: int, N: int, k: int) -> None:
    if (m.n_left, m.n_right) != (M, N) or m.k != k:
        raise InputError(f"matching does not fit an {M}x{N} instance with K={k}")
    if k < 1:
        raise InputError("generalized likelihood needs K >= 1")


def generalized_log_likelihood_known(instance: KnownInstance, m: Matching) -> float:
    """Per-symbol log2 likelihood of hypothesis ``m``, maximized over the unmatched laws."""
    _check_matching(m, instance.M, instance.N, instance.k)
    if instance.unequal_lengths:
        raise InputError("generalized likelihood is defined for equal lengths only")
    gammas = instance.empiricals()
    terms = []
    mate = m.mate_of_right()
    for j, g in enumerate(gammas):
        if j in mate:
            d = kl_divergence(g, instance.sources[mate[j]])
            if math.isinf(d):
                return -math.inf
            terms.append(-entropy(g) - d)
        else:
            terms.append(-entropy(g))
    return math.fsum(terms)


def generalized_log_likelihood_unknown(instance: UnknownInstance, m: Matching) -> float:
    """Per-symbol log2 likelihood of ``m``, maximized over all source laws.

    A matched pair is best explained by the empirical distribution of the
    concatenated strings; an unmatched string by its own type.
    """
    _check_matching(m, instance.M, instance.N, instance.k)
    if instance.unequal_lengths:
        raise InputError("generalized likelihood is defined for equal lengths only")
    gx = instance.train_empiricals()
    gy = instance.observation_empiricals()
    terms = []
    for i, j in m.edges:
        mid = Distribution(0.5 * (gx[i].mass + gy[j].mass))
        terms.append(-2.0 * entropy(mid))
    terms.extend(-entropy(gx[i]) for i in m.unmatched_left())
    terms.extend(-entropy(gy[j]) for j in m.unmatched_right())
    return math.fsum(terms)


def best_by_score(candidates: Seq[Matching], score: Callable[[Matching], float],
                  maximize: bool = False, tol: float = TIE_TOLERANCE) -> Matching:
    """Optimum of ``score`` over ``candidates``; values within ``tol`` of the
    optimum count as tied and go to the lexicographically smallest matching."""
    values = [score(m) for m in candidates]
    sign = -1.0 if maximize else 1.0
    keyed = [sign * v for v in values]
    target = min(keyed)
    if math.isinf(target):
        tied = [m for m, v in zip(candidates, keyed) if v == target]
    else:
        tied = [m for m, v in zip(candidates, keyed) if v <= target + tol * max(1.0, abs(target))]
    return min(tied, key=lambda m: m.edges)


def hypothesis_weight(w: np.ndarray, m: Matching) -> float:
    """Total edge weight of hypothesis ``m`` (+inf when it uses a pruned edge)."""
    vals = [float(w[i, j]) for i, j in m.edges]
    if any(math.isinf(v) for v in vals):
        return math.inf
    return float(sum((Fraction(v) for v in vals), Fraction(0)))
