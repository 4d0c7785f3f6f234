"""Minimum-weight cardinality-K bipartite matching.

The solver works on exact integers. Every finite float weight is a dyadic
rational, so scaling by the largest denominator present is lossless. A
lexicographic perturbation is folded into the low digits of each cost so the
optimum is unique: among matchings of equal exact weight the one with the
lexicographically smallest sorted edge list wins.

Rectangular and partial (K < min(M, N)) problems are reduced to a square
assignment of size M + N - K: N - K dummy rows absorb the unmatched columns,
M - K dummy columns absorb the unmatched rows, and dummy-dummy pairs are
forbidden.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .model import GuardError, InfeasibleError, InputError, Matching, _check_k, hypothesis_count

ENUMERATION_LIMIT = 10**6


def _as_matrix(w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2:
        raise InputError("weight matrix must be 2-D")
    if np.any(np.isnan(w)) or np.any(w == -math.inf):
        raise InputError("weights must be real numbers or +inf")
    return w


def _integer_costs(w: np.ndarray) -> list[list[int | None]]:
    """Exact integer costs with the tie-break perturbation; None = forbidden."""
    M, N = w.shape
    ratios = [[x.as_integer_ratio() if math.isfinite(x) else None for x in row] for row in w.tolist()]
    den = max((r[1] for row in ratios for r in row if r is not None), default=1)
    base = N + 1
    scale = base**M
    costs: list[list[int | None]] = []
    for i, row in enumerate(ratios):
        place = base ** (M - 1 - i)
        costs.append([None if r is None else r[0] * (den // r[1]) * scale + (j - N) * place
                      for j, r in enumerate(row)])
    return costs


def _hungarian(a: list[list[int | None]], n: int) -> list[int] | None:
    """Square min-cost assignment on 1-indexed ``a``; returns column -> row or None."""
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv: list[int | None] = [None] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = a[i0]
            delta = None
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                c = row[j]
                if c is not None:
                    cur = c - u[i0] - v[j]
                    if minv[j] is None or cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                if minv[j] is not None and (delta is None or minv[j] < delta):
                    delta = minv[j]
                    j1 = j
            if delta is None:
                return None
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                elif minv[j] is not None:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    return p


def _solve(costs: list[list[int | None]], M: int, N: int, K: int,
           forbidden: tuple[int, int] | None = None) -> tuple[tuple[tuple[int, int], ...], int] | None:
    if K == 0:
        return (), 0
    size = M + N - K
    a: list[list[int | None]] = [[None] * (size + 1) for _ in range(size + 1)]
    for r in range(size):
        for c in range(size):
            if r < M and c < N:
                val = costs[r][c]
                if forbidden == (r, c):
                    val = None
            elif r < M or c < N:
                val = 0
            else:
                val = None
            a[r + 1][c + 1] = val
    p = _hungarian(a, size)
    if p is None:
        return None
    edges = []
    total = 0
    for c in range(1, N + 1):
        r = p[c] - 1
        if r < M:
            edges.append((r, c - 1))
            total += costs[r][c - 1]
    edges.sort()
    return tuple(edges), total


def _fsum_weight(w: np.ndarray, edges) -> float:
    return math.fsum(float(w[i, j]) for i, j in edges)


def min_weight_matching(w, K: int) -> tuple[Matching, float]:
    """Minimum-weight matching of cardinality exactly K.

    Raises InfeasibleError when every cardinality-K matching uses a +inf edge.
    """
    w = _as_matrix(w)
    M, N = w.shape
    _check_k(K, M, N)
    found = _solve(_integer_costs(w), M, N, K)
    if found is None:
        raise InfeasibleError(f"no finite-weight matching of cardinality {K}")
    edges, _ = found
    return Matching(edges, M, N), _fsum_weight(w, edges)


def second_min_weight_matching(w, K: int, best: Matching) -> tuple[Matching | None, float]:
    """Best matching distinct from ``best``, by forbidding each of its edges in turn.

    Any other cardinality-K matching misses at least one edge of ``best``,
    so the cheapest of the K restricted optima is the runner-up. Returns
    ``(None, inf)`` when there is a single hypothesis or every alternative
    has infinite weight.
    """
    w = _as_matrix(w)
    M, N = w.shape
    _check_k(K, M, N)
    if best.k != K:
        raise InputError(f"best matching has cardinality {best.k}, expected {K}")
    costs = _integer_costs(w)
    winner = None
    for edge in best.edges:
        found = _solve(costs, M, N, K, forbidden=edge)
        if found is not None and (winner is None or found[1] < winner[1]):
            winner = found
    if winner is None:
        return None, math.inf
    return Matching(winner[0], M, N), _fsum_weight(w, winner[0])


def rank_two(w, K: int) -> tuple[tuple[Matching, float], tuple[Matching | None, float]]:
    best = min_weight_matching(w, K)
    return best, second_min_weight_matching(w, K, best[0])


def enumerate_matchings(M: int, N: int, K: int) -> list[Matching]:
    """Every cardinality-K matching, ordered lexicographically by sorted edge list."""
    count = hypothesis_count(M, N, K)
    if count > ENUMERATION_LIMIT:
        raise GuardError(f"{count} matchings exceed the enumeration limit {ENUMERATION_LIMIT}")
    out = []
    for rows in itertools.combinations(range(M), K):
        for cols in itertools.permutations(range(N), K):
            out.append(tuple(zip(rows, cols)))
    out.sort()
    return [Matching(e, M, N) for e in out]


def exact_weight(w, m: Matching) -> Fraction | float:
    """Exact rational weight of ``m`` (+inf if it uses a forbidden edge)."""
    w = _as_matrix(w)
    vals = [float(w[i, j]) for i, j in m.edges]
    if any(math.isinf(x) for x in vals):
        return math.inf
    return sum((Fraction(x) for x in vals), Fraction(0))
