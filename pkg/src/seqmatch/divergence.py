"""Information measures (bits) and edge weights for both matching problems."""

from __future__ import annotations

import math

import numpy as np

from .model import Distribution, InputError, KnownInstance, UnknownInstance, _same_alphabet


def kl_divergence(nu: Distribution, mu: Distribution) -> float:
    """D(nu || mu) in bits; +inf when nu is not absolutely continuous w.r.t. mu."""
    _same_alphabet(nu, mu)
    p, q = nu.mass, mu.mass
    live = p > 0
    if np.any(q[live] == 0):
        return math.inf
    p, q = p[live], q[live]
    return max(0.0, float(np.sum(p * np.log2(p / q))))


def entropy(mu: Distribution) -> float:
    p = mu.mass[mu.mass > 0]
    return max(0.0, float(-np.sum(p * np.log2(p))))


def known_edge_weight(gamma_y: Distribution, mu: Distribution, alpha: float = 1.0) -> float:
    """Weight of the edge between a source and an observed string.

    ``alpha`` is the string's length relative to the reference length and
    must be at least one.
    """
    if not alpha >= 1:
        raise InputError(f"length ratio alpha must be >= 1, got {alpha!r}")
    d = kl_divergence(gamma_y, mu)
    return d if alpha == 1 else alpha * d


def _mixture(gx: np.ndarray, gy: np.ndarray, nx: int, ny: int) -> np.ndarray:
    # nx*gx + ny*gy is evaluated as a commutative sum so swapping the
    # arguments gives a bit-identical mixture
    return (nx * gx + ny * gy) / (nx + ny)


def unknown_edge_weight(gamma_x: Distribution, gamma_y: Distribution, nx: int, ny: int,
                        n: int | None = None) -> float:
    """Weight of the edge between a training string and an observed string.

    With ``m`` the empirical distribution of the concatenation, returns
    ``(nx/n) D(gx||m) + (ny/n) D(gy||m)``. The reference length ``n``
    defaults to ``min(nx, ny)``; for equal lengths both factors are 1.
    """
    _same_alphabet(gamma_x, gamma_y)
    if nx < 1 or ny < 1:
        raise InputError("sequence lengths must be positive")
    if n is None:
        n = min(nx, ny)
    m = Distribution(_mixture(gamma_x.mass, gamma_y.mass, nx, ny))
    a = kl_divergence(gamma_x, m)
    b = kl_divergence(gamma_y, m)
    if nx == ny == n:
        return a + b
    return (nx / n) * a + (ny / n) * b


def weight_matrix_known(instance: KnownInstance) -> np.ndarray:
    """M x N matrix of known-source edge weights (+inf marks a pruned edge)."""
    gammas = instance.empiricals()
    n = instance.n
    w = np.empty((instance.M, instance.N))
    for j, (g, nj) in enumerate(zip(gammas, instance.lengths)):
        alpha = nj / n
        for i, mu in enumerate(instance.sources):
            w[i, j] = known_edge_weight(g, mu, alpha)
    return w


def weight_matrix_unknown(instance: UnknownInstance, prune_disjoint: bool = False) -> np.ndarray:
    """M x N matrix of unknown-source edge weights.

    The weights are always finite. ``prune_disjoint`` marks pairs whose
    empirical distributions have disjoint supports as +inf; this can change
    the optimum and is off by default.
    """
    gx = instance.train_empiricals()
    gy = instance.observation_empiricals()
    n = instance.n
    w = np.empty((instance.M, instance.N))
    for i, (a, na) in enumerate(zip(gx, instance.train_lengths)):
        for j, (b, nb) in enumerate(zip(gy, instance.observation_lengths)):
            if prune_disjoint and not np.any(a.support() & b.support()):
                w[i, j] = math.inf
            else:
                w[i, j] = unknown_edge_weight(a, b, na, nb, n)
    return w
