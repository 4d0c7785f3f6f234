"""Chernoff information, divergence-ball exponents and their permutation minima.

All quantities are in bits. One-dimensional problems are solved along the
geometric path between two distributions, restricted to their common
support, so endpoint limits come out of the same formula as interior points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence as Seq

import numpy as np

from .divergence import kl_divergence
from .model import Distribution, GuardError, InputError, _same_alphabet

PRODUCT_LIMIT = 10**6
MAX_PERMUTED = 6
SCAN_POINTS = 1001
ALPHA_TOL = 1e-10
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``0 .. N-1``; ``map[k]`` is the image of ``k``."""

    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.map)
        if sorted(m) != list(range(len(m))):
            raise InputError(f"{m} is not a permutation")
        object.__setattr__(self, "map", m)

    def __len__(self) -> int:
        return len(self.map)

    def __call__(self, k: int) -> int:
        return self.map[k]

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def all(cls, n: int) -> Iterator["Permutation"]:
        for p in itertools.permutations(range(n)):
            yield cls(p)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.map)
        for k, v in enumerate(self.map):
            inv[v] = k
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """``self after other``: k -> self(other(k))."""
        return Permutation(tuple(self.map[other.map[k]] for k in range(len(other.map))))

    def is_identity(self) -> bool:
        return self.map == tuple(range(len(self.map)))


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = ALPHA_TOL) -> float:
    """Minimizer of a unimodal ``f`` on ``[lo, hi]`` to within ``tol``."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _common_logs(p1: Distribution, p2: Distribution) -> tuple[np.ndarray, np.ndarray]:
    _same_alphabet(p1, p2)
    both = (p1.mass > 0) & (p2.mass > 0)
    return np.log2(p1.mass[both]), np.log2(p2.mass[both])


def _log2sumexp2(t: np.ndarray) -> float:
    top = float(t.max())
    return top + math.log2(float(np.sum(np.exp2(t - top))))


def _g(alpha: float, l1: np.ndarray, l2: np.ndarray) -> float:
    return _log2sumexp2(alpha * l1 + (1.0 - alpha) * l2)


def chernoff_information(p1: Distribution, p2: Distribution) -> float:
    """C(p1, p2) = -min over alpha in [0, 1] of log2 sum p1^alpha p2^(1-alpha).

    The sum runs over the common support; at the endpoints this gives the
    one-sided limits. Disjoint supports give +inf.
    """
    l1, l2 = _common_logs(p1, p2)
    if l1.size == 0:
        return math.inf
    if np.array_equal(p1.mass, p2.mass):
        return 0.0
    grid = np.linspace(0.0, 1.0, SCAN_POINTS)
    vals = [_g(a, l1, l2) for a in grid]
    k = int(np.argmin(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, SCAN_POINTS - 1)]
    a_star = golden_section(lambda a: _g(a, l1, l2), lo, hi)
    best = min(vals[k], _g(a_star, l1, l2))
    return max(0.0, -best)


def _tilted(alpha: float, l1: np.ndarray, l2: np.ndarray) -> np.ndarray:
    t = alpha * l1 + (1.0 - alpha) * l2
    w = np.exp2(t - t.max())
    return w / w.sum()


def _kl_logs(nu: np.ndarray, lq: np.ndarray) -> float:
    live = nu > 0
    return max(0.0, float(np.sum(nu[live] * (np.log2(nu[live]) - lq[live]))))


def e_eta(p1: Distribution, p2: Distribution, eta: float) -> float:
    """min D(nu || p2) over nu with D(nu || p1) <= eta.

    Returns 0 once ``eta`` reaches D(p2 || p1), D(p1 || p2) at ``eta = 0``,
    and +inf when no distribution within ``eta`` of p1 is absolutely
    continuous with respect to p2.
    """
    if not eta >= 0 or math.isnan(eta):
        raise InputError(f"eta must be non-negative, got {eta!r}")
    if eta >= kl_divergence(p2, p1):
        return 0.0
    l1, l2 = _common_logs(p1, p2)
    if l1.size == 0:
        return math.inf
    d1 = lambda a: _kl_logs(_tilted(a, l1, l2), l1)
    # D(nu_alpha || p1) decreases from alpha = 0 to alpha = 1
    if eta < d1(1.0):
        return math.inf
    if eta >= d1(0.0):
        return _kl_logs(_tilted(0.0, l1, l2), l2)
    if eta == d1(1.0):
        return _kl_logs(_tilted(1.0, l1, l2), l2)
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if d1(mid) > eta:
            lo = mid
        else:
            hi = mid
    # hi is feasible: D(nu_hi || p1) <= eta
    return _kl_logs(_tilted(hi, l1, l2), l2)


def product_distribution(mus: Seq[Distribution], sigma: Permutation) -> Distribution:
    """Law of (z_1..z_N) with z_k drawn from ``mus[sigma(k)]``, flattened row-major."""
    if len(sigma) != len(mus) or not mus:
        raise InputError("need one distribution per permuted coordinate")
    size = mus[0].size
    for mu in mus:
        _same_alphabet(mus[0], mu)
    if size ** len(mus) > PRODUCT_LIMIT:
        raise GuardError(f"product alphabet {size}^{len(mus)} exceeds {PRODUCT_LIMIT}")
    out = mus[sigma(0)].mass
    for k in range(1, len(mus)):
        out = np.multiply.outer(out, mus[sigma(k)].mass)
    return Distribution(np.ravel(out))


def _non_identity_products(mus: Seq[Distribution]) -> tuple[Distribution, list[Distribution]]:
    n = len(mus)
    if n < 2:
        raise InputError("need at least two distributions")
    if n > MAX_PERMUTED:
        raise GuardError(f"{n}! permutations exceed the limit of {MAX_PERMUTED}!")
    base = product_distribution(mus, Permutation.identity(n))
    others = [product_distribution(mus, p) for p in Permutation.all(n) if not p.is_identity()]
    return base, others


# Relabeling the product coordinates by sigma^-1 maps the pair
# (mu^sigma, mu^tau) onto (mu^id, mu^(tau sigma^-1)) and leaves every
# divergence unchanged, so the minima over ordered pairs only need the
# identity on one side.

def c_star(mus: Seq[Distribution]) -> float:
    """Smallest Chernoff information between product laws of distinct permutations."""
    base, others = _non_identity_products(mus)
    return min(chernoff_information(base, q) for q in others)


def c_uc_star(mus: Seq[Distribution]) -> float:
    """Smallest pairwise Chernoff information among the distributions."""
    if len(mus) < 2:
        raise InputError("need at least two distributions")
    return min(chernoff_information(a, b) for a, b in itertools.combinations(mus, 2))


@dataclass(frozen=True)
class ExponentReport:
    c_star: float
    c_uc_star: float
    rejection_constrained: float
    rejection_unconstrained: float
    lam: float


def rejection_exponents(mus: Seq[Distribution], lam: float) -> ExponentReport:
    """Rejection exponents of the constrained and unconstrained tests at ``lam``.

    Each is +inf when ``lam`` does not exceed the matching Chernoff minimum.
    """
    if not (math.isfinite(lam) and lam > 0):
        raise InputError(f"lambda must be finite and positive, got {lam!r}")
    base, others = _non_identity_products(mus)
    cs = min(chernoff_information(base, q) for q in others)
    cu = c_uc_star(mus)
    rc = min(e_eta(base, q, lam) for q in others) if cs < lam else math.inf
    if cu < lam:
        ru = min(e_eta(a, b, lam) for a, b in itertools.permutations(mus, 2))
    else:
        ru = math.inf
    return ExponentReport(cs, cu, rc, ru, lam)


def bernoulli_pair(rho: float) -> list[Distribution]:
    """A fair coin and a coin with P(1) = ``rho``."""
    if not 0 <= rho <= 1:
        raise InputError(f"rho must lie in [0, 1], got {rho!r}")
    return [Distribution([0.5, 0.5]), Distribution([1.0 - rho, rho])]
