"""Alphabets, sequences, distributions, matchings and problem instances.

Symbols are always dense integer indices ``0 .. size-1``; mapping from any
external representation happens at ingestion time, never here.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence as Seq

import numpy as np

MASS_TOLERANCE = 1e-9
DISTINCT_TOLERANCE = 1e-12


class SeqMatchError(Exception):
    """Base class for every error raised by this package."""


class InputError(SeqMatchError, ValueError):
    """Malformed or inconsistent input."""


class GuardError(InputError):
    """A size guard was exceeded (enumeration or product alphabet too large)."""


class InfeasibleError(SeqMatchError):
    """No cardinality-K matching has finite weight."""


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise InputError(f"alphabet size must be a positive integer, got {self.size!r}")


@dataclass(frozen=True, eq=False)
class Sequence:
    """An ordered string of symbol indices."""

    symbols: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.symbols)
        if arr.ndim != 1 or arr.size == 0:
            raise InputError("a sequence must be a non-empty 1-D list of symbols")
        if arr.dtype.kind not in "iu":
            if arr.dtype.kind == "f" and np.all(arr == np.floor(arr)):
                arr = arr.astype(np.int64)
            else:
                raise InputError("sequence symbols must be integers")
        if arr.min() < 0:
            raise InputError("sequence symbols must be non-negative")
        object.__setattr__(self, "symbols", _frozen_array(arr, np.int64))

    def __len__(self) -> int:
        return int(self.symbols.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, Sequence) and np.array_equal(self.symbols, other.symbols)

    def __hash__(self) -> int:
        return hash(self.symbols.tobytes())

    def check_alphabet(self, alphabet: Alphabet) -> None:
        top = int(self.symbols.max())
        if top >= alphabet.size:
            raise InputError(f"symbol {top} out of range for alphabet of size {alphabet.size}")


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability mass vector over ``0 .. len(mass)-1``.

    The stored values are never rescaled, so a distribution written with
    ``repr`` precision reads back bit-identical.
    """

    mass: np.ndarray

    def __post_init__(self):
        arr = np.array(self.mass, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise InputError("a distribution must be a non-empty 1-D vector")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise InputError("probabilities must be finite and non-negative")
        total = math.fsum(arr.tolist())
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise InputError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "mass", _frozen_array(arr, np.float64))

    @classmethod
    def from_counts(cls, counts) -> "Distribution":
        counts = np.asarray(counts, dtype=np.int64)
        total = int(counts.sum())
        if total <= 0:
            raise InputError("counts must have a positive total")
        return cls(counts / total)

    @property
    def size(self) -> int:
        return int(self.mass.size)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.size)

    def support(self) -> np.ndarray:
        return self.mass > 0

    def total_variation(self, other: "Distribution") -> float:
        _same_alphabet(self, other)
        return 0.5 * float(np.abs(self.mass - other.mass).sum())

    def __eq__(self, other) -> bool:
        return isinstance(other, Distribution) and np.array_equal(self.mass, other.mass)

    def __hash__(self) -> int:
        return hash(self.mass.tobytes())

    def __repr__(self) -> str:
        return f"Distribution({self.mass.tolist()!r})"


def _same_alphabet(a: Distribution, b: Distribution) -> None:
    if a.size != b.size:
        raise InputError(f"alphabet mismatch: {a.size} vs {b.size}")


@dataclass(frozen=True)
class Matching:
    """A set of (left, right) index pairs with no shared endpoint.

    ``edges`` is kept sorted, which makes tuple comparison the
    lexicographic order on sorted edge lists used for tie-breaking.
    """

    edges: tuple[tuple[int, int], ...]
    n_left: int
    n_right: int

    def __post_init__(self):
        edges = tuple(sorted((int(i), int(j)) for i, j in self.edges))
        rows = [i for i, _ in edges]
        cols = [j for _, j in edges]
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise InputError(f"edges {edges} share a vertex")
        if any(not 0 <= i < self.n_left for i in rows) or any(not 0 <= j < self.n_right for j in cols):
            raise InputError(f"edges {edges} out of range for a {self.n_left}x{self.n_right} graph")
        object.__setattr__(self, "edges", edges)

    @property
    def k(self) -> int:
        return len(self.edges)

    def unmatched_left(self) -> tuple[int, ...]:
        used = {i for i, _ in self.edges}
        return tuple(i for i in range(self.n_left) if i not in used)

    def unmatched_right(self) -> tuple[int, ...]:
        used = {j for _, j in self.edges}
        return tuple(j for j in range(self.n_right) if j not in used)

    def mate_of_right(self) -> dict[int, int]:
        return {j: i for i, j in self.edges}

    @classmethod
    def identity(cls, k: int, n_left: int | None = None, n_right: int | None = None) -> "Matching":
        return cls(tuple((i, i) for i in range(k)), n_left if n_left is not None else k,
                   n_right if n_right is not None else k)


def empirical_distribution(seq: Sequence, alphabet: Alphabet) -> Distribution:
    """Type of ``seq``: symbol counts divided once by the length."""
    seq.check_alphabet(alphabet)
    return Distribution.from_counts(np.bincount(seq.symbols, minlength=alphabet.size))


def hypothesis_count(M: int, N: int, K: int) -> int:
    """Number of cardinality-K matchings in the complete M x N bipartite graph."""
    if min(M, N, K) < 0:
        raise InputError("M, N and K must be non-negative")
    if K > min(M, N):
        raise InputError(f"K={K} exceeds min(M, N)={min(M, N)}")
    count = math.comb(M, K) * math.comb(N, K) * math.factorial(K)
    if count > sys.maxsize:
        raise OverflowError(f"hypothesis count {count} exceeds the platform integer range")
    return count


def _check_k(k: int, M: int, N: int) -> None:
    if int(k) != k or k < 0 or k > min(M, N):
        raise InputError(f"K={k} must be an integer in [0, min(M, N)={min(M, N)}]")


def _check_sequences(seqs: Iterable[Sequence], alphabet: Alphabet, equal_lengths: bool, what: str) -> None:
    lengths = set()
    for idx, s in enumerate(seqs):
        if not isinstance(s, Sequence):
            raise InputError(f"{what}[{idx}] is not a Sequence")
        s.check_alphabet(alphabet)
        lengths.add(len(s))
    if equal_lengths and len(lengths) > 1:
        raise InputError(f"{what} have unequal lengths {sorted(lengths)}")


@dataclass(frozen=True)
class KnownInstance:
    """Problem with known sources: match N observed strings to M distributions."""

    sources: tuple[Distribution, ...]
    observations: tuple[Sequence, ...]
    k: int
    unequal_lengths: bool = False
    require_distinct: bool = True

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "observations", tuple(self.observations))
        if not self.sources or not self.observations:
            raise InputError("need at least one source and one observation")
        size = self.sources[0].size
        for mu in self.sources:
            if mu.size != size:
                raise InputError("sources do not share one alphabet")
        _check_sequences(self.observations, Alphabet(size), not self.unequal_lengths, "observations")
        _check_k(self.k, self.M, self.N)
        if self.require_distinct:
            for a in range(self.M):
                for b in range(a + 1, self.M):
                    if self.sources[a].total_variation(self.sources[b]) <= DISTINCT_TOLERANCE:
                        raise InputError(f"sources {a} and {b} are not distinct")

    @property
    def M(self) -> int:
        return len(self.sources)

    @property
    def N(self) -> int:
        return len(self.observations)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.sources[0].size)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.observations)

    @property
    def n(self) -> int:
        """Reference length: the shortest observation."""
        return min(self.lengths)

    def empiricals(self) -> list[Distribution]:
        return [empirical_distribution(s, self.alphabet) for s in self.observations]


@dataclass(frozen=True)
class UnknownInstance:
    """Problem with unknown sources: match N observed strings to M training strings."""

    train: tuple[Sequence, ...]
    observations: tuple[Sequence, ...]
    k: int
    alphabet: Alphabet = field(default=None)  # type: ignore[assignment]
    unequal_lengths: bool = False

    def __post_init__(self):
        object.__setattr__(self, "train", tuple(self.train))
        object.__setattr__(self, "observations", tuple(self.observations))
        if not self.train or not self.observations:
            raise InputError("need at least one training and one observed sequence")
        if self.alphabet is None:
            top = max(int(s.symbols.max()) for s in self.train + self.observations)
            object.__setattr__(self, "alphabet", Alphabet(top + 1))
        _check_sequences(self.train + self.observations, self.alphabet,
                         not self.unequal_lengths, "sequences")
        _check_k(self.k, self.M, self.N)

    @property
    def M(self) -> int:
        return len(self.train)

    @property
    def N(self) -> int:
        return len(self.observations)

    @property
    def train_lengths(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.train)

    @property
    def observation_lengths(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.observations)

    @property
    def n(self) -> int:
        """Reference length: the shortest sequence of either set."""
        return min(self.train_lengths + self.observation_lengths)

    def train_empiricals(self) -> list[Distribution]:
        return [empirical_distribution(s, self.alphabet) for s in self.train]

    def observation_empiricals(self) -> list[Distribution]:
        return [empirical_distribution(s, self.alphabet) for s in self.observations]


class Verdict(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    # unconstrained tests only: the per-string assignment is not one-to-one
    NON_INJECTIVE = "non-injective"


@dataclass(frozen=True)
class DecisionOutcome:
    verdict: Verdict
    matching: Matching | None
    best_weight: float
    second_weight: float
    threshold: float
    assignment: tuple[int, ...] | None = None
    constrained: bool = True

    def __post_init__(self):
        if self.verdict is Verdict.ACCEPT:
            if self.matching is None:
                raise InputError("an accepted outcome needs a matching")
            if not self.second_weight >= self.threshold:
                raise InputError("accepted although the second weight is below the threshold")
        if self.constrained and not self.best_weight <= self.second_weight:
            raise InputError("best weight exceeds second weight")

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPT


def as_sequences(rows: Seq) -> list[Sequence]:
    return [r if isinstance(r, Sequence) else Sequence(np.asarray(r)) for r in rows]


def as_distributions(rows: Seq) -> list[Distribution]:
    return [r if isinstance(r, Distribution) else Distribution(r) for r in rows]
