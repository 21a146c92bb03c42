"""Configurations (offset patterns containing 0), their cores over a subset E
of Z/nZ, and the inclusion-exclusion identity for the consecutive core.

The *_direct operations scan Z/nZ by definition; they are deliberately naive
and serve as the oracle that the closed-form paths are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .rings import ResidueSubset, RingContext, consecutive_pairs, is_consecutive_set


class SubsetExplosionError(ValueError):
    """Raised when an inclusion-exclusion sum would enumerate too many subsets."""


class SparseSubsetError(ValueError):
    """Raised when a subset is too sparse for the alternating-sum identity.

    A shifted pattern is a contiguous run of E either along its own span or,
    when E leaves an arc of length >= n - L(T) empty, around the other side
    of the circle. The alternating sum only accounts for the first reading,
    so it is refused outside its domain instead of undercounting.
    """


@dataclass(frozen=True)
class Configuration:
    """A subset of Z/nZ containing 0 (or the distinguished empty pattern).

    The empty configuration exists only for the generalized-totient identity
    nu(empty) = n; every consecutive-core operation requires 0 in offsets.
    """

    ring: RingContext
    offsets: frozenset[int]

    def __post_init__(self) -> None:
        n = self.ring.n
        if any(not 0 <= t < n for t in self.offsets):
            raise ValueError("offsets must be canonical in [0, n)")
        if self.offsets and 0 not in self.offsets:
            raise ValueError("a nonempty configuration must contain 0")

    @classmethod
    def of(cls, ring: RingContext, values: Iterable[int]) -> "Configuration":
        return cls(ring, frozenset(v % ring.n for v in values))

    @classmethod
    def empty(cls, ring: RingContext) -> "Configuration":
        return cls(ring, frozenset())

    @property
    def is_empty(self) -> bool:
        return not self.offsets

    @property
    def length(self) -> int:
        """Largest representative in the pattern."""
        if not self.offsets:
            raise ValueError("length is undefined for the empty configuration")
        return max(self.offsets)

    def complement(self) -> frozenset[int]:
        """Residues below the length that the pattern skips over."""
        return frozenset(x for x in range(1, self.length) if x not in self.offsets)

    def union_with(self, extra: Iterable[int]) -> "Configuration":
        return Configuration(self.ring, self.offsets | frozenset(extra))


def induced_configuration(f: ResidueSubset, x: int) -> Configuration:
    """The pattern obtained by rebasing f at one of its elements x."""
    n = f.ring.n
    x = x % n
    if x not in f.members:
        raise ValueError(f"{x} is not an element of the subset")
    return Configuration(f.ring, frozenset((m - x) % n for m in f.members))


def core(t: Configuration, e: ResidueSubset) -> ResidueSubset:
    """All x such that the whole shifted pattern x + t lands inside e."""
    if t.ring.n != e.ring.n:
        raise ValueError(f"mismatched moduli: {t.ring.n} vs {e.ring.n}")
    n = t.ring.n
    hits = frozenset(
        x for x in range(n) if all((x + off) % n in e.members for off in t.offsets)
    )
    return ResidueSubset(e.ring, hits)


def nu_direct(t: Configuration, e: ResidueSubset) -> int:
    """How many shifts place the pattern inside e (definition scan)."""
    return len(core(t, e))


def consecutive_core(t: Configuration, e: ResidueSubset) -> ResidueSubset:
    """All x such that x + t forms a contiguous run of e."""
    if t.is_empty:
        raise ValueError("consecutive core requires a configuration containing 0")
    n = t.ring.n
    hits = []
    for x in core(t, e):
        shifted = ResidueSubset(e.ring, frozenset((x + off) % n for off in t.offsets))
        if is_consecutive_set(shifted, e):
            hits.append(x)
    return ResidueSubset(e.ring, frozenset(hits))


def kappa_direct(t: Configuration, e: ResidueSubset) -> int:
    """Count of shifts making the pattern a contiguous run of e (the oracle)."""
    return len(consecutive_core(t, e))


def _check_wrap_safe(t: Configuration, e: ResidueSubset) -> None:
    """Refuse subsets where a shifted pattern could wrap around the circle."""
    if t.length == 0 or not e.members or len(core(t, e)) == 0:
        return
    longest = max(g for _, _, g in consecutive_pairs(e))
    if longest >= e.ring.n - t.length:
        raise SparseSubsetError(
            f"subset has an empty arc of length {longest} >= n - L(T) = "
            f"{e.ring.n - t.length}; shifted patterns can wrap around it and "
            f"the alternating sum undercounts the consecutive core"
        )


def kappa_inclusion_exclusion(
    t: Configuration,
    e: ResidueSubset | None = None,
    *,
    nu: Callable[[Configuration], int] | None = None,
    max_complement: int = 30,
) -> int:
    """Consecutive-core count via the alternating sum over complement subsets.

    Each subset X of the complement contributes (-1)^|X| * nu(t union X).
    nu defaults to the definition scan against e; passing a callable lets
    square-free moduli substitute the multiplicative fast path (the callable
    path trusts the caller to stay inside the identity's domain; with an
    explicit e the domain is checked, see SparseSubsetError).
    """
    if t.is_empty:
        raise ValueError("the inclusion-exclusion sum requires 0 in the pattern")
    if nu is None:
        if e is None:
            raise ValueError("provide a subset e or a nu callable")
        _check_wrap_safe(t, e)
        subset = e
        nu = lambda cfg: nu_direct(cfg, subset)
    delta = sorted(t.complement())
    m = len(delta)
    if m > max_complement:
        raise SubsetExplosionError(
            f"subset explosion: complement has {m} elements, "
            f"2**{m} terms exceed the limit of 2**{max_complement}"
        )
    total = 0
    for bits in range(1 << m):
        chosen = [delta[j] for j in range(m) if bits >> j & 1]
        value = nu(t.union_with(chosen))
        total += value if len(chosen) % 2 == 0 else -value
    return total
