"""Residue arithmetic on Z/nZ: canonical representatives, circular distance,
and the consecutiveness predicate on subsets viewed as points on a circle.

Residues are plain ints kept canonical in [0, n). A RingContext fixes the
modulus (and optionally its prime support, for square-free moduli); a
ResidueSubset is an explicit membership-testable subset of Z/nZ.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod
from typing import Iterable, Iterator

from .primes import is_prime


@dataclass(frozen=True)
class RingContext:
    """A modulus n >= 2, optionally with its ordered prime support."""

    n: int
    support: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"modulus must be >= 2, got {self.n}")
        if self.support is not None:
            s = self.support
            if any(s[i] >= s[i + 1] for i in range(len(s) - 1)):
                raise ValueError("support primes must be strictly increasing")
            if not all(is_prime(q) for q in s):
                raise ValueError(f"support contains a non-prime: {s}")
            if prod(s) != self.n:
                raise ValueError(
                    f"support product {prod(s)} does not equal modulus {self.n}"
                )


def canonical(x: int, ring: RingContext) -> int:
    """The representative of x in [0, n)."""
    return x % ring.n


def circle_distance(x: int, y: int, ring: RingContext) -> int:
    """Shortest distance between two points on the circle of circumference n."""
    d = abs(x % ring.n - y % ring.n)
    return min(d, ring.n - d)


@dataclass(frozen=True)
class ResidueSubset:
    """An explicit subset of Z/nZ with canonical members."""

    ring: RingContext
    members: frozenset[int]

    def __post_init__(self) -> None:
        n = self.ring.n
        if any(not 0 <= m < n for m in self.members):
            raise ValueError("subset members must be canonical in [0, n)")

    @classmethod
    def of(cls, ring: RingContext, values: Iterable[int]) -> "ResidueSubset":
        """Build a subset, canonicalizing the given values."""
        return cls(ring, frozenset(v % ring.n for v in values))

    def translate(self, s: int) -> "ResidueSubset":
        """The subset shifted by s on the circle."""
        n = self.ring.n
        return ResidueSubset(self.ring, frozenset((m + s) % n for m in self.members))

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def __contains__(self, x: int) -> bool:
        return x % self.ring.n in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)


def unit_group(ring: RingContext) -> ResidueSubset:
    """U(n): the residues coprime to n."""
    n = ring.n
    return ResidueSubset(ring, frozenset(x for x in range(n) if gcd(x, n) == 1))


def _require_same_ring(a: ResidueSubset, b: ResidueSubset) -> None:
    if a.ring.n != b.ring.n:
        raise ValueError(f"mismatched moduli: {a.ring.n} vs {b.ring.n}")


def is_consecutive_set(a: ResidueSubset, e: ResidueSubset) -> bool:
    """Whether a forms one contiguous run of e on the circle.

    True iff there is an arc whose intersection with e is exactly a.
    a must be a nonempty subset of e.
    """
    _require_same_ring(a, e)
    if not a.members:
        raise ValueError("consecutiveness is undefined for the empty set")
    if not a.members <= e.members:
        raise ValueError("a must be a subset of e")
    order = sorted(e.members)
    m = len(order)
    flags = [x in a.members for x in order]
    exits = sum(1 for i in range(m) if flags[i] and not flags[(i + 1) % m])
    # 0 exits means a == e (the whole circle is the arc).
    return exits <= 1


def consecutive_pairs(e: ResidueSubset) -> list[tuple[int, int, int]]:
    """Adjacent pairs of e in cyclic order, each with its gap length.

    A single-element subset yields one wrap-around gap of length n. The gap
    lengths always sum to n and there is one pair per element.
    """
    if not e.members:
        raise ValueError("no consecutive pairs in an empty subset")
    n = e.ring.n
    order = sorted(e.members)
    if len(order) == 1:
        x = order[0]
        return [(x, x, n)]
    pairs = [
        (order[i], order[i + 1], order[i + 1] - order[i])
        for i in range(len(order) - 1)
    ]
    pairs.append((order[-1], order[0], n - order[-1] + order[0]))
    return pairs
