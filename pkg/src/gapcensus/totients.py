"""Multiplicative counting over square-free moduli.

For square-free P, how often a pattern fits inside U(P) factors through the
prime support: one factor (q - #distinct residues of the pattern mod q) per
prime q. Euler's phi and Nagell's theta are the one- and two-offset special
cases; the empty pattern gives P itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from .configurations import Configuration, kappa_inclusion_exclusion
from .primes import is_prime, primes_upto
from .rings import RingContext


@dataclass(frozen=True)
class SquareFreeModulus:
    """A square-free modulus given by its ordered prime support."""

    P: int
    support: tuple[int, ...]

    def __post_init__(self) -> None:
        s = self.support
        if not s:
            raise ValueError("support must contain at least one prime")
        if any(s[i] >= s[i + 1] for i in range(len(s) - 1)):
            raise ValueError("support primes must be strictly increasing")
        if not all(is_prime(q) for q in s):
            raise ValueError(f"support contains a non-prime: {s}")
        if prod(s) != self.P:
            raise ValueError(f"support product {prod(s)} != P = {self.P}")

    @classmethod
    def from_support(cls, primes_seq) -> "SquareFreeModulus":
        s = tuple(sorted(primes_seq))
        if len(set(s)) != len(s):
            raise ValueError(f"support primes must be distinct: {s}")
        return cls(prod(s), s)

    def ring(self) -> RingContext:
        return RingContext(self.P, self.support)


def primorial_modulus(p: int) -> SquareFreeModulus:
    """The modulus p# with support all primes <= p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return SquareFreeModulus.from_support(primes_upto(p))


def configuration_mod(t: Configuration, q: int) -> Configuration:
    """The pattern reduced modulo a prime divisor q of the modulus."""
    if not is_prime(q) or t.ring.n % q != 0:
        raise ValueError(f"{q} is not a prime divisor of {t.ring.n}")
    return Configuration(RingContext(q), frozenset(off % q for off in t.offsets))


def residue_class_count(offsets, q: int) -> int:
    """Number of distinct residues mod q among the offsets."""
    seen = bytearray(q)
    count = 0
    for off in offsets:
        r = off % q
        if not seen[r]:
            seen[r] = 1
            count += 1
    return count


def nu_crt(t: Configuration, modulus: SquareFreeModulus) -> int:
    """Pattern-fitting count inside U(P) via the per-prime product."""
    if t.ring.n != modulus.P:
        raise ValueError(f"configuration lives mod {t.ring.n}, not mod {modulus.P}")
    result = 1
    for q in modulus.support:
        factor = q - residue_class_count(t.offsets, q)
        if factor == 0:
            return 0
        result *= factor
    return result


def euler_phi(modulus: SquareFreeModulus) -> int:
    """phi(P) = product of (q - 1) over the support."""
    return prod(q - 1 for q in modulus.support)


def nagell_theta(m: int, modulus: SquareFreeModulus) -> int:
    """Solutions of m = x + y (mod P) with both x and y coprime to P."""
    ring = RingContext(modulus.P, modulus.support)
    return nu_crt(Configuration.of(ring, (0, m)), modulus)


def generalized_totient(t: Configuration, modulus: SquareFreeModulus) -> int:
    """P for the empty pattern, phi(P) for {0}, theta for pairs, nu_crt beyond."""
    if t.is_empty:
        return modulus.P
    return nu_crt(t, modulus)


def kappa_crt(
    t: Configuration, modulus: SquareFreeModulus, *, max_complement: int = 30
) -> int:
    """Consecutive-core count over U(P), with the multiplicative nu substituted
    into the inclusion-exclusion sum."""
    return kappa_inclusion_exclusion(
        t, nu=lambda cfg: nu_crt(cfg, modulus), max_complement=max_complement
    )
