"""Small prime utilities: sieve, primality, primorials.

Everything here deals with primes that are tiny by the standards of the rest
of the package (the moduli get huge, their prime supports never do), so a
plain sieve plus deterministic Miller-Rabin covers all needs.
"""

from __future__ import annotations

from functools import lru_cache
from math import prod

# Deterministic Miller-Rabin witness set, valid for all n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@lru_cache(maxsize=None)
def primes_upto(n: int) -> tuple[int, ...]:
    """All primes <= n, ascending."""
    if n < 2:
        return ()
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for i in range(2, int(n**0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return tuple(i for i, f in enumerate(flags) if f)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3e24)."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime_after(n: int) -> int:
    """Smallest prime strictly greater than n."""
    k = max(n, 1) + 1
    while not is_prime(k):
        k += 1
    return k


def primes_in_range(lo: int, hi: int) -> tuple[int, ...]:
    """Primes q with lo <= q <= hi, ascending."""
    return tuple(q for q in primes_upto(hi) if q >= lo)


def primorial(p: int) -> int:
    """Product of all primes <= p; requires p prime."""
    if not is_prime(p):
        raise ValueError(f"primorial requires a prime argument, got {p}")
    return prod(primes_upto(p))
