"""Gap counting in U(p#): coefficient listings and the evaluation formula.

For an even gap length D = 2a, the count K(D, p#) of consecutive pairs that
are D apart reduces to

    K(D, p#) = sum over terms (c, b) of  c * prod_{p* <= q <= p} (q - b)

where p* is the smallest prime above max(a, 2) and the coefficients come from
an alternating sum over subsets of the even offsets strictly between 0 and D
(odd offsets always hit the residue class count 2 mod 2 and vanish). The
coefficients are independent of p, so a listing computed once serves every
prime from p* up; listings are cached on disk in the format

    D = 6: [5, (2, 2), (-2, 3)]

For p below p*, the formula does not apply and the count falls back to a
direct evaluation (tiny moduli are scanned outright).
"""

from __future__ import annotations

import ast
import os
import re
from dataclasses import dataclass
from pathlib import Path

from . import backend
from .primes import is_prime, next_prime_after, primes_in_range, primes_upto, primorial
from .rings import RingContext, consecutive_pairs, unit_group
from .totients import euler_phi, primorial_modulus

DEFAULT_CACHE_DIR = ".gapcache"
CACHE_ENV = "GAPCENSUS_CACHE"

# 2**(a-1) subset evaluations for D = 2a; a <= 26 by default.
DEFAULT_MAX_SUBSETS = 1 << 25

_CHUNK = 1 << 20


class EnumerationBudgetError(ValueError):
    """Raised when a coefficient computation would exceed the subset budget."""


class FormulaRangeError(ValueError):
    """Raised when the listing formula is evaluated below its validity range."""


def p_star(d: int) -> int:
    """Smallest prime from which the listing formula for gap length d is valid."""
    _require_even_gap(d)
    return next_prime_after(max(d // 2, 2))


def _require_even_gap(d: int) -> None:
    if d < 2 or d % 2 != 0:
        raise ValueError(f"gap length must be a positive even integer, got {d}")


@dataclass(frozen=True)
class GapCoefficientListing:
    """Evaluation data for one even gap length: threshold prime and terms."""

    D: int
    p_star: int
    terms: tuple[tuple[int, int], ...]  # (coefficient, offset b), b ascending

    def coefficient_sum(self) -> int:
        return sum(c for c, _ in self.terms)


def format_listing(listing: GapCoefficientListing) -> str:
    """One cache line, e.g. ``D = 6: [5, (2, 2), (-2, 3)]``."""
    parts = [str(listing.p_star)] + [f"({c}, {b})" for c, b in listing.terms]
    return f"D = {listing.D}: [{', '.join(parts)}]"


def parse_listing(line: str) -> GapCoefficientListing:
    """Inverse of format_listing; tolerant of whitespace runs."""
    match = re.fullmatch(r"\s*D\s*=\s*(\d+)\s*:\s*(\[.*\])\s*", line)
    if not match:
        raise ValueError(f"malformed listing line: {line!r}")
    d = int(match.group(1))
    try:
        payload = ast.literal_eval(re.sub(r"\s+", " ", match.group(2)))
    except (SyntaxError, ValueError) as exc:
        raise ValueError(f"malformed listing payload: {line!r}") from exc
    if (
        not isinstance(payload, list)
        or not payload
        or not isinstance(payload[0], int)
        or not all(
            isinstance(t, tuple) and len(t) == 2 and all(isinstance(v, int) for v in t)
            for t in payload[1:]
        )
    ):
        raise ValueError(f"malformed listing payload: {line!r}")
    return GapCoefficientListing(d, payload[0], tuple(payload[1:]))


class ListingCache:
    """Disk cache holding one listing line per gap length."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    @classmethod
    def from_options(cls, cache_dir: str | os.PathLike | None = None) -> "ListingCache":
        """Resolve the cache directory: explicit flag, then environment, then default."""
        return cls(cache_dir or os.environ.get(CACHE_ENV) or DEFAULT_CACHE_DIR)

    @property
    def path(self) -> Path:
        return self.directory / "coefficients.txt"

    def _lines(self) -> list[str]:
        if not self.path.exists():
            return []
        return [ln for ln in self.path.read_text().splitlines() if ln.strip()]

    def load(self, d: int) -> GapCoefficientListing | None:
        pattern = re.compile(rf"\s*D\s*=\s*{d}\s*:")
        for line in self._lines():
            if pattern.match(line):
                listing = parse_listing(line)
                if listing.D != d:
                    raise ValueError(f"cache line advertises D={listing.D}, expected {d}")
                return listing
        return None

    def store(self, listing: GapCoefficientListing) -> None:
        kept = []
        for line in self._lines():
            try:
                if parse_listing(line).D == listing.D:
                    continue
            except ValueError:
                pass  # keep unrelated garbage; verify reports it
            kept.append(line)
        kept.append(format_listing(listing))

        def sort_key(line: str) -> int:
            match = re.match(r"\s*D\s*=\s*(\d+)", line)
            return int(match.group(1)) if match else 1 << 62

        kept.sort(key=sort_key)
        self.directory.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text("\n".join(kept) + "\n")
        tmp.replace(self.path)

    def stored_gap_lengths(self) -> list[int]:
        out = []
        for line in self._lines():
            match = re.match(r"\s*D\s*=\s*(\d+)", line)
            if match:
                out.append(int(match.group(1)))
        return sorted(out)


def _even_subset_sums(d: int, primes: tuple[int, ...], threads: int) -> list[int]:
    """sums[k]: over k-element subsets X of {2, 4, ..., d-2}, the summed
    products prod_q (q - #residue classes of {0, d} union X mod q)."""
    evens = tuple(range(2, d - 1, 2))
    tables = backend.build_subset_tables(d, evens, primes)
    total = tables.total_subsets
    chunks = [(s, min(s + _CHUNK, total)) for s in range(0, total, _CHUNK)]
    partials = backend.run_chunks(
        lambda bounds: backend.subset_sums_range(tables, *bounds), chunks, threads
    )
    sums = [0] * (len(evens) + 1)
    for arr in partials:
        for j in range(len(sums)):
            sums[j] += int(arr[j])
    return sums


def gap_coefficients(
    d: int,
    *,
    threads: int = 1,
    cache: ListingCache | None = None,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
) -> GapCoefficientListing:
    """The coefficient listing for gap length d (cached when a cache is given).

    The subset scan has 2**(d/2 - 1) terms; computations beyond max_subsets
    are refused rather than silently attempted.
    """
    _require_even_gap(d)
    if cache is not None:
        hit = cache.load(d)
        if hit is not None:
            return hit
    a = d // 2
    required = 1 << max(a - 1, 0)
    if required > max_subsets:
        raise EnumerationBudgetError(
            f"enumeration budget: D={d} needs {required} subset evaluations, "
            f"budget is {max_subsets}"
        )
    ps = p_star(d)
    sums = _even_subset_sums(d, primes_upto(max(a, 2)), threads)
    terms = []
    for j, s in enumerate(sums):
        b = j + 2
        if b >= ps:
            # The product over primes p* <= q <= p then contains (p* - b) = 0,
            # so the term never contributes for any valid p.
            break
        terms.append((s if j % 2 == 0 else -s, b))
    while terms and terms[-1][0] == 0:
        terms.pop()
    listing = GapCoefficientListing(d, ps, tuple(terms))
    if cache is not None:
        cache.store(listing)
    return listing


def coefficient_sum(listing: GapCoefficientListing) -> int:
    """Sum of the listing coefficients; equals the gap count in q# for q the
    largest prime <= D/2 (zero for every D up to at least 50, since those q#
    have no gap that long)."""
    return listing.coefficient_sum()


def gap_count(
    d: int,
    p: int,
    *,
    listing: GapCoefficientListing | None = None,
    cache: ListingCache | None = None,
    threads: int = 1,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
) -> int:
    """K(d, p#) by the listing formula; valid only for p >= p_star(d)."""
    _require_even_gap(d)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    ps = p_star(d)
    if p < ps:
        raise FormulaRangeError(
            f"the listing for D={d} is valid for p >= {ps}; for p={p} use the "
            f"sieve oracle or the direct inclusion-exclusion path"
        )
    if listing is None:
        listing = gap_coefficients(d, threads=threads, cache=cache, max_subsets=max_subsets)
    qs = primes_in_range(ps, p)
    total = 0
    for c, b in listing.terms:
        term = c
        for q in qs:
            term *= q - b
        total += term
    return total


def direct_gap_count(
    d: int, p: int, *, threads: int = 1, max_subsets: int = DEFAULT_MAX_SUBSETS
) -> int:
    """K(d, p#) without the p >= p_star restriction.

    Tiny moduli are scanned outright (which also settles d near or beyond p#,
    where the pair pattern {0, d mod p#} stops meaning "gap of length d").
    Larger moduli use the alternating even-subset sum with the full prime
    support in the product.
    """
    _require_even_gap(d)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    big_p = primorial(p)
    if big_p <= 1000:
        gaps = {}
        for _, _, g in consecutive_pairs(unit_group(RingContext(big_p))):
            gaps[g] = gaps.get(g, 0) + 1
        return gaps.get(d, 0)
    a = d // 2
    required = 1 << max(a - 1, 0)
    if required > max_subsets:
        raise EnumerationBudgetError(
            f"enumeration budget: D={d} needs {required} subset evaluations, "
            f"budget is {max_subsets}"
        )
    sums = _even_subset_sums(d, primes_upto(p), threads)
    return sum(s if k % 2 == 0 else -s for k, s in enumerate(sums))


@dataclass
class GapCensus:
    """Counts of every even gap length in U(p#), with completion metadata."""

    p: int
    P: int
    entries: dict[int, int]
    complete: bool
    method: str  # formula | oracle | direct

    def sum_counts(self) -> int:
        return sum(self.entries.values())

    def weighted_sum(self) -> int:
        return sum(d * k for d, k in self.entries.items())

    def checksums(self) -> tuple[bool, bool]:
        """(sum K == phi(P), sum D*K == P); meaningful for complete censuses."""
        phi = euler_phi(primorial_modulus(self.p))
        return self.sum_counts() == phi, self.weighted_sum() == self.P


def max_gap(census: GapCensus) -> int:
    """Largest gap length with a nonzero count (requires a complete census)."""
    if not census.complete:
        raise ValueError("max gap is only defined for a complete census")
    return max(d for d, k in census.entries.items() if k > 0)


def gap_census(
    p: int,
    *,
    max_d: int | None = None,
    cache: ListingCache | None = None,
    threads: int = 1,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
) -> GapCensus:
    """Full gap census of U(p#) by the formula path.

    Gap lengths are processed in increasing order; the census is complete once
    the weighted sum of counts reaches p# (the circle is fully covered), which
    bounds the largest gap without guessing it in advance. Lengths whose
    listing is not yet valid at p fall back to the direct path.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    big_p = primorial(p)
    if max_d is None:
        # Largest even D whose subset scan fits the budget: 2**(D/2 - 1) terms.
        max_d = 2 * max_subsets.bit_length()
    entries: dict[int, int] = {}
    acc = 0
    complete = False
    d = 2
    while d <= max_d:
        if p >= p_star(d):
            k = gap_count(d, p, cache=cache, threads=threads, max_subsets=max_subsets)
        else:
            k = direct_gap_count(d, p, threads=threads, max_subsets=max_subsets)
        if k < 0:
            raise RuntimeError(f"negative gap count K({d}, {p}#) = {k}")
        entries[d] = k
        acc += d * k
        if acc == big_p:
            complete = True
            break
        if acc > big_p:
            raise RuntimeError(
                f"census accumulator overshot the modulus at D={d}: {acc} > {big_p}"
            )
        d += 2
    return GapCensus(p=p, P=big_p, entries=entries, complete=complete, method="formula")
