"""Ground-truth gap censuses by direct enumeration of U(p#).

A streaming, segmented scan keeps x in [1, p#] iff no prime of the support
divides it: a precomputed coprimality wheel over a sub-primorial absorbs the
small primes, trial division handles the rest. Segments stitch in index
order, and the cycle closes with the wrap-around gap from the last survivor
back to 1 + p#.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .gaps import GapCensus, gap_census, max_gap
from .primes import is_prime, primes_upto, primorial

# The wheel covers the largest prefix of the support whose product stays
# below this bound (2*3*5*7*11*13 = 30030 at most).
_WHEEL_LIMIT = 30030

# Gap histogram size; far beyond any maximal gap reachable by enumeration.
_GAP_CAP = 1 << 12


@dataclass
class SieveConfig:
    """Parameters for one enumeration run."""

    p: int
    segment_size: int = 1 << 22
    max_candidates: int | None = None  # budget; a partial census is flagged
    limit: int = field(init=False)

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.segment_size < self.p:
            raise ValueError("segment size must be at least p")
        self.limit = primorial(self.p)


def _build_wheel(p: int) -> tuple[np.ndarray, np.ndarray]:
    """(coprimality pattern modulo the wheel, remaining primes to trial-divide)."""
    support = primes_upto(p)
    wheel_primes = []
    w = 1
    for q in support:
        if w * q > _WHEEL_LIMIT:
            break
        w *= q
        wheel_primes.append(q)
    wheel = np.ones(w, dtype=np.uint8)
    for q in wheel_primes:
        wheel[::q] = 0
    wheel[0] = 0 if wheel_primes else 1
    extra = np.asarray(support[len(wheel_primes):], dtype=np.int64)
    return wheel, extra


def enumerate_coprime_gaps(cfg: SieveConfig, *, threads: int = 1) -> GapCensus:
    """Count every gap between successive elements of U(p#) by scanning.

    Exceeding the candidate budget yields a partial census flagged
    complete=False (counts of the scanned prefix, no wrap-around gap).
    """
    big_p = cfg.limit
    wheel, extra = _build_wheel(cfg.p)
    scan_to = big_p
    complete = True
    if cfg.max_candidates is not None and big_p > cfg.max_candidates:
        scan_to = cfg.max_candidates
        complete = False

    segments = []
    start = 1
    while start <= scan_to:
        length = min(cfg.segment_size, scan_to - start + 1)
        segments.append((start, length))
        start += length

    results = backend.run_chunks(
        lambda seg: backend.sieve_segment(seg[0], seg[1], wheel, extra, _GAP_CAP),
        segments,
        threads,
    )

    counts = np.zeros(_GAP_CAP, dtype=np.int64)
    overall_first = -1
    prev_last = -1
    total = 0
    maxgap_seen = 0
    for first, last, seg_counts, n, maxgap in results:
        if n == 0:
            continue
        counts += seg_counts
        maxgap_seen = max(maxgap_seen, maxgap)
        if overall_first < 0:
            overall_first = first
        else:
            boundary = first - prev_last
            maxgap_seen = max(maxgap_seen, boundary)
            if boundary < _GAP_CAP:
                counts[boundary] += 1
        prev_last = last
        total += n
    if complete and overall_first >= 0:
        wrap = overall_first + big_p - prev_last
        maxgap_seen = max(maxgap_seen, wrap)
        if wrap < _GAP_CAP:
            counts[wrap] += 1
    if maxgap_seen >= _GAP_CAP:
        raise RuntimeError(f"gap {maxgap_seen} overflows the histogram cap {_GAP_CAP}")

    entries = {int(d): int(k) for d, k in enumerate(counts) if k > 0}
    return GapCensus(p=cfg.p, P=big_p, entries=entries, complete=complete, method="oracle")


@dataclass
class FormulaOracleReport:
    """Comparison of the formula census against the enumeration census."""

    p: int
    formula: GapCensus
    oracle: GapCensus
    mismatches: list[tuple[int, int, int]]  # (D, formula count, oracle count)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def verify_formula_against_oracle(
    p: int,
    d_set: set[int] | None = None,
    *,
    segment_size: int = 1 << 22,
    threads: int = 1,
    cache=None,
) -> FormulaOracleReport:
    """Cross-check the formula census against a fresh enumeration of U(p#)."""
    oracle = enumerate_coprime_gaps(SieveConfig(p, segment_size=segment_size), threads=threads)
    formula = gap_census(p, cache=cache, threads=threads)
    if d_set is None:
        d_set = set(oracle.entries) | set(formula.entries)
    mismatches = []
    for d in sorted(d_set):
        f = formula.entries.get(d, 0)
        o = oracle.entries.get(d, 0)
        if f != o:
            mismatches.append((d, f, o))
    return FormulaOracleReport(p=p, formula=formula, oracle=oracle, mismatches=mismatches)


def oracle_confirms_max_gap(census: GapCensus) -> bool:
    """True when no count sits beyond the census's reported maximal gap."""
    return census.complete and all(
        k == 0 for d, k in census.entries.items() if d > max_gap(census)
    )
