"""Backend selection and shared kernel plumbing.

The hot loops (subset enumeration, sieve segments) exist twice: JIT-compiled
via numba and as pure-numpy vector code. GAPCENSUS_BACKEND picks one:

    auto   (default) numba when importable, numpy otherwise
    numba  require the JIT backend, fail if numba is missing
    numpy  force the fallback

Work is partitioned into fixed-size chunks whose boundaries do not depend on
the worker count, and every kernel works in exact integer arithmetic, so any
thread count produces bit-identical results.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

BACKEND_ENV = "GAPCENSUS_BACKEND"

_numba_kernels = None
_numba_error: Exception | None = None


def _load_numba_kernels():
    global _numba_kernels, _numba_error
    if _numba_kernels is None and _numba_error is None:
        try:
            from . import _kernels_numba

            _numba_kernels = _kernels_numba
        except Exception as exc:  # pragma: no cover - depends on environment
            _numba_error = exc
    return _numba_kernels


def active_backend() -> str:
    """Resolve the backend name from the environment (read per call)."""
    choice = os.environ.get(BACKEND_ENV, "auto").strip().lower()
    if choice in ("", "auto"):
        return "numba" if _load_numba_kernels() is not None else "numpy"
    if choice == "numba":
        if _load_numba_kernels() is None:
            raise RuntimeError(f"numba backend requested but unavailable: {_numba_error}")
        return "numba"
    if choice == "numpy":
        return "numpy"
    raise ValueError(f"unknown {BACKEND_ENV} value: {choice!r}")


def _kernels():
    if active_backend() == "numba":
        return _load_numba_kernels()
    from . import _kernels_numpy

    return _kernels_numpy


@dataclass(frozen=True)
class SubsetTables:
    """Precomputed lookup tables for the subset-enumeration kernel.

    Subset index bits select even offsets; each table row holds, per prime,
    the OR of the residue bitmasks of the selected offsets (the base pattern
    {0, d} is folded into the low table).
    """

    qs: np.ndarray       # int64 (nq,)
    lo_or: np.ndarray    # uint64 (2**lo_bits, nq)
    hi_or: np.ndarray    # uint64 (2**hi_bits, nq)
    lo_pop: np.ndarray   # int64 (2**lo_bits,)
    hi_pop: np.ndarray   # int64 (2**hi_bits,)
    lo_bits: int
    m: int               # number of selectable offsets

    @property
    def total_subsets(self) -> int:
        return 1 << self.m


def build_subset_tables(d: int, evens: Sequence[int], primes: Sequence[int]) -> SubsetTables:
    """Tables for scanning subsets of `evens` joined to the base pattern {0, d}."""
    if any(q >= 64 for q in primes):
        raise ValueError("residue bitmasks require primes below 64")
    m = len(evens)
    nq = len(primes)
    qs = np.asarray(primes, dtype=np.int64)
    masks = np.zeros((m, nq), dtype=np.uint64)
    for j, e in enumerate(evens):
        for i, q in enumerate(primes):
            masks[j, i] = np.uint64(1) << np.uint64(e % q)
    base = np.zeros(nq, dtype=np.uint64)
    for i, q in enumerate(primes):
        base[i] = (np.uint64(1) << np.uint64(0)) | (np.uint64(1) << np.uint64(d % q))

    lo_bits = min(m, 13)

    def or_table(rows: np.ndarray) -> np.ndarray:
        bits = rows.shape[0]
        tab = np.zeros((1 << bits, nq), dtype=np.uint64)
        for j in range(bits):
            blk = 1 << j
            tab[blk : 2 * blk] = tab[:blk] | rows[j]
        return tab

    lo_or = or_table(masks[:lo_bits]) | base
    hi_or = or_table(masks[lo_bits:])
    lo_pop = np.bitwise_count(np.arange(1 << lo_bits, dtype=np.uint64)).astype(np.int64)
    hi_pop = np.bitwise_count(np.arange(1 << (m - lo_bits), dtype=np.uint64)).astype(np.int64)
    return SubsetTables(qs, lo_or, hi_or, lo_pop, hi_pop, lo_bits, m)


def subset_sums_range(tables: SubsetTables, start: int, stop: int) -> np.ndarray:
    """Per-cardinality sums of the prime-factor products over one index range."""
    out = np.zeros(tables.m + 1, dtype=np.int64)
    return _kernels().subset_sums_range(
        tables.lo_or,
        tables.hi_or,
        tables.lo_pop,
        tables.hi_pop,
        tables.qs,
        tables.lo_bits,
        start,
        stop,
        out,
    )


def sieve_segment(seg_start: int, seg_len: int, wheel: np.ndarray, extra: np.ndarray, cap: int):
    """One coprimality scan segment; see the kernel docstrings."""
    counts = np.zeros(cap, dtype=np.int64)
    first, last, n, maxgap = _kernels().sieve_segment(
        seg_start, seg_len, wheel, extra, counts
    )
    return int(first), int(last), counts, int(n), int(maxgap)


def run_chunks(worker: Callable, args_list: Sequence, threads: int) -> list:
    """Run worker over the argument list, results in argument order.

    With threads > 1 the chunks execute on a thread pool (the numba kernels
    release the GIL; numpy releases it inside ufuncs). Chunk boundaries are
    fixed by the caller, so the outcome is independent of the thread count.
    """
    if threads <= 1 or len(args_list) <= 1:
        return [worker(args) for args in args_list]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, args_list))
