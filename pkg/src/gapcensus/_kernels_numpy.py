"""Pure-numpy fallbacks for the hot loops (no JIT required).

Signatures mirror _kernels_numba exactly; both must produce bit-identical
results for any chunking of the work. All arithmetic stays in int64/uint64,
never floating point, so partial results merge exactly.
"""

from __future__ import annotations

import numpy as np

# Keep per-call temporaries bounded (~tens of MB) on large subset ranges.
_BLOCK = 1 << 19


def subset_sums_range(lo_or, hi_or, lo_pop, hi_pop, qs, lo_bits, start, stop, out):
    """Vectorized equivalent of the JIT subset scan; see _kernels_numba."""
    lo_mask = np.uint64((1 << lo_bits) - 1)
    shift = np.uint64(lo_bits)
    for blk in range(start, stop, _BLOCK):
        idx = np.arange(blk, min(blk + _BLOCK, stop), dtype=np.uint64)
        slo = (idx & lo_mask).astype(np.int64)
        shi = (idx >> shift).astype(np.int64)
        acc = np.ones(len(idx), dtype=np.int64)
        for i in range(qs.shape[0]):
            w = lo_or[slo, i] | hi_or[shi, i]
            acc *= qs[i] - np.bitwise_count(w).astype(np.int64)
        k = lo_pop[slo] + hi_pop[shi]
        np.add.at(out, k, acc)
    return out


def sieve_segment(seg_start, seg_len, wheel, extra, counts):
    """Vectorized equivalent of the JIT segment scan; see _kernels_numba."""
    wsize = len(wheel)
    phase = seg_start % wsize
    mask = np.resize(np.roll(wheel, -phase), seg_len).astype(bool)
    for q in extra:
        q = int(q)
        mask[(-seg_start) % q :: q] = False
    survivors = np.flatnonzero(mask)
    if len(survivors) == 0:
        return -1, -1, 0, 0
    first = seg_start + int(survivors[0])
    last = seg_start + int(survivors[-1])
    maxgap = 0
    if len(survivors) > 1:
        gaps = np.diff(survivors)
        maxgap = int(gaps.max())
        hist = np.bincount(gaps, minlength=1)
        upto = min(len(hist), len(counts))
        counts[:upto] += hist[:upto]
    return first, last, len(survivors), maxgap
