"""JIT-compiled inner loops (numba backend).

Signatures mirror _kernels_numpy exactly; both must produce bit-identical
results for any chunking of the work.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True, inline="always")
def _popcount(x):
    x = x - ((x >> 1) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> 2) & np.uint64(0x3333333333333333))
    x = (x + (x >> 4)) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True, nogil=True)
def subset_sums_range(lo_or, hi_or, lo_pop, hi_pop, qs, lo_bits, start, stop, out):
    """Accumulate, per selected-bit count k, the sum over subset indices in
    [start, stop) of prod_q (q - #residue classes hit mod q).

    The residue classes hit by a subset are encoded as OR-combined bitmasks,
    split into low/high halves of the index (lo_or/hi_or lookup tables).
    """
    lo_mask = (1 << lo_bits) - 1
    nq = qs.shape[0]
    for idx in range(start, stop):
        slo = idx & lo_mask
        shi = idx >> lo_bits
        k = lo_pop[slo] + hi_pop[shi]
        acc = np.int64(1)
        for i in range(nq):
            w = lo_or[slo, i] | hi_or[shi, i]
            f = qs[i] - np.int64(_popcount(w))
            if f == 0:
                acc = 0
                break
            acc *= f
        out[k] += acc
    return out


@njit(cache=True, nogil=True)
def sieve_segment(seg_start, seg_len, wheel, extra, counts):
    """Scan [seg_start, seg_start + seg_len) for residues coprime to the
    modulus: tile the coprimality wheel over the segment, strike out the
    multiples of the remaining primes by stride, then collect gaps.

    Returns (first survivor, last survivor, survivor count, max gap seen);
    first/last are -1 when the segment holds no survivor. Gaps between
    in-segment survivors are histogrammed into counts.
    """
    wsize = wheel.shape[0]
    mask = np.empty(seg_len, dtype=np.uint8)
    w = seg_start % wsize
    for off in range(seg_len):
        mask[off] = wheel[w]
        w += 1
        if w == wsize:
            w = 0
    for j in range(extra.shape[0]):
        q = extra[j]
        for i in range((-seg_start) % q, seg_len, q):
            mask[i] = 0
    first = np.int64(-1)
    last = np.int64(-1)
    n = 0
    maxgap = 0
    cap = counts.shape[0]
    for off in range(seg_len):
        if mask[off] != 0:
            x = seg_start + off
            if first < 0:
                first = x
            else:
                g = x - last
                if g > maxgap:
                    maxgap = g
                if g < cap:
                    counts[g] += 1
            last = x
            n += 1
    return first, last, n, maxgap
