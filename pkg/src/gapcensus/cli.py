"""Command-line surface: queries, census/table/listing emitters, verification.

Commands: nu, kappa, coeffs, gaps, census, table, totient, verify.
Global flags: --threads, --cache-dir, --format (text|structured).

Structured output is one self-describing JSON record per line; every count
that can outgrow machine words is serialized as a decimal string.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from math import isqrt

from .configurations import (
    Configuration,
    SparseSubsetError,
    kappa_direct,
    kappa_inclusion_exclusion,
    nu_direct,
)
from .gaps import (
    FormulaRangeError,
    ListingCache,
    coefficient_sum,
    direct_gap_count,
    format_listing,
    gap_census,
    gap_coefficients,
    gap_count,
    max_gap,
    p_star,
)
from .primes import is_prime, primes_upto
from .rings import RingContext, ResidueSubset, unit_group
from .sieve import SieveConfig, enumerate_coprime_gaps, verify_formula_against_oracle
from .totients import (
    SquareFreeModulus,
    euler_phi,
    kappa_crt,
    nagell_theta,
    nu_crt,
    residue_class_count,
)

# Largest modulus we materialize U(n) for when no multiplicative path applies.
SCAN_LIMIT = 5_000_000


class FactorizationError(ValueError):
    pass


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.replace(" ", "").split(",") if part != ""]
    except ValueError as exc:
        raise ValueError(f"expected a comma-separated integer list, got {text!r}") from exc


def _factor_square_free(n: int) -> tuple[int, ...] | None:
    """Prime support of n if n is certified square-free, None if certified not.

    Raises FactorizationError when trial division cannot settle the question.
    """
    if n < 2:
        raise ValueError(f"modulus must be >= 2, got {n}")
    support = []
    rest = n
    for q in primes_upto(100_000):
        if q * q > rest:
            break
        if rest % q == 0:
            rest //= q
            if rest % q == 0:
                return None
            support.append(q)
    if rest > 1:
        if is_prime(rest):
            support.append(rest)
        elif isqrt(rest) ** 2 == rest:
            return None
        else:
            raise FactorizationError(
                f"cannot factor the remaining cofactor {rest} of {n}; "
                f"pass the factorization explicitly (e.g. --support)"
            )
    return tuple(support)


def _emit(args, record: dict, text_lines: list[str]) -> None:
    if args.format == "structured":
        print(json.dumps(record, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _cache(args) -> ListingCache:
    return ListingCache.from_options(args.cache_dir)


# ---------------------------------------------------------------------------
# nu / kappa
# ---------------------------------------------------------------------------

def _resolve_subset(args, ring: RingContext):
    """Returns (subset or None, support or None, method tag)."""
    spec = args.set.strip()
    if spec.upper() == "U":
        support = _factor_square_free(ring.n)
        if support is not None:
            return None, support, "formula"
        if ring.n > SCAN_LIMIT:
            raise ValueError(
                f"n = {ring.n} is not square-free and too large to scan "
                f"(limit {SCAN_LIMIT}); no fast path applies"
            )
        return unit_group(ring), None, "direct"
    members = _parse_int_list(spec)
    return ResidueSubset.of(ring, members), None, "direct"


def cmd_nu(args) -> int:
    ring = RingContext(args.n)
    config = Configuration.of(ring, _parse_int_list(args.config))
    subset, support, method = _resolve_subset(args, ring)
    if support is not None:
        modulus = SquareFreeModulus.from_support(support)
        value = nu_crt(config, modulus)
    else:
        value = nu_direct(config, subset)
    record = {
        "command": "nu",
        "inputs": {"n": args.n, "set": args.set, "config": sorted(config.offsets)},
        "result": str(value),
        "method": method,
    }
    _emit(args, record, [f"nu = {value} [{method}]"])
    return 0


def cmd_kappa(args) -> int:
    ring = RingContext(args.n)
    config = Configuration.of(ring, _parse_int_list(args.config))
    subset, support, _ = _resolve_subset(args, ring)

    def need_subset():
        nonlocal subset
        if subset is None:
            if ring.n > SCAN_LIMIT:
                raise ValueError(
                    f"the direct scan needs U({ring.n}) materialized "
                    f"(limit {SCAN_LIMIT}); use --method ie"
                )
            subset = unit_group(ring)
        return subset

    results: dict[str, int] = {}
    if args.method in ("direct", "both"):
        results["direct"] = kappa_direct(config, need_subset())
    if args.method in ("ie", "both"):
        if support is not None:
            modulus = SquareFreeModulus.from_support(support)
            results["formula"] = kappa_crt(config, modulus)
        else:
            results["formula"] = kappa_inclusion_exclusion(config, need_subset())
    if len(results) == 2 and results["direct"] != results["formula"]:
        raise RuntimeError(
            f"kappa mismatch: direct={results['direct']} formula={results['formula']}"
        )
    method = "direct" if args.method == "direct" else "formula"
    value = next(iter(results.values()))
    record = {
        "command": "kappa",
        "inputs": {
            "n": args.n,
            "set": args.set,
            "config": sorted(config.offsets),
            "method": args.method,
        },
        "result": str(value),
        "method": method,
    }
    if args.method == "both":
        text = [f"kappa = {results['formula']} = {results['direct']} [formula = direct]"]
    else:
        text = [f"kappa = {value} [{method}]"]
    _emit(args, record, text)
    return 0


# ---------------------------------------------------------------------------
# coeffs / gaps / census / table
# ---------------------------------------------------------------------------

def cmd_coeffs(args) -> int:
    listing = gap_coefficients(args.D, threads=args.threads, cache=_cache(args))
    record = {
        "command": "coeffs",
        "inputs": {"D": args.D},
        "result": {
            "p_star": listing.p_star,
            "terms": [{"coefficient": str(c), "offset": b} for c, b in listing.terms],
            "coefficient_sum": str(coefficient_sum(listing)),
        },
        "method": "formula",
    }
    _emit(args, record, [format_listing(listing)])
    return 0


def cmd_gaps(args) -> int:
    value = gap_count(args.D, args.p, cache=_cache(args), threads=args.threads)
    record = {
        "command": "gaps",
        "inputs": {"D": args.D, "p": args.p},
        "result": str(value),
        "method": "formula",
    }
    _emit(args, record, [f"K({args.D}, {args.p}#) = {value} [formula]"])
    return 0


def _census_records(census) -> tuple[list[dict], dict]:
    counts_ok, weighted_ok = census.checksums()
    flags = {
        "complete": census.complete,
        "counts_checksum_ok": counts_ok,
        "weighted_checksum_ok": weighted_ok,
    }
    entries = []
    for d in sorted(census.entries):
        entries.append(
            {
                "record": "census-entry",
                "p": census.p,
                "P": str(census.P),
                "D": d,
                "K": str(census.entries[d]),
                "method": census.method,
                **flags,
            }
        )
    summary = {
        "record": "census-summary",
        "p": census.p,
        "P": str(census.P),
        "method": census.method,
        "sum_counts": str(census.sum_counts()),
        "weighted_sum": str(census.weighted_sum()),
        **flags,
    }
    if census.complete:
        summary["max_gap"] = max_gap(census)
    return entries, summary


def cmd_census(args) -> int:
    if args.oracle:
        census = enumerate_coprime_gaps(
            SieveConfig(args.p, segment_size=args.segment_size), threads=args.threads
        )
    else:
        census = gap_census(
            args.p, max_d=args.max_D, cache=_cache(args), threads=args.threads
        )
    entries, summary = _census_records(census)
    if args.format == "structured":
        for rec in entries:
            print(json.dumps(rec, sort_keys=True))
        print(json.dumps(summary, sort_keys=True))
    else:
        print(
            f"census p={census.p} P={census.P} method={census.method} "
            f"complete={str(census.complete).lower()}"
        )
        for d in sorted(census.entries):
            print(f"K({d}, {census.p}#) = {census.entries[d]}")
        counts_ok, weighted_ok = census.checksums()
        print(f"sum(K) = {census.sum_counts()} {'ok' if counts_ok else 'MISMATCH'}")
        print(f"sum(D*K) = {census.weighted_sum()} {'ok' if weighted_ok else 'MISMATCH'}")
        if census.complete:
            print(f"max gap = {max_gap(census)}")
    if not census.complete:
        return 1
    return 0


def table_counts(max_p: int, max_d: int, *, cache=None, threads: int = 1) -> dict:
    """K(D, p#) for even D <= max_d and primes p <= max_p.

    Cells inside a census come from it; cells beyond a census's termination
    evaluate the listing formula when valid at p (always zero there) and are
    zero otherwise, the census having already covered the whole circle.
    """
    columns = {}
    for p in primes_upto(max_p):
        census = gap_census(p, cache=cache, threads=threads)
        if not census.complete:
            raise RuntimeError(f"census for p={p} did not complete")
        col = {}
        for d in range(2, max_d + 1, 2):
            if d in census.entries:
                col[d] = census.entries[d]
            elif p >= p_star(d):
                col[d] = gap_count(d, p, cache=cache, threads=threads)
            else:
                col[d] = 0
        columns[p] = col
    return columns


def cmd_table(args) -> int:
    columns = table_counts(
        args.max_p, args.max_D, cache=_cache(args), threads=args.threads
    )
    ps = sorted(columns)
    if args.format == "structured":
        print(json.dumps({"record": "table-header", "p": ps}, sort_keys=True))
        for d in range(2, args.max_D + 1, 2):
            row = {
                "record": "table-row",
                "D": d,
                "counts": {str(p): str(columns[p][d]) for p in ps},
            }
            print(json.dumps(row, sort_keys=True))
    else:
        cells = [["K(D,p#)"] + [str(p) for p in ps]]
        for d in range(2, args.max_D + 1, 2):
            cells.append([str(d)] + [str(columns[p][d]) for p in ps])
        widths = [max(len(row[i]) for row in cells) for i in range(len(cells[0]))]
        for row in cells:
            print("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    return 0


# ---------------------------------------------------------------------------
# totient
# ---------------------------------------------------------------------------

def _modulus_from_args(args) -> SquareFreeModulus:
    if args.support:
        return SquareFreeModulus.from_support(_parse_int_list(args.support))
    if args.P is None:
        raise ValueError("provide --support or --P")
    support = _factor_square_free(args.P)
    if support is None:
        raise ValueError(f"{args.P} is not square-free")
    return SquareFreeModulus.from_support(support)


def cmd_totient(args) -> int:
    modulus = _modulus_from_args(args)
    if args.theta is not None:
        value = nagell_theta(args.theta, modulus)
        name = f"theta({args.theta}, {modulus.P})"
        inputs = {"function": "theta", "m": args.theta, "P": str(modulus.P)}
    else:
        value = euler_phi(modulus)
        name = f"phi({modulus.P})"
        inputs = {"function": "phi", "P": str(modulus.P)}
    record = {
        "command": "totient",
        "inputs": inputs,
        "result": str(value),
        "method": "formula",
    }
    _emit(args, record, [f"{name} = {value}"])
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _check_engine_equivalence(rng: random.Random, rounds: int) -> str:
    done = 0
    while done < rounds:
        n = rng.randrange(8, 61)
        ring = RingContext(n)
        members = frozenset(x for x in range(n) if rng.random() < 0.45)
        e = ResidueSubset(ring, members)
        length = rng.randrange(1, 13)
        offs = {0} | {rng.randrange(1, length + 1) for _ in range(rng.randrange(0, 4))}
        t = Configuration.of(ring, offs)
        if len(t.complement()) > 16:
            continue
        try:
            ie = kappa_inclusion_exclusion(t, e)
        except SparseSubsetError:
            continue  # outside the identity's domain; redraw
        direct = kappa_direct(t, e)
        if ie != direct:
            raise AssertionError(f"n={n} T={sorted(t.offsets)}: ie={ie} direct={direct}")
        done += 1
    return f"{rounds} random (E, T) instances"


def _check_crt_equivalence(rng: random.Random, rounds: int) -> str:
    pool = (2, 3, 5, 7, 11, 13)
    for _ in range(rounds):
        size = rng.randrange(1, len(pool) + 1)
        support = tuple(sorted(rng.sample(pool, size)))
        modulus = SquareFreeModulus.from_support(support)
        ring = RingContext(modulus.P, support)
        offs = {0} | {rng.randrange(modulus.P) for _ in range(rng.randrange(0, 5))}
        t = Configuration.of(ring, offs)
        fast = nu_crt(t, modulus)
        slow = nu_direct(t, unit_group(ring))
        if fast != slow:
            raise AssertionError(
                f"P={modulus.P} T={sorted(t.offsets)}: crt={fast} direct={slow}"
            )
    return f"{rounds} random square-free moduli"


def _check_mod_p_injectivity(rng: random.Random, rounds: int) -> str:
    # q > max(a, 2): reduction mod 2 folds {0, 2} together, so q = 2 is
    # excluded the same way the listing threshold p* excludes it.
    for _ in range(rounds):
        a = rng.randrange(1, 21)
        evens = list(range(0, 2 * a + 1, 2))
        y = [v for v in evens if rng.random() < 0.5]
        for q in primes_upto(97):
            if q > max(a, 2):
                if residue_class_count(y, q) != len(y):
                    raise AssertionError(f"a={a} q={q} Y={y}")
    return f"{rounds} sampled even sets"


def _check_oracle(p: int, cache, threads: int) -> str:
    report = verify_formula_against_oracle(p, cache=cache, threads=threads)
    if not report.ok:
        raise AssertionError(f"p={p} mismatches: {report.mismatches}")
    for census in (report.formula, report.oracle):
        counts_ok, weighted_ok = census.checksums()
        if not (census.complete and counts_ok and weighted_ok):
            raise AssertionError(f"p={p} {census.method} census checksum failure")
    return f"p={p}: {len(report.oracle.entries)} gap lengths"


def _check_coefficient_sums(max_d: int, cache, threads: int) -> str:
    checked = 0
    for d in range(6, max_d + 1, 2):
        listing = gap_coefficients(d, cache=cache, threads=threads)
        total = coefficient_sum(listing)
        q = max(q for q in primes_upto(d // 2))
        expected = direct_gap_count(d, q, threads=threads)
        if total != expected:
            raise AssertionError(f"D={d}: sum={total} K(D,{q}#)={expected}")
        checked += 1
    return f"{checked} listings against the direct count"


def _check_cache(max_d: int, cache: ListingCache, threads: int) -> str:
    recomputed = 0
    for d in cache.stored_gap_lengths():
        if d > max_d:
            continue
        stored = cache.load(d)
        fresh = gap_coefficients(d, threads=threads)  # no cache: recompute
        if stored != fresh:
            raise AssertionError(
                f"cache mismatch for D={d}: stored {format_listing(stored)!r}, "
                f"recomputed {format_listing(fresh)!r}"
            )
        recomputed += 1
    return f"{recomputed} cached listings recomputed"


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    cache = _cache(args)
    checks = [
        (
            "engine-equivalence",
            lambda: _check_engine_equivalence(rng, 120),
        ),
        ("crt-equivalence", lambda: _check_crt_equivalence(rng, 80)),
        ("modp-injectivity", lambda: _check_mod_p_injectivity(rng, 60)),
    ]
    for p in primes_upto(args.max_p):
        checks.append(
            ("oracle-p%d" % p, lambda p=p: _check_oracle(p, cache, args.threads))
        )
    checks.append(
        ("coefficient-sums", lambda: _check_coefficient_sums(args.max_D, cache, args.threads))
    )
    checks.append(("cache-consistency", lambda: _check_cache(args.max_D, cache, args.threads)))

    failures = 0
    for name, fn in checks:
        try:
            detail = fn()
        except Exception as exc:
            failures += 1
            line = f"FAIL {name}: {exc}"
        else:
            line = f"ok   {name}: {detail}"
        if args.format == "structured":
            print(
                json.dumps(
                    {
                        "record": "verify-check",
                        "check": name,
                        "ok": line.startswith("ok"),
                        "detail": line.split(": ", 1)[1],
                    },
                    sort_keys=True,
                )
            )
        else:
            print(line)
    if failures:
        print(f"verify: {failures} check(s) failed", file=sys.stderr)
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapcensus",
        description="Count gap patterns among residues coprime to square-free moduli.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker count for subset enumeration and sieve segments "
        "(results are independent of this)",
    )
    parser.add_argument(
        "--cache-dir",
        default=None,
        help=f"coefficient cache directory (default ${{{'GAPCENSUS_CACHE'}}} or ./.gapcache)",
    )
    parser.add_argument(
        "--format",
        choices=("text", "structured"),
        default="text",
        help="text output or one JSON record per line",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_nu = sub.add_parser("nu", help="count placements of a pattern inside a subset")
    p_nu.add_argument("--n", type=int, required=True)
    p_nu.add_argument("--set", required=True, help='"U" or an explicit residue list')
    p_nu.add_argument("--config", required=True, help="comma-separated offsets incl. 0")
    p_nu.set_defaults(func=cmd_nu)

    p_kappa = sub.add_parser("kappa", help="count contiguous placements of a pattern")
    p_kappa.add_argument("--n", type=int, required=True)
    p_kappa.add_argument("--set", required=True)
    p_kappa.add_argument("--config", required=True)
    p_kappa.add_argument("--method", choices=("direct", "ie", "both"), default="ie")
    p_kappa.set_defaults(func=cmd_kappa)

    p_coeffs = sub.add_parser("coeffs", help="coefficient listing for an even gap length")
    p_coeffs.add_argument("--D", type=int, required=True)
    p_coeffs.set_defaults(func=cmd_coeffs)

    p_gaps = sub.add_parser("gaps", help="K(D, p#) by the listing formula")
    p_gaps.add_argument("--D", type=int, required=True)
    p_gaps.add_argument("--p", type=int, required=True)
    p_gaps.set_defaults(func=cmd_gaps)

    p_census = sub.add_parser("census", help="all gap counts of U(p#)")
    p_census.add_argument("--p", type=int, required=True)
    p_census.add_argument("--oracle", action="store_true", help="enumerate instead of formula")
    p_census.add_argument("--max-D", type=int, default=None, dest="max_D")
    p_census.add_argument("--segment-size", type=int, default=1 << 22)
    p_census.set_defaults(func=cmd_census)

    p_table = sub.add_parser("table", help="grid of K(D, p#) values")
    p_table.add_argument("--max-p", type=int, required=True, dest="max_p")
    p_table.add_argument("--max-D", type=int, required=True, dest="max_D")
    p_table.set_defaults(func=cmd_table)

    p_tot = sub.add_parser("totient", help="phi(P) or Nagell theta(m, P)")
    group = p_tot.add_mutually_exclusive_group(required=True)
    group.add_argument("--phi", action="store_true")
    group.add_argument("--theta", type=int, default=None)
    p_tot.add_argument("--P", type=int, default=None)
    p_tot.add_argument("--support", default=None, help="comma-separated distinct primes")
    p_tot.set_defaults(func=cmd_totient)

    p_verify = sub.add_parser("verify", help="run the invariant suite")
    p_verify.add_argument("--max-p", type=int, default=11, dest="max_p")
    p_verify.add_argument("--max-D", type=int, default=24, dest="max_D")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
