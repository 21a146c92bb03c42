import re

import pytest

from gapcensus import (
    EnumerationBudgetError,
    FormulaRangeError,
    GapCoefficientListing,
    ListingCache,
    coefficient_sum,
    direct_gap_count,
    format_listing,
    gap_census,
    gap_coefficients,
    gap_count,
    max_gap,
    p_star,
    parse_listing,
)
from known_values import GRID_PRIMES, LISTING_LINES, grid_count


def normalize(line: str) -> str:
    return re.sub(r"\s+", " ", line).strip()


@pytest.mark.parametrize(
    "d, expected",
    [(2, 3), (4, 3), (6, 5), (8, 5), (10, 7), (14, 11), (26, 17), (34, 19), (50, 29)],
)
def test_p_star(d, expected):
    assert p_star(d) == expected


def test_p_star_rejects_odd():
    with pytest.raises(ValueError):
        p_star(7)
    with pytest.raises(ValueError):
        p_star(0)


@pytest.mark.parametrize(
    "d, star, terms",
    [
        (2, 3, ((1, 2),)),
        (4, 3, ((1, 2),)),
        (6, 5, ((2, 2), (-2, 3))),
        (8, 5, ((1, 2), (-2, 3), (1, 4))),
        (10, 7, ((4, 2), (-6, 3), (2, 4))),
    ],
)
def test_small_listings(d, star, terms):
    listing = gap_coefficients(d)
    assert listing.p_star == star
    assert listing.terms == terms


@pytest.mark.parametrize("d", [d for d in LISTING_LINES if d <= 30])
def test_listings_match_known_lines(d):
    ours = format_listing(gap_coefficients(d))
    assert normalize(ours) == normalize(LISTING_LINES[d])


def test_listing_rejects_odd_and_budget():
    with pytest.raises(ValueError):
        gap_coefficients(7)
    with pytest.raises(EnumerationBudgetError, match="134217728"):
        gap_coefficients(56)
    # budget is overridable
    gap_coefficients(6, max_subsets=4)
    with pytest.raises(EnumerationBudgetError):
        gap_coefficients(8, max_subsets=4)


def test_format_parse_roundtrip():
    listing = gap_coefficients(12)
    assert parse_listing(format_listing(listing)) == listing
    spaced = "D  =   12 :  [7,  (6, 2), (-14,3),   (10, 4), (-2, 5)]"
    assert parse_listing(spaced) == listing


@pytest.mark.parametrize(
    "line",
    [
        "D12: [7]",
        "D = 12: [7, (6, 2), (-14,)]",
        "D = 12: [7, (6, 2)",
        "D = 12: (7, (6, 2))",
    ],
)
def test_parse_rejects_malformed(line):
    with pytest.raises(ValueError):
        parse_listing(line)


@pytest.mark.parametrize(
    "d, p, expected",
    [(6, 7, 14), (14, 13, 58), (2, 29, 214708725), (30, 19, 20), (12, 11, 8)],
)
def test_gap_count(d, p, expected):
    assert gap_count(d, p) == expected


def test_gap_count_below_threshold():
    with pytest.raises(FormulaRangeError, match="p >= 5"):
        gap_count(6, 3)
    with pytest.raises(ValueError):
        gap_count(6, 6)  # not prime


def test_gap_count_equals_direct_where_both_apply():
    for d in (2, 4, 6, 8, 10, 12):
        for p in (7, 11, 13):
            if p >= p_star(d):
                assert gap_count(d, p) == direct_gap_count(d, p), (d, p)


def test_direct_gap_count_tiny_moduli():
    assert direct_gap_count(2, 2) == 1
    assert direct_gap_count(4, 2) == 0
    assert direct_gap_count(6, 3) == 0
    assert direct_gap_count(2, 3) == 1
    assert direct_gap_count(6, 5) == 2
    # near the modulus: {x, x+24} can only be adjacent via the short side
    assert direct_gap_count(24, 5) == 0


@pytest.mark.parametrize(
    "p, expected",
    [
        (2, {2: 1}),
        (3, {2: 1, 4: 1}),
        (5, {2: 3, 4: 3, 6: 2}),
    ],
)
def test_census_small(p, expected):
    census = gap_census(p)
    assert census.entries == expected
    assert census.complete
    assert census.checksums() == (True, True)


def test_census_13_matches_grid():
    census = gap_census(13)
    assert census.complete
    for d, k in census.entries.items():
        assert k == grid_count(d, 13), d
    assert census.entries[20] == 0  # interior zero row
    assert census.entries[22] == 2
    assert max_gap(census) == 22


@pytest.mark.parametrize("p, expected", [(5, 6), (13, 22), (19, 34)])
def test_max_gap(p, expected):
    assert max_gap(gap_census(p)) == expected


def test_max_gap_requires_complete(tmp_path):
    partial = gap_census(13, max_d=6)
    assert not partial.complete
    with pytest.raises(ValueError):
        max_gap(partial)


@pytest.mark.parametrize("d", [6, 14, 26])
def test_coefficient_sums_vanish(d):
    listing = gap_coefficients(d)
    assert coefficient_sum(listing) == 0
    q = max(q for q in GRID_PRIMES if q <= d // 2)
    assert coefficient_sum(listing) == grid_count(d, q)


def test_coefficient_sum_equals_direct_count():
    for d in (6, 8, 10, 12, 16, 20):
        q = max(q for q in (2, 3, 5, 7, 11, 13, 17, 19, 23) if 2 * q <= d)
        assert coefficient_sum(gap_coefficients(d)) == direct_gap_count(d, q), d


def test_cache_roundtrip(tmp_path):
    cache = ListingCache(tmp_path / "c")
    miss = gap_coefficients(12, cache=cache)
    assert cache.path.exists()
    hit = gap_coefficients(12, cache=cache)
    assert miss == hit == gap_coefficients(12)
    assert cache.stored_gap_lengths() == [12]
    # lines stay sorted by gap length
    gap_coefficients(6, cache=cache)
    assert cache.stored_gap_lengths() == [6, 12]
    text = cache.path.read_text()
    assert text.index("D = 6") < text.index("D = 12")


def test_cache_hit_skips_recomputation(tmp_path):
    cache = ListingCache(tmp_path)
    fake = GapCoefficientListing(6, 5, ((123, 2),))
    cache.store(fake)
    assert gap_coefficients(6, cache=cache) == fake  # trusted, not recomputed


def test_cache_corruption_detected(tmp_path):
    cache = ListingCache(tmp_path)
    gap_coefficients(6, cache=cache)
    cache.path.write_text("D = 6: [5, (2, 2), (-2, 3)\n")  # truncated bracket
    with pytest.raises(ValueError, match="malformed"):
        gap_coefficients(6, cache=cache)


def test_cache_env_resolution(tmp_path, monkeypatch):
    monkeypatch.setenv("GAPCENSUS_CACHE", str(tmp_path / "from_env"))
    assert ListingCache.from_options().directory == tmp_path / "from_env"
    assert ListingCache.from_options(tmp_path / "flag").directory == tmp_path / "flag"
    monkeypatch.delenv("GAPCENSUS_CACHE")
    assert str(ListingCache.from_options().directory) == ".gapcache"


def test_listing_threads_identical():
    lone = gap_coefficients(30, threads=1)
    ltwo = gap_coefficients(30, threads=2)
    leight = gap_coefficients(30, threads=8)
    assert lone == ltwo == leight


def test_census_budget_cap():
    partial = gap_census(13, max_d=4)
    assert not partial.complete
    assert partial.entries == {2: 1485, 4: 1485}
