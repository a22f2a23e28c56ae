import dataclasses
import json

import pytest

from divbounds import catalog
from divbounds.arith import bundle
from divbounds.catalog import DomainError, GapValue, gap
from divbounds.sieve import ResourceError
from divbounds.verifier import (
    ChunkReport,
    Journal,
    MergeError,
    find_extremes,
    merge,
    verify_chunk,
    verify_chunks,
    verify_many,
    verify_range,
)
from oracles import is_prime_power, trial_is_prime

PRIMES_100 = [n for n in range(2, 101) if trial_is_prime(n)]
PRIME_POWERS_100 = [n for n in range(2, 101) if is_prime_power(n)]

_COMMON = ("ineq_id", "lo", "hi", "violations", "equality_count", "equality_sample",
           "min_positive_gap", "rows_checked", "checksum")


def test_t1_chunk_equality_on_primes():
    r = verify_chunk("T1", 2, 100)
    assert r.violations == []
    assert r.equality_count == 25
    assert r.equality_sample == PRIMES_100
    assert r.rows_checked == 99


def test_l1_chunk_equality_on_prime_powers():
    r = verify_chunk("L1", 2, 100)
    assert r.violations == []
    assert len(PRIME_POWERS_100) == 35
    assert r.equality_count == 35
    assert r.equality_sample == PRIME_POWERS_100


def test_s14a_unit_row():
    r = verify_chunk("S14a", 1, 1)
    assert r.equality_count == 1 and r.rows_checked == 1


def test_chunk_domain_and_budget_errors():
    with pytest.raises(DomainError):
        verify_chunk("T1", 1, 10)
    with pytest.raises(ResourceError):
        verify_chunk("T1", 2, 5000, budget=1000)
    with pytest.raises(ValueError):
        verify_chunk("T1", 20, 10)


def test_min_positive_gap_brute_force():
    for ineq_id in ("T1", "L2", "S14a", "D24b"):
        d = catalog.get(ineq_id)
        lo = max(d.min_n, 1)
        r = verify_chunk(ineq_id, lo, 3000)
        gaps = [(gap(d, bundle(n)).gap, n) for n in range(lo, 3001)]
        best = min(g for g in gaps if g[0] > 0)
        assert r.min_positive_gap == GapValue(best[1], best[0])


def test_merge_matches_single_chunk():
    whole = verify_chunk("T1", 2, 1000)
    merged = merge([verify_chunk("T1", 501, 1000), verify_chunk("T1", 2, 500)])
    for f in _COMMON:
        assert getattr(merged, f) == getattr(whole, f), f
    assert merged.equality_class_observed == "PRIMES"


def test_merge_rejects_bad_tilings():
    a, b, c = verify_chunk("T1", 2, 50), verify_chunk("T1", 40, 80), verify_chunk("T1", 60, 80)
    with pytest.raises(MergeError):
        merge([])
    with pytest.raises(MergeError):
        merge([a, b])
    with pytest.raises(MergeError):
        merge([a, c])
    with pytest.raises(MergeError):
        merge([a, verify_chunk("T2", 51, 60)])


def test_classification_of_sets():
    reps = verify_many(["L1", "L2", "S14a", "S14b"], 2, 20000, workers=1, chunk_len=3000)
    assert reps["L1"].equality_class_observed == "PRIME_POWERS"
    assert reps["S14b"].equality_class_observed == "PRIME_POWERS"
    assert reps["L2"].equality_class_observed == "PRIMES"
    s = reps["S14a"]
    assert s.equality_class_observed == "OTHER"
    # squarefree composites are the counterexamples to "primes"
    assert s.equality_class_mismatches[:4] == [6, 10, 14, 15]
    assert len(s.equality_class_mismatches) == 16


def test_boundary_invariance():
    ref = verify_range("T2", 2, 10**4, 1, 10**4)
    alt = verify_range("T2", 2, 10**4, 8, 512)
    assert ref == alt
    assert verify_range("T2", 2, 10**4, 1, 777) == ref


def test_t3_up_to_1e5():
    r = verify_range("T3", 2, 10**5, 4, 2**14)
    assert r.violations == []
    assert r.equality_class_observed == "PRIMES"
    assert r.equality_count == 9592


def test_checksum_depends_on_rows():
    a = verify_chunk("T1", 2, 1000).checksum
    b = verify_chunk("T2", 2, 1000).checksum
    c = verify_chunk("T1", 3, 1000).checksum
    assert len({a, b, c}) == 3
    assert verify_chunk("T1", 2, 1000).checksum == a


def test_violations_are_reported_not_raised(monkeypatch):
    # a fake inequality phi >= n - 5 fails on most of the range
    from divbounds.catalog import FormalExpression, InequalityDescriptor, EqualityClass

    bad = InequalityDescriptor(
        "BAD", FormalExpression.from_terms([(1, {"PHI": 1})]),
        FormalExpression.from_terms([(1, {"N": 1}), (-5, {})]), 2, EqualityClass.PRIMES,
    )
    real_get = catalog.get
    monkeypatch.setattr(catalog, "get", lambda i: bad if i == "BAD" else real_get(i))
    r = verify_range("BAD", 2, 40, 1, 10)
    expected = [GapValue(n, bundle(n).phi - n + 5) for n in range(2, 41) if bundle(n).phi - n + 5 < 0]
    assert r.violations == expected
    assert not r.ok


def test_journal_resume(tmp_path):
    path = tmp_path / "j.jsonl"
    first = verify_many(["T1", "L1"], 2, 5000, workers=1, chunk_len=1000, journal=path)
    lines = path.read_text().splitlines()
    assert len(lines) == 10
    assert json.loads(lines[0])["chunk_len"] == 1000
    # drop the tail and add a torn line, as after a crash
    path.write_text("\n".join(lines[:6]) + '\n{"ineq_id": "T1", "lo"')
    j = Journal(path)
    assert len(j.done) == 6
    again = verify_many(["T1", "L1"], 2, 5000, workers=1, chunk_len=1000, journal=j)
    assert again == first


def test_journal_roundtrip_big_gaps(tmp_path):
    r = verify_chunk("T5", 10**6 - 100, 10**6)
    assert r.min_positive_gap.gap > 2**64
    back = ChunkReport.from_json(json.loads(json.dumps(r.to_json())))
    assert back == r


def test_verify_chunks_shares_work():
    many = verify_chunks(["T1", "T4"], 2, 500)
    assert [dataclasses.asdict(r) for r in many] == [
        dataclasses.asdict(verify_chunk("T1", 2, 500)), dataclasses.asdict(verify_chunk("T4", 2, 500))
    ]


def test_find_extremes_examples():
    assert find_extremes("L2", 2, 100, 1) == [GapValue(4, 1)]
    assert find_extremes("T1", 2, 3, 5) == []


@pytest.mark.parametrize("ineq_id,hi,k", [("T1", 10, 1), ("T5", 2000, 7), ("S14a", 300, 3), ("D24a", 5000, 12)])
def test_find_extremes_brute_force(ineq_id, hi, k):
    d = catalog.get(ineq_id)
    gaps = sorted((gap(d, bundle(n)).gap, n) for n in range(d.min_n, hi + 1))
    expected = [GapValue(n, g) for g, n in gaps if g > 0][:k]
    assert find_extremes(ineq_id, d.min_n, hi, k, chunk_len=333) == expected


def test_find_extremes_t1_small():
    # 4 is the only composite in 2..10 with gap 290; next are 9 and 6
    assert find_extremes("T1", 2, 10, 3) == [GapValue(4, 290), GapValue(9, 1629), GapValue(6, 2653)]
