"""Chunked, restartable exhaustive verification of catalog inequalities."""

from __future__ import annotations

import heapq
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import catalog
from .catalog import DomainError, EqualityClass, GapValue
from .sieve import DEFAULT_BUDGET, prime_mask, prime_power_mask, sieve_range
from .wide import gap_columns

__all__ = [
    "DEFAULT_CHUNK_LEN",
    "DEFAULT_SAMPLE",
    "MISMATCH_LIMIT",
    "ChunkReport",
    "VerificationReport",
    "MergeError",
    "verify_chunk",
    "verify_chunks",
    "merge",
    "verify_range",
    "verify_many",
    "find_extremes",
    "Journal",
]

log = logging.getLogger(__name__)

DEFAULT_CHUNK_LEN = 1 << 16
DEFAULT_SAMPLE = 64
MISMATCH_LIMIT = 16
_MASK64 = (1 << 64) - 1


class MergeError(ValueError):
    """Chunk reports do not tile one contiguous range of one inequality."""


def _mix64(x: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser, wrapping uint64 arithmetic
    x = x.copy()
    with np.errstate(over="ignore"):
        x ^= x >> np.uint64(30)
        x *= np.uint64(0xBF58476D1CE4E5B9)
        x ^= x >> np.uint64(27)
        x *= np.uint64(0x94D049BB133111EB)
        x ^= x >> np.uint64(31)
    return x


def _row_checksum(n: np.ndarray, residue: np.ndarray) -> int:
    """Sum mod 2**64 of a hash of (n, gap mod 2**64); order-independent."""
    h = _mix64(_mix64(n) ^ residue)
    return int(h.sum(dtype=np.uint64))


@dataclass
class ChunkReport:
    ineq_id: str
    lo: int
    hi: int
    violations: list[GapValue]
    equality_count: int
    equality_sample: list[int]
    min_positive_gap: GapValue | None
    rows_checked: int
    checksum: int
    # exact-set bookkeeping for the equality classification
    prime_count: int = 0
    prime_power_count: int = 0
    equality_primes: int = 0
    equality_prime_powers: int = 0
    mismatches: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        d = asdict(self)
        d["violations"] = [_gv_json(v) for v in self.violations]
        d["min_positive_gap"] = _gv_json(self.min_positive_gap) if self.min_positive_gap else None
        return d

    @classmethod
    def from_json(cls, d: dict) -> ChunkReport:
        d = dict(d)
        d.pop("chunk_len", None)
        d["violations"] = [GapValue(int(v["n"]), int(v["gap"])) for v in d["violations"]]
        m = d.get("min_positive_gap")
        d["min_positive_gap"] = GapValue(int(m["n"]), int(m["gap"])) if m else None
        return cls(**d)


def json_int(v: int) -> int | str:
    """Ints outside the signed 64-bit range go out as decimal strings."""
    return v if -(1 << 63) <= v < (1 << 63) else str(v)


def _gv_json(g: GapValue) -> dict:
    return {"n": json_int(g.n), "gap": json_int(g.gap)}


@dataclass
class VerificationReport:
    ineq_id: str
    lo: int
    hi: int
    violations: list[GapValue]
    equality_count: int
    equality_sample: list[int]
    min_positive_gap: GapValue | None
    rows_checked: int
    equality_class_observed: str
    equality_class_mismatches: list[int]
    checksum: int
    elapsed_ms: float = field(default=0.0, compare=False)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        """Report in the published schema (see README)."""
        return {
            "inequality": self.ineq_id,
            "from": json_int(self.lo),
            "to": json_int(self.hi),
            "violations": [_gv_json(v) for v in self.violations],
            "equality_count": self.equality_count,
            "equality_sample": [json_int(n) for n in self.equality_sample],
            "equality_class_observed": self.equality_class_observed,
            "equality_class_mismatches": [json_int(n) for n in self.equality_class_mismatches],
            "min_positive_gap": _gv_json(self.min_positive_gap) if self.min_positive_gap else None,
            "rows_checked": self.rows_checked,
            "checksum": f"{self.checksum:016x}",
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def _check_domain(ineq: catalog.InequalityDescriptor, lo: int, hi: int) -> None:
    if lo > hi:
        raise ValueError(f"empty range: lo={lo} > hi={hi}")
    if lo < ineq.min_n:
        raise DomainError(f"{ineq.id} holds for n >= {ineq.min_n}; range starts at {lo}")


def verify_chunks(
    ineq_ids: Sequence[str], lo: int, hi: int, *, sample: int = DEFAULT_SAMPLE, budget: int = DEFAULT_BUDGET
) -> list[ChunkReport]:
    """One sieve pass over ``lo..hi`` shared by several inequalities."""
    ineqs = [catalog.get(i) for i in ineq_ids]
    for ineq in ineqs:
        _check_domain(ineq, lo, hi)
    table = sieve_range(lo, hi, budget=budget)
    primes = prime_mask(lo, hi)
    ppowers = prime_power_mask(lo, hi)
    if table.exact_int64:
        n_u64 = table.n.astype(np.uint64)
    else:
        n_u64 = np.array([int(v) & _MASK64 for v in table.n], dtype=np.uint64)
    out = []
    for ineq in ineqs:
        cols = gap_columns(ineq.difference, table)
        zero = cols.sign == 0
        neg = np.flatnonzero(cols.sign < 0)
        violations = [GapValue(lo + int(k), cols.exact(int(k))) for k in neg]
        eq_idx = np.flatnonzero(zero)

        min_pos = None
        pos = cols.sign > 0
        if pos.any():
            # exact minimum among rows whose interval can reach the smallest upper bound
            best_upper = cols.upper[pos].min()
            cand = np.flatnonzero(pos & (cols.lower <= best_upper))
            gv = min((cols.exact(int(k)), lo + int(k)) for k in cand)
            min_pos = GapValue(gv[1], gv[0])

        expected = primes if ineq.expected_equality_class is not EqualityClass.PRIME_POWERS else ppowers
        mismatch = np.flatnonzero(zero != expected)[:MISMATCH_LIMIT]
        checksum = _row_checksum(n_u64, cols.residue)
        out.append(
            ChunkReport(
                ineq_id=ineq.id,
                lo=lo,
                hi=hi,
                violations=violations,
                equality_count=int(eq_idx.size),
                equality_sample=[lo + int(k) for k in eq_idx[:sample]],
                min_positive_gap=min_pos,
                rows_checked=hi - lo + 1,
                checksum=checksum,
                prime_count=int(primes.sum()),
                prime_power_count=int(ppowers.sum()),
                equality_primes=int((zero & primes).sum()),
                equality_prime_powers=int((zero & ppowers).sum()),
                mismatches=[lo + int(k) for k in mismatch],
            )
        )
    return out


def verify_chunk(
    ineq_id: str, lo: int, hi: int, *, sample: int = DEFAULT_SAMPLE, budget: int = DEFAULT_BUDGET
) -> ChunkReport:
    """Check ``ineq_id`` at every n in ``lo..hi``."""
    return verify_chunks([ineq_id], lo, hi, sample=sample, budget=budget)[0]


def _classify(c: ChunkReport | VerificationReport, eq_primes: int, eq_pp: int, n_p: int, n_pp: int) -> str:
    if c.equality_count == n_p == eq_primes:
        return EqualityClass.PRIMES.value
    if c.equality_count == n_pp == eq_pp:
        return EqualityClass.PRIME_POWERS.value
    return "OTHER"


def merge(reports: Iterable[ChunkReport], *, sample: int = DEFAULT_SAMPLE) -> VerificationReport:
    """Deterministic reduction of chunk reports over one contiguous range."""
    reports = sorted(reports, key=lambda r: r.lo)
    if not reports:
        raise MergeError("nothing to merge")
    ids = {r.ineq_id for r in reports}
    if len(ids) != 1:
        raise MergeError(f"reports mix inequalities {sorted(ids)}")
    for a, b in zip(reports, reports[1:]):
        if b.lo != a.hi + 1:
            kind = "overlapping" if b.lo <= a.hi else "gapped"
            raise MergeError(f"{kind} chunks [{a.lo}, {a.hi}] and [{b.lo}, {b.hi}]")

    violations = [v for r in reports for v in r.violations]
    eq_sample = [n for r in reports for n in r.equality_sample][:sample]
    mins = [r.min_positive_gap for r in reports if r.min_positive_gap is not None]
    min_pos = min(mins, key=lambda g: (g.gap, g.n)) if mins else None
    total = VerificationReport(
        ineq_id=reports[0].ineq_id,
        lo=reports[0].lo,
        hi=reports[-1].hi,
        violations=violations,
        equality_count=sum(r.equality_count for r in reports),
        equality_sample=eq_sample,
        min_positive_gap=min_pos,
        rows_checked=sum(r.rows_checked for r in reports),
        equality_class_observed="",
        equality_class_mismatches=[n for r in reports for n in r.mismatches][:MISMATCH_LIMIT],
        checksum=sum(r.checksum for r in reports) & _MASK64,
    )
    total.equality_class_observed = _classify(
        total,
        sum(r.equality_primes for r in reports),
        sum(r.equality_prime_powers for r in reports),
        sum(r.prime_count for r in reports),
        sum(r.prime_power_count for r in reports),
    )
    return total


class Journal:
    """Append-only JSON-lines file of completed chunk reports.

    Resume matches on ``(ineq_id, lo, hi)``. The file has a single writer.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.done: dict[tuple[str, int, int], ChunkReport] = {}
        if self.path.exists():
            with self.path.open() as fh:
                for lineno, line in enumerate(fh, 1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rep = ChunkReport.from_json(json.loads(line))
                    except (ValueError, TypeError, KeyError) as exc:
                        # a torn final line from an interrupted run is skipped
                        log.warning("journal %s line %d unreadable: %s", self.path, lineno, exc)
                        continue
                    self.done[(rep.ineq_id, rep.lo, rep.hi)] = rep

    def get(self, ineq_id: str, lo: int, hi: int) -> ChunkReport | None:
        return self.done.get((ineq_id, lo, hi))

    def record(self, rep: ChunkReport, chunk_len: int) -> None:
        line = json.dumps({**rep.to_json(), "chunk_len": chunk_len}, sort_keys=True)
        with self.path.open("a") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self.done[(rep.ineq_id, rep.lo, rep.hi)] = rep


def _worker(args) -> list[ChunkReport]:
    ids, lo, hi, sample = args
    return verify_chunks(ids, lo, hi, sample=sample)


def verify_many(
    ineq_ids: Sequence[str],
    lo: int,
    hi: int,
    *,
    workers: int | None = None,
    chunk_len: int = DEFAULT_CHUNK_LEN,
    sample: int = DEFAULT_SAMPLE,
    journal: Journal | str | os.PathLike | None = None,
) -> dict[str, VerificationReport]:
    """Verify several inequalities over ``lo..hi``, sharing each chunk's sieve."""
    ineq_ids = list(dict.fromkeys(ineq_ids))
    for i in ineq_ids:
        _check_domain(catalog.get(i), lo, hi)
    if chunk_len < 1:
        raise ValueError("chunk_len must be positive")
    if chunk_len > DEFAULT_BUDGET:
        raise ValueError(f"chunk_len {chunk_len} exceeds segment budget {DEFAULT_BUDGET}")
    workers = workers or os.cpu_count() or 1
    if workers < 1:
        raise ValueError("workers must be positive")
    if journal is not None and not isinstance(journal, Journal):
        journal = Journal(journal)

    t0 = time.perf_counter()
    bounds = [(a, min(a + chunk_len - 1, hi)) for a in range(lo, hi + 1, chunk_len)]
    results: dict[str, list[ChunkReport]] = {i: [] for i in ineq_ids}
    todo = []
    for a, b in bounds:
        missing = []
        for i in ineq_ids:
            rep = journal.get(i, a, b) if journal else None
            if rep is None:
                missing.append(i)
            else:
                results[i].append(rep)
        if missing:
            todo.append((tuple(missing), a, b, sample))
    if journal and len(todo) < len(bounds):
        log.info("resuming: %d of %d chunks already journaled", len(bounds) - len(todo), len(bounds))

    def collect(reps: list[ChunkReport]) -> None:
        for rep in reps:
            results[rep.ineq_id].append(rep)
            if journal:
                journal.record(rep, chunk_len)

    if workers == 1 or len(todo) <= 1:
        for task in todo:
            collect(_worker(task))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for reps in pool.map(_worker, todo):
                collect(reps)

    elapsed = (time.perf_counter() - t0) * 1000
    out = {}
    for i in ineq_ids:
        rep = merge(results[i], sample=sample)
        rep.elapsed_ms = elapsed
        out[i] = rep
    return out


def verify_range(
    ineq_id: str,
    lo: int,
    hi: int,
    workers: int | None = None,
    chunk_len: int = DEFAULT_CHUNK_LEN,
    *,
    sample: int = DEFAULT_SAMPLE,
    journal: Journal | str | os.PathLike | None = None,
) -> VerificationReport:
    return verify_many(
        [ineq_id], lo, hi, workers=workers, chunk_len=chunk_len, sample=sample, journal=journal
    )[ineq_id]


def find_extremes(
    ineq_id: str, lo: int, hi: int, k: int, *, chunk_len: int = DEFAULT_CHUNK_LEN
) -> list[GapValue]:
    """The ``k`` smallest strictly positive gaps, ordered by (gap, n)."""
    ineq = catalog.get(ineq_id)
    _check_domain(ineq, lo, hi)
    if k < 1:
        raise ValueError("k must be >= 1")
    best: list[tuple[int, int]] = []
    for a in range(lo, hi + 1, chunk_len):
        b = min(a + chunk_len - 1, hi)
        cols = gap_columns(ineq.difference, sieve_range(a, b))
        pos = np.flatnonzero(cols.sign > 0)
        if not pos.size:
            continue
        if pos.size > k:
            # the k-th smallest upper bound caps every row that can make the cut
            cap = np.partition(cols.upper[pos], k - 1)[k - 1]
            pos = pos[cols.lower[pos] <= cap]
        cand = [(cols.exact(int(j)), a + int(j)) for j in pos]
        best = heapq.nsmallest(k, best + cand)
    return [GapValue(n, g) for g, n in best]
