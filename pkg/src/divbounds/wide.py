"""Exact evaluation of catalog expressions over whole range tables.

Gap values reach ~2**95 at n = 10**6, so plain int64 columns overflow. Each
row instead carries two cheap numpy quantities:

* a float64 estimate ``approx`` with a rigorous error bound ``err``
  (``|approx - gap| <= err``), and
* the exact residue ``gap mod 2**64`` from wrapping uint64 arithmetic.

If ``|approx| > err`` the sign is certain and the gap is nonzero. Otherwise
``|gap| <= 2*err < 2**62`` and the residue, read as a signed int64, *is* the
gap. Rows where neither applies (or where the table columns are already
Python ints) are promoted to exact Python-int evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import SYMBOLS, FormalExpression, eval_expression
from .sieve import RangeTable

__all__ = ["GapColumns", "gap_columns"]

_FIELD = dict(
    PHI="phi", PSI="psi", SIGMA="sigma", PHI_STAR="phi_star", SIGMA_STAR="sigma_star", N="n"
)
_U = 2.0**-52  # two units of roundoff
_SMALL_LIMIT = 2.0**61


@dataclass
class GapColumns:
    """Per-row exact facts about ``gap = expr(row)`` for one table."""

    table: RangeTable
    expr: FormalExpression
    sign: np.ndarray  # int8, exact sign of each gap
    residue: np.ndarray  # uint64, exact gap mod 2**64
    lower: np.ndarray  # float64, gap >= lower
    upper: np.ndarray  # float64, gap <= upper
    small: np.ndarray  # bool, residue read as int64 equals the gap
    promoted: int  # rows that needed Python-int evaluation

    def exact(self, k: int) -> int:
        """Exact gap at row index ``k``."""
        if self.small[k]:
            return int(self.residue[k].astype(np.int64))
        return eval_expression(self.expr, self.table[k])

    def exact_many(self, idx) -> list[int]:
        return [self.exact(int(k)) for k in idx]


def _exact_object(expr: FormalExpression, table: RangeTable) -> GapColumns:
    vals = [eval_expression(expr, b) for b in table]
    mask = (1 << 64) - 1
    residue = np.array([v & mask for v in vals], dtype=np.uint64)
    sign = np.array([(v > 0) - (v < 0) for v in vals], dtype=np.int8)
    small = np.array([-(1 << 62) <= v < (1 << 62) for v in vals], dtype=bool)
    approx = np.array([float(v) for v in vals])
    # float(v) is within one ulp of v
    slack = np.abs(approx) * _U + 1.0
    return GapColumns(table, expr, sign, residue, approx - slack, approx + slack, small, len(vals))


def gap_columns(expr: FormalExpression, table: RangeTable) -> GapColumns:
    if not table.exact_int64:
        return _exact_object(expr, table)

    size = len(table)
    fcol = {}
    ucol = {}
    for s in SYMBOLS:
        col = getattr(table, _FIELD[s])
        fcol[s] = col.astype(np.float64)
        ucol[s] = col.astype(np.uint64)

    approx = np.zeros(size)
    magnitude = np.zeros(size)
    residue = np.zeros(size, dtype=np.uint64)
    max_degree = 0
    with np.errstate(over="ignore"):
        for coef, mono in expr.terms:
            ft = np.full(size, float(coef))
            ut = np.full(size, coef % (1 << 64), dtype=np.uint64)
            for s, k in zip(SYMBOLS, mono):
                for _ in range(k):
                    ft *= fcol[s]
                    ut *= ucol[s]
            max_degree = max(max_degree, sum(mono))
            approx += ft
            magnitude += np.abs(ft)
            residue += ut

    # Standard bound: products of d factors and a sum of m terms together
    # carry relative error at most (d + m) u; _U is 2u, so this has slack.
    err = (max_degree + len(expr.terms) + 2) * _U * magnitude
    certain = np.abs(approx) > err
    small = ~certain
    sign = np.sign(approx).astype(np.int8)

    promoted = 0
    unresolved = small & (err >= _SMALL_LIMIT)
    if unresolved.any():
        idx = np.flatnonzero(unresolved)
        promoted = idx.size
        mask = (1 << 64) - 1
        for k in idx.tolist():
            v = eval_expression(expr, table[k])
            residue[k] = v & mask
            sign[k] = (v > 0) - (v < 0)
            small[k] = -(1 << 62) <= v < (1 << 62)
            approx[k] = float(v)
            err[k] = abs(float(v)) * _U + 1.0
        certain[idx] = True

    exact_small = small & ~unresolved
    signed = residue.view(np.int64)
    sign[exact_small] = np.sign(signed[exact_small]).astype(np.int8)
    approx[exact_small] = signed[exact_small].astype(np.float64)
    err[exact_small] = np.abs(approx[exact_small]) * _U
    return GapColumns(table, expr, sign, residue, approx - err, approx + err, small, promoted)
