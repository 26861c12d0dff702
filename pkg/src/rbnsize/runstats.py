"""Run-length statistics over all binary strings of a given length.

Everything here is counted by exhaustive enumeration of all 2**n strings,
vectorized with numpy so that string lengths up to 24 stay tractable.  A
closed-form cross-check (`run_count_closed_form`) exists for the run table:
a maximal run needs one neighbouring zero at a string edge and two in the
interior, which prices each placement at a power of two.

The aggregate non-zero-digit expression (n + 2) * 2**(n - 2) is treated as
a claim under test, not an axiom: `deviation_report` prices every string
through the real encoder and records measured totals next to the formula.
The two agree at n = 2 and diverge elsewhere (the formula is not even an
integer at n = 1), so tests assert the n = 2 point and otherwise pin the
report itself.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from rbnsize.codec import encode_rbn, int_to_bits, weight

MAX_TABLE_N = 24   # 2**n enumeration bound for the run table
MAX_MEASURE_N = 20  # 2**n encoder sweeps get slow beyond this

_ENUM_CHUNK_BITS = 18  # strings per numpy chunk = 2**18


@dataclass(frozen=True)
class RunCountTable:
    """Occurrences of maximal runs of exactly k ones over all 2**n strings."""

    n: int
    rows: dict[int, int]

    def max_multiplicity(self, k: int) -> int:
        """Largest possible count of maximal k-runs in one n-bit string."""
        if not 1 <= k <= self.n:
            raise ValueError(f"k must be in 1..{self.n}")
        return (self.n + 1) // (k + 1)

    def total_ones(self) -> int:
        return sum(k * count for k, count in self.rows.items())


@dataclass(frozen=True)
class OccurrenceCount:
    """Total occurrences contributed by strings holding exactly i_k k-runs."""

    n: int
    k: int
    i_k: int
    strings: int
    count: int  # i_k * strings


def _bit_chunks(n: int):
    """Yield (chunk_size, bits) arrays covering all 2**n strings.

    ``bits`` has shape (chunk, n + 1): one column per bit position plus a
    trailing zero column so runs never cross row boundaries when flattened.
    """
    total = 1 << n
    chunk = min(total, 1 << _ENUM_CHUNK_BITS)
    positions = np.arange(n, dtype=np.uint32)
    for base in range(0, total, chunk):
        values = np.arange(base, base + chunk, dtype=np.uint32)
        bits = np.zeros((chunk, n + 1), dtype=np.uint8)
        bits[:, :n] = (values[:, None] >> positions) & 1
        yield chunk, bits


def _run_spans(bits: np.ndarray):
    """Start indices, lengths and row ids of maximal runs in a chunk."""
    rows, width = bits.shape
    flat = np.zeros(rows * width + 1, dtype=np.uint8)
    flat[1:] = bits.ravel()
    one = flat == 1
    starts = np.flatnonzero(one[1:] & ~one[:-1]) + 1
    ends = np.flatnonzero(one[:-1] & ~one[1:])
    lengths = ends - starts + 1
    row_ids = (starts - 1) // width
    return lengths, row_ids


def run_count_table(n: int) -> RunCountTable:
    """Count maximal runs of every length over all 2**n strings of length n."""
    if not 1 <= n <= MAX_TABLE_N:
        raise ValueError(f"n must be in 1..{MAX_TABLE_N}, got {n}")
    rows = {k: 0 for k in range(1, n + 1)}
    for _, bits in _bit_chunks(n):
        lengths, _ = _run_spans(bits)
        counts = np.bincount(lengths, minlength=n + 1)
        for k in range(1, n + 1):
            rows[k] += int(counts[k])
    return RunCountTable(n=n, rows=rows)


def run_count_closed_form(n: int) -> RunCountTable:
    """Closed-form run table: edge placements need one zero, interior two."""
    if n < 1:
        raise ValueError("n must be positive")
    rows: dict[int, int] = {}
    for k in range(1, n + 1):
        if k == n:
            rows[k] = 1
        else:
            edge = 2 * (1 << (n - k - 1))
            interior = (n - k - 1) * (1 << (n - k - 2)) if n - k >= 2 else 0
            rows[k] = edge + interior
    return RunCountTable(n=n, rows=rows)


def occurrence_count(n: int, k: int, i_k: int) -> OccurrenceCount:
    """Occurrences contributed by strings with exactly i_k maximal k-runs.

    Counted as i_k times the number of qualifying strings; summing over all
    admissible i_k reproduces the run table row for k.
    """
    if not 1 <= n <= MAX_TABLE_N:
        raise ValueError(f"n must be in 1..{MAX_TABLE_N}, got {n}")
    if k < 1 or k > n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    bound = (n + 1) // (k + 1)
    if not 1 <= i_k <= bound:
        raise ValueError(f"i_k must be in 1..{bound} for n={n}, k={k}, got {i_k}")
    strings = 0
    for chunk, bits in _bit_chunks(n):
        lengths, row_ids = _run_spans(bits)
        k_rows = row_ids[lengths == k]
        per_row = np.bincount(k_rows, minlength=chunk)
        strings += int(np.count_nonzero(per_row == i_k))
    return OccurrenceCount(n=n, k=k, i_k=i_k, strings=strings, count=i_k * strings)


def formula_total_nonzeros(n: int) -> Fraction:
    """The claimed aggregate (n + 2) * 2**(n - 2); exact, rational at n = 1."""
    if n < 1:
        raise ValueError("n must be positive")
    return Fraction(n + 2) * Fraction(2) ** (n - 2)


def measured_total_nonzeros(n: int) -> int:
    """Non-zero digits summed over the encodings of all 2**n strings."""
    if not 0 <= n <= MAX_MEASURE_N:
        raise ValueError(f"n must be in 0..{MAX_MEASURE_N}, got {n}")
    total = 0
    for v in range(1 << n):
        total += weight(encode_rbn(int_to_bits(v, n)))
    return total


def avg_nonzero_fraction(n: int) -> Fraction:
    """Formula-side average non-zero fraction (n + 2) / (4n)."""
    if n < 1:
        raise ValueError("n must be positive")
    return Fraction(n + 2, 4 * n)


@dataclass(frozen=True)
class DeviationRow:
    n: int
    measured: int
    formula: Fraction

    @property
    def deviation(self) -> Fraction:
        return Fraction(self.measured) - self.formula


def deviation_report(n_max: int = 16) -> list[DeviationRow]:
    """Measured-vs-formula totals for n = 1..n_max."""
    if not 1 <= n_max <= MAX_MEASURE_N:
        raise ValueError(f"n_max must be in 1..{MAX_MEASURE_N}")
    return [
        DeviationRow(n=n, measured=measured_total_nonzeros(n),
                     formula=formula_total_nonzeros(n))
        for n in range(1, n_max + 1)
    ]


# --- serialization used by the CLI and the committed report ----------------

def table_to_csv(table: RunCountTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "max_i_k", "occurrences"])
    for k in sorted(table.rows):
        writer.writerow([k, table.max_multiplicity(k), table.rows[k]])
    return buf.getvalue()


def table_to_json(table: RunCountTable) -> str:
    return json.dumps(
        {
            "n": table.n,
            "rows": [
                {"k": k, "max_i_k": table.max_multiplicity(k),
                 "occurrences": table.rows[k]}
                for k in sorted(table.rows)
            ],
        },
        indent=2,
    )


def deviation_to_csv(rows: list[DeviationRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "measured_nonzeros", "formula_nonzeros", "deviation"])
    for row in rows:
        writer.writerow([row.n, row.measured, str(row.formula), str(row.deviation)])
    return buf.getvalue()


def deviation_to_json(rows: list[DeviationRow]) -> str:
    return json.dumps(
        [
            {"n": r.n, "measured": r.measured, "formula": str(r.formula),
             "deviation": str(r.deviation)}
            for r in rows
        ],
        indent=2,
    )
