"""Exact log-space combinatorial primitives shared by the description-length formulas.

All quantities are natural logarithms (nats). Factorial-family helpers are
evaluated from exact integers below a fixed cap and with lgamma above it, so
scalar and vectorized call sites always agree bit-for-bit.

The restricted partition count q(n, m) -- the number of ways to write the
integer n as a sum of at most m positive parts -- is served by :class:`QTable`,
which keeps exact big-integer dynamic-programming rows for small n and a
float64 evaluation of the same recurrence for larger n.
"""
from __future__ import annotations

import logging
import math
import os
import struct
import threading
from pathlib import Path

import numpy as np
from scipy import special

log = logging.getLogger(__name__)

LN2 = math.log(2.0)

# ln(n!) from exact integer factorials below this, lgamma above.
_EXACT_FACTORIAL_CAP = 2048

_FACT_TABLE: np.ndarray | None = None


def _factorial_table() -> np.ndarray:
    global _FACT_TABLE
    if _FACT_TABLE is None:
        acc = 1
        vals = np.empty(_EXACT_FACTORIAL_CAP, dtype=np.float64)
        vals[0] = 0.0
        for i in range(1, _EXACT_FACTORIAL_CAP):
            acc *= i
            vals[i] = math.log(acc)
        _FACT_TABLE = vals
    return _FACT_TABLE


def log_factorial(n: int) -> float:
    """ln(n!) for n >= 0."""
    if n < 0:
        raise ValueError(f"factorial of negative value {n}")
    if n < _EXACT_FACTORIAL_CAP:
        return float(_factorial_table()[n])
    return float(special.gammaln(n + 1.0))


def log_factorial_arr(n: np.ndarray) -> np.ndarray:
    """Vectorized ln(n!); agrees elementwise with :func:`log_factorial`."""
    n = np.asarray(n, dtype=np.int64)
    if n.size and int(n.min()) < 0:
        raise ValueError("factorial of negative value")
    out = special.gammaln(n + 1.0)
    small = n < _EXACT_FACTORIAL_CAP
    if np.any(small):
        out = np.where(small, _factorial_table()[np.minimum(n, _EXACT_FACTORIAL_CAP - 1)], out)
    return out


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k) with the domain 0 <= k <= n."""
    if k < 0 or k > n:
        raise ValueError(f"binomial out of domain: n={n}, k={k}")
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k)


def log_multiset(n: int, k: int) -> float:
    """ln of the multiset coefficient ((n, k)) = C(n + k - 1, k); n >= 1, k >= 0."""
    if n < 1:
        raise ValueError(f"multiset coefficient needs n >= 1, got n={n}")
    if k < 0:
        raise ValueError(f"multiset coefficient needs k >= 0, got k={k}")
    return log_binomial(n + k - 1, k)


def log_double_factorial_even(x: int) -> float:
    """ln(x!!) for even x >= 0, via x!! = 2^(x/2) * (x/2)!."""
    if x < 0 or x % 2 != 0:
        raise ValueError(f"even double factorial needs even x >= 0, got {x}")
    half = x // 2
    return half * LN2 + log_factorial(half)


# ---------------------------------------------------------------------------
# Restricted integer partitions q(n, m)
# ---------------------------------------------------------------------------

_CACHE_MAGIC = b"MBQT"
_CACHE_VERSION = 1

# Grand-canonical constant pi/sqrt(6) of the partition ensemble.
_PART_C = math.pi / math.sqrt(6.0)


def _log_partition_asymptotic(n: int, m: int) -> float:
    """Dilogarithm estimate of ln q(n, m) for very large n.

    ln p(n) from the leading Hardy-Ramanujan term, corrected for the
    at-most-m-parts restriction by the grand-canonical largest-part bound
    ln(q/p) ~ -(sqrt(n)/c) Li2(exp(-c m / sqrt(n))), c = pi/sqrt(6).
    Coarse for m << sqrt(n); monotone in both arguments.
    """
    sq = math.sqrt(n)
    log_p = 2.0 * _PART_C * sq - math.log(4.0 * math.sqrt(3.0) * n)
    u = _PART_C * m / sq
    li2 = float(special.spence(1.0 - math.exp(-u)))  # Li2(exp(-u))
    return max(0.0, log_p - (sq / _PART_C) * li2)


class QTable:
    """Memoized evaluation of q(n, m), partitions of n into at most m parts.

    Rows are built with the bounded-part generating-function recurrence
    q(n, m) = q(n, m-1) + q(n-m, m): row m is obtained from row m-1 by a
    stride-m cumulative sum. For n <= ``exact_cap`` the rows hold exact big
    integers; for larger n (up to ``float_cap``) the identical recurrence is
    evaluated in float64, whose accumulated relative error stays far below
    the 1e-9 nat tolerance used for description-length comparisons. Beyond
    ``float_cap`` a documented asymptotic fallback is used and logged.

    Reads are safe from multiple threads; row construction is serialized
    internally.
    """

    def __init__(self, exact_cap: int = 1000, float_cap: int = 50_000):
        if exact_cap < 1:
            raise ValueError("exact_cap must be >= 1")
        self.exact_cap = int(exact_cap)
        self.float_cap = int(float_cap)
        self._lock = threading.Lock()
        # exact tier: _int_rows[m][i] = q(i, m) for i <= exact_cap
        row0 = [0] * (self.exact_cap + 1)
        row0[0] = 1
        self._int_rows: list[list[int]] = [row0]
        self._int_logs: dict[int, np.ndarray] = {}
        # float tier: _f_rows[m] = q(., m) in linear space, length _f_len
        self._f_len = 0
        self._f_rows: list[np.ndarray] = []
        self._warned_asymptotic = False

    # -- exact tier ---------------------------------------------------------

    def _grow_int_rows(self, m: int) -> None:
        cap = self.exact_cap
        while len(self._int_rows) <= m:
            j = len(self._int_rows)
            prev = self._int_rows[j - 1]
            row = prev.copy()
            for i in range(j, cap + 1):
                row[i] += row[i - j]
            self._int_rows.append(row)

    def exact(self, n: int, m: int) -> int:
        """Exact integer q(n, m); requires n <= exact_cap."""
        if n < 0 or m < 1:
            raise ValueError(f"q(n, m) needs n >= 0 and m >= 1, got ({n}, {m})")
        if n > self.exact_cap:
            raise ValueError(f"exact() limited to n <= {self.exact_cap}, got n={n}")
        m = min(m, n) if n > 0 else 1
        with self._lock:
            self._grow_int_rows(m)
            return self._int_rows[m][n]

    def _int_log_row(self, m: int) -> np.ndarray:
        row = self._int_logs.get(m)
        if row is None:
            self._grow_int_rows(m)
            ints = self._int_rows[m]
            row = np.array([math.log(v) if v > 0 else -math.inf for v in ints])
            self._int_logs[m] = row
        return row

    # -- float tier ---------------------------------------------------------

    def _grow_float_rows(self, n: int, m: int) -> None:
        length = n + 1
        if length > self._f_len:
            length = min(max(length, 2 * self._f_len), self.float_cap + 1)
            self._f_len = length
            self._f_rows = []  # rebuilt below at the new length
        if not self._f_rows:
            row0 = np.zeros(self._f_len)
            row0[0] = 1.0
            self._f_rows.append(row0)
        while len(self._f_rows) <= m:
            j = len(self._f_rows)
            row = self._f_rows[j - 1].copy()
            for r in range(min(j, self._f_len)):
                sl = row[r::j]
                np.cumsum(sl, out=sl)
            self._f_rows.append(row)

    # -- public -------------------------------------------------------------

    def log_q(self, n: int, m: int) -> float:
        """ln q(n, m) in nats."""
        if n < 0 or m < 1:
            raise ValueError(f"q(n, m) needs n >= 0 and m >= 1, got ({n}, {m})")
        if n == 0:
            return 0.0
        m = min(m, n)
        if n <= self.exact_cap:
            with self._lock:
                return float(self._int_log_row(m)[n])
        if n <= self.float_cap:
            with self._lock:
                self._grow_float_rows(n, m)
                return float(math.log(self._f_rows[m][n]))
        if not self._warned_asymptotic:
            self._warned_asymptotic = True
            log.warning(
                "q(%d, %d) exceeds the float DP cap (%d); using the asymptotic "
                "fallback for this and further oversized arguments", n, m, self.float_cap,
            )
        return _log_partition_asymptotic(n, m)

    # -- optional binary cache ----------------------------------------------

    def save(self, path: str | os.PathLike) -> None:
        """Write the exact rows built so far to a little-endian binary cache."""
        path = Path(path)
        with self._lock:
            rows = [row.copy() for row in self._int_rows]
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(_CACHE_MAGIC)
            fh.write(struct.pack("<III", _CACHE_VERSION, self.exact_cap, len(rows)))
            for row in rows:
                for v in row:
                    blob = v.to_bytes((v.bit_length() + 7) // 8, "little") if v else b""
                    fh.write(struct.pack("<I", len(blob)))
                    fh.write(blob)
        os.replace(tmp, path)

    def load(self, path: str | os.PathLike) -> bool:
        """Load cached exact rows; returns False (never raises) when absent or stale."""
        path = Path(path)
        if not path.is_file():
            return False
        try:
            with open(path, "rb") as fh:
                if fh.read(4) != _CACHE_MAGIC:
                    return False
                version, cap, n_rows = struct.unpack("<III", fh.read(12))
                if version != _CACHE_VERSION or cap != self.exact_cap:
                    return False
                rows = []
                for _ in range(n_rows):
                    row = []
                    for _ in range(cap + 1):
                        (blen,) = struct.unpack("<I", fh.read(4))
                        row.append(int.from_bytes(fh.read(blen), "little") if blen else 0)
                    rows.append(row)
        except (OSError, struct.error):
            return False
        if not rows or rows[0][0] != 1 or any(rows[0][1:]):
            return False
        with self._lock:
            if len(rows) > len(self._int_rows):
                self._int_rows = rows
                self._int_logs.clear()
        return True


_DEFAULT_QTABLE: QTable | None = None
_DEFAULT_LOCK = threading.Lock()

CACHE_DIR_ENV = "METABLOX_CACHE_DIR"
_CACHE_FILENAME = "qtable.bin"


def default_qtable() -> QTable:
    """Process-wide shared QTable; loads the on-disk cache if one is configured."""
    global _DEFAULT_QTABLE
    with _DEFAULT_LOCK:
        if _DEFAULT_QTABLE is None:
            table = QTable()
            cache_dir = os.environ.get(CACHE_DIR_ENV)
            if cache_dir:
                table.load(Path(cache_dir) / _CACHE_FILENAME)
            _DEFAULT_QTABLE = table
        return _DEFAULT_QTABLE


def persist_default_qtable() -> None:
    """Best-effort save of the shared table when a cache directory is configured."""
    cache_dir = os.environ.get(CACHE_DIR_ENV)
    if not cache_dir or _DEFAULT_QTABLE is None:
        return
    try:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        _DEFAULT_QTABLE.save(Path(cache_dir) / _CACHE_FILENAME)
    except OSError as exc:
        log.warning("could not persist q-table cache: %s", exc)


def log_q(n: int, m: int, table: QTable | None = None) -> float:
    """ln q(n, m) using ``table`` or the shared default table."""
    return (table or default_qtable()).log_q(n, m)
