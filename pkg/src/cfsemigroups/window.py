"""The window function f(n): how many consecutive integers are needed to
see both symbol values against a fixed lower argument.

``f(n)`` is the least m such that every m consecutive integers contain
an x with ``(x|n) = 1`` and an x with ``(x|n) = -1``.  It is finite iff
n is not a square, and is computed exactly from one period of the
symbol (period n, or 4n when ``n = 2 mod 4``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .kron import fast_kronecker, is_square

__all__ = [
    "WindowResult",
    "f_of_n",
    "pv_bound",
    "check_trivial_bound",
    "check_pv_bound",
]

PV_COEFF = 0.942836
PV_MIN_N = 3_410_000


@dataclass(frozen=True)
class WindowResult:
    n: int
    f: int
    worst_window_start: int

    @property
    def worst_window(self) -> range:
        """A window of size f-1 in which one symbol value never occurs."""
        return range(self.worst_window_start, self.worst_window_start + self.f - 1)


def f_of_n(n: int) -> WindowResult:
    """Exact f(n) for non-square n >= 2, with a witness window.

    Scans two symbol periods tracking the longest run of x with no
    ``(x|n) = 1`` and the longest with no ``(x|n) = -1``; both runs are
    shorter than one period (each value occurs in every period), so the
    doubled scan sees every wrap-around run.  O(period) time and memory.
    """
    if n < 2:
        raise ValueError("f(n) needs n >= 2")
    if is_square(n):
        raise ValueError(f"(x|{n}) never takes -1: f is infinite")
    period = n if n % 4 != 2 else 4 * n
    kron = fast_kronecker
    vals = bytearray(kron(x, n) % 3 for x in range(period))  # -1 stored as 2
    best_p = best_m = 0
    arg_p = arg_m = 0
    cur_p = cur_m = 0
    start_p = start_m = 0
    for i in range(2 * period):
        v = vals[i] if i < period else vals[i - period]
        if v == 1:
            cur_p, start_p = 0, i + 1
        else:
            cur_p += 1
            if cur_p > best_p:
                best_p, arg_p = cur_p, start_p
        if v == 2:
            cur_m, start_m = 0, i + 1
        else:
            cur_m += 1
            if cur_m > best_m:
                best_m, arg_m = cur_m, start_m
    if best_p >= best_m:
        worst, start = best_p, arg_p
    else:
        worst, start = best_m, arg_m
    return WindowResult(n=n, f=worst + 1, worst_window_start=start % period)


def pv_bound(n: int) -> float:
    """Character-sum upper bound 0.942836 sqrt(n) log(n) loglog(n)."""
    return PV_COEFF * math.sqrt(n) * math.log(n) * math.log(math.log(n))


def check_trivial_bound(ns: Iterable[int]) -> list[dict]:
    """Rows checking f(n) <= n - 1 for odd non-square n >= 5."""
    rows = []
    for n in ns:
        if n < 5 or n % 2 == 0 or is_square(n):
            raise ValueError(f"trivial bound needs odd non-square n >= 5: {n}")
        f = f_of_n(n).f
        rows.append({"n": n, "f": f, "bound": n - 1, "ok": f <= n - 1})
    return rows


def check_pv_bound(ns: Iterable[int]) -> list[dict]:
    """Rows checking f(n) against :func:`pv_bound`.

    Hypotheses enforced per n: non-square, ``n != 2 mod 4``, and
    ``n >= 3_410_000`` (the bound is only claimed from there up).
    """
    rows = []
    for n in ns:
        if n < PV_MIN_N:
            raise ValueError(f"bound applies from {PV_MIN_N}, got {n}")
        if n % 4 == 2:
            raise ValueError(f"bound excludes n = 2 mod 4, got {n}")
        if is_square(n):
            raise ValueError(f"bound needs non-square n, got {n}")
        f = f_of_n(n).f
        b = pv_bound(n)
        rows.append(
            {"n": n, "f": f, "bound": b, "ratio": f / b, "ok": f <= b}
        )
    return rows
