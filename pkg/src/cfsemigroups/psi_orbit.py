"""Which integers appear as numerators and denominators in the orbit of
the symbol-preserving semigroup on a fixed coprime pair.

For coprime nonnegative ``(x, y)``, the orbit values on each side are
controlled by three layers:

* a congruence condition (numerators lie in ``x mod gcd(y, 4)``,
  denominators in ``y mod 4``);
* for some starting pairs a reciprocity obstruction that removes every
  admissible perfect square;
* finitely many sporadic exceptions, all below an explicit threshold.

This module computes all three layers: exact membership by scanning the
solutions of ``ux + vy = n`` (:func:`appears_as_numerator`,
:func:`appears_as_denominator`), the classification with effective
thresholds (:func:`classify`, :func:`effective_threshold`), fast
sufficient conditions that avoid scanning (:func:`sufficient_check`),
and exhaustive missing-value searches (:func:`orbit_missing`,
:func:`orbit_complete_description`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from math import gcd, isqrt
from typing import Callable, Literal, NamedTuple

from .kron import fast_kronecker, is_square, kronecker, odd_split
from .util import Progress, chunk_ranges, run_tasks, worker_count
from .window import f_of_n

__all__ = [
    "Side",
    "SIDES",
    "ObstructionReport",
    "classify",
    "effective_threshold",
    "appears_as_numerator",
    "appears_as_denominator",
    "SufficiencyResult",
    "sufficient_check",
    "orbit_missing",
    "orbit_complete_description",
]

Side = Literal["numerator", "denominator"]
SIDES: tuple[Side, Side] = ("numerator", "denominator")

# sqrt(r)/(log r loglog r) = THRESHOLD_COEFF * x * y pins the non-square
# threshold; FLOOR_R is the floor under the root imposed by the range of
# validity of the window bound.
THRESHOLD_COEFF = 7.542795
FLOOR_R = 3_410_000


def _check_side(side: str) -> None:
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")


def _validate_pair(x: int, y: int) -> None:
    if not (isinstance(x, int) and isinstance(y, int)):
        raise TypeError("x, y must be ints")
    if x < 0 or y < 0:
        raise ValueError(f"x, y must be nonnegative, got ({x}, {y})")
    if gcd(x, y) != 1:
        raise ValueError(f"x, y must be coprime, got ({x}, {y})")


@dataclass(frozen=True)
class ObstructionReport:
    """Everything known about one side of one orbit.

    ``sporadic`` is None until a scan has filled it in
    (:func:`orbit_complete_description`); ``scanned_to`` records how far
    that scan went.  With ``scanned_to >= nonsquare_threshold`` the
    report describes the orbit side completely and :meth:`member`
    decides every n.
    """

    x: int
    y: int
    side: Side
    modulus: int
    residues: tuple[int, ...]
    reciprocity: bool
    square_threshold: int
    nonsquare_threshold: int
    sporadic: tuple[int, ...] | None = None
    scanned_to: int | None = None

    def admits(self, n: int) -> bool:
        """Congruence layer only."""
        return n % self.modulus in self.residues

    def residues_mod4(self) -> tuple[int, ...]:
        """The admissible classes presented mod 4."""
        return tuple(
            r for r in range(4)
            if r % self.modulus in self.residues
        )

    def member(self, n: int) -> bool:
        """Decide membership of n from the completed description."""
        if self.sporadic is None:
            raise ValueError("description incomplete: run the sporadic scan")
        if n < 1:
            raise ValueError("orbit values are positive")
        if not self.admits(n):
            return False
        if self.reciprocity and is_square(n):
            return False
        if n in self.sporadic:
            return False
        scanned = self.scanned_to or 0
        if n <= scanned:
            return True
        # beyond the scan, fall back on the threshold theorems
        if is_square(n) or _twice_square(n):
            if n >= self.square_threshold:
                return True
        elif n >= self.nonsquare_threshold:
            return True
        raise ValueError(
            f"truncated description (scanned to {scanned}) cannot decide {n}"
        )

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "side": self.side,
            "modulus": self.modulus,
            "residues": list(self.residues),
            "reciprocity": self.reciprocity,
            "square_threshold": self.square_threshold,
            "nonsquare_threshold": self.nonsquare_threshold,
            "sporadic": None if self.sporadic is None else list(self.sporadic),
            "scanned_to": self.scanned_to,
        }


def _twice_square(n: int) -> bool:
    # n = 2 m^2, equivalently v2(n) odd with square odd part
    two, odd = odd_split(n)
    return two % 2 == 1 and is_square(odd)


def _threshold_root(target: float) -> int:
    """Least integer r with sqrt(r)/(log r loglog r) >= target.

    The left side increases for r >= 100; bisection with outward
    rounding, so the returned threshold is never too small.
    """
    def g(r: float) -> float:
        return math.sqrt(r) / (math.log(r) * math.log(math.log(r)))

    lo, hi = 100.0, 1e24
    if g(lo) >= target:
        return 100
    if g(hi) < target:
        raise ValueError("threshold root out of supported range")
    for _ in range(200):
        mid = (lo + hi) / 2
        if g(mid) >= target:
            hi = mid
        else:
            lo = mid
    return math.ceil(hi)


def effective_threshold(x: int, y: int) -> tuple[int, int]:
    """(square_threshold, nonsquare_threshold) for the orbit of (x, y).

    Squares and twice-squares admissible and unobstructed appear from
    ``8xy`` up; all other admissible integers appear from
    ``2^k max(r, 3_410_000)`` up, with ``2^k`` the largest power of two
    at most ``8xy`` and ``r`` the root from :func:`_threshold_root`.
    Degenerate pairs (x or y zero) have complete closed-form orbits, so
    both thresholds are 0.
    """
    _validate_pair(x, y)
    if x == 0 or y == 0:
        return (0, 0)
    r = _threshold_root(THRESHOLD_COEFF * x * y)
    k2 = 1 << ((8 * x * y).bit_length() - 1)
    return (8 * x * y, k2 * max(r, FLOOR_R))


def classify(x: int, y: int, side: Side) -> ObstructionReport:
    """Congruence and reciprocity layers for one side, with thresholds.

    The reciprocity flag is set exactly when every admissible square is
    provably absent from that side:

    * numerators: ``y`` odd with ``(x|y) = -1``, or
      ``(x, y) = (1, 0) mod 4`` with ``(x|y) = -1``;
    * denominators: those two (the first restricted to ``y = 1 mod 4``,
      since ``y = 3 mod 4`` admits no squares anyway) together with
      ``(x, y) = (3, 0) mod 4`` and ``(x|y) = -(-1|y)``.

    ``sporadic`` is left as None; see :func:`orbit_complete_description`.
    """
    _validate_pair(x, y)
    _check_side(side)
    if side == "numerator":
        modulus = gcd(y, 4)
        residues = (x % modulus,)
    else:
        modulus = 4
        residues = (y % 4,)
    s = kronecker(x, y)
    flag = False
    if y % 2 == 1 and s == -1:
        flag = side == "numerator" or y % 4 == 1
    elif y % 4 == 0:
        if x % 4 == 1 and s == -1:
            flag = True
        if x % 4 == 3 and side == "denominator" and s == -kronecker(-1, y):
            flag = True
    sq, nsq = effective_threshold(x, y)
    return ObstructionReport(
        x=x, y=y, side=side, modulus=modulus, residues=residues,
        reciprocity=flag, square_threshold=sq, nonsquare_threshold=nsq,
    )


def appears_as_numerator(x: int, y: int, n: int) -> bool:
    """Whether n occurs as a numerator in the orbit of (x, y).

    Scans the nonnegative solutions of ``ux + vy = n`` with
    ``u = 1 mod 4`` for one with ``(u|v) = 1``; this is exact membership,
    no shortcuts.  About ``n/(4xy)`` symbol evaluations in the worst
    case.
    """
    _validate_pair(x, y)
    if n < 1:
        raise ValueError("n must be positive")
    if y == 0:
        return n % 4 == 1
    if x == 0:
        return True
    g = gcd(y, 4)
    if n % g != x % g:
        return False
    h = 4 // g
    step, dx = h * y, h * x
    u0 = None
    for u in range(1, step + 1, 4):
        if (n - u * x) % y == 0:
            u0 = u
            break
    if u0 is None:
        return False
    kron = fast_kronecker
    u, v = u0, (n - u0 * x) // y
    while v >= 0:
        if kron(u, v) == 1:
            return True
        u += step
        v -= dx
    return False


def appears_as_denominator(x: int, y: int, n: int) -> bool:
    """Whether n occurs as a denominator in the orbit of (x, y).

    Same exact scan as :func:`appears_as_numerator` over solutions with
    ``u = 0`` and ``v = 1 mod 4``.
    """
    _validate_pair(x, y)
    if n < 1:
        raise ValueError("n must be positive")
    if y == 0:
        return n % 4 == 0
    if x == 0:
        return n % 4 == 1
    if n % 4 != y % 4:
        return False
    u0 = None
    for u in range(0, 4 * y, 4):
        t = n - u * x
        if t % y == 0 and (t % (4 * y)) // y % 4 == 1:
            u0 = u
            break
    if u0 is None:
        return False
    kron = fast_kronecker
    u, v = u0, (n - u0 * x) // y
    while v >= 0:
        if kron(u, v) == 1:
            return True
        u += 4 * y
        v -= 4 * x
    return False


class SufficiencyResult(NamedTuple):
    verdict: Literal["appears", "absent", "unknown"]
    reason: str


def sufficient_check(x: int, y: int, n: int, side: Side) -> SufficiencyResult:
    """Decide membership without a solution scan when a fast criterion
    applies.

    Checks, in order: the closed forms for degenerate pairs, the

    congruence layer, the reciprocity exclusion of squares, the square
    and twice-square sufficient branches (from ``8xy`` up), and the
    window branch (``f(odd part of n)`` fits inside ``n // (8xy)``).
    The window branch computes f exactly, which costs one pass over a
    symbol period.  Returns "unknown" when nothing applies; callers then
    fall back on the exact scan.
    """
    _validate_pair(x, y)
    _check_side(side)
    if n < 1:
        raise ValueError("n must be positive")
    appears = (
        appears_as_numerator if side == "numerator" else appears_as_denominator
    )
    if x == 0 or y == 0:
        hit = appears(x, y, n)
        return SufficiencyResult(
            "appears" if hit else "absent", "closed form for a degenerate pair"
        )
    report = classify(x, y, side)
    if not report.admits(n):
        return SufficiencyResult(
            "absent",
            f"congruence: n = {n % report.modulus} mod {report.modulus}, "
            f"need {report.residues}",
        )
    if report.reciprocity and is_square(n):
        return SufficiencyResult("absent", "reciprocity excludes squares")
    s = kronecker(x, y)
    if is_square(n):
        if side == "numerator" and n >= 8 * x * y:
            if (y % 2 == 1 and s == 1) or (
                x % 4 == 1 and y % 4 == 0 and s == 1
            ) or y % 4 == 2:
                return SufficiencyResult("appears", "square branch")
        if side == "denominator" and n >= 4 * x * y:
            if (y % 4 == 1 and s == 1) or (
                x % 4 == 1 and y % 4 == 0 and s == 1
            ) or (
                x % 4 == 3 and y % 4 == 0 and s == kronecker(-1, y)
            ):
                return SufficiencyResult("appears", "square branch")
        return SufficiencyResult("unknown", "no square branch applies")
    if _twice_square(n):
        if n >= 8 * x * y:
            return SufficiencyResult("appears", "twice-square branch")
        return SufficiencyResult("unknown", "twice-square below 8xy")
    window = n // (8 * x * y)
    if window >= 1:
        odd = odd_split(n)[1]
        if odd >= 2 and not is_square(odd):
            f = f_of_n(odd).f
            if f <= window:
                return SufficiencyResult(
                    "appears", f"window branch: f({odd}) = {f} <= {window}"
                )
            return SufficiencyResult(
                "unknown", f"window branch fails: f({odd}) = {f} > {window}"
            )
    return SufficiencyResult("unknown", "no sufficient condition applies")


def _missing_chunk(args: tuple) -> list[int]:
    """Admissible values in [lo, hi) absent from one orbit side.

    Worker for :func:`orbit_missing`; with ``skip_squares`` the flagged
    squares are recorded as missing without scanning (they are proven
    absent), which keeps the scan fast near square-dense stretches.
    """
    x, y, side, lo, hi, skip_squares = args
    kron = fast_kronecker
    missing: list[int] = []
    if side == "numerator":
        g = gcd(y, 4)
        h = 4 // g
        step, dx = h * y, h * x
        tab: list[int | None] = [None] * y
        for u in range(1, step + 1, 4):
            r = u * x % y
            if tab[r] is None:
                tab[r] = u
        assert all(
            (tab[r] is None) == (r % g != x % g) for r in range(y)
        )
        mod = y
    else:
        step, dx = 4 * y, 4 * x
        tab = [None] * step
        for m in range(y % 4, step, 4):
            for u in range(0, step, 4):
                t = m - u * x
                if t % y == 0 and (t % step) // y % 4 == 1:
                    tab[m] = u
                    break
        assert all(tab[m] is not None for m in range(y % 4, step, 4))
        mod = step
    sq = isqrt(lo - 1) + 1
    next_sq = sq * sq
    for n in range(lo, hi):
        if skip_squares and n == next_sq:
            if tab[n % mod] is not None:
                missing.append(n)
            sq += 1
            next_sq = sq * sq
            continue
        u = tab[n % mod]
        if u is None:
            continue
        v = (n - u * x) // y
        while v >= 0:
            if kron(u, v) == 1:
                break
            u += step
            v -= dx
        else:
            missing.append(n)
    return missing


CHUNK = 1 << 20


def orbit_missing(
    x: int,
    y: int,
    side: Side,
    bound: int,
    threads: int | None = None,
    progress: Progress | None = None,
    use_reciprocity: bool = True,
) -> list[int]:
    """All admissible values in [1, bound] absent from one orbit side.

    Values failing the congruence layer are not listed.  With
    ``use_reciprocity`` (default), squares on a reciprocity-flagged side
    are listed without scanning, by the exclusion theorem; pass False to
    force the raw scan everywhere (same output, much slower at scale).
    Work is split into chunks of 2^20 and distributed over ``threads``
    workers.
    """
    _validate_pair(x, y)
    _check_side(side)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if x == 0 or y == 0:
        return []  # degenerate orbits realize every admissible value
    skip = use_reciprocity and classify(x, y, side).reciprocity
    tasks = [
        (x, y, side, lo, hi, skip)
        for lo, hi in chunk_ranges(1, bound + 1, CHUNK)
    ]
    workers = worker_count(threads)
    prog = progress or Progress()
    missing: list[int] = []
    if workers <= 1:
        for i, t in enumerate(tasks):
            missing.extend(_missing_chunk(t))
            prog.tick(i + 1, len(tasks), f"n < {t[4]}")
    else:
        for part in run_tasks(_missing_chunk, tasks, workers):
            missing.extend(part)
        prog.tick(len(tasks), len(tasks))
    return missing


def orbit_complete_description(
    x: int,
    y: int,
    side: Side,
    bound: int | None = None,
    threads: int | None = None,
    progress: Progress | None = None,
) -> ObstructionReport:
    """Classification plus the scanned list of sporadic exceptions.

    By default scans to the non-square threshold, after which the report
    decides every integer; pass a smaller ``bound`` for a truncated
    (partial) description.
    """
    report = classify(x, y, side)
    if x == 0 or y == 0:
        return replace(report, sporadic=(), scanned_to=0)
    scan_to = report.nonsquare_threshold if bound is None else bound
    missing = orbit_missing(
        x, y, side, scan_to, threads=threads, progress=progress
    )
    if report.reciprocity:
        sporadic = tuple(m for m in missing if not is_square(m))
    else:
        sporadic = tuple(missing)
    return replace(report, sporadic=sporadic, scanned_to=scan_to)
