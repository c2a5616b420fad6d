"""Kronecker symbols and their transformation under nonnegative unimodular
matrices.

The Kronecker symbol ``(x|y)`` extends the Jacobi symbol to every pair of
integers.  Conventions, matching the classical ones:

* ``(x|0) = 1`` if ``x = +-1``, else ``0``;
* ``(x|2) = 0`` for even ``x``, ``+1`` for ``x = +-1 (mod 8)``,
  ``-1`` for ``x = +-3 (mod 8)``;
* ``(x|-1) = -1`` exactly when ``x < 0``;
* ``(x|.)`` is completely multiplicative in the lower argument.

The map ``x -> (x|y)`` is periodic in ``x`` with period ``y`` when
``y != 2 (mod 4)`` and period ``4y`` otherwise.

Beyond the symbol itself this module carries the exact transformation law
for ``(x|y)`` under ``(x,y) -> (ax+by, cx+dy)`` with ``(a b; c d)`` a
nonnegative integer matrix of determinant one: :func:`mobius_symbol` in
general (a correction factor built from 2-adic data), and
:func:`gamma14_symbol` for matrices with ``a = d = 1`` and ``c = 0``
mod 4, where the correction collapses to a sign.
"""

from __future__ import annotations

from math import gcd, isqrt

from gmpy2 import kronecker as fast_kronecker  # C implementation, same values

__all__ = [
    "NotCoprimeError",
    "kronecker",
    "fast_kronecker",
    "odd_split",
    "is_square",
    "mobius_symbol",
    "gamma14_symbol",
]


class NotCoprimeError(ValueError):
    """A coprimality hypothesis of a transformation law is violated."""


def kronecker(x: int, y: int) -> int:
    """Kronecker symbol ``(x|y)`` for arbitrary integers.

    Reference implementation using the binary (shift and flip) algorithm;
    no factorization.  Runs in ``O(log x log y)`` bit operations.
    """
    if y == 0:
        return 1 if x in (1, -1) else 0
    if x & 1 == 0 and y & 1 == 0:
        return 0
    sign = 1
    if y < 0:
        y = -y
        if x < 0:
            sign = -1
    e = (y & -y).bit_length() - 1
    y >>= e
    if e & 1 and x & 7 in (3, 5):  # (x|2) = -1 for x = +-3 mod 8
        sign = -sign
    # y is now odd and positive: Jacobi with 2-extractions and reciprocity
    if x < 0:
        if y & 3 == 3:
            sign = -sign
        x = -x
    x %= y
    while x:
        e = (x & -x).bit_length() - 1
        x >>= e
        if e & 1 and y & 7 in (3, 5):
            sign = -sign
        if x & 3 == 3 and y & 3 == 3:
            sign = -sign
        x, y = y % x, x
    return sign if y == 1 else 0


def odd_split(n: int) -> tuple[int, int]:
    """Split ``n >= 1`` as ``2^two * odd``; returns ``(two, odd)``."""
    if n < 1:
        raise ValueError(f"odd_split needs n >= 1, got {n}")
    two = (n & -n).bit_length() - 1
    return two, n >> two


def is_square(n: int) -> bool:
    """True when ``n`` is a perfect square (negatives are not)."""
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def _half_odd(n: int) -> int:
    """(odd part of n - 1)/2 for n >= 0, with the odd part of 0 taken as 1.

    This is the quantity whose parity drives quadratic reciprocity; the
    n = 0 convention makes the transformation law below cover vectors and
    matrix entries with zero components.
    """
    if n == 0:
        return 0
    return (n >> ((n & -n).bit_length() - 1)) >> 1


def _exactly_two(n: int) -> bool:
    # 2 divides n exactly once; false for 0 by convention
    return n & 3 == 2


def _entries(m) -> tuple[int, int, int, int]:
    try:
        return m.a, m.b, m.c, m.d
    except AttributeError:
        a, b, c, d = m
        return a, b, c, d


def _pair(v) -> tuple[int, int]:
    try:
        return v.x, v.y
    except AttributeError:
        x, y = v
        return x, y


def _check_matrix(a: int, b: int, c: int, d: int) -> None:
    for t in (a, b, c, d):
        if t < 0:
            raise ValueError("matrix entries must be nonnegative")
    if a * d - b * c != 1:
        raise ValueError("matrix must have determinant 1")


def mobius_symbol(m, v) -> int:
    """Value of ``(ax+by | cx+dy)`` predicted from ``(x|y)``.

    ``m`` is a nonnegative integer matrix ``(a b; c d)`` of determinant
    one (a :class:`~cfsemigroups.words.Mat2` or a 4-tuple) and ``v`` a
    nonnegative coprime pair.  Requires ``gcd(x, d) = 1``, else
    :class:`NotCoprimeError`.  The law is

        ``(ax+by | cx+dy) = (-1)^alpha * mu1 * mu2 * (c|d) * (x|y)``

    where, writing ``H(n)`` for half of (odd part of ``n``) minus one,

    * ``alpha = H(x)H(d) + H(x)H(cx+dy) + H(d)H(cx+dy) + H(x)H(y)``,
    * ``mu1 = (cdxy+1 | 2)`` when 2 divides ``d`` or ``x`` exactly once,
      else 1,
    * ``mu2 = (bx(cx+dy)+1 | 2)`` when 2 divides ``cx+dy`` exactly once,
      else 1.

    The right-hand side is evaluated directly; callers wanting the
    consistency check compare with ``kronecker(a*x+b*y, c*x+d*y)``.
    """
    a, b, c, d = _entries(m)
    x, y = _pair(v)
    _check_matrix(a, b, c, d)
    if x < 0 or y < 0:
        raise ValueError("vector components must be nonnegative")
    if gcd(x, y) != 1:
        raise ValueError("vector components must be coprime")
    if gcd(x, d) != 1:
        raise NotCoprimeError(f"gcd(x={x}, d={d}) != 1")
    w = c * x + d * y
    ha, hb = _half_odd(x), _half_odd(d)
    hc, hd = _half_odd(w), _half_odd(y)
    alpha = ha * hb + ha * hc + hb * hc + ha * hd
    s = -1 if alpha & 1 else 1
    if _exactly_two(d) or _exactly_two(x):
        s *= kronecker(c * d * x * y + 1, 2)
    if _exactly_two(w):
        s *= kronecker(b * x * w + 1, 2)
    return s * kronecker(c, d) * kronecker(x, y)


def gamma14_symbol(m, v) -> int:
    """Value of ``(ax+by | cx+dy)`` for matrices with ``a = d = 1 (mod 4)``
    and ``c = 0 (mod 4)``.

    On this congruence subsemigroup the 2-adic correction factors vanish:

        ``(ax+by | cx+dy) = (-1)^alpha * (c|d) * (x|y)``,
        ``alpha = H(x) * (H(y) + H(cx+dy))``.

    Hypotheses: ``v`` nonnegative coprime, and ``y != 2 (mod 4)`` unless
    ``b = 0 (mod 4)``.  In particular for odd ``y``, or for
    ``(x, y) = (1, 0) (mod 4)``, the value equals ``(a|b) * (x|y)``: the
    symbol is transported unchanged exactly when ``(a|b) = 1``.
    """
    a, b, c, d = _entries(m)
    x, y = _pair(v)
    _check_matrix(a, b, c, d)
    if a % 4 != 1 or d % 4 != 1 or c % 4 != 0:
        raise ValueError("matrix must have a = d = 1 and c = 0 mod 4")
    if x < 0 or y < 0:
        raise ValueError("vector components must be nonnegative")
    if gcd(x, y) != 1:
        raise ValueError("vector components must be coprime")
    if y % 4 == 2 and b % 4 != 0:
        raise ValueError("y = 2 mod 4 requires b = 0 mod 4")
    w = c * x + d * y
    alpha = _half_odd(x) * (_half_odd(y) + _half_odd(w))
    s = -1 if alpha & 1 else 1
    return s * kronecker(c, d) * kronecker(x, y)
