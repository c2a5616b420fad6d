"""Nonnegative unimodular matrices as words in L and R, and the matching
even-length continued fractions.

Every matrix with nonnegative integer entries and determinant one is a
unique product of ``L = (1 1; 0 1)`` and ``R = (1 0; 1 1)``.  Under
``W (1,0)^T`` the word ``L^{a0} R^{a1} L^{a2} ... R^{a(2n-1)}``
produces the pair ``(x, y)`` with ``x/y = [a0; a1, ..., a(2n-1)]``, the
continued fraction with an even number of digits.  This module moves
between the three pictures (matrix, word, continued fraction) and hosts
the membership tests built on top of them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd

from .kron import kronecker

__all__ = [
    "Mat2",
    "Vec2",
    "LRWord",
    "ContinuedFraction",
    "IDENTITY",
    "L",
    "R",
    "word_to_matrix",
    "matrix_to_word",
    "even_cf",
    "cf_eval",
    "vec_to_word",
    "concat_even_cf",
    "is_initial_subword",
    "gamma14_member",
    "psi_member",
]


@dataclass(frozen=True)
class Vec2:
    """Nonnegative coprime column vector ``(x, y)``."""

    x: int
    y: int

    def __post_init__(self):
        if not (isinstance(self.x, int) and isinstance(self.y, int)):
            raise TypeError("components must be ints")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"components must be nonnegative: {self}")
        if gcd(self.x, self.y) != 1:
            raise ValueError(f"components must be coprime: {self}")

    def __iter__(self):
        return iter((self.x, self.y))

    def __str__(self):
        return f"({self.x}, {self.y})"


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix with nonnegative integer entries and determinant one."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for t in (self.a, self.b, self.c, self.d):
            if not isinstance(t, int):
                raise TypeError("entries must be ints")
            if t < 0:
                raise ValueError(f"entries must be nonnegative: {self}")
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant must be 1: {self}")

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))

    def __mul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __pow__(self, e: int) -> "Mat2":
        if e < 0:
            raise ValueError("only nonnegative powers stay in the semigroup")
        out = IDENTITY
        for _ in range(e):
            out = out * self
        return out

    def apply(self, v: Vec2) -> Vec2:
        # det 1 preserves coprimality, nonneg entries preserve the orthant
        return Vec2(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)

    def __str__(self):
        return f"[{self.a} {self.b}; {self.c} {self.d}]"


IDENTITY = Mat2(1, 0, 0, 1)
L = Mat2(1, 1, 0, 1)
R = Mat2(1, 0, 1, 1)

_WORD_TOKEN = re.compile(r"\s*([LR])\s*(?:\^?\s*(\d+))?")


@dataclass(frozen=True)
class LRWord:
    """Word in the letters L, R as a tuple of (letter, exponent) runs.

    Runs alternate letters and all exponents are positive; the empty word
    is the identity.
    """

    runs: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        prev = None
        for letter, exp in self.runs:
            if letter not in ("L", "R"):
                raise ValueError(f"bad letter {letter!r}")
            if not isinstance(exp, int) or exp < 1:
                raise ValueError(f"run exponents must be positive ints: {exp}")
            if letter == prev:
                raise ValueError("runs must alternate letters")
            prev = letter

    @classmethod
    def parse(cls, text: str) -> "LRWord":
        """Parse ``"R L^4 R^3"``, ``"RL4R3"``, ``"RLR"`` and the like."""
        pos, raw = 0, []
        while pos < len(text):
            m = _WORD_TOKEN.match(text, pos)
            if not m or not m.group(0).strip():
                if text[pos:].strip():
                    raise ValueError(f"cannot parse word at {text[pos:]!r}")
                break
            raw.append((m.group(1), int(m.group(2) or 1)))
            pos = m.end()
        merged: list[tuple[str, int]] = []
        for letter, exp in raw:
            if merged and merged[-1][0] == letter:
                merged[-1] = (letter, merged[-1][1] + exp)
            else:
                merged.append((letter, exp))
        return cls(tuple(merged))

    @property
    def length(self) -> int:
        return sum(e for _, e in self.runs)

    def concat(self, other: "LRWord") -> "LRWord":
        if not self.runs:
            return other
        if not other.runs:
            return self
        a, b = list(self.runs), list(other.runs)
        if a[-1][0] == b[0][0]:
            a[-1] = (a[-1][0], a[-1][1] + b[0][1])
            b = b[1:]
        return LRWord(tuple(a + b))

    def __str__(self):
        if not self.runs:
            return "e"
        return " ".join(l if e == 1 else f"{l}^{e}" for l, e in self.runs)


@dataclass(frozen=True)
class ContinuedFraction:
    """Digits ``[a0; a1, ..., am]`` with ``a0 >= 0`` and later digits >= 1."""

    a0: int
    rest: tuple[int, ...] = ()

    def __post_init__(self):
        if not isinstance(self.a0, int) or self.a0 < 0:
            raise ValueError(f"a0 must be a nonnegative int: {self.a0}")
        for d in self.rest:
            if not isinstance(d, int) or d < 1:
                raise ValueError(f"digits past a0 must be positive ints: {d}")

    @property
    def digits(self) -> tuple[int, ...]:
        return (self.a0,) + self.rest

    @property
    def is_even_length(self) -> bool:
        return len(self.rest) % 2 == 1

    def __str__(self):
        if not self.rest:
            return f"[{self.a0}]"
        return f"[{self.a0}; " + ", ".join(map(str, self.rest)) + "]"


def word_to_matrix(w: LRWord) -> Mat2:
    """Multiply out a word; the empty word gives the identity."""
    a, b, c, d = 1, 0, 0, 1
    for letter, e in w.runs:
        if letter == "L":  # right-multiply by L^e: adds e*col1 to col2
            b, d = b + e * a, d + e * c
        else:
            a, c = a + e * b, c + e * d
    return Mat2(a, b, c, d)


def matrix_to_word(m: Mat2) -> LRWord:
    """Unique factorization of a nonnegative determinant-one matrix into
    maximal runs of L and R.

    Peels from the left: a maximal L-run subtracts multiples of the bottom
    row from the top, a maximal R-run the reverse.  For any matrix other
    than the identity exactly one of the two peels applies, so the run
    letters alternate and the loop ends at the identity.
    """
    a, b, c, d = m.a, m.b, m.c, m.d
    runs: list[tuple[str, int]] = []
    while (a, b, c, d) != (1, 0, 0, 1):
        # d >= 1 and a >= 1 hold for every nonnegative matrix of det 1
        e = min(a // c if c else b // d, b // d)
        if e >= 1:
            runs.append(("L", e))
            a, b = a - e * c, b - e * d
            continue
        e = min(c // a, d // b if b else c // a)
        if e >= 1:
            runs.append(("R", e))
            c, d = c - e * a, d - e * b
            continue
        raise AssertionError(f"{m} is not a product of L and R")
    return LRWord(tuple(runs))


def even_cf(v: Vec2) -> ContinuedFraction:
    """Continued fraction of ``x/y`` with an even number of digits.

    The digit list ``[a0; a1, ..., am]`` from the division algorithm is
    adjusted by ``[..., am] = [..., am - 1, 1]`` (or ``[a0] = [a0-1; 1]``)
    when its length is odd.  Needs ``x >= 1`` and ``y >= 1``: the pairs
    (1,0) and (0,1) have no even-length expansion.
    """
    if v.y == 0:
        raise ValueError("(1, 0) has no even-length continued fraction")
    if v.x == 0:
        raise ValueError("(0, 1) has no even-length continued fraction")
    digits = []
    a, b = v.x, v.y
    while b:
        digits.append(a // b)
        a, b = b, a % b
    rest = digits[1:]
    if len(rest) % 2 == 0:
        if rest:
            # canonical expansions of length >= 2 end in a digit >= 2
            rest[-1] -= 1
            rest.append(1)
        else:
            return ContinuedFraction(digits[0] - 1, (1,))
    return ContinuedFraction(digits[0], tuple(rest))


def cf_eval(cf: ContinuedFraction) -> Vec2:
    """Value of a continued fraction as a coprime pair (numerator, denominator)."""
    p, q = 1, 0
    for d in reversed(cf.digits):
        p, q = d * p + q, p
    return Vec2(p, q)


def vec_to_word(v: Vec2) -> LRWord:
    """The word with ``W (1,0)^T = (x, y)^T``, via the even continued
    fraction; ``(1, 0)`` maps to the empty word and ``(0, 1)`` to an error
    (no nonnegative word reaches it from ``(1, 0)``)."""
    if v.y == 0:
        return LRWord(())
    cf = even_cf(v)
    letters = ("L", "R")
    runs = [(letters[i % 2], d) for i, d in enumerate(cf.digits) if d > 0]
    return LRWord(tuple(runs))


def concat_even_cf(cf1: ContinuedFraction, cf2: ContinuedFraction) -> ContinuedFraction:
    """Even continued fraction of the product word of two even ones.

    The first word ends in an R-run, so the digits splice directly; when
    the second fraction starts with ``a0 = 0`` its leading R-run merges
    into the final digit of the first.
    """
    if not cf1.is_even_length or not cf2.is_even_length:
        raise ValueError("both fractions must have even length")
    d1, d2 = list(cf1.digits), list(cf2.digits)
    if d2[0] == 0:
        merged = d1[:-1] + [d1[-1] + d2[1]] + d2[2:]
    else:
        merged = d1 + d2
    return ContinuedFraction(merged[0], tuple(merged[1:]))


def _as_matrix(g: Mat2 | LRWord) -> Mat2:
    return word_to_matrix(g) if isinstance(g, LRWord) else g


def is_initial_subword(g1: Mat2 | LRWord, g2: Mat2 | LRWord) -> bool:
    """Whether the word of g1 is a prefix of the word of g2.

    Equivalent to ``g1^-1 g2`` having nonnegative entries, so no word
    reconstruction is needed.
    """
    m1, m2 = _as_matrix(g1), _as_matrix(g2)
    return (
        m1.d * m2.a - m1.b * m2.c >= 0
        and m1.d * m2.b - m1.b * m2.d >= 0
        and m1.a * m2.c - m1.c * m2.a >= 0
        and m1.a * m2.d - m1.c * m2.b >= 0
    )


def gamma14_member(m: Mat2) -> bool:
    """Diagonal 1 mod 4, lower-left 0 mod 4."""
    return m.a % 4 == 1 and m.d % 4 == 1 and m.c % 4 == 0


def psi_member(m: Mat2) -> bool:
    """Member of the symbol-preserving subsemigroup: the congruence
    conditions of :func:`gamma14_member` together with ``(a|b) = 1``.

    For such matrices ``(ax+by | cx+dy) = (x|y)`` on every coprime
    nonnegative pair with odd ``y``.
    """
    return gamma14_member(m) and kronecker(m.a, m.b) == 1
