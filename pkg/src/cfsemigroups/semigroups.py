"""Finitely generated subsemigroups of the nonnegative matrices: orbit
enumeration, deterministic membership by pullback, congruence images,
and strong-approximation index checks.

Three kinds of generator sets are supported:

* power pairs ``<L^p, R^q>``;
* digit alphabets: for each letter ``a`` (a positive multiple of 4) the
  map ``(u, v) -> (v, u + a v)``, i.e. prepending a continued-fraction
  digit; pairs of letters multiply to nonnegative determinant-one
  matrices ``(1 b; a ab+1)``;
* arbitrary finite sets of nonnegative determinant-one matrices.

Orbits of the first two kinds are trees: distinct words move a strictly
positive start pair to distinct vectors, so enumeration needs no seen
set and membership is decided by a greedy pullback.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Literal

import numpy as np

from .util import Progress, run_tasks, worker_count
from .words import IDENTITY, L, LRWord, Mat2, R, Vec2, gamma14_member, psi_member

__all__ = [
    "GeneratorSet",
    "power_pair_semigroup",
    "alphabet_semigroup",
    "custom_semigroup",
    "parse_generators",
    "PSI1",
    "PSI2",
    "enumerate_orbit",
    "orbit_norms",
    "pullback_membership",
    "ResidueImage",
    "congruence_closure",
    "orbit_residues",
    "sl2_order",
    "strong_approx_verify",
    "psi_generator_witness",
    "orbit_numerators",
]

Kind = Literal["power_pair", "alphabet", "custom"]


@dataclass(frozen=True)
class GeneratorSet:
    """A named set of generators of one of the three supported kinds."""

    label: str
    kind: Kind
    gens: tuple[Mat2, ...] = ()
    power_pair: tuple[int, int] | None = None
    alphabet: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind == "power_pair":
            p, q = self.power_pair
            if p < 1 or q < 1:
                raise ValueError("power pair exponents must be >= 1")
        elif self.kind == "alphabet":
            letters = self.alphabet
            if not letters:
                raise ValueError("alphabet must be nonempty")
            if list(letters) != sorted(set(letters)):
                raise ValueError("alphabet must be sorted and duplicate-free")
            for a in letters:
                if a < 4 or a % 4 != 0:
                    raise ValueError(
                        f"alphabet letters must be positive multiples of 4: {a}"
                    )
        else:
            if not self.gens:
                raise ValueError("custom set needs at least one matrix")
            for g in self.gens:
                if g == IDENTITY:
                    raise ValueError("identity is not a generator")

    @property
    def deterministic(self) -> bool:
        """Whether orbits are trees with a unique parent map (enables
        pullback membership)."""
        return self.kind in ("power_pair", "alphabet")

    def __str__(self):
        return self.label


def power_pair_semigroup(p: int, q: int, label: str | None = None) -> GeneratorSet:
    """The semigroup generated by L^p and R^q."""
    return GeneratorSet(
        label=label or f"<L^{p},R^{q}>",
        kind="power_pair",
        gens=(L ** p, R ** q),
        power_pair=(p, q),
    )


def alphabet_semigroup(letters: Iterable[int], label: str | None = None) -> GeneratorSet:
    """Digit-prepending maps for a finite alphabet inside 4Z+."""
    letters = tuple(sorted(set(letters)))
    return GeneratorSet(
        label=label or f"alphabet{letters}",
        kind="alphabet",
        alphabet=letters,
    )


def custom_semigroup(mats: Iterable[Mat2], label: str | None = None) -> GeneratorSet:
    mats = tuple(mats)
    return GeneratorSet(label=label or "custom", kind="custom", gens=mats)


PSI1 = power_pair_semigroup(1, 4, "psi1")
PSI2 = power_pair_semigroup(4, 4, "psi2")


def parse_generators(text: str) -> GeneratorSet:
    """CLI-facing parser: ``psi1``, ``psi2``, ``power:p,q``, or
    ``alphabet:4,8,20`` / ``alphabet:4..128`` (ranges step by 4)."""
    text = text.strip()
    if text == "psi1":
        return PSI1
    if text == "psi2":
        return PSI2
    if text.startswith("power:"):
        p, q = (int(t) for t in text[6:].split(","))
        return power_pair_semigroup(p, q)
    if text.startswith("alphabet:"):
        letters: list[int] = []
        for part in text[9:].split(","):
            if ".." in part:
                lo, hi = (int(t) for t in part.split(".."))
                letters.extend(range(lo, hi + 1, 4))
            else:
                letters.append(int(part))
        return alphabet_semigroup(letters)
    raise ValueError(f"cannot parse generator set {text!r}")


# ---------------------------------------------------------------------------
# orbit enumeration

def _power_pair_walk(p: int, q: int, x0: int, y0: int, bound: int):
    """Yield raw orbit pairs of <L^p, R^q> on a strictly positive start,
    everything with both components <= bound.

    No seen set: if two words agreed on (x0, y0) their leading letters
    would satisfy u >= pv and v >= qu with u, v >= 1, forcing pq <= 1;
    and for p = q = 1 agreement would need a subword reaching (0,1) or
    (1,0), impossible from a positive start.  So the orbit is a tree.
    """
    stack = [(x0, y0)]
    while stack:
        u, v = stack.pop()
        yield u, v
        nu = u + p * v
        if nu <= bound:
            stack.append((nu, v))
        nv = q * u + v
        if nv <= bound:
            stack.append((u, nv))


def _alphabet_walk(letters: tuple[int, ...], x0: int, y0: int, bound: int):
    """Yield raw orbit pairs under digit maps (u,v) -> (v, u + a v).

    Tree for the same reason: the second component strictly increases,
    and a vector with two distinct digit parents would need one of them
    to revisit the start's second component.
    """
    stack = [(x0, y0)]
    while stack:
        u, v = stack.pop()
        yield u, v
        for a in letters:
            nv = u + a * v
            if nv > bound:
                break  # letters sorted, later ones only grow
            stack.append((v, nv))


def _custom_walk(gens: tuple[Mat2, ...], x0: int, y0: int, bound: int):
    raw = [(g.a, g.b, g.c, g.d) for g in gens]
    seen = {(x0, y0)}
    stack = [(x0, y0)]
    while stack:
        u, v = stack.pop()
        yield u, v
        for a, b, c, d in raw:
            w = (a * u + b * v, c * u + d * v)
            if w[0] <= bound and w[1] <= bound and w not in seen:
                seen.add(w)
                stack.append(w)


def _walk(g: GeneratorSet, v0: Vec2, bound: int):
    x0, y0 = v0.x, v0.y
    if g.kind == "power_pair" and x0 >= 1 and y0 >= 1:
        return _power_pair_walk(*g.power_pair, x0, y0, bound)
    if g.kind == "alphabet":
        return _alphabet_walk(g.alphabet, x0, y0, bound)
    if g.kind == "power_pair":
        # a zero component makes one generator act trivially; fall back
        # to the deduplicating walk
        return _custom_walk(g.gens, x0, y0, bound)
    return _custom_walk(g.gens, x0, y0, bound)


def enumerate_orbit(g: GeneratorSet, v0: Vec2, bound: int) -> list[Vec2]:
    """All orbit vectors (the start included) with sup norm <= bound,
    sorted by (norm, first component)."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    if max(v0.x, v0.y) > bound:
        return []
    out = [Vec2(u, v) for u, v in _walk(g, v0, bound)]
    out.sort(key=lambda w: (max(w.x, w.y), w.x))
    return out


def orbit_norms(g: GeneratorSet, v0: Vec2, bound: int) -> np.ndarray:
    """Sorted sup norms of all orbit vectors with norm <= bound."""
    if max(v0.x, v0.y) > bound:
        return np.empty(0, dtype=np.int64)
    norms = np.fromiter(
        (u if u > v else v for u, v in _walk(g, v0, bound)),
        dtype=np.int64,
    )
    norms.sort()
    return norms


# ---------------------------------------------------------------------------
# membership by pullback

def pullback_membership(g: GeneratorSet, v0: Vec2, target: Vec2) -> bool:
    """Whether target lies in the orbit of v0, by walking parents.

    Only for deterministic kinds; a custom matrix set has no unique
    parent map and raises.  For power pairs the last applied block is
    forced (``u >= pv`` and ``v >= qu`` cannot both hold when pq >= 2),
    so maximal blocks are stripped with a start check inside each run;
    p = q = 1 is rejected as ambiguous.  For alphabets the digit is
    pinned by ``a = v // u``, valid only when ``4 (v mod u) <= u``,
    since every non-start orbit vector satisfies ``v >= 4u``.
    """
    if g.kind == "power_pair":
        p, q = g.power_pair
        if p * q < 2:
            raise ValueError("pullback needs pq >= 2 to be deterministic")
        return _power_pair_pullback(p, q, v0, target)
    if g.kind == "alphabet":
        letters = set(g.alphabet)
        return _alphabet_pullback(letters.__contains__, v0, target)
    raise ValueError("pullback is only defined for deterministic kinds")


def _power_pair_pullback(p: int, q: int, v0: Vec2, target: Vec2) -> bool:
    x0, y0 = v0.x, v0.y
    u, v = target.x, target.y
    while True:
        if u == x0 and v == y0:
            return True
        # the start may sit inside the final maximal run, where the
        # greedy strip would walk past it
        if v == y0 and v > 0 and u > x0 and (u - x0) % (p * v) == 0:
            return True
        if u == x0 and u > 0 and v > y0 and (v - y0) % (q * u) == 0:
            return True
        if u == 0 or v == 0:
            return False
        k = u // (p * v)
        m = v // (q * u)
        if k == 0 and m == 0:
            return False
        # k and m cannot both be positive: u >= pv and v >= qu force
        # pq <= 1.  A maximal strip is exact here because every interior
        # vector entered by the other letter starts a shorter run.
        if k:
            u -= k * p * v
        else:
            v -= m * q * u


def _alphabet_pullback(member: Callable[[int], bool], v0: Vec2, target: Vec2) -> bool:
    x0, y0 = v0.x, v0.y
    u, v = target.x, target.y
    while True:
        if u == x0 and v == y0:
            return True
        if u == 0:
            # (0, 1) is the image of (1, 0) under every letter
            return (u, v) == (0, 1) and (x0, y0) == (1, 0)
        # direct digit from the start: target = letter applied to v0
        if u == y0 and y0 > 0:
            rem = v - x0
            if rem > 0 and rem % y0 == 0 and member(rem // y0):
                return True
        if v < 4 * u:
            return False
        a = v // u
        if 4 * (v % u) > u or not member(a):
            return False
        u, v = v - a * u, u


# ---------------------------------------------------------------------------
# congruence images

@dataclass(frozen=True)
class ResidueImage:
    """Image of a generator semigroup in the 2x2 matrices mod m."""

    modulus: int
    matrices: frozenset[tuple[int, int, int, int]]

    def __len__(self):
        return len(self.matrices)

    def __contains__(self, mat) -> bool:
        a, b, c, d = mat
        m = self.modulus
        return (a % m, b % m, c % m, d % m) in self.matrices


def _closure(seeds: list[tuple[int, int, int, int]], m: int) -> frozenset:
    gens = list(dict.fromkeys((a % m, b % m, c % m, d % m) for a, b, c, d in seeds))
    seen = set(gens)
    frontier = list(gens)
    while frontier:
        nxt = []
        for a, b, c, d in frontier:
            for e, f, g2, h in gens:
                w = (
                    (a * e + b * g2) % m,
                    (a * f + b * h) % m,
                    (c * e + d * g2) % m,
                    (c * f + d * h) % m,
                )
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return frozenset(seen)


def congruence_closure(g: GeneratorSet, m: int) -> ResidueImage:
    """All residues mod m of the nonempty words in the generators.

    For alphabets the single-letter maps (determinant -1 mod m) seed the
    closure, so odd-length words are included.  The identity always
    appears: some power of each generator is the identity mod m.
    """
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if m > 4096:
        raise ValueError("modulus too large for dense closure")
    if g.kind == "alphabet":
        seeds = [(0, 1, 1, a) for a in g.alphabet]
    else:
        seeds = [tuple(mat) for mat in g.gens]
    return ResidueImage(modulus=m, matrices=_closure(seeds, m))


def orbit_residues(g: GeneratorSet, v0: Vec2, m: int, side: str) -> frozenset[int]:
    """Residues mod m realized by one component over the whole orbit."""
    if side not in ("numerator", "denominator"):
        raise ValueError(f"side must be numerator or denominator: {side!r}")
    image = congruence_closure(g, m)
    x0, y0 = v0.x % m, v0.y % m
    if side == "numerator":
        return frozenset((a * x0 + b * y0) % m for a, b, _, _ in image.matrices)
    return frozenset((c * x0 + d * y0) % m for _, _, c, d in image.matrices)


def sl2_order(n: int) -> int:
    """Order of SL2 over Z/n: ``n^3 prod_{p | n} (1 - p^-2)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    order = n ** 3
    m = n
    for p in itertools.chain((2,), range(3, n + 1, 2)):
        if p * p > m:
            break
        if m % p == 0:
            order = order // (p * p) * (p * p - 1)
            while m % p == 0:
                m //= p
    if m > 1:
        order = order // (m * m) * (m * m - 1)
    return order


def strong_approx_verify(g: GeneratorSet, e: int, kmax: int = 6) -> bool:
    """Check that the index of the mod-2^k image inside SL2(Z/2^k) is
    the same for every k from e up to kmax.

    A True result witnesses that the closure stabilizes at level 2^e:
    each further factor of 2 enlarges the image by the full factor of 8.
    Projection consistency (level k image reducing into level e image)
    is checked as well.
    """
    if e < 1 or kmax <= e:
        raise ValueError("need 1 <= e < kmax")
    if kmax > 11:
        raise ValueError("kmax too large for dense closure")
    base = congruence_closure(g, 2 ** e)
    total = sl2_order(2 ** e)
    if total % len(base) != 0:
        return False
    index = total // len(base)
    for k in range(e + 1, kmax + 1):
        image = congruence_closure(g, 2 ** k)
        for mat in image.matrices:
            if mat not in base:
                return False
        total_k = sl2_order(2 ** k)
        if total_k % len(image) != 0 or total_k // len(image) != index:
            return False
    return True


# ---------------------------------------------------------------------------
# irreducible members of the symbol-preserving semigroup

def psi_generator_witness(k: int) -> tuple[Mat2, LRWord]:
    """The member R L^{4k} R^3 = (12k+1, 4k; 12k+4, 4k+1), with proof
    that no proper nonempty prefix satisfies the congruence conditions.

    k = 0 degenerates to R^4.  These words witness that the
    symbol-preserving semigroup is not finitely generated: each is
    irreducible within it.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        word = LRWord((("R", 4),))
    else:
        word = LRWord((("R", 1), ("L", 4 * k), ("R", 3)))
    mat = Mat2(12 * k + 1, 4 * k, 12 * k + 4, 4 * k + 1)
    assert mat == _word_matrix(word)
    if not psi_member(mat):
        raise AssertionError(f"witness {k} fails membership")
    prefix = IDENTITY
    for letter, exp in word.runs:
        step = L if letter == "L" else R
        for _ in range(exp):
            prefix = prefix * step
            if prefix != mat and gamma14_member(prefix):
                raise AssertionError(f"witness {k} has a reducible prefix")
    return mat, word


def _word_matrix(word: LRWord) -> Mat2:
    out = IDENTITY
    for letter, exp in word.runs:
        out = out * ((L if letter == "L" else R) ** exp)
    return out


# ---------------------------------------------------------------------------
# numerator reachability scan

def _numerator_subtree(args: tuple) -> bytes:
    p, q, bound, nodes = args
    bm = np.zeros(bound + 1, dtype=bool)
    _mark_numerators(p, q, bound, list(nodes), bm)
    return np.packbits(bm).tobytes()


def _mark_numerators(p, q, bound, stack, bm) -> None:
    qq = q + 1
    while stack:
        u, v = stack.pop()
        bm[u::p * v] = True
        lim = bound - v
        step = p * v
        while u * qq <= lim:
            stack.append((u, q * u + v))
            u += step


def orbit_numerators(
    g: GeneratorSet,
    v0: Vec2,
    bound: int,
    threads: int | None = None,
    progress: Progress | None = None,
) -> np.ndarray:
    """Bitmap over [0, bound] of the first components realized in a
    power-pair orbit of a strictly positive start.

    Enumerating vectors is hopeless at large bounds (the orbit has on
    the order of bound^(2 delta) elements), but first components are
    cheap: strip leading R^q blocks from any witness word and what is
    left is an L-chain over the start or over an "R-fresh" vector, and
    an L-chain contributes the arithmetic progression
    ``u, u + pv, u + 2pv, ...``.  So the scan walks only fresh vectors
    (DFS over ``(u, v) -> (u + jpv, q(u + jpv) + v)``), marking one
    progression per node.  A fresh child is entered only when its two
    components sum to at most the bound, which loses nothing: a witness
    word with a leading L-block has numerator at least that sum.  Runs
    in roughly O(answer density * bound / p q) slice writes.
    """
    if g.kind != "power_pair":
        raise ValueError("numerator scan is defined for power pairs")
    if v0.x < 1 or v0.y < 1:
        raise ValueError("numerator scan needs a strictly positive start")
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    bm = np.zeros(bound + 1, dtype=bool)
    if bound < v0.x:
        return bm
    p, q = g.power_pair
    workers = worker_count(threads)
    if workers <= 1:
        _mark_numerators(p, q, bound, [(v0.x, v0.y)], bm)
        if progress:
            progress.tick(1, 1)
        return bm
    # peel the first levels serially, then split the frontier
    frontier = [(v0.x, v0.y)]
    while frontier and len(frontier) < 64 * workers:
        u, v = frontier.pop()
        bm[u::p * v] = True
        lim = bound - v
        step = p * v
        grew = False
        while u * (q + 1) <= lim:
            frontier.append((u, q * u + v))
            u += step
            grew = True
        if not grew and not frontier:
            break
    groups: list[list[tuple[int, int]]] = [[] for _ in range(4 * workers)]
    for i, node in enumerate(frontier):
        groups[i % len(groups)].append(node)
    tasks = [(p, q, bound, tuple(grp)) for grp in groups if grp]
    for i, blob in enumerate(run_tasks(_numerator_subtree, tasks, workers)):
        part = np.unpackbits(
            np.frombuffer(blob, dtype=np.uint8), count=bound + 1
        ).astype(bool)
        bm |= part
        if progress:
            progress.tick(i + 1, len(tasks))
    return bm
