"""Exhaustive search for integers that never occur as denominators of
continued fractions of the shape [0; 4a_1, ..., 4a_n, k, 1, 2].

These fractions are exactly the orbits of the digit-prepending maps
with letters in 4Z+ applied to the pairs (3, 3k+2), k >= 1.  The search
walks each root's orbit tree, marking every denominator up to the
bound in a shared bitmap; whatever stays unmarked is missing.  Work is
split into ranges of roots, which is also the checkpoint granularity:
a checkpoint stores the bitmap plus the list of completed ranges and a
resumed run is bit-identical to an uninterrupted one.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass

import numpy as np

from .util import Progress, run_tasks, worker_count
from .words import ContinuedFraction, Vec2, cf_eval
from .semigroups import _alphabet_pullback

__all__ = [
    "SCHEMA_VERSION",
    "ClassStats",
    "SearchManifest",
    "search_missing_denominators",
    "checkpoint_resume",
    "missing_values",
    "certificate_for",
    "is_orbit_vector",
    "search_roots",
]

SCHEMA_VERSION = 1


def search_roots(bound: int) -> list[Vec2]:
    """The orbit roots (3, 3k+2) with denominator within the bound."""
    return [Vec2(3, y) for y in range(5, bound + 1, 3)]


def is_orbit_vector(target: Vec2, root: Vec2) -> bool:
    """Pullback membership for the infinite digit alphabet 4Z+."""
    return _alphabet_pullback(lambda a: a >= 4 and a % 4 == 0, root, target)


@dataclass(frozen=True)
class ClassStats:
    residue: int
    total: int
    found: int
    missing: int
    smallest_missing: int | None
    largest_missing: int | None


@dataclass(frozen=True)
class SearchManifest:
    schema_version: int
    bound: int
    finished: bool
    total_found: int
    total_missing: int
    classes: tuple[ClassStats, ...]
    bitmap_sha256: str
    completed: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["classes"] = [asdict(c) for c in self.classes]
        d["completed"] = [list(r) for r in self.completed]
        d["kind"] = "cfsearch-manifest"
        return d


def _mark_range(bound: int, klo: int, khi: int, bm: np.ndarray) -> None:
    """Mark every orbit denominator <= bound for roots klo <= k < khi.

    Per root y = 3k+2 a stack walk over (u, v) -> (v, u + 4av), a >= 1;
    each child is marked at creation, so the stack only ever holds
    marked vectors with v <= bound.
    """
    view = bm  # local alias; hot loop below
    for k in range(klo, khi):
        y = 3 * k + 2
        if y > bound:
            break
        view[y] = True
        if 3 + 4 * y > bound:
            continue
        stack = [(3, y)]
        while stack:
            u, v = stack.pop()
            w = u + 4 * v
            while w <= bound:
                view[w] = True
                stack.append((v, w))
                w += 4 * v


def _range_blob(args: tuple) -> bytes:
    bound, klo, khi = args
    bm = np.zeros(bound + 1, dtype=bool)
    _mark_range(bound, klo, khi, bm)
    return np.packbits(bm).tobytes()


def _task_ranges(bound: int, target: int = 96) -> list[tuple[int, int]]:
    """Split the root index range into ~target contiguous chunks with
    roughly equal estimated subtree weight (early roots dominate)."""
    kmax = (bound - 2) // 3
    if kmax < 1:
        return []
    weights = [(bound / (3 * k + 2)) ** 1.2 for k in range(1, kmax + 1)]
    per = sum(weights) / target
    ranges: list[tuple[int, int]] = []
    acc, lo = 0.0, 1
    for i, w in enumerate(weights, start=1):
        acc += w
        if acc >= per:
            ranges.append((lo, i + 1))
            lo, acc = i + 1, 0.0
    if lo <= kmax:
        ranges.append((lo, kmax + 1))
    return ranges


def _atomic_write(path: str, data: bytes) -> None:
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _bits_path(checkpoint_path: str) -> str:
    return checkpoint_path + ".bits"


def _write_checkpoint(
    path: str, bound: int, completed: list[tuple[int, int]],
    bm: np.ndarray, finished: bool,
) -> None:
    packed = np.packbits(bm).tobytes()
    _atomic_write(_bits_path(path), packed)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "cfsearch-checkpoint",
        "bound": bound,
        "finished": finished,
        "completed": sorted([list(r) for r in completed]),
        "bitmap_file": os.path.basename(_bits_path(path)),
        "bitmap_sha256": hashlib.sha256(packed).hexdigest(),
    }
    _atomic_write(path, json.dumps(doc, indent=1).encode())


def _load_checkpoint(path: str) -> tuple[int, list[tuple[int, int]], np.ndarray, bool]:
    with open(path, "rb") as fh:
        doc = json.loads(fh.read())
    if doc.get("kind") != "cfsearch-checkpoint":
        raise ValueError(f"{path} is not a search checkpoint")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported checkpoint schema in {path}")
    bound = int(doc["bound"])
    bits_file = os.path.join(os.path.dirname(path) or ".", doc["bitmap_file"])
    with open(bits_file, "rb") as fh:
        packed = fh.read()
    if hashlib.sha256(packed).hexdigest() != doc["bitmap_sha256"]:
        raise ValueError(f"bitmap digest mismatch for {path}")
    bm = np.unpackbits(
        np.frombuffer(packed, dtype=np.uint8), count=bound + 1
    ).astype(bool)
    completed = [tuple(r) for r in doc["completed"]]
    return bound, completed, bm, bool(doc["finished"])


def _manifest(
    bound: int, bm: np.ndarray, completed: list[tuple[int, int]], finished: bool
) -> SearchManifest:
    vals = bm[1:]
    classes = []
    for r in range(4):
        offset = r if r >= 1 else 4
        sl = bm[offset::4]
        total = len(sl)
        found = int(sl.sum())
        absent = np.nonzero(~sl)[0]
        classes.append(
            ClassStats(
                residue=r,
                total=total,
                found=found,
                missing=total - found,
                smallest_missing=(
                    int(absent[0] * 4 + offset) if len(absent) else None
                ),
                largest_missing=(
                    int(absent[-1] * 4 + offset) if len(absent) else None
                ),
            )
        )
    return SearchManifest(
        schema_version=SCHEMA_VERSION,
        bound=bound,
        finished=finished,
        total_found=int(vals.sum()),
        total_missing=int(len(vals) - vals.sum()),
        classes=tuple(classes),
        bitmap_sha256=hashlib.sha256(np.packbits(bm).tobytes()).hexdigest(),
        completed=tuple(sorted(completed)),
    )


def _run(
    bound: int,
    completed: list[tuple[int, int]],
    bm: np.ndarray,
    threads: int | None,
    progress: Progress | None,
    checkpoint_path: str | None,
    checkpoint_every: int,
    stop_after_tasks: int | None,
) -> tuple[SearchManifest, np.ndarray]:
    tasks = _task_ranges(bound)
    done_set = set(completed)
    todo = [t for t in tasks if t not in done_set]
    workers = worker_count(threads)
    prog = progress or Progress()
    done_now = 0

    def maybe_checkpoint(force: bool = False) -> None:
        if checkpoint_path and (force or done_now % checkpoint_every == 0):
            _write_checkpoint(checkpoint_path, bound, completed, bm, False)

    if workers <= 1:
        for t in todo:
            _mark_range(bound, t[0], t[1], bm)
            completed.append(t)
            done_now += 1
            prog.tick(len(completed), len(tasks), f"roots k < {t[1]}")
            maybe_checkpoint()
            if stop_after_tasks and done_now >= stop_after_tasks:
                maybe_checkpoint(force=True)
                return _manifest(bound, bm, completed, False), bm
    else:
        batch = max(1, 2 * workers)
        for i in range(0, len(todo), batch):
            group = todo[i : i + batch]
            blobs = run_tasks(
                _range_blob, [(bound, a, b) for a, b in group], workers
            )
            for blob in blobs:
                bm |= np.unpackbits(
                    np.frombuffer(blob, dtype=np.uint8), count=bound + 1
                ).astype(bool)
            completed.extend(group)
            done_now += len(group)
            prog.tick(len(completed), len(tasks))
            maybe_checkpoint()
            if stop_after_tasks and done_now >= stop_after_tasks:
                maybe_checkpoint(force=True)
                return _manifest(bound, bm, completed, False), bm
    manifest = _manifest(bound, bm, completed, True)
    if checkpoint_path:
        _write_checkpoint(checkpoint_path, bound, completed, bm, True)
    return manifest, bm


def search_missing_denominators(
    bound: int,
    threads: int | None = None,
    progress: Progress | None = None,
    checkpoint_path: str | None = None,
    checkpoint_every: int = 8,
    stop_after_tasks: int | None = None,
) -> tuple[SearchManifest, np.ndarray]:
    """Run the search fresh up to the bound.

    Returns the manifest and the bitmap (index v set iff v occurs).
    With ``checkpoint_path`` the run writes restartable snapshots every
    ``checkpoint_every`` completed root ranges; an existing file is
    refused (resume instead).  ``stop_after_tasks`` ends the run early
    after that many ranges, for exercising the resume path.
    """
    if bound < 5:
        raise ValueError("bound must be at least 5 (the smallest root)")
    if stop_after_tasks is not None and not checkpoint_path:
        raise ValueError("stop_after_tasks needs a checkpoint_path")
    if checkpoint_path and os.path.exists(checkpoint_path):
        raise ValueError(
            f"{checkpoint_path} exists; use checkpoint_resume to continue"
        )
    bm = np.zeros(bound + 1, dtype=bool)
    return _run(
        bound, [], bm, threads, progress,
        checkpoint_path, checkpoint_every, stop_after_tasks,
    )


def checkpoint_resume(
    path: str,
    bound: int | None = None,
    threads: int | None = None,
    progress: Progress | None = None,
    checkpoint_every: int = 8,
    stop_after_tasks: int | None = None,
) -> tuple[SearchManifest, np.ndarray]:
    """Continue a checkpointed search to completion.

    The stored bound is authoritative; passing a different one is an
    error, not a rescale.  A finished checkpoint just reloads.
    """
    stored_bound, completed, bm, finished = _load_checkpoint(path)
    if bound is not None and bound != stored_bound:
        raise ValueError(
            f"checkpoint is for bound {stored_bound}, not {bound}"
        )
    if finished:
        return _manifest(stored_bound, bm, completed, True), bm
    return _run(
        stored_bound, completed, bm, threads, progress,
        path, checkpoint_every, stop_after_tasks,
    )


def missing_values(bm: np.ndarray) -> np.ndarray:
    """Values >= 1 not marked in a search bitmap."""
    absent = np.nonzero(~bm[1:])[0] + 1
    return absent


def certificate_for(v: int, bound: int | None = None) -> ContinuedFraction | None:
    """A continued fraction [0; 4a_1, ..., 4a_n, k, 1, 2] with
    denominator exactly v, or None.

    Walks prefix states (q_prev, q_cur) of the denominator recurrence
    with q capped by v, closing each prefix with the unique candidate
    tail k when ``(3k+2) q_cur + 3 q_prev = v`` has an integer solution
    k >= 1.  The result is verified through the convergent recurrence
    before being returned.
    """
    if v < 1:
        raise ValueError("v must be positive")
    cap = bound if bound is not None else v
    stack: list[tuple[int, int, tuple[int, ...]]] = [(0, 1, ())]
    while stack:
        prev, cur, digits = stack.pop()
        t = v - 3 * prev - 2 * cur
        if t > 0 and t % (3 * cur) == 0:
            k = t // (3 * cur)
            if k >= 1:
                cf = ContinuedFraction(0, digits + (k, 1, 2))
                val = cf_eval(cf)
                assert val.y == v, f"certificate recurrence broke at {v}"
                return cf
        a = 1
        while True:
            nxt = 4 * a * cur + prev
            if 5 * nxt + 3 * cur > cap:
                break
            stack.append((cur, nxt, digits + (4 * a,)))
            a += 1
    return None
