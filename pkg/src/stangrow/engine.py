"""Greedy 3-AP-free (Stanley) sequence generation, verification, and storage.

A Stanley sequence extends a seed set greedily: the next term is the
smallest integer above the last one that forms no 3-term arithmetic
progression a + c = 2b with two earlier terms. Admissibility of a
candidate c is decided by walking the existing terms b in decreasing
order and testing whether 2b - c is already present; once 2b - c drops
below zero no smaller b can complete a progression, so the walk stops.

Two interchangeable membership structures are provided and must produce
identical sequences: a hash set ("hash-scan", the readable reference)
and a growable dense byte vector indexed by value ("bitset-scan", the
fast default, JIT-compiled when numba is available).
"""

import csv
import json
import math
import sys
from bisect import bisect_left
from dataclasses import dataclass
from itertools import islice
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._version import __version__
from .ioutil import sha256_file

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

HASH_SCAN = "hash-scan"
BITSET_SCAN = "bitset-scan"
STRATEGIES = (HASH_SCAN, BITSET_SCAN)

# Generation aborts rather than let 2b - c arithmetic approach the int64 edge.
TERM_LIMIT = 1 << 62

SEQUENCE_FORMAT = "stanley-sequence/1"


class SeedError(ValueError):
    """Raised when a seed set violates its invariants."""


class GenerationError(RuntimeError):
    """Raised when generation cannot complete (term limit exceeded)."""


class SequenceLoadError(ValueError):
    """Raised when a persisted sequence fails to parse or verify."""


def _find_ap(terms: Sequence[int]) -> tuple[int, int, int] | None:
    """Return some 3-term AP (a, b, c) among the terms, or None."""
    position = {v: i for i, v in enumerate(terms)}
    for j in range(1, len(terms) - 1):
        b = terms[j]
        for l in range(j + 1, len(terms)):
            a = 2 * b - terms[l]
            if a in position and position[a] < j:
                return (a, b, terms[l])
    return None


@dataclass(frozen=True)
class SeedSet:
    """Strictly increasing non-negative integers, at least two, AP-free."""

    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        elems = tuple(int(v) for v in self.elements)
        object.__setattr__(self, "elements", elems)
        if len(elems) < 2:
            raise SeedError(f"seed needs at least 2 elements, got {len(elems)}")
        for i, v in enumerate(elems):
            if v < 0:
                raise SeedError(f"seed element {v} at position {i} is negative")
        for i in range(len(elems) - 1):
            if elems[i] >= elems[i + 1]:
                raise SeedError(
                    f"seed not strictly increasing at positions {i},{i + 1}: "
                    f"{elems[i]} >= {elems[i + 1]}"
                )
        ap = _find_ap(elems)
        if ap is not None:
            raise SeedError(f"seed contains the 3-term AP {ap[0]},{ap[1]},{ap[2]}")

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class StanleySequence:
    """An immutable generated sequence with its seed and strategy tag."""

    seed: SeedSet
    terms: tuple[int, ...]
    generator_strategy: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(int(v) for v in self.terms))
        if self.generator_strategy not in STRATEGIES:
            raise ValueError(f"unknown generator strategy {self.generator_strategy!r}")
        ns = len(self.seed.elements)
        if self.terms[:ns] != self.seed.elements:
            raise ValueError("terms do not start with the seed elements")
        for i in range(len(self.terms) - 1):
            if self.terms[i] >= self.terms[i + 1]:
                raise ValueError(
                    f"terms not strictly increasing at positions {i},{i + 1}"
                )

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def last_term(self) -> int:
        return self.terms[-1]


def _as_seed(seed: "SeedSet | Iterable[int]") -> SeedSet:
    if isinstance(seed, SeedSet):
        return seed
    return SeedSet(tuple(seed))


def _term_tuple(current: "StanleySequence | Sequence[int]") -> tuple[int, ...]:
    if isinstance(current, StanleySequence):
        return current.terms
    return tuple(int(v) for v in current)


def _scan_admissible(candidate: int, terms: Sequence[int], seen: set) -> bool:
    # Walk b downward; once 2b - c < 0 no smaller b can form an AP.
    for b in reversed(terms):
        a = 2 * b - candidate
        if a < 0:
            break
        if a in seen:
            return False
    return True


def is_admissible(candidate: int, current: "StanleySequence | Sequence[int]") -> bool:
    """True iff appending candidate creates no 3-term AP with existing terms."""
    terms = _term_tuple(current)
    if not terms:
        raise ValueError("current sequence is empty")
    if candidate <= terms[-1]:
        raise ValueError(
            f"candidate {candidate} must exceed the last term {terms[-1]}"
        )
    return _scan_admissible(candidate, terms, set(terms))


def verify_ap_free(terms: "Sequence[int] | np.ndarray") -> bool:
    """Exhaustively check that no 3-term AP exists among the terms.

    Independent of the generator's scan: for every middle element b and
    every later element c, membership of 2b - c among the earlier terms
    is tested by binary search over the full sorted array.
    """
    t = np.asarray(list(terms), dtype=np.int64)
    if t.size >= 2:
        gaps = np.diff(t)
        if not np.all(gaps > 0):
            i = int(np.argmax(gaps <= 0))
            raise ValueError(
                f"terms not strictly increasing at positions {i},{i + 1}: "
                f"{t[i]} then {t[i + 1]}"
            )
    if t.size < 3:
        return True
    for j in range(1, t.size - 1):
        need = 2 * t[j] - t[j + 1 :]
        idx = np.searchsorted(t[:j], need)
        clipped = np.clip(idx, 0, j - 1)
        if np.any((idx < j) & (t[:j][clipped] == need)):
            return False
    return True


def _progress(count: int, target: int, last: int) -> None:
    print(f"stangrow: {count}/{target} terms, last = {last}", file=sys.stderr)


def _generate_hash(
    seed_elems: tuple[int, ...], target: int, progress_interval: int | None
) -> list[int]:
    """Candidate scan over a hash set, same walk as _scan_admissible.

    The admissibility test is pushed into C: `doubled` holds 2b ascending,
    so the b with 2b - c >= 0 are exactly doubled[idx:] for a bisect idx,
    and set.isdisjoint consumes their residuals 2b - c (built by a map over
    the descending mirror, most-likely blockers first) with no per-term
    bytecode. isdisjoint short-circuits on the first hit, like the loop.
    """
    terms = list(seed_elems)
    seen = set(terms)
    doubled = [2 * b for b in terms]
    rdoubled = doubled[::-1]
    isdisjoint = seen.isdisjoint
    while len(terms) < target:
        n = len(terms)
        c = terms[-1] + 1
        while True:
            if c > TERM_LIMIT:
                raise GenerationError(
                    f"term {len(terms) + 1} would exceed 2^62 = {TERM_LIMIT}"
                )
            count = n - bisect_left(doubled, c)
            if count == 0 or isdisjoint(map((-c).__add__, islice(rdoubled, count))):
                break
            c += 1
        terms.append(c)
        seen.add(c)
        doubled.append(2 * c)
        rdoubled.insert(0, 2 * c)
        if progress_interval and len(terms) % progress_interval == 0:
            _progress(len(terms), target, c)
    return terms


def _extend_bitset(terms, count, target, seen):
    """Append greedy terms into terms[count:target] using a dense seen vector.

    Returns (new_count, need): need == -1 when target is reached, -2 when
    the term limit was hit, otherwise the candidate value that ran past the
    vector's capacity (the caller grows the vector and re-enters).
    """
    cap = seen.shape[0]
    while count < target:
        c = terms[count - 1] + 1
        while True:
            if c > TERM_LIMIT:
                return count, -2
            if c >= cap:
                return count, c
            ok = True
            for i in range(count - 1, -1, -1):
                a = 2 * terms[i] - c
                if a < 0:
                    break
                if seen[a]:
                    ok = False
                    break
            if ok:
                break
            c += 1
        terms[count] = c
        seen[c] = 1
        count += 1
    return count, -1


if njit is not None:
    _extend_bitset_fast = njit(cache=True)(_extend_bitset)
else:  # pragma: no cover - numba is a declared dependency
    _extend_bitset_fast = _extend_bitset


def _initial_capacity(last: int, target: int) -> int:
    # Terms empirically track k^2 / ln k; oversize by 1.3x to avoid regrowth,
    # but never preallocate more than 256 MB up front.
    estimate = int(1.3 * target * target / max(math.log(target), 1.0)) + 1024
    return max(4 * last + 16, 1 << 16, min(estimate, 1 << 28))


def _generate_bitset(
    seed_elems: tuple[int, ...], target: int, progress_interval: int | None
) -> list[int]:
    terms = np.zeros(target, dtype=np.int64)
    terms[: len(seed_elems)] = seed_elems
    count = len(seed_elems)
    seen = np.zeros(_initial_capacity(seed_elems[-1], target), dtype=np.uint8)
    seen[list(seed_elems)] = 1
    while count < target:
        if progress_interval:
            goal = min(target, (count // progress_interval + 1) * progress_interval)
        else:
            goal = target
        while True:
            count, need = _extend_bitset_fast(terms, count, goal, seen)
            if need == -1:
                break
            if need == -2:
                raise GenerationError(
                    f"term {count + 1} would exceed 2^62 = {TERM_LIMIT}"
                )
            grown = np.zeros(max(2 * seen.shape[0], need + 1024), dtype=np.uint8)
            grown[: seen.shape[0]] = seen
            seen = grown
        if progress_interval and count < target:
            _progress(count, target, int(terms[count - 1]))
    return [int(v) for v in terms]


def generate(
    seed: "SeedSet | Iterable[int]",
    target_length: int,
    progress_interval: int | None = None,
    strategy: str = BITSET_SCAN,
) -> StanleySequence:
    """Generate the greedy 3-AP-free sequence extending seed to target_length.

    The result is deterministic in (seed, target_length) and identical for
    both strategies. progress_interval, when set, reports every that many
    terms on stderr; it never affects the output.
    """
    seed_set = _as_seed(seed)
    if target_length < len(seed_set):
        raise ValueError(
            f"target_length {target_length} is below the seed length {len(seed_set)}"
        )
    if progress_interval is not None and progress_interval < 1:
        raise ValueError(f"progress_interval must be positive, got {progress_interval}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    if strategy == HASH_SCAN:
        terms = _generate_hash(seed_set.elements, target_length, progress_interval)
    else:
        terms = _generate_bitset(seed_set.elements, target_length, progress_interval)
    return StanleySequence(
        seed=seed_set, terms=tuple(terms), generator_strategy=strategy
    )


def _first_greedy_violation(
    terms: Sequence[int], seed_len: int, upto: int
) -> tuple[int, int] | None:
    """Find a skipped integer not blocked by any AP, if one exists.

    Greedy minimality demands that every integer strictly between
    terms[m-1] and terms[m] forms an AP with two of terms[0..m-1].
    Returns (gap_value, m) for the first violation, else None.
    """
    seen = set(terms[:seed_len])
    for m in range(seed_len, upto):
        for g in range(terms[m - 1] + 1, terms[m]):
            blocked = False
            for i in range(m - 1, -1, -1):
                a = 2 * terms[i] - g
                if a < 0:
                    break
                if a in seen:
                    blocked = True
                    break
            if not blocked:
                return g, m
        seen.add(terms[m])
    return None


def _sidecar_path(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.name + ".json")


def save_sequence(
    seq: StanleySequence,
    destination: "str | Path",
    wall_clock_seconds: float | None = None,
) -> Path:
    """Write the sequence as CSV plus a JSON sidecar; return the CSV path.

    CSV schema: header `k,a_k`, one row per term, k 1-based. The sidecar
    records seed, length, strategy, tool version, timing, and the CSV's
    SHA-256 so loads can detect corruption.
    """
    dest = Path(destination)
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "a_k"])
        for k, a in enumerate(seq.terms, start=1):
            writer.writerow([k, a])
    sidecar = {
        "format": SEQUENCE_FORMAT,
        "seed": list(seq.seed.elements),
        "length": len(seq.terms),
        "generator_strategy": seq.generator_strategy,
        "tool_version": __version__,
        "wall_clock_seconds": wall_clock_seconds,
        "data_sha256": sha256_file(dest),
    }
    with open(_sidecar_path(dest), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    return dest


def _parse_sequence_csv(source: Path) -> list[int]:
    with open(source, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SequenceLoadError(f"{source}: empty file") from None
        if header != ["k", "a_k"]:
            raise SequenceLoadError(f"{source}: expected header 'k,a_k', got {header}")
        terms = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise SequenceLoadError(f"{source}:{lineno}: expected 2 fields")
            try:
                k, a = int(row[0]), int(row[1])
            except ValueError:
                raise SequenceLoadError(
                    f"{source}:{lineno}: non-integer row {row}"
                ) from None
            if k != lineno - 1:
                raise SequenceLoadError(
                    f"{source}:{lineno}: k = {k}, expected {lineno - 1}"
                )
            terms.append(a)
    return terms


def load_sequence(source: "str | Path", verify_prefix: int = 2000) -> StanleySequence:
    """Load a saved sequence, re-verifying invariants on a prefix.

    The first verify_prefix terms (0 disables) are re-checked for
    AP-freeness and greedy minimality; monotonicity and the checksum are
    always checked in full.
    """
    src = Path(source)
    if not src.exists():
        raise SequenceLoadError(f"{src}: no such file")
    sidecar_file = _sidecar_path(src)
    if not sidecar_file.exists():
        raise SequenceLoadError(f"{sidecar_file}: sidecar not found")
    try:
        with open(sidecar_file, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SequenceLoadError(f"{sidecar_file}: invalid JSON ({exc})") from None
    if meta.get("format") != SEQUENCE_FORMAT:
        raise SequenceLoadError(
            f"{sidecar_file}: format {meta.get('format')!r}, expected {SEQUENCE_FORMAT!r}"
        )
    digest = sha256_file(src)
    if digest != meta.get("data_sha256"):
        raise SequenceLoadError(f"{src}: checksum mismatch against sidecar")

    terms = _parse_sequence_csv(src)
    if len(terms) != meta.get("length"):
        raise SequenceLoadError(
            f"{src}: {len(terms)} rows but sidecar declares length {meta.get('length')}"
        )
    try:
        seed = SeedSet(tuple(meta["seed"]))
    except (KeyError, TypeError, SeedError) as exc:
        raise SequenceLoadError(f"{sidecar_file}: bad seed ({exc})") from None

    upto = min(len(terms), verify_prefix) if verify_prefix else 0
    if upto:
        try:
            ok = verify_ap_free(terms[:upto])
        except ValueError as exc:
            raise SequenceLoadError(f"{src}: {exc}") from None
        if not ok:
            ap = _find_ap(terms[:upto])
            raise SequenceLoadError(
                f"{src}: prefix contains the 3-term AP {ap[0]},{ap[1]},{ap[2]}"
            )
        violation = _first_greedy_violation(terms, len(seed), upto)
        if violation is not None:
            g, m = violation
            raise SequenceLoadError(
                f"{src}: not greedy: {g} was skipped before term {m + 1} "
                f"({terms[m]}) but forms no AP with earlier terms"
            )
    try:
        return StanleySequence(
            seed=seed,
            terms=tuple(terms),
            generator_strategy=meta.get("generator_strategy", BITSET_SCAN),
        )
    except ValueError as exc:
        raise SequenceLoadError(f"{src}: {exc}") from None
