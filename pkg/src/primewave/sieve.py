"""Wave-model sieve: composites of the 6n±1 wheel as undertone progressions.

A wave with stretch factor x marks the values x*(5+6n) (branch 1, n >= 0) and
x*(1+6n) (branch 2, n >= 1).  Every wheel value that no wave touches is prime.
"""

from __future__ import annotations

import heapq
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Literal

import numpy as np

from .errors import DomainError
from .wheel import U64_MAX, SeqId, check_u64, seq_of

ORACLE_CAP = 10**8
MARK_RETENTION_LIMIT = 10**6
DEFAULT_SEGMENT = 1 << 20


@dataclass(frozen=True)
class UndertoneWave:
    x: int
    branch: Literal[1, 2]

    def __post_init__(self):
        if self.x < 5 or self.x % 6 not in (1, 5):
            raise DomainError(f"stretch factor must be >= 5 and coprime to 6, got {self.x}")
        if self.branch not in (1, 2):
            raise DomainError(f"branch must be 1 or 2, got {self.branch}")

    @property
    def base(self) -> int:
        return 5 if self.branch == 1 else 1


@dataclass(frozen=True, order=True)
class CompositeMark:
    value: int
    x: int
    cofactor: int
    branch: int

    @property
    def seq(self) -> SeqId:
        return seq_of(self.value)


SET_FORMULA_NOTE = ("the prime-set formulas are read with union: SQ1 and SQ2 are disjoint, "
                    "so an intersection there would be empty")


def undertone_value(wave: UndertoneWave, n: int) -> int:
    if n < 0 or (wave.branch == 2 and n == 0):
        raise DomainError(f"n={n} is outside branch {wave.branch} of wave {wave.x}")
    return check_u64(wave.x * (wave.base + 6 * n))


class MarkTable:
    """Column store of composite marks sorted by (value, x)."""

    def __init__(self, value, x, cofactor, branch):
        order = np.lexsort((x, value))
        self.value = value[order]
        self.x = x[order]
        self.cofactor = cofactor[order]
        self.branch = branch[order]

    def __len__(self):
        return len(self.value)

    def __iter__(self) -> Iterator[CompositeMark]:
        for v, x, c, b in zip(self.value.tolist(), self.x.tolist(),
                              self.cofactor.tolist(), self.branch.tolist()):
            yield CompositeMark(v, x, c, b)

    def for_value(self, v: int) -> list[CompositeMark]:
        lo = np.searchsorted(self.value, v, "left")
        hi = np.searchsorted(self.value, v, "right")
        return [CompositeMark(v, int(self.x[i]), int(self.cofactor[i]), int(self.branch[i]))
                for i in range(lo, hi)]

    def marked_values(self) -> np.ndarray:
        return np.unique(self.value)


@dataclass
class SieveResult:
    limit: int
    primes: np.ndarray
    marks: MarkTable | None = None
    stats: dict = field(default_factory=dict)


def _mark_arrays(lo: int, hi: int, xs) -> MarkTable:
    vals, xcol, ccol, bcol = [], [], [], []
    for x in xs:
        x = int(x)
        for branch, base in ((1, 5), (2, 7)):
            c_lo = max(base, -(-lo // x))
            # advance to the branch's residue class
            c_lo += (base - c_lo) % 6
            c_hi = hi // x
            if c_lo > c_hi:
                continue
            c = np.arange(c_lo, c_hi + 1, 6, dtype=np.int64)
            vals.append(c * x)
            ccol.append(c)
            xcol.append(np.full(len(c), x, dtype=np.int64))
            bcol.append(np.full(len(c), branch, dtype=np.int8))
    if not vals:
        e = np.empty(0, dtype=np.int64)
        return MarkTable(e, e, e, np.empty(0, dtype=np.int8))
    return MarkTable(np.concatenate(vals), np.concatenate(xcol),
                     np.concatenate(ccol), np.concatenate(bcol))


def wave_factors(hi: int, waves: str = "prime") -> np.ndarray:
    """Stretch factors instantiated up to ``hi``: primes >= 5, or every x in SQ1 ∪ SQ2 minus 1."""
    xmax = hi // 5
    if xmax < 5:
        return np.empty(0, dtype=np.int64)
    if waves == "prime":
        p = primes_up_to(xmax, keep_marks=False).primes
        return p[p >= 5].astype(np.int64)
    if waves == "full":
        x = np.arange(5, xmax + 1, dtype=np.int64)
        return x[(x % 6 == 1) | (x % 6 == 5)]
    raise DomainError(f"unknown wave selection {waves!r}")


def mark_table(lo: int, hi: int, waves: str = "prime") -> MarkTable:
    if lo < 5:
        raise DomainError("mark_range needs 5 <= lo")
    if lo > hi:
        return _mark_arrays(1, 0, [])
    check_u64(hi)
    return _mark_arrays(lo, hi, wave_factors(hi, waves))


def mark_range(lo: int, hi: int, waves: str = "prime") -> list[CompositeMark]:
    """All marks with lo <= value <= hi, ordered by value then stretch factor."""
    return list(mark_table(lo, hi, waves))


def _segment(lo, hi, base_primes):
    """Sieve one value range [lo, hi]; returns its primes >= 5 in ascending order."""
    out = []
    for off in (5, 1):
        n_lo = max(0, -(-(lo - off) // 6))
        n_hi = (hi - off) // 6
        if n_hi < n_lo:
            continue
        composite = np.zeros(n_hi - n_lo + 1, dtype=bool)
        for x in base_primes:
            if x * x > hi:
                break
            # off + 6n ≡ 0 (mod x)  <=>  n ≡ -off * 6^{-1} (mod x)
            n_res = (-off * pow(6, -1, x)) % x
            n_min = max(n_lo, -(-(x * x - off) // 6))
            start = n_min + (n_res - n_min) % x
            if start <= n_hi:
                composite[start - n_lo::x] = True
        if off == 1 and n_lo == 0:
            composite[0] = True  # 1 is not prime
        out.append(off + 6 * (n_lo + np.flatnonzero(~composite).astype(np.int64)))
    if not out:
        return np.empty(0, dtype=np.int64)
    return np.sort(np.concatenate(out))


def primes_up_to(limit: int, segment_size: int = DEFAULT_SEGMENT, workers: int = 1,
                 keep_marks: bool | None = None) -> SieveResult:
    """Primes <= limit as the wheel values left unmarked by every prime wave.

    The set formula behind this is PN = {2,3} ∪ ((SQ1 ∪ SQ2) minus the marked values).
    """
    if limit < 0:
        raise DomainError("limit must be nonnegative")
    if limit > U64_MAX - 6:
        raise OverflowError("limit too close to 2**64")
    if segment_size < 16:
        raise DomainError("segment_size must be at least 16")
    t0 = time.perf_counter()
    small = np.array([p for p in (2, 3) if p <= limit], dtype=np.int64)
    if limit < 5:
        return SieveResult(limit, small, None, {"segments": 0, "seconds": 0.0})
    root = math.isqrt(limit)
    if root >= 5:
        base = _segment(5, root, _bootstrap(root)).tolist()
    else:
        base = []
    bounds = [(lo, min(limit, lo + segment_size - 1))
              for lo in range(5, limit + 1, segment_size)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda b: _segment(b[0], b[1], base), bounds))
    else:
        parts = [_segment(lo, hi, base) for lo, hi in bounds]
    primes = np.concatenate([small] + parts)
    t1 = time.perf_counter()
    if keep_marks is None:
        keep_marks = limit <= MARK_RETENTION_LIMIT
    marks = None
    if keep_marks:
        waves = primes[(primes >= 5) & (primes <= limit // 5)]
        marks = _mark_arrays(5, limit, waves)
    stats = {
        "segments": len(bounds),
        "segment_size": segment_size,
        "prime_count": int(len(primes)),
        "marks": None if marks is None else len(marks),
        "sieve_seconds": t1 - t0,
        "seconds": time.perf_counter() - t0,
    }
    return SieveResult(limit, primes, marks, stats)


def _bootstrap(n: int) -> list[int]:
    # base waves for sieving [5, n]; n is at most ~2**32 so trial division by
    # the running prime list up to sqrt(n) is cheap
    out = []
    for v in range(5, math.isqrt(n) + 1):
        if v % 6 in (1, 5) and all(v % p for p in out if p * p <= v):
            out.append(v)
    return out


def oracle_primes_up_to(limit: int) -> list[int]:
    """Plain sieve of Eratosthenes over every integer; independent of the wave model."""
    if limit > ORACLE_CAP:
        raise DomainError(f"oracle refuses limits above {ORACLE_CAP}")
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i::i] = bytes(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(flags) if f]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def first_occurrence(p: int) -> tuple[int, int, SeqId]:
    """Smallest composite of SQ1 ∪ SQ2 divisible by the prime p, with its cofactor."""
    if p < 5 or not _is_prime(p):
        raise DomainError(f"{p} is not a prime >= 5")
    k = 1
    while True:
        k += 1
        v = k * p
        if v % 2 and v % 3:
            return v, k, seq_of(v)


def companion_sequence(x: int, count: int) -> list[int]:
    """First ``count`` cofactors of wave x, both branches merged in ascending order."""
    b1 = UndertoneWave(x, 1)
    b2 = UndertoneWave(x, 2)

    def cof(w, n0):
        n = n0
        while True:
            yield undertone_value(w, n) // x
            n += 1

    merged = heapq.merge(cof(b1, 0), cof(b2, 1))
    return [next(merged) for _ in range(count)]
