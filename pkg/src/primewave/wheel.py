"""Residue sequences 5+6n, 1+6n and 3+6n and the map between integers and wheel positions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

U64_MAX = 2**64 - 1


class SeqId(str, Enum):
    SQ1 = "SQ1"
    SQ2 = "SQ2"
    SQ3 = "SQ3"

    @property
    def offset(self) -> int:
        return _OFFSETS[self]

    @property
    def residue(self) -> int:
        return _OFFSETS[self]


_OFFSETS = {SeqId.SQ1: 5, SeqId.SQ2: 1, SeqId.SQ3: 3}
_BY_RESIDUE = {5: SeqId.SQ1, 1: SeqId.SQ2, 3: SeqId.SQ3}


def check_u64(v: int) -> int:
    if v < 0 or v > U64_MAX:
        raise OverflowError(f"value {v} outside the unsigned 64-bit range")
    return v


@dataclass(frozen=True, order=True)
class WheelIndex:
    seq: SeqId
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("wheel index n must be nonnegative")

    @property
    def value(self) -> int:
        return value_of(self)


def value_of(idx: WheelIndex) -> int:
    return check_u64(idx.seq.offset + 6 * idx.n)


def locate(v: int) -> WheelIndex | None:
    """Inverse of :func:`value_of`; ``None`` when ``v`` is even or divisible by 6."""
    if v < 1:
        raise ValueError("locate expects a positive integer")
    seq = _BY_RESIDUE.get(v % 6)
    if seq is None:
        return None
    return WheelIndex(seq, (v - seq.offset) // 6)


def residue_class(v: int) -> int:
    if v < 1:
        raise ValueError("residue_class expects a positive integer")
    return v % 6


def seq_of(v: int) -> SeqId | None:
    return _BY_RESIDUE.get(v % 6)


def base_for(x: int, host: SeqId) -> int:
    """Base pattern (1 or 2) of the cofactors c with x*c landing in ``host``.

    Cofactors congruent to 5 follow Sequence 1, cofactors congruent to 1 follow
    Sequence 2.  Only defined for x coprime to 6 and host SQ1/SQ2.
    """
    if host is SeqId.SQ3 or x % 6 not in (1, 5):
        raise ValueError(f"no base pattern for x={x} in {host.value}")
    # residues 1 and 5 are their own inverses mod 6
    cof = (host.residue * x) % 6
    return 1 if cof == 5 else 2


def wheel_values(seq: SeqId, limit: int, start: int | None = None) -> range:
    """All members of ``seq`` in [start, limit]."""
    first = seq.offset
    if start is not None and start > first:
        first += -(-(start - first) // 6) * 6
    return range(first, limit + 1, 6)
