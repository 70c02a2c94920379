"""Exact arithmetic in the free monoid N^r and its group Z^r.

Face quotients model specialization of the base: killing a set of
generators sends the corresponding smoothing parameters to units.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import RankMismatch


def _check_rank(a, b):
    if len(a.coords) != len(b.coords):
        raise RankMismatch(f"rank mismatch: {len(a.coords)} vs {len(b.coords)}")


@dataclass(frozen=True, eq=False)
class GroupElement:
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    # Monoid and group elements with equal coordinates compare equal.
    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    @property
    def rank(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: GroupElement) -> GroupElement:
        _check_rank(self, other)
        return GroupElement(tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: GroupElement) -> GroupElement:
        _check_rank(self, other)
        return GroupElement(tuple(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> GroupElement:
        return GroupElement(tuple(-x for x in self.coords))

    def scale(self, m: int) -> GroupElement:
        return GroupElement(tuple(m * x for x in self.coords))

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for x in self.coords)

    def to_monoid(self) -> MonoidElement:
        return MonoidElement(self.coords)

    def __repr__(self):
        return f"GroupElement{self.coords}"


@dataclass(frozen=True, eq=False)
class MonoidElement(GroupElement):
    """An element of N^r. Subtraction leaves the monoid and returns a GroupElement."""

    def __post_init__(self):
        super().__post_init__()
        if any(c < 0 for c in self.coords):
            raise ValueError(f"monoid element has a negative coordinate: {self.coords}")

    @classmethod
    def zero(cls, rank: int) -> MonoidElement:
        return cls((0,) * rank)

    def __add__(self, other: GroupElement) -> GroupElement:
        s = GroupElement.__add__(self, other)
        if isinstance(other, MonoidElement):
            return MonoidElement(s.coords)
        return s

    def scale(self, m: int) -> GroupElement:
        s = GroupElement.scale(self, m)
        return MonoidElement(s.coords) if m >= 0 else s

    def __le__(self, other: MonoidElement) -> bool:
        return leq(self, other)

    def __ge__(self, other: MonoidElement) -> bool:
        return leq(other, self)

    def support(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.coords) if c)

    def __repr__(self):
        return f"MonoidElement{self.coords}"


def add(a: MonoidElement, b: MonoidElement) -> MonoidElement:
    _check_rank(a, b)
    return MonoidElement(tuple(x + y for x, y in zip(a.coords, b.coords)))


def leq(a: GroupElement, b: GroupElement) -> bool:
    """Partial order with N^r as positive cone: b - a has no negative coordinate."""
    _check_rank(a, b)
    return all(x <= y for x, y in zip(a.coords, b.coords))


def integer_multiple_of(d: GroupElement, delta: GroupElement) -> int | None:
    """The unique m with d == m * delta, or None when d is not such a multiple.

    A zero ``delta`` only admits ``d == 0`` (returning 0).
    """
    _check_rank(d, delta)
    if delta.is_zero():
        return 0 if d.is_zero() else None
    m = None
    for x, y in zip(d.coords, delta.coords):
        if y == 0:
            if x != 0:
                return None
            continue
        if x % y:
            return None
        q = x // y
        if m is None:
            m = q
        elif m != q:
            return None
    return m


@dataclass(frozen=True)
class Face:
    """A set of killed generator indices (0-based) of N^r.

    User-facing text uses 1-based indices; see :meth:`parse` and :meth:`label`.
    """

    killed: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "killed", frozenset(int(i) for i in self.killed))
        if any(i < 0 for i in self.killed):
            raise ValueError("face indices must be nonnegative")

    @classmethod
    def of(cls, *indices: int) -> Face:
        return cls(frozenset(indices))

    @classmethod
    def parse(cls, text: str) -> Face:
        """Parse a 1-based comma list such as ``"1,3"``; empty text is the empty face."""
        text = text.strip()
        if not text:
            return cls()
        return cls(frozenset(int(tok) - 1 for tok in text.split(",") if tok.strip()))

    def label(self) -> str:
        return "{" + ",".join(str(i + 1) for i in sorted(self.killed)) + "}"

    def check(self, rank: int) -> None:
        bad = [i for i in self.killed if i >= rank]
        if bad:
            raise ValueError(f"face index {bad[0] + 1} exceeds monoid rank {rank}")

    def union(self, other: Face) -> Face:
        return Face(self.killed | other.killed)

    def __len__(self):
        return len(self.killed)


def face_quotient(x: GroupElement, face: Face) -> GroupElement:
    """Project away the killed coordinates; the result has rank r - |face|."""
    face.check(x.rank)
    kept = tuple(c for i, c in enumerate(x.coords) if i not in face.killed)
    return type(x)(kept) if isinstance(x, MonoidElement) else GroupElement(kept)


def maps_to_unit(x: MonoidElement, face: Face) -> bool:
    return x.support() <= face.killed


def remap_face(face: Face, already: Face, rank: int) -> Face:
    """Express ``face`` (original indexing) in the coordinates left after quotienting by ``already``.

    Indices of ``face`` that ``already`` killed are dropped.
    """
    kept = [i for i in range(rank) if i not in already.killed]
    position = {old: new for new, old in enumerate(kept)}
    return Face(frozenset(position[i] for i in face.killed if i in position))


def all_faces(rank: int) -> Iterable[Face]:
    """All 2^rank faces, ordered by size then lexicographically."""
    from itertools import combinations

    for size in range(rank + 1):
        for combo in combinations(range(rank), size):
            yield Face(frozenset(combo))
