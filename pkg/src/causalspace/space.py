"""Finite atomic probability spaces with exact rational masses.

The sigma-algebra of a :class:`FiniteProbabilitySpace` is the full power set of
its atoms and is never materialized; events are plain sets of atom ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product as _cartesian
from typing import Iterable, Sequence, Union

from .errors import (
    DuplicateAtomId,
    EmptySpace,
    ForeignEvent,
    MassSumNotOne,
    NegativeMass,
)

RationalLike = Union[int, Fraction, str]


def rational(value: RationalLike) -> Fraction:
    """Convert ``value`` to a Fraction, refusing floats (they would round)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not masses")
    if isinstance(value, float):
        raise TypeError(f"float {value!r} is not an exact rational; use 'p/q' or Fraction")
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


@dataclass(frozen=True)
class Atom:
    id: str
    mass: Fraction


@dataclass(frozen=True)
class Event:
    space_id: str
    members: frozenset

    def __contains__(self, atom_id: str) -> bool:
        return atom_id in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __or__(self, other: Event) -> Event:
        _same_space(self, other)
        return Event(self.space_id, self.members | other.members)

    def __and__(self, other: Event) -> Event:
        _same_space(self, other)
        return Event(self.space_id, self.members & other.members)

    def __sub__(self, other: Event) -> Event:
        _same_space(self, other)
        return Event(self.space_id, self.members - other.members)

    def issubset(self, other: Event) -> bool:
        _same_space(self, other)
        return self.members <= other.members


def _same_space(a: Event, b: Event) -> None:
    if a.space_id != b.space_id:
        raise ForeignEvent(f"events live on different spaces: {a.space_id!r} vs {b.space_id!r}")


@dataclass(frozen=True)
class FiniteProbabilitySpace:
    atoms: tuple
    id: str = "omega"
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {a.id: i for i, a in enumerate(self.atoms)})

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    @cached_property
    def ids(self) -> tuple:
        return tuple(a.id for a in self.atoms)

    @cached_property
    def masses(self) -> tuple:
        return tuple(a.mass for a in self.atoms)

    def index(self, atom_id: str) -> int:
        try:
            return self._index[atom_id]
        except KeyError:
            raise ForeignEvent(f"atom {atom_id!r} is not in space {self.id!r}") from None

    def mass(self, atom_id: str) -> Fraction:
        return self.atoms[self.index(atom_id)].mass

    def event(self, members: Iterable[str]) -> Event:
        members = frozenset(members)
        for m in members:
            self.index(m)
        return Event(self.id, members)

    @property
    def whole(self) -> Event:
        return Event(self.id, frozenset(self.ids))

    @property
    def empty(self) -> Event:
        return Event(self.id, frozenset())

    def complement(self, e: Event) -> Event:
        self._check(e)
        return Event(self.id, frozenset(self.ids) - e.members)

    def measure(self, e: Event) -> Fraction:
        return measure(self, e)

    def _check(self, e: Event) -> None:
        if e.space_id != self.id:
            raise ForeignEvent(f"event belongs to space {e.space_id!r}, not {self.id!r}")
        for m in e.members:
            if m not in self._index:
                raise ForeignEvent(f"atom {m!r} is not in space {self.id!r}")


def make_space(atoms: Sequence[tuple], space_id: str = "omega") -> FiniteProbabilitySpace:
    """Build a validated space from ``(id, mass)`` pairs, preserving order."""
    if not atoms:
        raise EmptySpace("a probability space needs at least one atom")
    seen = set()
    built = []
    for atom_id, mass in atoms:
        if not isinstance(atom_id, str) or not atom_id:
            raise DuplicateAtomId(f"atom id must be non-empty text, got {atom_id!r}")
        if atom_id in seen:
            raise DuplicateAtomId(f"atom id {atom_id!r} appears twice")
        seen.add(atom_id)
        m = rational(mass)
        if m < 0:
            raise NegativeMass(f"atom {atom_id!r} has negative mass {m}")
        built.append(Atom(atom_id, m))
    total = sum((a.mass for a in built), Fraction(0))
    if total != 1:
        raise MassSumNotOne(total)
    return FiniteProbabilitySpace(tuple(built), space_id)


def measure(space: FiniteProbabilitySpace, e: Event) -> Fraction:
    space._check(e)
    return sum((space.mass(m) for m in e.members), Fraction(0))


def pair_id(id1: str, id2: str) -> str:
    return f"{id1}*{id2}"


def product(s1: FiniteProbabilitySpace, s2: FiniteProbabilitySpace) -> FiniteProbabilitySpace:
    """Product space, atoms ordered lexicographically with ``s1`` major."""
    atoms = tuple(
        Atom(pair_id(a.id, b.id), a.mass * b.mass) for a, b in _cartesian(s1.atoms, s2.atoms)
    )
    return FiniteProbabilitySpace(atoms, f"({s1.id})x({s2.id})")


def product_event(
    prod: FiniteProbabilitySpace, s1: FiniteProbabilitySpace, e1: Event, s2: FiniteProbabilitySpace, e2: Event
) -> Event:
    """The rectangle ``e1 x e2`` as an event of ``prod = product(s1, s2)``."""
    s1._check(e1)
    s2._check(e2)
    return prod.event(pair_id(a, b) for a in s1.ids if a in e1 for b in s2.ids if b in e2)


def relabel(space: FiniteProbabilitySpace, prefix: str, space_id: str | None = None) -> FiniteProbabilitySpace:
    """Copy of ``space`` with every atom id prefixed; masses and order unchanged."""
    atoms = tuple(Atom(prefix + a.id, a.mass) for a in space.atoms)
    return FiniteProbabilitySpace(atoms, space_id or prefix + space.id)
