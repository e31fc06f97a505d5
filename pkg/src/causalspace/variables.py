"""Random variables on finite spaces: laws, conditioning, expectation, independence."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product as _cartesian
from typing import Callable, Mapping, Sequence, Union

from .errors import (
    DegenerateTreatment,
    MixedSpaces,
    NameMismatch,
    ZeroMeasureConditioningEvent,
)
from .space import Event, FiniteProbabilitySpace

#: An ordered assignment of values to named variables, e.g. ``(("X", 1), ("Z", 0))``.
Assignment = tuple
AssignmentLike = Union[Mapping[str, int], Sequence[tuple]]


def as_assignment(a: AssignmentLike) -> Assignment:
    pairs = tuple(a.items()) if isinstance(a, Mapping) else tuple(tuple(p) for p in a)
    names = [n for n, _ in pairs]
    if len(set(names)) != len(names):
        raise NameMismatch(f"assignment repeats a variable name: {names}")
    return tuple((str(n), int(v)) for n, v in pairs)


def format_assignment(a: Assignment) -> str:
    if not a:
        return "()"
    names = ",".join(n for n, _ in a)
    values = ",".join(str(v) for _, v in a)
    if len(a) == 1:
        return f"{names}={values}"
    return f"({names})=({values})"


@dataclass(frozen=True)
class RandomVariable:
    """A total integer-valued map on the atoms of ``space``.

    ``values[i]`` is the value at ``space.atoms[i]``.
    """

    name: str
    space: FiniteProbabilitySpace
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.space.atoms):
            raise ValueError(
                f"variable {self.name!r} has {len(self.values)} values for {len(self.space)} atoms"
            )

    def __call__(self, atom_id: str) -> int:
        return self.values[self.space.index(atom_id)]

    @cached_property
    def image(self) -> tuple:
        return tuple(sorted(set(self.values)))

    @property
    def assignment(self) -> dict:
        return dict(zip(self.space.ids, self.values))

    def preimage(self, value: int) -> Event:
        return Event(self.space.id, frozenset(a for a, v in zip(self.space.ids, self.values) if v == value))

    def renamed(self, name: str) -> RandomVariable:
        return RandomVariable(name, self.space, self.values)

    def same_values(self, other: RandomVariable) -> bool:
        _check_same_space([self, other])
        return self.values == other.values


def variable(space: FiniteProbabilitySpace, name: str, mapping: Mapping[str, int]) -> RandomVariable:
    """Build a variable from an atom-id -> value mapping that must cover every atom."""
    missing = [a for a in space.ids if a not in mapping]
    if missing:
        raise ValueError(f"variable {name!r} has no value on atoms {missing}")
    extra = [a for a in mapping if a not in space._index]
    if extra:
        raise ValueError(f"variable {name!r} assigns values to unknown atoms {extra}")
    return RandomVariable(name, space, tuple(int(mapping[a]) for a in space.ids))


def constant(space: FiniteProbabilitySpace, value: int, name: str = "const") -> RandomVariable:
    return RandomVariable(name, space, (int(value),) * len(space))


def from_function(space: FiniteProbabilitySpace, name: str, fn: Callable[[str], int]) -> RandomVariable:
    return RandomVariable(name, space, tuple(int(fn(a)) for a in space.ids))


def _check_same_space(vs: Sequence[RandomVariable]) -> FiniteProbabilitySpace:
    if not vs:
        raise ValueError("need at least one random variable")
    space = vs[0].space
    for v in vs[1:]:
        if v.space is not space and v.space != space:
            raise MixedSpaces(f"{vs[0].name!r} and {v.name!r} live on different spaces")
    return space


class Law(dict):
    """Exact pushforward measure: value tuple -> Fraction.

    Only tuples of positive mass are stored; lookups of absent tuples give 0.
    """

    def __missing__(self, key):
        return Fraction(0)

    def total(self) -> Fraction:
        return sum(self.values(), Fraction(0))

    def marginal(self, keep: Sequence[int]) -> Law:
        out = defaultdict(Fraction)
        for key, p in self.items():
            out[tuple(key[i] for i in keep)] += p
        return Law({k: p for k, p in out.items() if p})


def law(vars: Sequence[RandomVariable]) -> Law:
    space = _check_same_space(list(vars))
    out = defaultdict(Fraction)
    for i, m in enumerate(space.masses):
        if m:
            out[tuple(v.values[i] for v in vars)] += m
    return Law(out)


def conditional_law(target: Sequence[RandomVariable], given: Event) -> Law:
    space = _check_same_space(list(target))
    denom = space.measure(given)
    if denom == 0:
        raise ZeroMeasureConditioningEvent("conditioning event has measure zero")
    out = defaultdict(Fraction)
    for i, (atom_id, m) in enumerate(zip(space.ids, space.masses)):
        if m and atom_id in given.members:
            out[tuple(v.values[i] for v in target)] += m
    return Law({k: p / denom for k, p in out.items()})


def expectation(v: RandomVariable) -> Fraction:
    return sum((m * x for m, x in zip(v.space.masses, v.values)), Fraction(0))


def conditional_expectation(v: RandomVariable, given: Event) -> Fraction:
    denom = v.space.measure(given)
    if denom == 0:
        raise ZeroMeasureConditioningEvent("conditioning event has measure zero")
    num = sum(
        (m * x for a, m, x in zip(v.space.ids, v.space.masses, v.values) if a in given.members),
        Fraction(0),
    )
    return num / denom


def indicator(vars: Sequence[RandomVariable], a: AssignmentLike, name: str | None = None) -> RandomVariable:
    """The 0/1 variable equal to 1 exactly where every variable matches ``a``."""
    space = _check_same_space(list(vars))
    a = as_assignment(a)
    if [v.name for v in vars] != [n for n, _ in a]:
        raise NameMismatch(
            f"assignment names {[n for n, _ in a]} do not match variables {[v.name for v in vars]}"
        )
    target = tuple(x for _, x in a)
    vals = tuple(
        int(all(v.values[i] == t for v, t in zip(vars, target))) for i in range(len(space))
    )
    return RandomVariable(name or f"I[{format_assignment(a)}]", space, vals)


def joint_image(vars: Sequence[RandomVariable]) -> list:
    """Product of the images, in lexicographic order."""
    return list(_cartesian(*(v.image for v in vars)))


def level_set(vars: Sequence[RandomVariable], values: Sequence[int]) -> Event:
    space = _check_same_space(list(vars))
    values = tuple(values)
    return Event(
        space.id,
        frozenset(a for i, a in enumerate(space.ids) if tuple(v.values[i] for v in vars) == values),
    )


def independent(v1: RandomVariable, v2: RandomVariable) -> bool:
    _check_same_space([v1, v2])
    joint = law([v1, v2])
    p1 = law([v1])
    p2 = law([v2])
    return all(joint[(x, y)] == p1[(x,)] * p2[(y,)] for x in v1.image for y in v2.image)


def aoe(x: RandomVariable, y: RandomVariable) -> Fraction:
    """Difference of conditional means of ``y`` between the arms X=1 and X=0."""
    space = _check_same_space([x, y])
    if not set(x.image) <= {0, 1}:
        raise DegenerateTreatment(f"treatment {x.name!r} is not binary: image {x.image}")
    arms = {}
    for arm in (1, 0):
        e = x.preimage(arm)
        if space.measure(e) == 0:
            raise DegenerateTreatment(f"arm {x.name}={arm} has zero measure")
        arms[arm] = conditional_expectation(y, e)
    return arms[1] - arms[0]
