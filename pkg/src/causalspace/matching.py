"""Exact paired matching on finite spaces.

A covariate cell ``z`` (a value tuple of the first ``k`` covariates) is
matchable when both treatment arms meet it with positive mass.  The matched
support is the union of matchable cells; adding covariates can only shrink it.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as _cartesian
from typing import Sequence

from .errors import DegenerateTreatment, MixedSpaces, NoPairsFound, UnknownCovariate
from .sampling import SampleBatch, SplitMix64, shuffle
from .space import Event, FiniteProbabilitySpace
from .variables import RandomVariable

PAIRING_POLICY = (
    "within each covariate cell (cells in ascending order), shuffle the treated and "
    "untreated draws with one SplitMix64 stream seeded by `seed` (treated list first), "
    "then pair them first-to-first; leftovers are discarded"
)


@dataclass(frozen=True)
class MatchConfig:
    treatment: str
    covariates: tuple
    outcome: str = "Y"
    policy: str = PAIRING_POLICY

    def __post_init__(self):
        if len(set(self.covariates)) != len(self.covariates):
            raise ValueError("covariates must be distinct")
        if self.treatment in self.covariates or self.outcome in self.covariates:
            raise ValueError("covariates must exclude the treatment and the outcome")


def _check(space: FiniteProbabilitySpace, x: RandomVariable, zs: Sequence[RandomVariable], k: int) -> list:
    if not 1 <= k <= len(zs):
        raise UnknownCovariate(f"depth k={k} outside 1..{len(zs)}")
    for v in [x, *zs]:
        if v.space != space:
            raise MixedSpaces(f"{v.name!r} is not on space {space.id!r}")
    if not set(x.image) <= {0, 1}:
        raise DegenerateTreatment(f"treatment {x.name!r} is not binary")
    return list(zs[:k])


def _cell_masses(space, x, zk) -> dict:
    """cell -> [mass with X=0, mass with X=1] over the product image."""
    masses = {c: [Fraction(0), Fraction(0)] for c in _cartesian(*(z.image for z in zk))}
    for i, m in enumerate(space.masses):
        cell = tuple(z.values[i] for z in zk)
        masses[cell][x.values[i]] += m
    return masses


def matchable_values(space: FiniteProbabilitySpace, x: RandomVariable, zs: Sequence[RandomVariable], k: int) -> set:
    zk = _check(space, x, zs, k)
    return {c for c, (m0, m1) in _cell_masses(space, x, zk).items() if m0 > 0 and m1 > 0}


def matched_support(space: FiniteProbabilitySpace, x: RandomVariable, zs: Sequence[RandomVariable], k: int) -> Event:
    zk = _check(space, x, zs, k)
    cells = matchable_values(space, x, zs, k)
    return Event(
        space.id,
        frozenset(a for i, a in enumerate(space.ids) if tuple(z.values[i] for z in zk) in cells),
    )


@dataclass
class MatchLevel:
    k: int
    matchable: set
    support: Event
    measure: Fraction


@dataclass
class MatchReport:
    levels: list
    nested: bool
    measures_decreasing: bool
    estimate: MatchEstimate | None = None

    def __bool__(self):
        return self.nested and self.measures_decreasing


def nesting_report(space: FiniteProbabilitySpace, x: RandomVariable, zs: Sequence[RandomVariable]) -> MatchReport:
    if not zs:
        raise UnknownCovariate("need at least one covariate")
    levels = []
    for k in range(1, len(zs) + 1):
        support = matched_support(space, x, zs, k)
        levels.append(MatchLevel(k, matchable_values(space, x, zs, k), support, space.measure(support)))
    nested = all(b.support.members <= a.support.members for a, b in zip(levels, levels[1:]))
    decreasing = all(a.measure >= b.measure for a, b in zip(levels, levels[1:]))
    return MatchReport(levels, nested, decreasing)


@dataclass
class MatchEstimate:
    n_pairs: int
    estimate: float
    cell_pairs: dict
    pairs: list = field(repr=False, default_factory=list)
    policy: str = PAIRING_POLICY


def matched_estimate(
    samples: SampleBatch,
    x: RandomVariable,
    y: RandomVariable,
    zs: Sequence[RandomVariable],
    k: int,
    seed: int,
) -> MatchEstimate:
    """Pair treated with untreated draws that agree on the first ``k`` covariates
    and average the within-pair outcome differences.

    ``pairs`` holds ``(treated draw index, untreated draw index)`` tuples.
    """
    space = x.space
    if samples.space_id != space.id:
        raise MixedSpaces(f"batch is from space {samples.space_id!r}, not {space.id!r}")
    zk = _check(space, x, zs, k)
    if y.space != space:
        raise MixedSpaces(f"{y.name!r} is not on space {space.id!r}")
    pos = {a: i for i, a in enumerate(space.ids)}
    arms = defaultdict(lambda: ([], []))
    for n, atom in enumerate(samples.draws):
        i = pos.get(atom)
        if i is None:
            raise MixedSpaces(f"draw {atom!r} is not an atom of space {space.id!r}")
        arms[tuple(z.values[i] for z in zk)][x.values[i]].append(n)

    rng = SplitMix64(seed)
    pairs = []
    cell_pairs = {}
    for cell in sorted(arms):
        untreated, treated = arms[cell]
        shuffle(treated, rng)
        shuffle(untreated, rng)
        m = min(len(treated), len(untreated))
        if m:
            cell_pairs[cell] = m
            pairs.extend(zip(treated[:m], untreated[:m]))
    if not pairs:
        raise NoPairsFound("no matched pairs in the sample")
    yv = [y.values[pos[a]] for a in samples.draws]
    diff = sum(yv[t] - yv[u] for t, u in pairs)
    return MatchEstimate(len(pairs), diff / len(pairs), cell_pairs, pairs)


def matched_population_limit(
    space: FiniteProbabilitySpace, x: RandomVariable, y: RandomVariable, zs: Sequence[RandomVariable], k: int
) -> Fraction:
    """Diagnostic large-sample value of the matched estimate.

    Weighted average over matchable cells of ``E[Y|X=1,z] - E[Y|X=0,z]`` with
    weights ``min(P(X=1,z), P(X=0,z))`` (the expected pair share per cell).
    This is an implementation-defined diagnostic.
    """
    zk = _check(space, x, zs, k)
    mass = defaultdict(lambda: [Fraction(0), Fraction(0)])
    ysum = defaultdict(lambda: [Fraction(0), Fraction(0)])
    for i, m in enumerate(space.masses):
        cell = tuple(z.values[i] for z in zk)
        mass[cell][x.values[i]] += m
        ysum[cell][x.values[i]] += m * y.values[i]
    num = Fraction(0)
    den = Fraction(0)
    for cell, (m0, m1) in mass.items():
        if m0 > 0 and m1 > 0:
            w = min(m0, m1)
            num += w * (ysum[cell][1] / m1 - ysum[cell][0] / m0)
            den += w
    if den == 0:
        raise NoPairsFound("no matchable covariate cell")
    return num / den
