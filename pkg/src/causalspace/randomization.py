"""Experimental randomization as an explicit product space.

Given an OCS on ``Omega`` and a randomizer ``(Omega_R, P_R)`` carrying one
variable per treatment, the randomized system lives on ``Omega x Omega_R``::

    X~(w, r) = X_R(r)
    Y~(w, r) = sum_x I_{X_R = x}(r) * Y_{X = x}(w)

The observed treatment of the source system plays no part in ``Y~``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as _cartesian
from typing import Mapping, Sequence

from .errors import DegenerateRandomizer, ImageMismatch, MixedSpaces, UnknownVariable
from .ocs import ObservableCausalSystem, member_name
from .space import FiniteProbabilitySpace, make_space, product, relabel
from .variables import (
    Law,
    RandomVariable,
    conditional_law,
    law,
    level_set,
)

RANDOMIZER_PREFIX = "R:"


@dataclass(frozen=True, eq=False)
class RandomizerSpec:
    space: FiniteProbabilitySpace
    variables: Mapping[str, RandomVariable]

    def __post_init__(self):
        for name, v in self.variables.items():
            if v.space != self.space:
                raise MixedSpaces(f"randomizer variable for {name!r} is not on the randomizer space")


def fair_randomizer(images: Mapping[str, Sequence[int]]) -> RandomizerSpec:
    """Independent uniform arms over each treatment image."""
    names = list(images)
    cells = list(_cartesian(*(tuple(images[n]) for n in names)))
    atom_ids = ["r" + "".join(str(v) for v in c) if len(c) else "r" for c in cells]
    atom_ids = [f"r{i}" for i in range(len(cells))] if len(set(atom_ids)) != len(atom_ids) else atom_ids
    mass = Fraction(1, len(cells))
    space = make_space([(a, mass) for a in atom_ids], space_id="R")
    variables = {
        n: RandomVariable(f"{n}_R", space, tuple(c[j] for c in cells)) for j, n in enumerate(names)
    }
    return RandomizerSpec(space, variables)


def binary_randomizer(p_treated, name: str = "X") -> RandomizerSpec:
    """Two-atom coin with ``P(X_R = 1) = p_treated``."""
    p = Fraction(p_treated)
    space = make_space([("r0", 1 - p), ("r1", p)], space_id="R")
    return RandomizerSpec(space, {name: RandomVariable(f"{name}_R", space, (0, 1))})


@dataclass
class RandomizedSystem:
    space: FiniteProbabilitySpace
    treatments: tuple
    lifted_treatments: dict            # name -> X~ on the product space
    outcomes: dict                     # observable name -> Y~
    lifted_potential_outcomes: dict    # (target, value tuple) -> lifted Y_{x}
    source: ObservableCausalSystem
    spec: RandomizerSpec
    randomizer_space: FiniteProbabilitySpace = field(repr=False, default=None)

    def treatment(self, name: str | None = None) -> RandomVariable:
        return self.lifted_treatments[name or self.treatments[0]]

    def outcome(self, name: str) -> RandomVariable:
        try:
            return self.outcomes[name]
        except KeyError:
            raise UnknownVariable(f"no randomized outcome for {name!r}") from None

    def arm_event(self, values: Sequence[int]):
        return level_set([self.lifted_treatments[n] for n in self.treatments], values)


def _check_spec(ocs: ObservableCausalSystem, treatments: Sequence[str], spec: RandomizerSpec) -> None:
    for n in treatments:
        if n not in spec.variables:
            raise ImageMismatch(f"randomizer has no variable for treatment {n!r}")
        have = set(spec.variables[n].image)
        need = set(ocs.variable(n).image)
        if not need <= have:
            raise ImageMismatch(
                f"randomizer for {n!r} takes values {sorted(have)}, treatment image is {sorted(need)}"
            )
    rvars = [spec.variables[n] for n in treatments]
    arms = list(_cartesian(*(ocs.variable(n).image for n in treatments)))
    for arm in arms:
        p = spec.space.measure(level_set(rvars, arm))
        if not 0 < p < 1:
            raise DegenerateRandomizer(
                f"randomizer arm {dict(zip(treatments, arm))} has mass {p}; need 0 < mass < 1"
            )


def _randomize(ocs: ObservableCausalSystem, treatments: Sequence[str], spec: RandomizerSpec | None) -> RandomizedSystem:
    treatments = tuple(treatments)
    for n in treatments:
        ocs.variable(n)
    if spec is None:
        spec = fair_randomizer({n: ocs.variable(n).image for n in treatments})
    _check_spec(ocs, treatments, spec)

    rspace = relabel(spec.space, RANDOMIZER_PREFIX, space_id=spec.space.id)
    big = product(ocs.space, rspace)
    n_r = len(rspace)

    def lift_omega(v: RandomVariable, name: str) -> RandomVariable:
        return RandomVariable(name, big, tuple(x for x in v.values for _ in range(n_r)))

    def lift_r(v: RandomVariable, name: str) -> RandomVariable:
        return RandomVariable(name, big, tuple(v.values) * len(ocs.space))

    lifted_t = {n: lift_r(spec.variables[n], f"{n}~") for n in treatments}
    arms = list(_cartesian(*(ocs.variable(n).image for n in treatments)))
    rvars = [spec.variables[n] for n in treatments]
    arm_of_r = [tuple(v.values[j] for v in rvars) for j in range(n_r)]

    outcomes = {}
    lifted_po = {}
    for target in ocs.names:
        if target in treatments:
            continue
        fam = ocs.partial_family(target, treatments)
        # re-key by treatment order (partial families follow observable order)
        order = [fam.index.index(n) for n in treatments]
        members = {tuple(k[i] for i in order): m for k, m in fam.table.items()}
        for arm in arms:
            lifted_po[(target, arm)] = lift_omega(
                members[arm], member_name(target, tuple(zip(treatments, arm))) + "~"
            )
        vals = []
        for i in range(len(ocs.space)):
            for j in range(n_r):
                arm = arm_of_r[j]
                # outside the treatment image every indicator is 0
                vals.append(members[arm].values[i] if arm in members else 0)
        outcomes[target] = RandomVariable(f"{target}~", big, tuple(vals))
    return RandomizedSystem(big, treatments, lifted_t, outcomes, lifted_po, ocs, spec, rspace)


def randomize(ocs: ObservableCausalSystem, treatment: str, spec: RandomizerSpec | None = None) -> RandomizedSystem:
    """Experimental randomization of a single treatment (fair coin by default)."""
    return _randomize(ocs, [treatment], spec)


def joint_randomize(ocs: ObservableCausalSystem, treatments: Sequence[str], spec: RandomizerSpec | None = None) -> RandomizedSystem:
    """Joint randomization; the randomizer variables may be correlated."""
    if len(treatments) < 2:
        raise ValueError("joint randomization needs at least two treatments")
    return _randomize(ocs, treatments, spec)


@dataclass
class ArmCheck:
    target: str
    arm: tuple
    observed: Law
    potential: Law

    @property
    def equal(self) -> bool:
        return dict(self.observed) == dict(self.potential)


@dataclass
class RandomizationReport:
    checks: list

    @property
    def holds(self) -> bool:
        return all(c.equal for c in self.checks)

    def __bool__(self):
        return self.holds


def verify_randomization_identity(rs: RandomizedSystem, targets: Sequence[str] | None = None) -> RandomizationReport:
    """Compare ``P(Y~ | X~ = x)`` with the law of ``Y_{X=x}`` on the source space, per arm."""
    targets = list(targets) if targets is not None else list(rs.outcomes)
    checks = []
    for target in targets:
        y = rs.outcome(target)
        fam = rs.source.partial_family(target, rs.treatments)
        order = [fam.index.index(n) for n in rs.treatments]
        members = {tuple(k[i] for i in order): m for k, m in fam.table.items()}
        for arm, m in sorted(members.items()):
            observed = conditional_law([y], rs.arm_event(arm))
            checks.append(ArmCheck(target, arm, observed, law([m])))
    return RandomizationReport(checks)
