"""Observable causal systems.

An :class:`ObservableCausalSystem` holds observables ``X^1..X^n`` on one finite
space plus, for each observable, a *complete* potential-outcome family indexed by
every observable (self-referential index included).  Partial families are
derived by contraction::

    X^i_{x^S}(w) = sum over x^{not S} of I_{X^{not S} = x^{not S}}(w) * X^i_{x}(w)

Everything here is exact; "nonzero measure" always means strictly positive
rational mass.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from itertools import product as _cartesian
from typing import Iterator, Mapping, Sequence

from .errors import (
    IncompleteFamily,
    MixedSpaces,
    NonBinaryTreatment,
    SelfReferentialSource,
    UnknownIndexVariable,
    UnknownTarget,
    UnknownVariable,
)
from .space import Event, FiniteProbabilitySpace
from .variables import (
    Assignment,
    AssignmentLike,
    RandomVariable,
    as_assignment,
    expectation,
    format_assignment,
    level_set,
)


@dataclass(frozen=True, eq=False)
class PotentialOutcomeFamily:
    """``{target_{index = x}}`` for every value tuple ``x`` of the index variables.

    ``table`` is keyed by value tuples aligned with ``index``.
    """

    target: str
    index: tuple
    table: Mapping

    def key(self, a: AssignmentLike) -> tuple:
        a = dict(as_assignment(a))
        if set(a) != set(self.index):
            raise UnknownIndexVariable(
                f"assignment over {sorted(a)} does not match family index {list(self.index)}"
            )
        return tuple(a[n] for n in self.index)

    def member(self, a: AssignmentLike) -> RandomVariable:
        k = self.key(a)
        try:
            return self.table[k]
        except KeyError:
            raise IncompleteFamily(
                f"family {self.target!r} has no member for {format_assignment(self.assignment(k))}"
            ) from None

    def assignment(self, key: tuple) -> Assignment:
        return tuple(zip(self.index, key))

    def items(self):
        return self.table.items()

    def members(self) -> list:
        return list(self.table.values())

    @property
    def space(self) -> FiniteProbabilitySpace:
        return next(iter(self.table.values())).space

    def same_as(self, other: PotentialOutcomeFamily) -> bool:
        """Entrywise and atomwise equality."""
        return (
            self.target == other.target
            and tuple(self.index) == tuple(other.index)
            and set(self.table) == set(other.table)
            and all(self.table[k].values == other.table[k].values for k in self.table)
        )


def member_name(target: str, a: Assignment) -> str:
    if not a:
        return target
    return f"{target}_[{format_assignment(a)}]"


def _observable_map(observables) -> dict:
    if isinstance(observables, Mapping):
        return dict(observables)
    return {v.name: v for v in observables}


def contract(family: PotentialOutcomeFamily, over, observables) -> PotentialOutcomeFamily:
    """Remove the indices in ``over`` by summing indicator x member atomwise.

    ``observables`` supplies the indicator variables (a name -> variable mapping
    or a sequence of variables).  Partial families are accepted as input.
    """
    obs = _observable_map(observables)
    over = set(over)
    unknown = over - set(family.index)
    if unknown:
        raise UnknownIndexVariable(
            f"cannot contract {sorted(unknown)}: not in family index {list(family.index)}"
        )
    if not over:
        return PotentialOutcomeFamily(family.target, tuple(family.index), dict(family.table))
    for n in family.index:
        if n not in obs:
            raise UnknownVariable(f"index variable {n!r} is not an observable")

    keep = [n for n in family.index if n not in over]
    removed = [n for n in family.index if n in over]
    rem_vars = [obs[n] for n in removed]
    space = rem_vars[0].space
    natoms = len(space)
    rem_assignments = list(_cartesian(*(v.image for v in rem_vars)))
    # indicator columns I_{removed = r}, evaluated once per removed assignment
    indicators = [
        tuple(int(all(v.values[i] == r[j] for j, v in enumerate(rem_vars))) for i in range(natoms))
        for r in rem_assignments
    ]

    table = {}
    for k in _cartesian(*(obs[n].image for n in keep)):
        merged = dict(zip(keep, k))
        acc = [0] * natoms
        for r, ind in zip(rem_assignments, indicators):
            merged.update(zip(removed, r))
            full = tuple(merged[n] for n in family.index)
            try:
                src = family.table[full]
            except KeyError:
                raise IncompleteFamily(
                    f"family {family.target!r} has no member for "
                    f"{format_assignment(family.assignment(full))}"
                ) from None
            for i in range(natoms):
                acc[i] += ind[i] * src.values[i]
        a = tuple(zip(keep, k))
        table[tuple(k)] = RandomVariable(member_name(family.target, a), space, tuple(acc))
    return PotentialOutcomeFamily(family.target, tuple(keep), table)


# -- the system ---------------------------------------------------------------

@dataclass
class Violation:
    axiom: int
    family: str
    assignment: Assignment
    atom: str | None = None
    detail: str = ""

    def __str__(self):
        where = f" at atom {self.atom!r}" if self.atom is not None else ""
        return f"axiom {self.axiom} violated by family {self.family!r} {format_assignment(self.assignment)}{where}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "valid observable causal system"
        return "\n".join(str(v) for v in self.violations)


class ObservableCausalSystem:
    """Observables plus complete potential-outcome families.

    Instances are treated as immutable.  Partial families obtained by contraction
    are memoized per ``(target, S)``; the memo is only an optimization.
    """

    def __init__(
        self,
        space: FiniteProbabilitySpace,
        observables: Sequence[RandomVariable],
        families: Mapping[str, PotentialOutcomeFamily],
    ):
        self.space = space
        self.observables = tuple(observables)
        for v in self.observables:
            if v.space != space:
                raise MixedSpaces(f"observable {v.name!r} is not on space {space.id!r}")
        self.names = tuple(v.name for v in self.observables)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate observable names in {self.names}")
        self.obs = {v.name: v for v in self.observables}
        self.families = dict(families)
        self._memo: dict = {}
        self._lock = threading.Lock()

    @classmethod
    def from_partial(
        cls,
        space: FiniteProbabilitySpace,
        observables: Sequence[RandomVariable],
        families: Mapping[str, PotentialOutcomeFamily] | None = None,
    ) -> ObservableCausalSystem:
        """Complete possibly partial families by broadcasting over absent indices.

        A family indexed by ``S`` becomes the complete family whose member at ``x``
        is the given member at ``x^S``; contracting it over the complement of ``S``
        returns the given family.  Observables without a family get the
        self-determined family ``X^i_x = x_i``.
        """
        observables = tuple(observables)
        names = tuple(v.name for v in observables)
        families = dict(families or {})
        complete = {}
        for v in observables:
            fam = families.pop(v.name, None)
            if fam is None:
                complete[v.name] = self_determined_family(space, observables, v.name)
            else:
                complete[v.name] = lift_family(fam, observables)
        if families:
            raise UnknownTarget(f"families given for non-observables: {sorted(families)}")
        return cls(space, observables, complete)

    # -- lookups ---------------------------------------------------------------

    def variable(self, name: str) -> RandomVariable:
        try:
            return self.obs[name]
        except KeyError:
            raise UnknownVariable(f"{name!r} is not an observable of this system") from None

    def complete_family(self, target: str) -> PotentialOutcomeFamily:
        if target not in self.obs:
            raise UnknownTarget(f"{target!r} is not an observable of this system")
        try:
            return self.families[target]
        except KeyError:
            raise UnknownTarget(f"observable {target!r} has no potential-outcome family") from None

    def ordered(self, names) -> tuple:
        names = list(names)
        for n in names:
            if n not in self.obs:
                raise UnknownIndexVariable(f"{n!r} is not an observable of this system")
        return tuple(n for n in self.names if n in set(names))

    def partial_family(self, target: str, S) -> PotentialOutcomeFamily:
        """Family of ``target`` indexed by ``S`` (contracted over the complement)."""
        S = self.ordered(S)
        key = (target, S)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        fam = self.complete_family(target)
        out = contract(fam, [n for n in fam.index if n not in S], self.obs)
        with self._lock:
            return self._memo.setdefault(key, out)

    def joint_image(self, names) -> list:
        return list(_cartesian(*(self.obs[n].image for n in names)))


def self_determined_family(space, observables, name: str) -> PotentialOutcomeFamily:
    """``X^name_x = x_name``: consistent with any observables."""
    names = tuple(v.name for v in observables)
    pos = names.index(name)
    table = {}
    for k in _cartesian(*(v.image for v in observables)):
        table[k] = RandomVariable(
            member_name(name, tuple(zip(names, k))), space, (k[pos],) * len(space)
        )
    return PotentialOutcomeFamily(name, names, table)


def lift_family(family: PotentialOutcomeFamily, observables) -> PotentialOutcomeFamily:
    names = tuple(v.name for v in observables)
    unknown = [n for n in family.index if n not in names]
    if unknown:
        raise UnknownIndexVariable(f"family {family.target!r} indexed by non-observables {unknown}")
    if tuple(family.index) == names:
        return family
    table = {}
    for k in _cartesian(*(v.image for v in observables)):
        sub = tuple(k[names.index(n)] for n in family.index)
        src = family.table.get(sub)
        if src is None:
            continue  # left missing on purpose: validate() reports it
        table[k] = RandomVariable(member_name(family.target, tuple(zip(names, k))), src.space, src.values)
    return PotentialOutcomeFamily(family.target, names, table)


# -- operations ---------------------------------------------------------------

def validate(ocs: ObservableCausalSystem) -> ValidationReport:
    """Check existence (axiom 1) and observational consistency (axiom 2)."""
    report = ValidationReport()
    names = ocs.names
    full = ocs.joint_image(names)
    for name in names:
        fam = ocs.families.get(name)
        if fam is None:
            report.violations.append(Violation(1, name, (), None, "no complete potential-outcome family"))
            continue
        if tuple(fam.index) != names:
            report.violations.append(
                Violation(1, name, (), None, f"index {list(fam.index)} is not the observable tuple {list(names)}")
            )
            continue
        for k in full:
            m = fam.table.get(k)
            if m is None:
                report.violations.append(Violation(1, name, tuple(zip(names, k)), None, "missing member"))
            elif m.space != ocs.space:
                report.violations.append(Violation(1, name, tuple(zip(names, k)), None, "member on a different space"))
        extra = set(fam.table) - set(full)
        for k in sorted(extra):
            report.violations.append(
                Violation(1, name, tuple(zip(names, k)), None, "member indexed outside the product image")
            )
    for i, atom in enumerate(ocs.space.ids):
        x = tuple(ocs.obs[n].values[i] for n in names)
        for pos, name in enumerate(names):
            fam = ocs.families.get(name)
            if fam is None or tuple(fam.index) != names:
                continue
            m = fam.table.get(x)
            if m is None:
                continue
            if m.values[i] != x[pos]:
                report.violations.append(
                    Violation(2, name, tuple(zip(names, x)), atom, f"value {m.values[i]} but observed {x[pos]}")
                )
    return report


def fully_contract(ocs: ObservableCausalSystem, target: str) -> RandomVariable:
    """Contract the complete family of ``target`` over every index."""
    fam = ocs.partial_family(target, ())
    return fam.table[()].renamed(target)


def contraction_mismatches(ocs: ObservableCausalSystem, target: str) -> list:
    """Atoms where the fully contracted family differs from the observable."""
    full = fully_contract(ocs, target)
    obs = ocs.variable(target)
    return [a for a, u, v in zip(ocs.space.ids, full.values, obs.values) if u != v]


def identified_set(ocs: ObservableCausalSystem, target: str, a: AssignmentLike) -> Event:
    """Where ``target_{a}`` is forced by observational consistency: ``{X^S = x^S}``."""
    ocs.complete_family(target)
    a = as_assignment(a)
    if not a:
        return ocs.space.whole
    names = [n for n, _ in a]
    for n in names:
        if n not in ocs.obs:
            raise UnknownIndexVariable(f"{n!r} is not an observable of this system")
    return level_set([ocs.obs[n] for n in names], [v for _, v in a])


def identified_sets(ocs: ObservableCausalSystem, target: str, S) -> dict:
    S = ocs.ordered(S)
    return {
        tuple(zip(S, k)): identified_set(ocs, target, tuple(zip(S, k))) for k in ocs.joint_image(S)
    }


def fundamental_problem_check(ocs: ObservableCausalSystem, target: str, S) -> bool:
    """Identified sets over ``S`` are pairwise disjoint and cover the space."""
    sets = list(identified_sets(ocs, target, S).values())
    for e1, e2 in combinations(sets, 2):
        if e1.members & e2.members:
            return False
    union = frozenset().union(*(e.members for e in sets)) if sets else frozenset()
    return union == ocs.space.whole.members


def disagreement(u: RandomVariable, v: RandomVariable) -> Event:
    return Event(u.space.id, frozenset(a for a, x, y in zip(u.space.ids, u.values, v.values) if x != y))


def disagreement_event(family: PotentialOutcomeFamily) -> Event:
    """Atoms where the members of ``family`` are not all equal."""
    members = family.members()
    space = members[0].space
    return Event(
        space.id,
        frozenset(a for i, a in enumerate(space.ids) if len({m.values[i] for m in members}) > 1),
    )


@dataclass
class CausalReport:
    causal: bool
    witness: Event
    witness_measure: Fraction
    pair: tuple | None
    source: tuple = ()
    target: str = ""

    def __bool__(self):
        return self.causal

    def __str__(self):
        src = ",".join(self.source)
        if not self.causal:
            return f"{src} is not causal for {self.target}"
        a, b = self.pair
        return (
            f"{src} is causal for {self.target}: {member_name(self.target, a)} != "
            f"{member_name(self.target, b)} on {sorted(self.witness.members)} "
            f"(measure {self.witness_measure})"
        )


def _best_pair(family: PotentialOutcomeFamily, pairs, space) -> CausalReport:
    best = None
    for ka, kb in pairs:
        e = disagreement(family.table[ka], family.table[kb])
        m = space.measure(e)
        if m > 0 and (best is None or m > best[0]):
            best = (m, e, (family.assignment(ka), family.assignment(kb)))
    if best is None:
        return CausalReport(False, space.empty, Fraction(0), None)
    return CausalReport(True, best[1], best[0], best[2])


def family_is_causal(family: PotentialOutcomeFamily) -> CausalReport:
    """Do members of ``family`` differ pairwise on a set of positive measure?"""
    keys = sorted(family.table)
    report = _best_pair(family, combinations(keys, 2), family.space)
    report.source = tuple(family.index)
    report.target = family.target
    return report


def is_causal(ocs: ObservableCausalSystem, source, target: str) -> CausalReport:
    """Generalized causality test of the set ``source`` for ``target``."""
    source = list(source) if not isinstance(source, str) else [source]
    if not source:
        raise ValueError("source set must be non-empty")
    for n in list(source) + [target]:
        if n not in ocs.obs:
            raise UnknownVariable(f"{n!r} is not an observable of this system")
    if target in source:
        raise SelfReferentialSource(f"{target!r} cannot be a source for itself")
    return family_is_causal(ocs.partial_family(target, source))


@dataclass
class ConditionReport:
    source: str
    context: Assignment | None
    report: CausalReport

    @property
    def holds(self) -> bool:
        return self.report.causal


@dataclass
class JointCausalReport:
    jointly_causal: bool
    conditions: tuple
    extension: bool = False

    def __bool__(self):
        return self.jointly_causal


def is_jointly_causal(ocs: ObservableCausalSystem, names, target: str) -> JointCausalReport:
    """Each member must be causal for the target's potential outcome at some
    fixed value of the remaining members.

    For a pair ``(first, second)`` the conditions are reported in the order
    (second causal for ``target_{first=x}``), (first causal for ``target_{second=z}``).
    Sets of three or more use the all-complements generalization and are
    flagged with ``extension=True``.
    """
    names = list(names)
    if len(names) < 2 or len(set(names)) != len(names):
        raise ValueError("joint causality needs at least two distinct variables")
    for n in names + [target]:
        if n not in ocs.obs:
            raise UnknownVariable(f"{n!r} is not an observable of this system")
    if target in names:
        raise SelfReferentialSource(f"{target!r} cannot be a source for itself")
    fam = ocs.partial_family(target, names)
    index = fam.index
    order = [names[1], names[0]] if len(names) == 2 else names
    conditions = []
    for src in order:
        others = [n for n in index if n != src]
        best = None
        for ctx in ocs.joint_image(others):
            ctx_map = dict(zip(others, ctx))
            keys = []
            for v in ocs.obs[src].image:
                ctx_map[src] = v
                keys.append(tuple(ctx_map[n] for n in index))
            rep = _best_pair(fam, combinations(keys, 2), ocs.space)
            rep.source = (src,)
            rep.target = member_name(target, tuple(zip(others, ctx)))
            if best is None or rep.witness_measure > best.report.witness_measure:
                best = ConditionReport(src, tuple(zip(others, ctx)), rep)
        conditions.append(best)
    joint = all(c.holds for c in conditions)
    return JointCausalReport(joint, tuple(conditions), extension=len(names) > 2)


def _binary_arms(v: RandomVariable) -> None:
    if set(v.image) != {0, 1}:
        raise NonBinaryTreatment(f"treatment {v.name!r} must take both values 0 and 1; image {v.image}")


def ace_of_family(family: PotentialOutcomeFamily) -> Fraction:
    if len(family.index) != 1 or set(k[0] for k in family.table) != {0, 1}:
        raise NonBinaryTreatment(f"family {family.target!r} is not indexed by one binary treatment")
    return expectation(family.table[(1,)]) - expectation(family.table[(0,)])


def ace(ocs: ObservableCausalSystem, treatment: str, target: str) -> Fraction:
    """``E[target_{treatment=1}] - E[target_{treatment=0}]`` over the contracted family."""
    _binary_arms(ocs.variable(treatment))
    ocs.variable(target)
    if treatment == target:
        raise SelfReferentialSource(f"{target!r} cannot be its own treatment")
    return ace_of_family(ocs.partial_family(target, [treatment]))


# -- consistent completions ---------------------------------------------------

@dataclass
class Enumeration:
    completions: list
    truncated: bool
    total: int
    cells: list


def unidentified_cells(x: RandomVariable) -> list:
    """(atom, arm) pairs where ``Y_arm`` is not forced, atom-major then arm-minor."""
    return [(a, arm) for a, xv in zip(x.space.ids, x.values) for arm in (0, 1) if xv != arm]


def iter_consistent(space: FiniteProbabilitySpace, x: RandomVariable, y: RandomVariable) -> Iterator[tuple]:
    """Every ``(Y0, Y1)`` with ``Y = I0*Y0 + I1*Y1``, in odometer order over the free cells."""
    if x.space != space or y.space != space:
        raise MixedSpaces("x and y must live on the given space")
    if not set(x.image) <= {0, 1}:
        raise NonBinaryTreatment(f"treatment {x.name!r} is not binary: image {x.image}")
    cells = unidentified_cells(x)
    values = y.image
    base = {0: list(y.values), 1: list(y.values)}
    for digits in _cartesian(values, repeat=len(cells)):
        arms = {0: list(base[0]), 1: list(base[1])}
        for (atom, arm), d in zip(cells, digits):
            arms[arm][space.index(atom)] = d
        yield (
            RandomVariable(f"{y.name}_[{x.name}=0]", space, tuple(arms[0])),
            RandomVariable(f"{y.name}_[{x.name}=1]", space, tuple(arms[1])),
        )


def enumerate_consistent(space: FiniteProbabilitySpace, x: RandomVariable, y: RandomVariable, cap: int) -> Enumeration:
    if cap <= 0:
        raise ValueError("cap must be positive")
    cells = unidentified_cells(x) if set(x.image) <= {0, 1} else None
    out = []
    it = iter_consistent(space, x, y)
    for pair in it:
        if len(out) == cap:
            return Enumeration(out, True, len(y.image) ** len(cells), cells)
        out.append(pair)
    return Enumeration(out, False, len(y.image) ** len(cells), cells)
