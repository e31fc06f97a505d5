"""In-memory model document: space, variables, optional geometry, families, sections."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .errors import NoGeometry, UnknownVariable
from .geometry import Atomization, atomize
from .matching import MatchConfig
from .ocs import ObservableCausalSystem, validate
from .randomization import RandomizerSpec
from .space import FiniteProbabilitySpace, make_space
from .variables import RandomVariable, variable


@dataclass(eq=False)
class Model:
    name: str
    space: FiniteProbabilitySpace
    variables: dict                      # name -> RandomVariable, document order
    geometry: dict | None = None         # atom id -> tuple of polygons
    observables: tuple = ()
    families: dict = field(default_factory=dict)   # target -> family as written
    randomizer: RandomizerSpec | None = None
    matching: MatchConfig | None = None
    labels: dict = field(default_factory=dict)     # name -> {text: integer code}

    def variable(self, name: str) -> RandomVariable:
        try:
            return self.variables[name]
        except KeyError:
            raise UnknownVariable(f"model {self.name!r} has no variable {name!r}") from None

    @cached_property
    def ocs(self) -> ObservableCausalSystem:
        names = self.observables or tuple(self.variables)
        return ObservableCausalSystem.from_partial(
            self.space, [self.variable(n) for n in names], self.families
        )

    def validate(self):
        return validate(self.ocs)

    def require_geometry(self) -> dict:
        if not self.geometry:
            raise NoGeometry(f"model {self.name!r} has no geometry section")
        return self.geometry


def from_atomization(name: str, at: Atomization, observables=None, families=None) -> Model:
    space = make_space(at.atoms)
    variables = {n: variable(space, n, at.values[n]) for n in at.names}
    return Model(
        name,
        space,
        variables,
        geometry=dict(at.regions),
        observables=tuple(observables or ()),
        families=dict(families or {}),
    )


def atomize_geometry(layers, defaults=None, name: str = "model", rename=None) -> Model:
    """Model whose atoms are the cells of the common refinement of ``layers``.

    ``layers`` maps each variable to ``{value: [polygon, ...]}``; see
    :func:`causalspace.geometry.atomize`.  ``rename`` optionally maps the
    generated ``X=1,Y=0`` style ids to shorter ones.
    """
    at = atomize(layers, defaults)
    if rename:
        at = at.rename(rename)
    return from_atomization(name, at)
