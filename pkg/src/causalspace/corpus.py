"""Bundled example models, built from square-space region descriptions.

``build_all()`` reconstructs every bundled model from geometry; the files in
``causalspace/data`` are its output and ``write_corpus()`` regenerates them.  ``bundled(name)`` loads a shipped file.
"""

from __future__ import annotations

import os
from fractions import Fraction
from importlib import resources

from .geometry import rect
from .model import Model, atomize_geometry
from .matching import MatchConfig
from .modelio import dump_model, parse_model, save_model
from .ocs import PotentialOutcomeFamily
from .space import make_space
from .variables import RandomVariable, variable

H = Fraction(1, 2)

UPPER = rect(0, H, 1, 1)
LOWER = rect(0, 0, 1, H)
LEFT = rect(0, 0, H, 1)
RIGHT = rect(H, 0, 1, 1)
# Y = 1 above the anti-diagonal x + y = 1
ABOVE_DIAGONAL = ((1, 0), (1, 1), (0, 1))
BELOW_DIAGONAL = ((0, 0), (1, 0), (0, 1))

DIAGONAL_LAYERS = {
    "X": {1: [UPPER], 0: [LOWER]},
    "Y": {1: [ABOVE_DIAGONAL], 0: [BELOW_DIAGONAL]},
}
DIAGONAL_NAMES = {"X=1,Y=1": "A", "X=1,Y=0": "B", "X=0,Y=1": "C", "X=0,Y=0": "D"}


def diagonal() -> Model:
    """Upper half is X = 1, the triangle above the anti-diagonal is Y = 1."""
    m = atomize_geometry(DIAGONAL_LAYERS, name="diagonal", rename=DIAGONAL_NAMES)
    m.observables = ("X", "Y")
    return m


# The fine atomization splits D (X = 0, Y = 0) into a triangle and a square.
_SPLIT = {
    1: [rect(0, 0, H, H)],
    0: [((H, 0), (1, 0), (1, 1), (0, 1), (0, H), (H, H))],
}
EFFECT_NAMES = {
    "X=1,Y=1,S=0": "A",
    "X=1,Y=0,S=0": "B",
    "X=0,Y=1,S=0": "C",
    "X=0,Y=0,S=0": "D1",
    "X=0,Y=0,S=1": "D2",
}
# (Y_{X=0}, Y_{X=1}) on atoms A, B, C, D1, D2
EFFECT_FAMILIES = {
    "none": ((1, 0, 1, 0, 0), (1, 0, 1, 0, 0)),
    "negative": ((1, 1, 1, 0, 0), (1, 0, 0, 0, 0)),
    "cancelling": ((1, 1, 1, 0, 0), (1, 0, 1, 1, 0)),
}


def effect_space() -> Model:
    m = atomize_geometry({**DIAGONAL_LAYERS, "S": _SPLIT}, name="effect", rename=EFFECT_NAMES)
    del m.variables["S"]
    m.observables = ("X", "Y")
    return m


def effect(kind: str) -> Model:
    """Diagonal model with D split in two, plus one of three consistent (Y0, Y1) families."""
    m = effect_space()
    m.name = f"effect_{kind}"
    y0, y1 = EFFECT_FAMILIES[kind]
    v0 = RandomVariable("Y0", m.space, y0)
    v1 = RandomVariable("Y1", m.space, y1)
    m.variables.update({"Y0": v0, "Y1": v1})
    m.families = {"Y": PotentialOutcomeFamily("Y", ("X",), {(0,): v0, (1,): v1})}
    return m


QUADRANT_NAMES = {"X=1,Z=1": "UL", "X=1,Z=0": "UR", "X=0,Z=1": "LL", "X=0,Z=0": "LR"}


def _quadrants(name: str) -> Model:
    m = atomize_geometry(
        {"X": {1: [UPPER], 0: [LOWER]}, "Z": {1: [LEFT], 0: [RIGHT]}},
        name=name,
        rename=QUADRANT_NAMES,
    )
    return m


def _indicator(m: Model, name: str, atoms) -> RandomVariable:
    return variable(m.space, name, {a: int(a in atoms) for a in m.space.ids})


def _xz_family(m: Model, members: dict) -> None:
    """Install ``Y`` indexed by (X, Z); ``members`` maps (x, z) to the atoms where it is 1."""
    table = {}
    for (x, z), atoms in members.items():
        v = _indicator(m, f"Y{x}{z}", atoms)
        m.variables[v.name] = v
        table[(x, z)] = v
    m.families = {"Y": PotentialOutcomeFamily("Y", ("X", "Z"), table)}


def joint_only() -> Model:
    """Each complete potential outcome is the indicator of one quadrant; Y is 0."""
    m = _quadrants("joint_only")
    m.variables["Y"] = _indicator(m, "Y", ())
    m.observables = ("X", "Z", "Y")
    _xz_family(m, {(0, 0): {"UL"}, (0, 1): {"UR"}, (1, 0): {"LL"}, (1, 1): {"LR"}})
    return m


def joint_absent() -> Model:
    """Z switches Y between the upper and lower half, X has no effect."""
    m = _quadrants("joint_absent")
    m.variables["Y"] = _indicator(m, "Y", {"UR", "LL"})
    m.observables = ("X", "Z", "Y")
    up, down = {"UL", "UR"}, {"LL", "LR"}
    _xz_family(m, {(0, 0): up, (1, 0): up, (0, 1): down, (1, 1): down})
    return m


def zero_filled() -> Model:
    """Diagonal observables with complete families indexed by (X, Y).

    Each complete potential outcome takes its forced value on its identified set
    {(X, Y) = (x, y)} and 0 elsewhere.
    """
    m = diagonal()
    m.name = "zero_filled"
    families = {}
    for target, pos in (("X", 0), ("Y", 1)):
        table = {}
        for key in ((0, 0), (0, 1), (1, 0), (1, 1)):
            on = {a for a in m.space.ids if (m.variables["X"](a), m.variables["Y"](a)) == key}
            vals = {a: key[pos] if a in on else 0 for a in m.space.ids}
            table[key] = variable(m.space, f"{target}{key[0]}{key[1]}", vals)
            m.variables[table[key].name] = table[key]
        families[target] = PotentialOutcomeFamily(target, ("X", "Y"), table)
    m.families = families
    return m


def _cell(row: int, col: int, n: int) -> tuple:
    return rect(Fraction(col, n), Fraction(row, n), Fraction(col + 1, n), Fraction(row + 1, n))


def nested_grid() -> Model:
    """Diagonal observables with two matching covariates.

    ``Z1`` indexes a 3 x 3 grid (``3 * row + col``, row 0 at the bottom) and
    ``Z2`` indexes the 3 x 3 sub-grid inside each ``Z1`` cell, so ``(Z1, Z2)``
    resolves a 9 x 9 grid.
    """
    z1 = {v: [_cell(v // 3, v % 3, 3)] for v in range(9)}
    z2 = {v: [] for v in range(9)}
    for row in range(9):
        for col in range(9):
            z2[3 * (row % 3) + col % 3].append(_cell(row, col, 9))
    layers = {**DIAGONAL_LAYERS, "Z1": z1, "Z2": z2}
    m = atomize_geometry(layers, name="nested_grid")
    names = {}
    for aid in m.space.ids:
        label = dict(part.split("=") for part in aid.split(","))
        a, b = int(label["Z1"]), int(label["Z2"])
        row, col = 3 * (a // 3) + b // 3, 3 * (a % 3) + b % 3
        names[aid] = f"r{row}c{col}x{label['X']}y{label['Y']}"
    m = _renamed(m, names)
    m.observables = ("X", "Y", "Z1", "Z2")
    m.matching = MatchConfig("X", ("Z1", "Z2"), "Y")
    return m


def _renamed(m: Model, names: dict) -> Model:
    order = sorted(range(len(m.space)), key=lambda i: names[m.space.ids[i]])
    space = make_space([(names[m.space.ids[i]], m.space.masses[i]) for i in order])
    variables = {
        n: RandomVariable(n, space, tuple(v.values[i] for i in order)) for n, v in m.variables.items()
    }
    geometry = {names[a]: p for a, p in m.geometry.items()}
    return Model(m.name, space, variables, geometry)


# atom: X, Z, Y_{X=1}, Y_{X=0}
MATCHING_BIAS = {
    "s1": (1, 1, 1, 1),
    "s0": (0, 1, 0, 0),
    "o1": (1, 0, 1, 0),
    "o2": (0, 2, 0, 1),
}


def matching_bias() -> Model:
    """ACE is 0, yet exact matching on Z converges to a contrast of 1.

    Only the cell Z = 1 holds both arms, and there Y is confounded with X; the
    potential outcomes differ only off that cell, where they cancel.
    """
    space = make_space([(a, Fraction(1, 4)) for a in MATCHING_BIAS])
    rows = list(MATCHING_BIAS.values())
    x = RandomVariable("X", space, tuple(r[0] for r in rows))
    z = RandomVariable("Z", space, tuple(r[1] for r in rows))
    y1 = RandomVariable("Y1", space, tuple(r[2] for r in rows))
    y0 = RandomVariable("Y0", space, tuple(r[3] for r in rows))
    y = RandomVariable("Y", space, tuple(r[2] if r[0] else r[3] for r in rows))
    return Model(
        "matching_bias",
        space,
        {"X": x, "Z": z, "Y": y, "Y0": y0, "Y1": y1},
        observables=("X", "Z", "Y"),
        families={"Y": PotentialOutcomeFamily("Y", ("X",), {(0,): y0, (1,): y1})},
        matching=MatchConfig("X", ("Z",), "Y"),
    )


BUILDERS = {
    "diagonal": diagonal,
    "effect_none": lambda: effect("none"),
    "effect_negative": lambda: effect("negative"),
    "effect_cancelling": lambda: effect("cancelling"),
    "joint_only": joint_only,
    "joint_absent": joint_absent,
    "zero_filled": zero_filled,
    "nested_grid": nested_grid,
    "matching_bias": matching_bias,
}


def build_all() -> dict:
    return {name: build() for name, build in BUILDERS.items()}


def data_dir() -> str:
    return os.path.join(os.path.dirname(__file__), "data")


def model_path(name: str) -> str:
    return os.path.join(data_dir(), f"{name}.model")


def bundled(name: str, strict: bool = True) -> Model:
    if name not in BUILDERS:
        raise KeyError(f"no bundled model {name!r}; have {sorted(BUILDERS)}")
    text = resources.files("causalspace").joinpath("data", f"{name}.model").read_text(encoding="utf-8")
    return parse_model(text, strict=strict)


def write_corpus(directory: str | None = None) -> list:
    directory = directory or data_dir()
    written = []
    for name, m in build_all().items():
        path = os.path.join(directory, f"{name}.model")
        # round-trip through the parser so nothing unvalidated is shipped
        save_model(parse_model(dump_model(m)), path)
        written.append(path)
    return written

