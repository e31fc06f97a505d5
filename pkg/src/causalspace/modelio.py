"""JSON model documents (``"format": 1``).

Rationals are ``"p/q"`` strings.  Layout::

    {
      "format": 1,
      "name": "diagonal",
      "space": {"atoms": [{"id": "A", "mass": "3/8"}, ...]},
      "geometry": {"A": [[["1/2", "1/2"], ["1", "1/2"], ...]], ...},
      "variables": {"X": {"A": 1, "B": 1, ...}, ...},
      "labels": {"T": {"control": 0, "treated": 1}},
      "observables": ["X", "Y"],
      "families": {
        "Y": {"index": ["X"],
              "members": [{"at": [0], "variable": "Y0"},
                          {"at": [1], "values": {"A": 1, ...}}]}
      },
      "randomizer": {"atoms": [{"id": "r0", "mass": "1/2"}, ...],
                     "variables": {"X": {"r0": 0, "r1": 1}}},
      "matching": {"treatment": "X", "outcome": "Y", "covariates": ["Z1", "Z2"]}
    }

Everything but ``format``, ``space`` and ``variables`` is optional.  Values are
integers or text labels; labels map to integer codes through ``labels``, or in
sorted label order when a variable has no ``labels`` entry.  Families
may be partial (indexed by a subset of the observables); they are broadcast to
complete families, and observables without a family are self-determined.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import (
    AxiomViolation,
    CausalSpaceError,
    MassSumNotOne,
    SchemaError,
)
from .geometry import as_polygon, in_unit_square, is_simple, region_area
from .matching import MatchConfig
from .model import Model
from .ocs import PotentialOutcomeFamily, member_name
from .randomization import RandomizerSpec
from .sampling import _atomic_write
from .space import make_space, rational
from .variables import RandomVariable

FORMAT = 1
SECTIONS = {
    "format", "name", "space", "geometry", "variables", "labels", "observables", "families", "randomizer", "matching",
}


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(path, message)


def _obj(node, path: str) -> dict:
    _expect(isinstance(node, dict), path, f"expected an object, got {type(node).__name__}")
    return node


def _list(node, path: str) -> list:
    _expect(isinstance(node, list), path, f"expected an array, got {type(node).__name__}")
    return node


def _int(node, path: str) -> int:
    _expect(isinstance(node, int) and not isinstance(node, bool), path, f"expected an integer, got {node!r}")
    return node


def _code(node, path: str, labels: dict | None) -> int:
    if isinstance(node, str):
        _expect(labels is not None and node in labels, path, f"unknown label {node!r}")
        return labels[node]
    return _int(node, path)


def _rat(node, path: str) -> Fraction:
    _expect(isinstance(node, (str, int)) and not isinstance(node, bool), path, f"expected a rational string, got {node!r}")
    try:
        return rational(node)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise SchemaError(path, f"bad rational {node!r}: {exc}") from None


def _space(node, apath: str, space_id: str):
    atoms = _list(node, apath)
    _expect(len(atoms) > 0, apath, "at least one atom is required")
    pairs = []
    for i, a in enumerate(atoms):
        p = f"{apath}[{i}]"
        a = _obj(a, p)
        _expect(isinstance(a.get("id"), str) and a["id"] != "", p + ".id", "atom id must be non-empty text")
        _expect("mass" in a, p + ".mass", "missing")
        pairs.append((a["id"], _rat(a["mass"], p + ".mass")))
    try:
        return make_space(pairs, space_id=space_id)
    except MassSumNotOne as exc:
        raise MassSumNotOne(exc.total, where=apath) from None
    except CausalSpaceError as exc:
        raise SchemaError(apath, str(exc)) from None


def _valuation(node, path: str, space, labels: dict | None = None) -> tuple:
    node = _obj(node, path)
    for a in node:
        _expect(a in space._index, f"{path}.{a}", "unknown atom")
    for a in space.ids:
        _expect(a in node, path, f"no value for atom {a!r}")
    out = []
    for a in space.ids:
        v = node[a]
        if isinstance(v, str):
            _expect(labels is not None and v in labels, f"{path}.{a}", f"unknown label {v!r}")
            out.append(labels[v])
        else:
            out.append(_int(v, f"{path}.{a}"))
    return tuple(out)


def _labels(doc, variables_node) -> dict:
    """Label -> code per variable: declared in ``labels`` or implied by sorted text values."""
    declared = _obj(doc.get("labels", {}), "labels")
    out = {}
    for name, table in declared.items():
        path = f"labels.{name}"
        _expect(name in variables_node, path, f"unknown variable {name!r}")
        table = _obj(table, path)
        codes = [_int(c, f"{path}.{t}") for t, c in table.items()]
        _expect(len(set(codes)) == len(codes), path, "two labels share a code")
        out[name] = dict(table)
    for name, vals in variables_node.items():
        if name in out or not isinstance(vals, dict):
            continue
        texts = sorted({v for v in vals.values() if isinstance(v, str)})
        if texts:
            _expect(all(isinstance(v, str) for v in vals.values()),
                    f"variables.{name}", "mixes text labels and integers without a labels entry")
            out[name] = {t: i for i, t in enumerate(texts)}
    return out


def parse_model(text: str, strict: bool = True) -> Model:
    """Parse and validate a model document.

    With ``strict`` (the default) a model whose potential-outcome families break
    the axioms raises :class:`AxiomViolation`; otherwise the caller can inspect
    ``model.validate()``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    return model_from_dict(doc, strict=strict)


def model_from_dict(doc, strict: bool = True) -> Model:
    doc = _obj(doc, "$")
    unknown = set(doc) - SECTIONS
    _expect(not unknown, "$", f"unknown sections {sorted(unknown)}")
    _expect(doc.get("format") == FORMAT, "format", f"expected {FORMAT}, got {doc.get('format')!r}")
    name = doc.get("name", "model")
    _expect(isinstance(name, str), "name", "expected text")
    _expect("space" in doc, "space", "missing")
    space = _space(_obj(doc["space"], "space").get("atoms"), "space.atoms", "omega")

    variables = {}
    _expect("variables" in doc, "variables", "missing")
    vnode = _obj(doc["variables"], "variables")
    labels = _labels(doc, vnode)
    for vname, vals in vnode.items():
        variables[vname] = RandomVariable(
            vname, space, _valuation(vals, f"variables.{vname}", space, labels.get(vname))
        )

    geometry = None
    if "geometry" in doc:
        geometry = _geometry(doc["geometry"], space)

    observables = tuple(_list(doc.get("observables", list(variables)), "observables"))
    for i, n in enumerate(observables):
        _expect(n in variables, f"observables[{i}]", f"unknown variable {n!r}")
    _expect(len(set(observables)) == len(observables), "observables", "repeated name")

    families = {}
    for target, fdoc in _obj(doc.get("families", {}), "families").items():
        families[target] = _family(target, fdoc, f"families.{target}", space, variables, observables, labels)

    randomizer = None
    if "randomizer" in doc:
        randomizer = _randomizer(doc["randomizer"], variables, labels)

    matching = None
    if "matching" in doc:
        matching = _matching(doc["matching"], variables, observables)

    model = Model(name, space, variables, geometry, observables, families, randomizer, matching, labels)
    if families:
        try:
            report = model.validate()
        except CausalSpaceError as exc:
            raise SchemaError("families", str(exc)) from None
        if strict and not report.ok:
            raise AxiomViolation(report)
    return model


def _geometry(node, space) -> dict:
    node = _obj(node, "geometry")
    out = {}
    for aid, polys in node.items():
        path = f"geometry.{aid}"
        _expect(aid in space._index, path, "unknown atom")
        region = []
        for j, verts in enumerate(_list(polys, path)):
            p = f"{path}[{j}]"
            pts = []
            for k, v in enumerate(_list(verts, p)):
                _expect(isinstance(v, list) and len(v) == 2, f"{p}[{k}]", "expected [x, y]")
                pts.append((_rat(v[0], f"{p}[{k}][0]"), _rat(v[1], f"{p}[{k}][1]")))
            _expect(len(pts) >= 3, p, "polygon needs at least 3 vertices")
            poly = as_polygon(pts)
            _expect(in_unit_square(poly), p, "vertex outside the unit square")
            _expect(is_simple(poly), p, "polygon is not simple")
            region.append(poly)
        area = region_area(region)
        _expect(area == space.mass(aid), path, f"region area {area} differs from atom mass {space.mass(aid)}")
        out[aid] = tuple(region)
    missing = [a for a in space.ids if a not in out and space.mass(a) > 0]
    _expect(not missing, "geometry", f"no region for atoms {missing}")
    return out


def _family(target, node, path, space, variables, observables, labels=None) -> PotentialOutcomeFamily:
    node = _obj(node, path)
    _expect(target in observables, path, f"{target!r} is not an observable")
    index = tuple(_list(node.get("index"), path + ".index"))
    for i, n in enumerate(index):
        _expect(n in observables, f"{path}.index[{i}]", f"{n!r} is not an observable")
    _expect(len(set(index)) == len(index), path + ".index", "repeated name")
    table = {}
    for j, m in enumerate(_list(node.get("members", []), path + ".members")):
        p = f"{path}.members[{j}]"
        m = _obj(m, p)
        at = tuple(
            _code(v, f"{p}.at[{i}]", (labels or {}).get(index[i]) if i < len(index) else None)
            for i, v in enumerate(_list(m.get("at"), p + ".at"))
        )
        _expect(len(at) == len(index), p + ".at", f"expected {len(index)} values")
        _expect(at not in table, p + ".at", "duplicate member")
        if "variable" in m:
            ref = m["variable"]
            _expect(ref in variables, p + ".variable", f"unknown variable {ref!r}")
            values = variables[ref].values
            mname = ref
        else:
            _expect("values" in m, p, "member needs 'variable' or 'values'")
            values = _valuation(m["values"], p + ".values", space, (labels or {}).get(target))
            mname = member_name(target, tuple(zip(index, at)))
        table[at] = RandomVariable(mname, space, values)
    return PotentialOutcomeFamily(target, index, table)


def _randomizer(node, variables, labels=None) -> RandomizerSpec:
    node = _obj(node, "randomizer")
    rspace = _space(node.get("atoms"), "randomizer.atoms", "R")
    rvars = {}
    for t, vals in _obj(node.get("variables", {}), "randomizer.variables").items():
        _expect(t in variables, f"randomizer.variables.{t}", f"unknown treatment {t!r}")
        rvars[t] = RandomVariable(
            f"{t}_R", rspace, _valuation(vals, f"randomizer.variables.{t}", rspace, (labels or {}).get(t))
        )
    _expect(bool(rvars), "randomizer.variables", "at least one randomized treatment is required")
    return RandomizerSpec(rspace, rvars)


def _matching(node, variables, observables) -> MatchConfig:
    node = _obj(node, "matching")
    t = node.get("treatment")
    y = node.get("outcome", "Y")
    zs = tuple(_list(node.get("covariates"), "matching.covariates"))
    for key, n in [("treatment", t), ("outcome", y)] + [(f"covariates[{i}]", z) for i, z in enumerate(zs)]:
        _expect(n in variables, f"matching.{key}", f"unknown variable {n!r}")
        _expect(n in observables, f"matching.{key}", f"{n!r} is not an observable")
    _expect(set(variables[t].image) <= {0, 1}, "matching.treatment", "treatment must be binary")
    try:
        return MatchConfig(t, zs, y)
    except ValueError as exc:
        raise SchemaError("matching.covariates", str(exc)) from None


# -- printing -----------------------------------------------------------------

def model_to_dict(model: Model) -> dict:
    space = model.space
    doc = {
        "format": FORMAT,
        "name": model.name,
        "space": {"atoms": [{"id": a.id, "mass": format_rational(a.mass)} for a in space.atoms]},
    }
    if model.geometry:
        doc["geometry"] = {
            aid: [[[format_rational(x), format_rational(y)] for x, y in poly] for poly in model.geometry[aid]]
            for aid in space.ids
            if aid in model.geometry
        }
    text = {n: {c: t for t, c in table.items()} for n, table in model.labels.items()}

    def show(name, values):
        names = text.get(name)
        return [names.get(v, v) for v in values] if names else list(values)

    doc["variables"] = {n: dict(zip(space.ids, show(n, v.values))) for n, v in model.variables.items()}
    if model.labels:
        doc["labels"] = {n: dict(sorted(t.items(), key=lambda kv: kv[1])) for n, t in model.labels.items()}
    if model.observables:
        doc["observables"] = list(model.observables)
    if model.families:
        fams = {}
        for target, fam in model.families.items():
            members = []
            for at in sorted(fam.table):
                m = fam.table[at]
                ref = model.variables.get(m.name)
                if ref is not None and ref.values == m.values:
                    members.append({"at": list(at), "variable": m.name})
                else:
                    members.append({"at": list(at), "values": dict(zip(space.ids, show(target, m.values)))})
            fams[target] = {"index": list(fam.index), "members": members}
        doc["families"] = fams
    if model.randomizer is not None:
        r = model.randomizer
        doc["randomizer"] = {
            "atoms": [{"id": a.id, "mass": format_rational(a.mass)} for a in r.space.atoms],
            "variables": {t: dict(zip(r.space.ids, show(t, v.values))) for t, v in r.variables.items()},
        }
    if model.matching is not None:
        m = model.matching
        doc["matching"] = {"treatment": m.treatment, "outcome": m.outcome, "covariates": list(m.covariates)}
    return doc


def _pretty(node, indent: int = 0, width: int = 96) -> str:
    flat = json.dumps(node, ensure_ascii=False, separators=(", ", ": "))
    if not isinstance(node, (dict, list)) or len(flat) + indent <= width or not node:
        return flat
    pad = " " * (indent + 2)
    if isinstance(node, dict):
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_pretty(v, indent + 2, width)}" for k, v in node.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    items = [pad + _pretty(v, indent + 2, width) for v in node]
    return "[\n" + ",\n".join(items) + "\n" + " " * indent + "]"


def dump_model(model: Model) -> str:
    """Deterministic JSON text; ``parse_model(dump_model(m))`` reproduces ``m``."""
    return _pretty(model_to_dict(model)) + "\n"


def load_model(path, strict: bool = True) -> Model:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(str(path), f"cannot read: {exc.strerror}") from None
    return parse_model(text, strict=strict)


def save_model(model: Model, path) -> None:
    _atomic_write(path, dump_model(model))
