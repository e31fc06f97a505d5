"""Deterministic SVG panels of the unit square.

Each panel draws the atoms' regions: atoms where the selected variable is
non-zero are shaded, and for potential-outcome members the atoms outside the
identified set are cross-hatched.  Every group carries a ``data-atoms``
attribute listing its atoms so the output can be checked mechanically.

Selectors:

* ``X``            a model variable
* ``Y[X]``         the family of ``Y`` indexed by ``X`` (one panel per member)
* ``Y[X;Z]``       indexed by several observables (``,`` also works inside brackets)
* ``Y[*]``         the complete family of ``Y``
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import UnknownVariable
from .model import Model
from .ocs import identified_set, member_name
from .randomization import RandomizerSpec, joint_randomize, randomize
from .sampling import _atomic_write

PANEL = 200
MARGIN = 24
LABEL = 18
PER_ROW = 4
SHADE = "#7a9cc6"
HATCH = "#333333"


def _num(q) -> str:
    r = round(Fraction(q) * 1000)
    sign = "-" if r < 0 else ""
    r = abs(r)
    whole, frac = divmod(r, 1000)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:03d}".rstrip("0")


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def split_selectors(text: str) -> list:
    """Split on commas that are not inside brackets."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def _path(polys, ox, oy) -> str:
    parts = []
    for poly in polys:
        pts = [f"{_num(ox + x * PANEL)},{_num(oy + (1 - y) * PANEL)}" for x, y in poly]
        parts.append("M" + " L".join(pts) + " Z")
    return " ".join(parts)


class _Panel:
    def __init__(self, select: str, label: str, values: Sequence[int], unidentified=None):
        self.select = select
        self.label = label
        self.values = tuple(values)
        self.unidentified = unidentified  # None, or a set of atom ids

    def svg(self, geometry, ids, ox, oy) -> list:
        lines = [
            f'<g class="panel" data-select="{_esc(self.select)}" data-label="{_esc(self.label)}">',
            f'<text x="{_num(ox + PANEL / 2)}" y="{_num(oy - 6)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{_esc(self.label)}</text>',
            f'<rect x="{_num(ox)}" y="{_num(oy)}" width="{PANEL}" height="{PANEL}" fill="#ffffff"/>',
        ]
        nonzero = sorted({v for v in self.values if v != 0})
        top = max(nonzero) if nonzero else 1
        for v in nonzero:
            atoms = [a for a, x in zip(ids, self.values) if x == v and a in geometry]
            opacity = "1" if len(nonzero) == 1 else _num(Fraction(v, top) * Fraction(3, 4) + Fraction(1, 4))
            d = _path([p for a in atoms for p in geometry[a]], ox, oy)
            lines.append(
                f'<g class="shade" data-value="{v}" data-atoms="{_esc(" ".join(atoms))}">'
                f'<path d="{d}" fill="{SHADE}" fill-opacity="{opacity}" stroke="none"/></g>'
            )
        if self.unidentified is not None:
            atoms = [a for a in ids if a in self.unidentified and a in geometry]
            d = _path([p for a in atoms for p in geometry[a]], ox, oy)
            lines.append(
                f'<g class="unidentified" data-atoms="{_esc(" ".join(atoms))}">'
                f'<path d="{d}" fill="url(#hatch)" stroke="none"/></g>'
            )
        lines.append(
            f'<rect class="frame" x="{_num(ox)}" y="{_num(oy)}" width="{PANEL}" height="{PANEL}" '
            f'fill="none" stroke="#000000" stroke-width="1.5"/>'
        )
        lines.append("</g>")
        return lines


def _panels(model: Model, selector: str) -> list:
    if "[" not in selector:
        v = model.variable(selector)
        return [_Panel(selector, selector, v.values)]
    target, _, rest = selector.partition("[")
    if not rest.endswith("]"):
        raise ValueError(f"bad selector {selector!r}")
    inner = rest[:-1].strip()
    ocs = model.ocs
    if inner == "*":
        fam = ocs.complete_family(target)
    else:
        names = [n.strip() for n in inner.replace(";", ",").split(",") if n.strip()]
        fam = ocs.partial_family(target, names)
    out = []
    for key in sorted(fam.table):
        a = fam.assignment(key)
        ident = identified_set(ocs, target, a)
        unident = set(model.space.ids) - set(ident.members)
        out.append(_Panel(selector, member_name(target, a), fam.table[key].values, unident))
    return out


def _document(panels: list, geometry: dict, ids, per_row: int = PER_ROW) -> str:
    cols = min(per_row, max(1, len(panels)))
    rows = (len(panels) + cols - 1) // cols
    cell_w = PANEL + MARGIN
    cell_h = PANEL + MARGIN + LABEL
    width = cols * cell_w + MARGIN
    height = rows * cell_h + MARGIN
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<defs>",
        '<pattern id="hatch" patternUnits="userSpaceOnUse" width="8" height="8">'
        f'<path d="M0,8 L8,0 M0,0 L8,8" stroke="{HATCH}" stroke-width="1"/></pattern>',
        "</defs>",
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for i, p in enumerate(panels):
        r, c = divmod(i, cols)
        lines.extend(p.svg(geometry, ids, MARGIN + c * cell_w, MARGIN + LABEL + r * cell_h))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_svg(model: Model, select, path=None) -> str:
    """Render the selected variables/families; write atomically to ``path`` if given."""
    geometry = model.require_geometry()
    if isinstance(select, str):
        select = split_selectors(select)
    panels = []
    for s in select:
        panels.extend(_panels(model, s))
    if not panels:
        raise UnknownVariable("nothing selected")
    text = _document(panels, geometry, model.space.ids)
    if path is not None:
        _atomic_write(path, text)
    return text


def render_randomized_svg(model: Model, treatments, spec: RandomizerSpec | None = None, path=None) -> str:
    """Slices ``Omega x {r}`` of a randomized system, one row per randomizer atom.

    Each row shows the lifted treatments and the synthesized outcomes on the
    source geometry.
    """
    geometry = model.require_geometry()
    treatments = list(treatments)
    ocs = model.ocs
    rs = randomize(ocs, treatments[0], spec) if len(treatments) == 1 else joint_randomize(ocs, treatments, spec)
    n_r = len(rs.randomizer_space)
    n = len(model.space)
    shown = [rs.lifted_treatments[t] for t in treatments] + [rs.outcomes[k] for k in rs.outcomes]
    panels = []
    for j, r in enumerate(rs.randomizer_space.ids):
        for v in shown:
            vals = [v.values[i * n_r + j] for i in range(n)]
            panels.append(_Panel(f"{v.name}|{r}", f"{v.name} on slice {r}", vals))
    text = _document(panels, geometry, model.space.ids, per_row=len(shown))
    if path is not None:
        _atomic_write(path, text)
    return text

