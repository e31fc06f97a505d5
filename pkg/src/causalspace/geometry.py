"""Exact rational polygon geometry on the unit square.

Regions are lists of simple polygons with rational vertices.  The overlay of
several partitions of the square is computed by vertical slab decomposition:
cut the square at every vertex and crossing abscissa, so inside each slab no two
edges cross and the edges spanning it stack into trapezoids.  Each trapezoid is
labelled by testing its centroid-like midpoint against every input polygon.
No floating point is involved anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .errors import NonPartition
from .space import rational

ZERO = Fraction(0)
ONE = Fraction(1)
UNIT_SQUARE = ((ZERO, ZERO), (ONE, ZERO), (ONE, ONE), (ZERO, ONE))


def as_point(p) -> tuple:
    x, y = p
    return (rational(x), rational(y))


def as_polygon(vertices) -> tuple:
    poly = tuple(as_point(p) for p in vertices)
    if len(poly) < 3:
        raise ValueError(f"polygon needs at least 3 vertices, got {len(poly)}")
    return poly


def signed_area(poly) -> Fraction:
    """Shoelace formula; positive for counter-clockwise vertex order."""
    s = ZERO
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return s / 2


def polygon_area(poly) -> Fraction:
    return abs(signed_area(poly))


def region_area(polys) -> Fraction:
    return sum((polygon_area(p) for p in polys), ZERO)


def in_unit_square(poly) -> bool:
    return all(0 <= x <= 1 and 0 <= y <= 1 for x, y in poly)


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _on_segment(p, a, b) -> bool:
    return (
        _cross(a, b, p) == 0
        and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_touch(a, b, c, d) -> bool:
    d1, d2 = _cross(c, d, a), _cross(c, d, b)
    d3, d4 = _cross(a, b, c), _cross(a, b, d)
    if ((d1 > 0) != (d2 > 0)) and d1 and d2 and ((d3 > 0) != (d4 > 0)) and d3 and d4:
        return True
    return _on_segment(a, c, d) or _on_segment(b, c, d) or _on_segment(c, a, b) or _on_segment(d, a, b)


def is_simple(poly) -> bool:
    """No repeated vertices, non-zero area, and no two non-adjacent edges meet."""
    n = len(poly)
    if len(set(poly)) != n or signed_area(poly) == 0:
        return False
    edges = [(poly[i], poly[(i + 1) % n]) for i in range(n)]
    for i, j in combinations(range(n), 2):
        if j == i + 1 or (i == 0 and j == n - 1):
            continue
        if segments_touch(*edges[i], *edges[j]):
            return False
    return True


def point_in_polygon(p, poly) -> bool:
    """Even-odd ray cast.  Only meaningful for points off the boundary."""
    x, y = p
    inside = False
    n = len(poly)
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xc:
                inside = not inside
    return inside


def _crossing_x(a, b, c, d):
    """Abscissa of the single crossing point of two non-parallel segments, if any."""
    r = (b[0] - a[0], b[1] - a[1])
    s = (d[0] - c[0], d[1] - c[1])
    den = r[0] * s[1] - r[1] * s[0]
    if den == 0:
        return None
    qp = (c[0] - a[0], c[1] - a[1])
    t = (qp[0] * s[1] - qp[1] * s[0]) / den
    u = (qp[0] * r[1] - qp[1] * r[0]) / den
    if 0 <= t <= 1 and 0 <= u <= 1:
        return a[0] + t * r[0]
    return None


def _y_at(seg, x) -> Fraction:
    (x1, y1), (x2, y2) = seg
    return y1 + (x - x1) * (y2 - y1) / (x2 - x1)


@dataclass(frozen=True)
class Cell:
    """One face of an overlay: a trapezoid with its label."""

    polygon: tuple
    label: tuple
    area: Fraction


def _edges(polys) -> set:
    out = set()
    for poly in polys:
        n = len(poly)
        for i in range(n):
            a, b = poly[i], poly[(i + 1) % n]
            if a[0] != b[0]:
                out.add((a, b) if a[0] < b[0] else (b, a))
    return out


def _breakpoints(edges) -> list:
    xs = {ZERO, ONE}
    for a, b in edges:
        xs.add(a[0])
        xs.add(b[0])
    ordered = sorted(edges, key=lambda e: e[0][0])
    for i, e in enumerate(ordered):
        ylo, yhi = sorted((e[0][1], e[1][1]))
        for f in ordered[i + 1:]:
            if f[0][0] > e[1][0]:
                break
            flo, fhi = sorted((f[0][1], f[1][1]))
            if fhi < ylo or flo > yhi:
                continue
            x = _crossing_x(*e, *f)
            if x is not None:
                xs.add(x)
    return sorted(x for x in xs if 0 <= x <= 1)


def _trapezoid(x0, x1, lo, hi) -> tuple:
    pts = [(x0, lo[0]), (x1, lo[1]), (x1, hi[1]), (x0, hi[0])]
    out = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    if out[0] == out[-1]:
        out.pop()
    return tuple(out)


def overlay(layers: Mapping[str, Mapping[int, Sequence]], defaults: Mapping[str, int] | None = None) -> list:
    """Common refinement of several partitions of the unit square.

    ``layers`` maps a variable name to ``{value: [polygon, ...]}``.  A variable
    listed in ``defaults`` takes that value wherever none of its polygons apply.
    Returns merged trapezoid cells labelled by value tuples in layer order.
    Raises :class:`NonPartition` when some layer leaves a gap or overlaps itself
    on positive area.
    """
    defaults = dict(defaults or {})
    names = list(layers)
    shapes = []  # (layer index, value, polygon)
    for li, name in enumerate(names):
        for value, polys in layers[name].items():
            for poly in polys:
                poly = as_polygon(poly)
                if not in_unit_square(poly):
                    raise ValueError(f"polygon of {name}={value} leaves the unit square")
                shapes.append((li, int(value), poly))
    edges = _edges([s[2] for s in shapes] + [UNIT_SQUARE])
    xs = _breakpoints(edges)

    gap = {n: ZERO for n in names}
    over = {n: ZERO for n in names}
    cells = []
    for x0, x1 in zip(xs, xs[1:]):
        spanning = sorted(
            {(_y_at(e, x0), _y_at(e, x1)) for e in edges if e[0][0] <= x0 and e[1][0] >= x1}
        )
        column = []
        for lo, hi in zip(spanning, spanning[1:]):
            area = (x1 - x0) * ((hi[0] - lo[0]) + (hi[1] - lo[1])) / 2
            if area == 0:
                continue
            mid = ((x0 + x1) / 2, (lo[0] + lo[1] + hi[0] + hi[1]) / 4)
            hits = [[] for _ in names]
            for li, value, poly in shapes:
                if point_in_polygon(mid, poly):
                    hits[li].append(value)
            label = []
            for li, name in enumerate(names):
                if len(hits[li]) > 1:
                    over[name] += area
                elif not hits[li] and name not in defaults:
                    gap[name] += area
                label.append(min(hits[li]) if hits[li] else defaults.get(name))
            label = tuple(label)
            if column and column[-1][0] == label and column[-1][2] == lo:
                prev = column[-1]
                column[-1] = (label, prev[1], hi, prev[3] + area)
            else:
                column.append((label, lo, hi, area))
        for label, lo, hi, area in column:
            cells.append(Cell(_trapezoid(x0, x1, lo, hi), label, area))
    for name in names:
        if gap[name] or over[name]:
            raise NonPartition(name, gap[name], over[name])
    return cells


def label_id(names: Sequence[str], label: tuple) -> str:
    return ",".join(f"{n}={v}" for n, v in zip(names, label))


@dataclass
class Atomization:
    """Atoms of a common refinement: masses, per-atom regions and variable values."""

    names: tuple
    atoms: list       # (atom id, mass)
    regions: dict     # atom id -> tuple of polygons
    values: dict      # variable name -> {atom id: value}

    def rename(self, mapping: Mapping[str, str]) -> Atomization:
        """Rename atoms; renamed atoms come first, in the order of ``mapping``."""

        def r(a):
            return mapping.get(a, a)

        rank = {old: i for i, old in enumerate(mapping)}
        atoms = sorted(self.atoms, key=lambda am: rank.get(am[0], len(rank)))
        return Atomization(
            self.names,
            [(r(a), m) for a, m in atoms],
            {r(a): p for a, p in self.regions.items()},
            {n: {r(a): v for a, v in vals.items()} for n, vals in self.values.items()},
        )


def atomize(layers: Mapping[str, Mapping[int, Sequence]], defaults: Mapping[str, int] | None = None) -> Atomization:
    """Group overlay cells by label; each label with positive area is one atom.

    Atom ids read ``X=1,Y=0``; atoms are ordered by label.
    """
    names = tuple(layers)
    cells = overlay(layers, defaults)
    by_label = {}
    for c in cells:
        by_label.setdefault(c.label, []).append(c)
    atoms = []
    regions = {}
    values = {n: {} for n in names}
    for label in sorted(by_label):
        aid = label_id(names, label)
        group = by_label[label]
        atoms.append((aid, sum((c.area for c in group), ZERO)))
        regions[aid] = tuple(c.polygon for c in group)
        for n, v in zip(names, label):
            values[n][aid] = v
    return Atomization(names, atoms, regions, values)


def rect(x0, y0, x1, y1) -> tuple:
    """Axis-aligned rectangle as a counter-clockwise polygon."""
    x0, y0, x1, y1 = (rational(v) for v in (x0, y0, x1, y1))
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))
