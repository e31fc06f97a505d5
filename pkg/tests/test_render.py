import re
import xml.etree.ElementTree as ET

import pytest

from causalspace import corpus
from causalspace.errors import NoGeometry, UnknownVariable
from causalspace.modelio import parse_model
from causalspace.ocs import identified_set
from causalspace.render import render_randomized_svg, render_svg, split_selectors

NS = {"s": "http://www.w3.org/2000/svg"}


def panels(svg):
    return ET.fromstring(svg).findall("s:g[@class='panel']", NS)


class TestSelectors:
    def test_split(self):
        assert split_selectors("X, Y[X;Z],Y[*]") == ["X", "Y[X;Z]", "Y[*]"]
        assert split_selectors("Y[X,Z]") == ["Y[X,Z]"]
        assert split_selectors("") == []


class TestRender:
    @pytest.mark.parametrize("name,select", [("diagonal", "X,Y"), ("joint_only", "X,Z,Y[X,Z]"), ("zero_filled", "X,Y,Y[*]")])
    def test_byte_stable(self, name, select):
        first = render_svg(corpus.bundled(name), select)
        second = render_svg(corpus.bundled(name), select)
        assert first == second
        assert first == render_svg(corpus.build_all()[name], select)
        ET.fromstring(first)

    def test_panel_count_and_labels(self, models):
        svg = render_svg(models["joint_only"], "Y[X,Z]")
        labels = [p.get("data-label") for p in panels(svg)]
        assert labels == ["Y_[(X,Z)=(0,0)]", "Y_[(X,Z)=(0,1)]", "Y_[(X,Z)=(1,0)]", "Y_[(X,Z)=(1,1)]"]

    def test_shading_matches_values(self, models):
        m = models["diagonal"]
        (panel,) = panels(render_svg(m, "X"))
        (shade,) = panel.findall("s:g[@class='shade']", NS)
        assert shade.get("data-atoms").split() == ["A", "B"]

    def test_hatch_is_complement_of_identified_set(self, models):
        m = models["zero_filled"]
        svg = render_svg(m, "Y[*]")
        fam = m.ocs.complete_family("Y")
        ps = panels(svg)
        assert len(ps) == len(fam.table)
        for p, key in zip(ps, sorted(fam.table)):
            hatch = p.find("s:g[@class='unidentified']", NS)
            got = set(hatch.get("data-atoms").split())
            ident = identified_set(m.ocs, "Y", fam.assignment(key))
            assert got == set(m.space.ids) - ident.members
            assert hatch.find("s:path", NS).get("fill") == "url(#hatch)"

    def test_both_complete_families_give_eight_panels(self, models):
        m = models["zero_filled"]
        ps = panels(render_svg(m, "X[*],Y[*]"))
        assert len(ps) == 8
        assert [p.get("data-label") for p in ps[:2]] == ["X_[(X,Y)=(0,0)]", "X_[(X,Y)=(0,1)]"]

    def test_coordinates_are_exact_decimals(self, models):
        svg = render_svg(models["diagonal"], "Y")
        for num in re.findall(r"[\d.]+", re.search(r' d="([^"]+)"', svg).group(1)):
            assert len(num.partition(".")[2]) <= 3

    def test_write(self, models, tmp_path):
        path = tmp_path / "out.svg"
        text = render_svg(models["diagonal"], "X", path=path)
        assert path.read_text() == text

    def test_no_geometry(self):
        m = parse_model('{"format": 1, "space": {"atoms": [{"id": "a", "mass": "1/1"}]}, "variables": {"X": {"a": 0}}}')
        with pytest.raises(NoGeometry):
            render_svg(m, "X")

    def test_unknown_and_empty(self, models):
        with pytest.raises(UnknownVariable):
            render_svg(models["diagonal"], "Q")
        with pytest.raises(UnknownVariable):
            render_svg(models["diagonal"], "")


class TestRandomized:
    def test_slices(self, models):
        svg = render_randomized_svg(models["effect_negative"], ["X"])
        labels = [p.get("data-label") for p in panels(svg)]
        assert labels == ["X~ on slice R:r0", "Y~ on slice R:r0", "X~ on slice R:r1", "Y~ on slice R:r1"]

    def test_slice_outcome_is_arm_member(self, models):
        # on slice r1 the treatment is 1 everywhere, so Y~ shades Y1's support
        m = models["effect_negative"]
        ps = panels(render_randomized_svg(m, ["X"]))
        (shade,) = ps[3].findall("s:g[@class='shade']", NS)
        y1 = m.variable("Y1")
        assert shade.get("data-atoms").split() == [a for a, v in zip(m.space.ids, y1.values) if v]

    def test_stable(self, models):
        assert render_randomized_svg(models["joint_only"], ["X", "Z"]) == render_randomized_svg(models["joint_only"], ["X", "Z"])
