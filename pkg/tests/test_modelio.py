import json
from fractions import Fraction as F

import pytest

from causalspace import corpus
from causalspace.errors import AxiomViolation, MassSumNotOne, NoGeometry, SchemaError, UnknownVariable
from causalspace.modelio import dump_model, format_rational, load_model, parse_model, save_model


def coin_doc(**extra):
    doc = {
        "format": 1,
        "name": "coin",
        "space": {"atoms": [{"id": "h", "mass": "1/2"}, {"id": "t", "mass": "1/2"}]},
        "variables": {"X": {"h": 1, "t": 0}, "Y": {"h": 1, "t": 1}},
    }
    doc.update(extra)
    return doc


def parse(doc, strict=True):
    return parse_model(json.dumps(doc), strict=strict)


class TestRoundTrip:
    def test_bundled_models(self, models):
        for name, m in models.items():
            text = dump_model(m)
            again = parse_model(text)
            assert dump_model(again) == text, name
            assert again.space == m.space
            assert {k: v.values for k, v in again.variables.items()} == {k: v.values for k, v in m.variables.items()}

    def test_corpus_builders_reproduce_data_files(self):
        for name, m in corpus.build_all().items():
            with open(corpus.model_path(name), encoding="utf-8") as fh:
                assert dump_model(parse_model(dump_model(m))) == fh.read(), name

    def test_save_load(self, models, tmp_path):
        path = tmp_path / "m.model"
        save_model(models["joint_only"], path)
        assert dump_model(load_model(path)) == dump_model(models["joint_only"])

    def test_rationals_always_fractions(self):
        assert format_rational(F(0)) == "0/1"
        assert format_rational(F(1)) == "1/1"
        assert format_rational(F(3, 8)) == "3/8"

    def test_families_preserved(self, models):
        m = parse_model(dump_model(models["effect_cancelling"]))
        fam = m.families["Y"]
        assert fam.index == ("X",)
        assert fam.table[(1,)].values == models["effect_cancelling"].variable("Y1").values

    def test_inline_member_values(self):
        doc = coin_doc(
            observables=["X", "Y"],
            families={"Y": {"index": ["X"], "members": [
                {"at": [0], "values": {"h": 0, "t": 1}},
                {"at": [1], "values": {"h": 1, "t": 0}},
            ]}},
        )
        m = parse(doc)
        assert m.families["Y"].table[(0,)].values == (0, 1)
        assert parse_model(dump_model(m)).families["Y"].table[(0,)].values == (0, 1)


class TestErrors:
    def test_mass_deficit_located(self):
        doc = coin_doc()
        doc["space"]["atoms"] = [{"id": "a", "mass": "1/3"}, {"id": "b", "mass": "1/3"}, {"id": "c", "mass": "1/2"}]
        doc["variables"] = {"X": {"a": 0, "b": 1, "c": 0}}
        with pytest.raises(MassSumNotOne) as info:
            parse(doc)
        assert info.value.where == "space.atoms"
        assert "7/6" in str(info.value)

    def test_missing_member_is_axiom_1(self):
        doc = coin_doc(
            observables=["X", "Y"],
            families={"Y": {"index": ["X"], "members": [{"at": [1], "values": {"h": 1, "t": 0}}]}},
        )
        with pytest.raises(AxiomViolation) as info:
            parse(doc)
        assert {v.axiom for v in info.value.report.violations} == {1}
        lax = parse(doc, strict=False)
        assert not lax.validate().ok

    def test_inconsistent_member_is_axiom_2(self):
        doc = coin_doc(
            observables=["X", "Y"],
            families={"Y": {"index": ["X"], "members": [
                {"at": [0], "values": {"h": 1, "t": 0}},
                {"at": [1], "values": {"h": 1, "t": 1}},
            ]}},
        )
        with pytest.raises(AxiomViolation) as info:
            parse(doc)
        assert [(v.axiom, v.atom) for v in info.value.report.violations] == [(2, "t")]

    @pytest.mark.parametrize(
        "mutate,path",
        [
            (lambda d: d.update(format=2), "format"),
            (lambda d: d.update(extra={}), "$"),
            (lambda d: d.pop("space"), "space"),
            (lambda d: d["space"]["atoms"][0].update(mass=0.5), "space.atoms[0].mass"),
            (lambda d: d["variables"]["X"].pop("t"), "variables.X"),
            (lambda d: d["variables"]["X"].update(t=0.5), "variables.X.t"),
            (lambda d: d.update(observables=["Q"]), "observables[0]"),
            (lambda d: d.update(matching={"treatment": "X", "covariates": ["X"]}), "matching.covariates"),
        ],
    )
    def test_schema_paths(self, mutate, path):
        doc = coin_doc()
        mutate(doc)
        with pytest.raises(SchemaError) as info:
            parse(doc)
        assert info.value.path == path

    def test_invalid_json(self):
        with pytest.raises(SchemaError):
            parse_model("{not json")

    def test_geometry_area_must_match_mass(self):
        doc = coin_doc(geometry={
            "h": [[["0", "0"], ["1", "0"], ["1", "1/4"], ["0", "1/4"]]],
            "t": [[["0", "1/4"], ["1", "1/4"], ["1", "1"], ["0", "1"]]],
        })
        with pytest.raises(SchemaError) as info:
            parse(doc)
        assert info.value.path == "geometry.h"

    def test_geometry_outside_square(self):
        doc = coin_doc(geometry={
            "h": [[["0", "0"], ["2", "0"], ["2", "1/4"], ["0", "1/4"]]],
            "t": [[["0", "1/2"], ["1", "1/2"], ["1", "1"], ["0", "1"]]],
        })
        with pytest.raises(SchemaError) as info:
            parse(doc)
        assert info.value.path == "geometry.h[0]"

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError):
            load_model(tmp_path / "nope.model")

    def test_no_geometry(self):
        with pytest.raises(NoGeometry):
            parse(coin_doc()).require_geometry()

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable):
            parse(coin_doc()).variable("Q")


class TestRandomizerSection:
    def test_parsed(self):
        doc = coin_doc(
            observables=["X", "Y"],
            randomizer={"atoms": [{"id": "r0", "mass": "2/3"}, {"id": "r1", "mass": "1/3"}],
                        "variables": {"X": {"r0": 0, "r1": 1}}},
        )
        m = parse(doc)
        assert m.randomizer.space.masses == (F(2, 3), F(1, 3))
        assert parse_model(dump_model(m)).randomizer.variables["X"].values == (0, 1)

    def test_deficit_located(self):
        doc = coin_doc(randomizer={"atoms": [{"id": "r0", "mass": "1/3"}], "variables": {"X": {"r0": 0}}})
        with pytest.raises(MassSumNotOne) as info:
            parse(doc)
        assert info.value.where == "randomizer.atoms"


class TestLabels:
    def test_implied_sorted_codes(self):
        doc = coin_doc()
        doc["variables"]["T"] = {"h": "treated", "t": "control"}
        m = parse(doc)
        assert m.variable("T").values == (1, 0)
        assert m.labels == {"T": {"control": 0, "treated": 1}}
        text = dump_model(m)
        assert '"T": {"h": "treated", "t": "control"}' in text
        assert dump_model(parse_model(text)) == text

    def test_declared_codes(self):
        doc = coin_doc(labels={"T": {"yes": 1, "no": 0}})
        doc["variables"]["T"] = {"h": "no", "t": "yes"}
        assert parse(doc).variable("T").values == (0, 1)

    def test_family_and_randomizer_use_labels(self):
        doc = coin_doc(
            labels={"T": {"control": 0, "treated": 1}},
            observables=["T", "Y"],
            families={"Y": {"index": ["T"], "members": [
                {"at": ["control"], "values": {"h": 1, "t": 1}},
                {"at": ["treated"], "values": {"h": 1, "t": 1}},
            ]}},
            randomizer={"atoms": [{"id": "r0", "mass": "1/2"}, {"id": "r1", "mass": "1/2"}],
                        "variables": {"T": {"r0": "control", "r1": "treated"}}},
        )
        doc["variables"] = {"T": {"h": "treated", "t": "control"}, "Y": {"h": 1, "t": 1}}
        m = parse(doc)
        assert set(m.families["Y"].table) == {(0,), (1,)}
        assert m.randomizer.variables["T"].values == (0, 1)
        assert dump_model(parse_model(dump_model(m))) == dump_model(m)

    @pytest.mark.parametrize(
        "variables,labels,path",
        [
            ({"T": {"h": "a", "t": 1}}, None, "variables.T"),
            ({"T": {"h": "a", "t": "b"}}, {"T": {"a": 0}}, "variables.T.t"),
            ({"T": {"h": 0, "t": 1}}, {"T": {"a": 0, "b": 0}}, "labels.T"),
            ({"T": {"h": 0, "t": 1}}, {"Q": {"a": 0}}, "labels.Q"),
        ],
    )
    def test_errors(self, variables, labels, path):
        doc = coin_doc(variables=variables)
        if labels is not None:
            doc["labels"] = labels
        with pytest.raises(SchemaError) as info:
            parse(doc)
        assert info.value.path == path
