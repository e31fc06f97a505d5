from fractions import Fraction as F

import pytest

from causalspace.errors import DegenerateTreatment, MixedSpaces, NoPairsFound, UnknownCovariate
from causalspace.matching import (
    MatchConfig,
    matchable_values,
    matched_estimate,
    matched_population_limit,
    matched_support,
    nesting_report,
)
from causalspace.ocs import ace
from causalspace.sampling import sample_atoms
from causalspace.space import make_space
from causalspace.variables import RandomVariable, constant

from conftest import random_matching_model
from oracles import grid_support_measure


def support_oracle(space, x, zs, k):
    """Atoms whose first-k covariate cell carries positive mass in both arms."""
    out = set()
    for i, a in enumerate(space.ids):
        cell = tuple(z.values[i] for z in zs[:k])
        arms = set()
        for j, m in enumerate(space.masses):
            if m > 0 and tuple(z.values[j] for z in zs[:k]) == cell:
                arms.add(x.values[j])
        if arms == {0, 1}:
            out.add(a)
    return out


@pytest.fixture
def nested_grid(models):
    m = models["nested_grid"]
    return m, m.variable("X"), [m.variable("Z1"), m.variable("Z2")]


class TestNestedGrid:
    def test_measures(self, nested_grid):
        m, x, zs = nested_grid
        rep = nesting_report(m.space, x, zs)
        assert [lv.measure for lv in rep.levels] == [grid_support_measure(3), grid_support_measure(9)]
        assert [lv.measure for lv in rep.levels] == [F(1, 3), F(1, 9)]
        assert rep.nested and rep.measures_decreasing and rep

    def test_matchable_cells(self, nested_grid):
        m, x, zs = nested_grid
        assert matchable_values(m.space, x, zs, 1) == {(3,), (4,), (5,)}
        assert matchable_values(m.space, x, zs, 2) == {(r, c) for r in (3, 4, 5) for c in (3, 4, 5)}

    def test_against_oracle(self, nested_grid):
        m, x, zs = nested_grid
        for k in (1, 2):
            assert matched_support(m.space, x, zs, k).members == support_oracle(m.space, x, zs, k)

    def test_config(self, nested_grid):
        m, _, _ = nested_grid
        assert m.matching == MatchConfig("X", ("Z1", "Z2"), "Y")


class TestSupport:
    def test_covariate_equal_to_treatment(self, models):
        m = models["diagonal"]
        x = m.variable("X")
        z = RandomVariable("Z", m.space, x.values)
        assert matched_support(m.space, x, [z], 1).members == frozenset()

    def test_constant_covariate(self, models):
        m = models["diagonal"]
        assert matched_support(m.space, m.variable("X"), [constant(m.space, 0, "Z")], 1) == m.space.whole

    def test_zero_mass_arm_not_matchable(self):
        s = make_space([("a", F(1, 2)), ("b", F(1, 2)), ("c", 0)])
        x = RandomVariable("X", s, (1, 0, 0))
        z = RandomVariable("Z", s, (0, 1, 1))
        z2 = RandomVariable("Z", s, (0, 1, 0))
        assert matched_support(s, x, [z], 1).members == frozenset()
        assert matched_support(s, x, [z2], 1).members == frozenset()

    def test_random_against_oracle(self, rng):
        for _ in range(200):
            space, x, zs = random_matching_model(rng)
            for k in range(1, len(zs) + 1):
                assert matched_support(space, x, zs, k).members == support_oracle(space, x, zs, k)

    def test_permutation_invariance_of_full_support(self, rng):
        for _ in range(100):
            space, x, zs = random_matching_model(rng)
            perm = list(zs)
            rng.shuffle(perm)
            k = len(zs)
            assert matched_support(space, x, zs, k) == matched_support(space, x, perm, k)

    def test_errors(self, nested_grid):
        m, x, zs = nested_grid
        with pytest.raises(UnknownCovariate):
            matched_support(m.space, x, zs, 3)
        with pytest.raises(UnknownCovariate):
            matched_support(m.space, x, zs, 0)
        with pytest.raises(DegenerateTreatment):
            matched_support(m.space, zs[0], zs[1:], 1)
        other = make_space([("q", 1)], "other")
        with pytest.raises(MixedSpaces):
            matched_support(m.space, x, [constant(other, 0)], 1)
        with pytest.raises(UnknownCovariate):
            nesting_report(m.space, x, [])

    def test_config_validation(self):
        with pytest.raises(ValueError):
            MatchConfig("X", ("Z", "Z"))
        with pytest.raises(ValueError):
            MatchConfig("X", ("X",))
        with pytest.raises(ValueError):
            MatchConfig("X", ("Y",), "Y")


class TestEstimate:
    def test_zero_effect(self, models):
        # Y ignores X inside every cell: every pair contributes 0
        m = models["joint_only"]
        x, z = m.variable("X"), m.variable("Z")
        y = constant(m.space, 1, "Y1")
        est = matched_estimate(sample_atoms(m.space, 2000, 3), x, y, [z], 1, 3)
        assert est.estimate == 0.0 and est.n_pairs > 0

    def test_pairs_never_reused(self, models):
        m = models["matching_bias"]
        batch = sample_atoms(m.space, 5000, 11)
        est = matched_estimate(batch, m.variable("X"), m.variable("Y"), [m.variable("Z")], 1, 11)
        treated = [t for t, _ in est.pairs]
        untreated = [u for _, u in est.pairs]
        assert len(set(treated)) == len(treated) == est.n_pairs
        assert len(set(untreated)) == len(untreated)
        assert not set(treated) & set(untreated)
        x, z = m.variable("X").assignment, m.variable("Z").assignment
        for t, u in est.pairs:
            assert x[batch.draws[t]] == 1 and x[batch.draws[u]] == 0
            assert z[batch.draws[t]] == z[batch.draws[u]]

    def test_deterministic(self, models):
        m = models["matching_bias"]
        batch = sample_atoms(m.space, 1000, 5)
        args = (batch, m.variable("X"), m.variable("Y"), [m.variable("Z")], 1, 5)
        assert matched_estimate(*args).pairs == matched_estimate(*args).pairs

    def test_no_pairs(self, models):
        m = models["diagonal"]
        x = m.variable("X")
        z = RandomVariable("Z", m.space, x.values)
        with pytest.raises(NoPairsFound):
            matched_estimate(sample_atoms(m.space, 100, 1), x, m.variable("Y"), [z], 1, 1)
        with pytest.raises(NoPairsFound):
            matched_population_limit(m.space, x, m.variable("Y"), [z], 1)

    def test_wrong_batch(self, models):
        m = models["diagonal"]
        other = models["joint_only"]
        with pytest.raises(MixedSpaces):
            matched_estimate(sample_atoms(other.space, 10, 1), m.variable("X"), m.variable("Y"),
                             [constant(m.space, 0, "Z")], 1, 1)


class TestBiasModel:
    def test_ace_zero_but_limit_one(self, models):
        m = models["matching_bias"]
        assert ace(m.ocs, "X", "Y") == 0
        assert matched_population_limit(m.space, m.variable("X"), m.variable("Y"), [m.variable("Z")], 1) == 1

    def test_population_limit_oracle(self, models):
        # only the Z=1 stratum is matchable: s1 (Y=1) against s0 (Y=0)
        m = models["matching_bias"]
        y = m.variable("Y").assignment
        assert y["s1"] - y["s0"] == 1
        assert matchable_values(m.space, m.variable("X"), [m.variable("Z")], 1) == {(1,)}
