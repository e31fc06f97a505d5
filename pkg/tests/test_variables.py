from fractions import Fraction as F
from itertools import product as cartesian

import pytest
from hypothesis import given, settings, strategies as st

from causalspace.errors import (
    DegenerateTreatment,
    MixedSpaces,
    NameMismatch,
    ZeroMeasureConditioningEvent,
)
from causalspace.space import make_space, product, relabel
from causalspace.variables import (
    RandomVariable,
    aoe,
    conditional_law,
    constant,
    expectation,
    independent,
    indicator,
    law,
    variable,
)


@pytest.fixture
def diagonal(models):
    m = models["diagonal"]
    return m.space, m.variable("X"), m.variable("Y")


class TestLaw:
    def test_x_is_fair_coin(self, diagonal):
        _, x, _ = diagonal
        assert dict(law([x])) == {(1,): F(1, 2), (0,): F(1, 2)}

    def test_joint(self, diagonal):
        _, x, y = diagonal
        assert dict(law([x, y])) == {(1, 1): F(3, 8), (1, 0): F(1, 8), (0, 1): F(1, 8), (0, 0): F(3, 8)}

    def test_diagonal(self, diagonal):
        _, x, _ = diagonal
        assert set(law([x, x])) == {(0, 0), (1, 1)}

    def test_marginal(self, diagonal):
        _, x, y = diagonal
        assert law([x, y]).marginal([1]) == law([y])

    def test_mixed_spaces(self, diagonal):
        _, x, _ = diagonal
        other = constant(make_space([("q", 1)], "other"), 0)
        with pytest.raises(MixedSpaces):
            law([x, other])

    def test_missing_key_is_zero(self, diagonal):
        _, x, _ = diagonal
        assert law([x])[(7,)] == 0


class TestConditionalLaw:
    def test_y_given_treated(self, diagonal):
        _, x, y = diagonal
        assert dict(conditional_law([y], x.preimage(1))) == {(1,): F(3, 4), (0,): F(1, 4)}

    def test_given_whole(self, diagonal):
        s, _, y = diagonal
        assert conditional_law([y], s.whole) == law([y])

    def test_given_empty(self, diagonal):
        s, _, y = diagonal
        with pytest.raises(ZeroMeasureConditioningEvent):
            conditional_law([y], s.empty)


class TestExpectation:
    def test_constant(self, diagonal):
        s, _, _ = diagonal
        assert expectation(constant(s, 1)) == 1

    def test_y(self, diagonal):
        _, _, y = diagonal
        assert expectation(y) == F(1, 2)

    def test_bar_y0(self, models):
        m = models["effect_negative"]
        assert expectation(m.variable("Y0")) == F(5, 8)


class TestIndicator:
    def test_x_eq_1(self, diagonal):
        _, x, _ = diagonal
        assert indicator([x], {"X": 1}).assignment == {"A": 1, "B": 1, "C": 0, "D": 0}

    def test_upper_right_quadrant(self, models):
        m = models["joint_only"]
        ind = indicator([m.variable("X"), m.variable("Z")], [("X", 1), ("Z", 0)])
        assert [a for a, v in ind.assignment.items() if v] == ["UR"]

    def test_partition(self, models):
        m = models["joint_only"]
        x, z = m.variable("X"), m.variable("Z")
        total = [0] * len(m.space)
        for a, b in cartesian(x.image, z.image):
            ind = indicator([x, z], [("X", a), ("Z", b)])
            total = [t + v for t, v in zip(total, ind.values)]
        assert total == [1] * len(m.space)

    def test_name_mismatch(self, diagonal):
        _, x, _ = diagonal
        with pytest.raises(NameMismatch):
            indicator([x], {"Z": 1})


class TestIndependence:
    def test_lifted_coordinates(self):
        a = make_space([("a", F(1, 3)), ("b", F(2, 3))])
        b = relabel(make_space([("c", F(1, 4)), ("d", F(3, 4))]), "R:")
        p = product(a, b)
        u = RandomVariable("U", p, (1, 1, 0, 0))
        v = RandomVariable("V", p, (1, 0, 1, 0))
        assert independent(u, v)

    def test_diagonal_dependent(self, diagonal):
        _, x, y = diagonal
        assert not independent(x, y)

    def test_constant(self, diagonal):
        s, x, _ = diagonal
        assert independent(x, constant(s, 3))


class TestAoe:
    def test_diagonal(self, diagonal):
        _, x, y = diagonal
        assert aoe(x, y) == F(1, 2)

    def test_constant_outcome(self, diagonal):
        s, x, _ = diagonal
        assert aoe(x, constant(s, 1)) == 0

    def test_constant_treatment(self, diagonal):
        s, _, y = diagonal
        with pytest.raises(DegenerateTreatment):
            aoe(constant(s, 1, "X"), y)

    def test_non_binary(self, diagonal):
        s, _, y = diagonal
        with pytest.raises(DegenerateTreatment):
            aoe(variable(s, "X", {"A": 2, "B": 0, "C": 1, "D": 0}), y)


# -- properties -----------------------------------------------------------------

@st.composite
def spaces_with_vars(draw, k=2):
    n = draw(st.integers(1, 7))
    weights = draw(st.lists(st.integers(0, 5), min_size=n, max_size=n).filter(lambda w: sum(w) > 0))
    total = sum(weights)
    s = make_space([(f"w{i}", F(w, total)) for i, w in enumerate(weights)])
    vs = [
        RandomVariable(f"V{j}", s, tuple(draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))))
        for j in range(k)
    ]
    return s, vs


@given(spaces_with_vars(3))
def test_law_normalized(sv):
    _, vs = sv
    assert law(vs).total() == 1
    assert law(vs[:1]).total() == 1


@given(spaces_with_vars(2))
def test_total_probability(sv):
    s, (x, y) = sv
    mixed = {}
    for (xv,), p in law([x]).items():
        for key, q in conditional_law([y], x.preimage(xv)).items():
            mixed[key] = mixed.get(key, 0) + p * q
    assert mixed == dict(law([y]))


@given(spaces_with_vars(2))
def test_independence_symmetric(sv):
    _, (x, y) = sv
    assert independent(x, y) == independent(y, x)


@settings(max_examples=50)
@given(spaces_with_vars(2))
def test_indicators_partition(sv):
    s, vs = sv
    total = [0] * len(s)
    for key in cartesian(*(v.image for v in vs)):
        ind = indicator(vs, [(v.name, k) for v, k in zip(vs, key)])
        total = [t + i for t, i in zip(total, ind.values)]
    assert total == [1] * len(s)
