import random
import sys
from fractions import Fraction
from itertools import product
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from causalspace import corpus  # noqa: E402
from causalspace.ocs import ObservableCausalSystem, PotentialOutcomeFamily  # noqa: E402
from causalspace.space import make_space  # noqa: E402
from causalspace.variables import RandomVariable  # noqa: E402


def random_masses(rng, n, allow_zero=True):
    weights = [rng.randint(0 if allow_zero else 1, 6) for _ in range(n)]
    if sum(weights) == 0:
        weights[0] = 1
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def random_space(rng, n, allow_zero=True):
    return make_space([(f"w{i}", m) for i, m in enumerate(random_masses(rng, n, allow_zero))])


def random_binary(rng, space, name):
    """Binary variable taking both values."""
    n = len(space)
    while True:
        vals = tuple(rng.randint(0, 1) for _ in range(n))
        if len(set(vals)) == 2:
            return RandomVariable(name, space, vals)


def random_ocs(rng, max_atoms=8, n_obs=None):
    """A valid OCS: random complete families, overwritten where axiom 2 forces them."""
    n_obs = n_obs or rng.choice((2, 3))
    n = rng.randint(2, max_atoms)
    space = random_space(rng, n)
    names = ["X", "Y", "Z"][:n_obs]
    obs = [random_binary(rng, space, nm) for nm in names]
    families = {}
    for pos, target in enumerate(names):
        table = {}
        for key in product(*(v.image for v in obs)):
            vals = []
            for w in range(n):
                if all(v.values[w] == k for v, k in zip(obs, key)):
                    vals.append(key[pos])
                else:
                    vals.append(rng.randint(0, 1))
            table[key] = RandomVariable(f"{target}{key}", space, tuple(vals))
        families[target] = PotentialOutcomeFamily(target, tuple(names), table)
    return ObservableCausalSystem(space, obs, families)


def random_matching_model(rng, max_atoms=12, max_cov=3):
    n = rng.randint(2, max_atoms)
    space = random_space(rng, n)
    x = RandomVariable("X", space, tuple(rng.randint(0, 1) for _ in range(n)))
    zs = [
        RandomVariable(f"Z{j + 1}", space, tuple(rng.randint(0, 1) for _ in range(n)))
        for j in range(rng.randint(1, max_cov))
    ]
    return space, x, zs


@pytest.fixture(scope="session")
def models():
    return {name: corpus.bundled(name) for name in corpus.BUILDERS}


@pytest.fixture
def rng():
    return random.Random(20240611)
