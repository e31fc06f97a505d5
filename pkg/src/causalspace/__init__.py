"""Exact causal models on finite probability spaces."""

from .errors import *  # noqa: F401,F403
from .space import Atom, Event, FiniteProbabilitySpace, make_space, measure, product, relabel
from .variables import (
    Law,
    RandomVariable,
    aoe,
    conditional_expectation,
    conditional_law,
    constant,
    expectation,
    independent,
    indicator,
    law,
    level_set,
    variable,
)
from .ocs import (
    CausalReport,
    JointCausalReport,
    ObservableCausalSystem,
    PotentialOutcomeFamily,
    ValidationReport,
    ace,
    contract,
    enumerate_consistent,
    fully_contract,
    fundamental_problem_check,
    identified_set,
    is_causal,
    is_jointly_causal,
    validate,
)
from .randomization import (
    RandomizedSystem,
    RandomizerSpec,
    binary_randomizer,
    fair_randomizer,
    joint_randomize,
    randomize,
    verify_randomization_identity,
)
from .matching import (
    MatchConfig,
    MatchReport,
    matchable_values,
    matched_estimate,
    matched_population_limit,
    matched_support,
    nesting_report,
)
from .sampling import SampleBatch, SplitMix64, empirical_aoe, read_batch, sample_atoms, write_batch
from .geometry import atomize, overlay, polygon_area
from .model import Model, atomize_geometry
from .modelio import dump_model, load_model, parse_model, save_model
from .render import render_randomized_svg, render_svg
from .corpus import bundled

__version__ = "0.1.0"
