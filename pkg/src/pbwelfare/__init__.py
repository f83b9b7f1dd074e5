"""Exact participatory-budgeting rules, proportionality checks and welfare guarantees."""

from .axioms import Ejr1Result, Ejr1Witness, check_ejr1, is_cohesive
from .core import (
    Instance,
    InstanceParams,
    InvalidInstanceError,
    Project,
    instance_params,
    parse_rational,
    supporters,
    validate_instance,
)
from .generators import Construction, ConstructionSpec, gen_random, generate
from .guarantees import (
    GuaranteeReport,
    Interval,
    comparative_mes_vs_greedy,
    guarantee_bounds,
    utilitarian_ratio,
)
from .rules import (
    MesTrace,
    Outcome,
    brute_force_maxsat,
    compute_rho,
    first_divergence_stage,
    run_greedy,
    run_maxsat,
    run_mes,
    run_mes_completed,
    truncated_greedy_welfare,
)
from .satisfaction import (
    SatisfactionFunction,
    cardinality_sat,
    check_dns,
    cost_sat,
    project_value,
    sat_value,
    sqrt_sat,
    table_sat,
    utilitarian_welfare,
    voter_sat,
)

__version__ = "0.1.0"
