"""Simple nested exchangeable coalescents: exact rates, exact simulation, CDI diagnostics."""
from .errors import DomainError, InvalidSpecError, SpecFormatError
from .measures import (
    Beta,
    Dirac,
    LambdaMixture,
    ProbLaw,
    SnecSpec,
    SpeciesComponent,
    marginal_gene_lambda,
    marginal_species_lambda,
    moment,
    nu_moment,
    spec_from_dict,
    spec_to_dict,
    species_x_integral,
    validate,
)
from .partitions import (
    EventDescriptor,
    MarkArray,
    NestedPartition,
    Partition,
    RecipePair,
    apply_marks,
    coag,
    coag2,
    descriptor_of,
    is_single_merger,
    is_valid_recipe,
    link_partition,
    restrict,
)
from .rates import class_rates, enumerate_transitions, multi_mark_prob, transition_rate, u_functional
from .simulator import History, SimState, mc_rate_estimate, run_until, sample_event, simulate, step
from .trees import build_trees
from .cdi import lambda_cdi, psi, schweinsberg_partial_sums, snec_cdi

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InvalidSpecError",
    "SpecFormatError",
    "Beta",
    "Dirac",
    "LambdaMixture",
    "ProbLaw",
    "SnecSpec",
    "SpeciesComponent",
    "marginal_gene_lambda",
    "marginal_species_lambda",
    "moment",
    "nu_moment",
    "spec_from_dict",
    "spec_to_dict",
    "species_x_integral",
    "validate",
    "EventDescriptor",
    "MarkArray",
    "NestedPartition",
    "Partition",
    "RecipePair",
    "apply_marks",
    "coag",
    "coag2",
    "descriptor_of",
    "is_single_merger",
    "is_valid_recipe",
    "link_partition",
    "restrict",
    "class_rates",
    "enumerate_transitions",
    "multi_mark_prob",
    "transition_rate",
    "u_functional",
    "History",
    "SimState",
    "mc_rate_estimate",
    "run_until",
    "sample_event",
    "simulate",
    "step",
    "build_trees",
    "lambda_cdi",
    "psi",
    "schweinsberg_partial_sums",
    "snec_cdi",
]
