"""Matching strings to their generating sources, with the option to refuse a match."""

from __future__ import annotations

__version__ = "0.1.0"

from .decision import (DecisionConfig, Mode, known_source_test, threshold,
                       unconstrained_known_test, unconstrained_unknown_test, unknown_source_test)
from .divergence import entropy, kl_divergence, known_edge_weight, unknown_edge_weight
from .exponents import (ExponentReport, Permutation, c_star, c_uc_star, chernoff_information, e_eta,
                        product_distribution, rejection_exponents)
from .matching import min_weight_matching, second_min_weight_matching
from .model import (Alphabet, DecisionOutcome, Distribution, GuardError, InfeasibleError,
                    InputError, KnownInstance, Matching, SeqMatchError, Sequence, UnknownInstance,
                    Verdict)
from .simulate import SimPlan, compare_tests, run_plan, sample_sequence

__all__ = [
    "Alphabet", "DecisionConfig", "DecisionOutcome", "Distribution", "ExponentReport", "GuardError",
    "InfeasibleError", "InputError", "KnownInstance", "Matching", "Mode", "Permutation",
    "SeqMatchError", "Sequence", "SimPlan", "UnknownInstance", "Verdict", "c_star", "c_uc_star",
    "chernoff_information", "compare_tests", "e_eta", "entropy", "kl_divergence",
    "known_edge_weight", "known_source_test", "min_weight_matching", "product_distribution",
    "rejection_exponents", "run_plan", "sample_sequence", "second_min_weight_matching", "threshold",
    "unconstrained_known_test", "unconstrained_unknown_test", "unknown_edge_weight",
    "unknown_source_test",
]
