"""Structural classification of continuous-time Markov chains on the non-negative lattice."""

from .classify import (
    classify_state_exact, essential_check, extinction_empty, extinction_finite, pq_resolution,
)
from .equivalence import check_equivalence_theorem, check_equivalence_window
from .estimator import StateClassifier
from .exceptions import BudgetExceededError, CtmcStructError, InputError, NotApplicableError, ParseError
from .lattice import Antichain, minimal_set, vec_gcd
from .network import (
    JumpStructure, ReactionNetwork, check_a2, conservation_vector, derive_jumps, load_jump_structure,
    parse_network, positive_dependence, reduce_jumps,
)
from .onedim import classify_line
from .oracle import Window, is_path, self_reachable, window_reachability

__version__ = "0.1.0"

__all__ = [
    "Antichain", "BudgetExceededError", "CtmcStructError", "InputError", "JumpStructure",
    "NotApplicableError", "ParseError", "ReactionNetwork", "StateClassifier", "Window",
    "check_a2", "check_equivalence_theorem", "check_equivalence_window", "classify_line",
    "classify_state_exact", "conservation_vector", "derive_jumps", "essential_check",
    "extinction_empty", "extinction_finite", "is_path", "load_jump_structure", "minimal_set",
    "parse_network", "positive_dependence", "pq_resolution", "reduce_jumps", "self_reachable",
    "vec_gcd", "window_reachability",
]
