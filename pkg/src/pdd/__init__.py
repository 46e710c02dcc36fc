"""Phylogenetic diversity optimization under food-web viability constraints."""

from .core import (FoodWeb, Instance, PhyloTree, Solution, extend_to_size_k,
                   is_viable, pd, spanning_subtree, viability_certificate)
from .errors import (BudgetExceededError, DomainError, OverflowGuardError,
                     PDDError, PreconditionError)
from .io import format_instance, format_newick, parse_instance, parse_newick

__all__ = [
    "FoodWeb", "Instance", "PhyloTree", "Solution",
    "extend_to_size_k", "is_viable", "pd", "spanning_subtree",
    "viability_certificate",
    "parse_instance", "format_instance", "parse_newick", "format_newick",
    "PDDError", "DomainError", "PreconditionError", "BudgetExceededError",
    "OverflowGuardError",
]

__version__ = "0.1.0"
