"""Exact, certificate-based computation of the dynamical dimension dim(X, T)
and its companions (capacity, maximal ergodic averages, almost embeddings)
on finite models."""

from .certificate import Certificate
from .errors import BudgetError, DyndimError, InvariantError, ValidationError

__version__ = "0.1.0"

__all__ = ["Certificate", "BudgetError", "DyndimError", "InvariantError", "ValidationError", "__version__"]
