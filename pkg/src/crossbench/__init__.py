"""Finite-scale workbench for cross-trees, the cross-constraint solver and Gamma spaces."""

from .errors import CapExceeded, DepthBudgetExhausted, FragmentTooLarge, InputError, TableExhausted

__all__ = ["CapExceeded", "DepthBudgetExhausted", "FragmentTooLarge", "InputError", "TableExhausted"]
__version__ = "0.1.0"
