"""Exact symbolic kernel: trees, parsing, normal form, differentiation."""

from .core import (AlgebraicGenerator, DeclaredFunction, DerivativeAtom, DivisionByZero, Expr, ExprError,
                   FunctionApplication, MissingDerivativeRule, Power, Product, RatFunc,
                   Rational, Sum, Symbol, SubstitutionError, atoms, coefficients_in, diff,
                   evaluate, evaluate_tree, free_symbols, from_rf, function_bindings,
                   is_zero, normalize, polynomial_degree, rf_diff, rf_substitute,
                   substitute, substitute_functions, to_rf)
from .context import Context, ParseError, UndeclaredName
from .printing import to_string


def parse(text, context):
    return context.parse(text)


__all__ = [
    "AlgebraicGenerator", "Context", "DeclaredFunction", "DerivativeAtom",
    "DivisionByZero", "Expr",
    "ExprError", "FunctionApplication", "MissingDerivativeRule", "ParseError", "Power",
    "Product", "RatFunc", "Rational", "SubstitutionError", "Sum", "Symbol",
    "UndeclaredName", "atoms", "coefficients_in", "diff", "evaluate", "evaluate_tree",
    "free_symbols", "from_rf", "function_bindings", "is_zero", "normalize", "parse",
    "polynomial_degree", "rf_diff", "rf_substitute", "substitute",
    "substitute_functions", "to_rf", "to_string",
]
