"""Finite-rank Helson forms, their symbols and symmetric tensor representations."""

from helson.finiterank.forms import (
    FactorizableOp,
    HelsonFormSpec,
    boundedness_check,
    form_alpha,
    form_eval,
    form_rank,
    graded_norm,
    graded_total,
    symbol_eval,
    symbol_taylor,
)
from helson.finiterank.polynomial import Direction, SparsePolynomial, dir_derivative, poly_eval, poly_mul
from helson.finiterank.tensors import SymmetricTensorRep, canonicalize, sym

__all__ = [
    "Direction",
    "FactorizableOp",
    "HelsonFormSpec",
    "SparsePolynomial",
    "SymmetricTensorRep",
    "boundedness_check",
    "canonicalize",
    "dir_derivative",
    "form_alpha",
    "form_eval",
    "form_rank",
    "graded_norm",
    "graded_total",
    "poly_eval",
    "poly_mul",
    "sym",
    "symbol_eval",
    "symbol_taylor",
]
