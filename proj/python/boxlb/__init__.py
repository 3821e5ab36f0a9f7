"""Random multilinear constructions of box-free d-partite hypergraphs."""

from ._core import (
    BudgetExceeded,
    Field,
    FieldError,
    Form,
    Params,
    VerificationError,
    affine_line_through,
    boxes,
    check_params,
    cli,
    comparison_table,
    construct,
    corner_interpolant_value,
    count_boxes,
    default_modulus,
    deletion_alpha,
    edges,
    find_box,
    grs_alpha,
    is_irreducible,
    linearly_independent,
    new_alpha,
    run_trials,
    sample_forms,
    upper_alpha,
)

__all__ = [
    "BudgetExceeded",
    "Field",
    "FieldError",
    "Form",
    "Params",
    "VerificationError",
    "affine_line_through",
    "boxes",
    "check_params",
    "cli",
    "comparison_table",
    "construct",
    "corner_interpolant_value",
    "count_boxes",
    "default_modulus",
    "deletion_alpha",
    "edges",
    "find_box",
    "grs_alpha",
    "is_irreducible",
    "linearly_independent",
    "new_alpha",
    "run_trials",
    "sample_forms",
    "upper_alpha",
]
