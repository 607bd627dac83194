from .lattice import (
    NDIM,
    STENCILS,
    Grid4,
    ScalarField,
    AmbientTensorField,
    build_grid,
    partial,
    partial_array,
    gradient_array,
    integrate,
    tree_sum,
    axis_weights,
    quadrature_weights,
    region_values,
    pointwise_norm,
    max_norm,
    l2_norm,
    values_of,
)
from .cutoff import CutoffFields, cutoff_field, smoothstep5

__all__ = [
    "NDIM",
    "STENCILS",
    "Grid4",
    "ScalarField",
    "AmbientTensorField",
    "build_grid",
    "partial",
    "partial_array",
    "gradient_array",
    "integrate",
    "tree_sum",
    "axis_weights",
    "quadrature_weights",
    "region_values",
    "pointwise_norm",
    "max_norm",
    "l2_norm",
    "values_of",
    "CutoffFields",
    "cutoff_field",
    "smoothstep5",
]
