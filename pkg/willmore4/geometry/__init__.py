from .fields import (
    GeometryFields,
    build_geometry,
    first_fundamental,
    metric_derivative,
    christoffel,
    second_fundamental,
    projectors,
    apply_projector,
    project,
    structural_residuals,
)
from .calculus import (
    covariant_derivative,
    covariant_derivative_along,
    normal_gradient,
    normal_laplacian,
    normal_bilaplacian,
    laplacian,
    divergence,
    sliced_divergence,
    check_normal,
    raise_first,
    dot,
)
from .curvature import (
    gauss_riemann,
    riemann_mixed,
    riemann_symmetry_residuals,
    normal_curvature,
    commutator,
    traced_commutator,
    commutator_divergence,
    interchange_residual,
    ricci_gauss,
    tracefree_ricci,
    mean_curvature_interchange,
    second_form_interchange,
)

__all__ = [
    # Campos
    "GeometryFields",
    "build_geometry",
    "first_fundamental",
    "metric_derivative",
    "christoffel",
    "second_fundamental",
    "projectors",
    "apply_projector",
    "project",
    "structural_residuals",
    # Calculo normal
    "covariant_derivative",
    "covariant_derivative_along",
    "normal_gradient",
    "normal_laplacian",
    "normal_bilaplacian",
    "laplacian",
    "divergence",
    "sliced_divergence",
    "check_normal",
    "raise_first",
    "dot",
    # Curvatura
    "gauss_riemann",
    "riemann_mixed",
    "riemann_symmetry_residuals",
    "normal_curvature",
    "commutator",
    "traced_commutator",
    "commutator_divergence",
    "interchange_residual",
    "ricci_gauss",
    "tracefree_ricci",
    "mean_curvature_interchange",
    "second_form_interchange",
]
