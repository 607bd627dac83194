from .catalog import (
    AMBIENT_DIMS,
    KINDS,
    Jet2Field,
    ShapeSpec,
    canonical_kind,
    check_grid_compatible,
    check_immersion,
    default_grid,
    jet_consistency,
    margined_grid,
    sample_jet,
)
from .perturbation import (
    PerturbationSpec,
    PerturbedJet,
    VariationField,
    numeric_jet,
    parse_direction,
    perturb_normal,
    shifted_jet,
    variation_field,
)
from .oracle import (
    ProductOracle,
    factor_normals,
    oracle_mean_curvature,
    oracle_willmore,
    product_oracle,
    s2xs2_coefficient_ratio,
    sphere_volume,
)
from .spec_file import ShapeFile, load_shape_file, parse_shape_text

__all__ = [
    # Catalogo
    "AMBIENT_DIMS",
    "KINDS",
    "Jet2Field",
    "ShapeSpec",
    "canonical_kind",
    "check_grid_compatible",
    "check_immersion",
    "default_grid",
    "jet_consistency",
    "margined_grid",
    "sample_jet",
    # Perturbacoes
    "PerturbationSpec",
    "PerturbedJet",
    "VariationField",
    "numeric_jet",
    "parse_direction",
    "perturb_normal",
    "shifted_jet",
    "variation_field",
    # Formas fechadas
    "ProductOracle",
    "factor_normals",
    "oracle_mean_curvature",
    "oracle_willmore",
    "product_oracle",
    "s2xs2_coefficient_ratio",
    "sphere_volume",
    # Texto
    "ShapeFile",
    "load_shape_file",
    "parse_shape_text",
]
