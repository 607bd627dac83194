"""
willmore4 - energia de Willmore de quatro dimensoes em grades de parametros
"""

__version__ = "0.3.0"
__author__ = "willmore4"

# Configuracao e erros
from .config import EngineConfig, get_engine_config, reset_engine_config
from .errors import (
    Willmore4Error,
    GridError,
    StencilDomainError,
    DegenerateImmersionError,
    NormalityError,
    CutoffSupportError,
    ShapeSpecError,
    ManifestError,
    StiffnessLimit,
)

# Grade
from .grid import Grid4, build_grid, cutoff_field, integrate, partial

# Formas
from .shapes import (
    ShapeSpec,
    PerturbationSpec,
    default_grid,
    sample_jet,
    perturb_normal,
    product_oracle,
    load_shape_file,
)

# Geometria, energia e operador
from .geometry import build_geometry, normal_gradient, normal_laplacian, gauss_riemann
from .energy import energy_density, total_energy
from .operators import willmore, willmore_terms, residual_norms, boundary_current, aux_TU

# Verificacao
from .verification import (
    IdentityId,
    GammaParams,
    run_identity,
    gradient_check,
    subdomain_flux_check,
    energy_directional_fd,
)
from .flow import flow_step, run_flow
from .reporting import CheckReport

__all__ = [
    # Configuracao e erros
    "EngineConfig",
    "get_engine_config",
    "reset_engine_config",
    "Willmore4Error",
    "GridError",
    "StencilDomainError",
    "DegenerateImmersionError",
    "NormalityError",
    "CutoffSupportError",
    "ShapeSpecError",
    "ManifestError",
    "StiffnessLimit",

    # Grade
    "Grid4",
    "build_grid",
    "cutoff_field",
    "integrate",
    "partial",

    # Formas
    "ShapeSpec",
    "PerturbationSpec",
    "default_grid",
    "sample_jet",
    "perturb_normal",
    "product_oracle",
    "load_shape_file",

    # Geometria, energia e operador
    "build_geometry",
    "normal_gradient",
    "normal_laplacian",
    "gauss_riemann",
    "energy_density",
    "total_energy",
    "willmore",
    "willmore_terms",
    "residual_norms",
    "boundary_current",
    "aux_TU",

    # Verificacao
    "IdentityId",
    "GammaParams",
    "run_identity",
    "gradient_check",
    "subdomain_flux_check",
    "energy_directional_fd",
    "flow_step",
    "run_flow",
    "CheckReport",
]
