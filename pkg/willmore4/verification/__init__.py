from .variation import (
    DirectionalDerivative,
    energy_directional_fd,
    eps_schedule,
    face_flux,
    gradient_check,
    normalize_box,
    observed_orders,
    richardson,
    subdomain_flux_check,
)
from .identities import (
    CHECKS,
    INTEGRAL_IDS,
    Evaluation,
    GammaParams,
    IdentityId,
    derived_rtol,
    energy_scale_invariance,
    evaluate_identity,
    identity_grid,
    run_identity,
)
from .manifest import ManifestRow, load_manifest, parse_manifest, parse_manifest_line

__all__ = [
    # Variacao
    "DirectionalDerivative",
    "energy_directional_fd",
    "eps_schedule",
    "face_flux",
    "gradient_check",
    "normalize_box",
    "observed_orders",
    "richardson",
    "subdomain_flux_check",
    # Identidades
    "CHECKS",
    "INTEGRAL_IDS",
    "Evaluation",
    "GammaParams",
    "IdentityId",
    "derived_rtol",
    "energy_scale_invariance",
    "evaluate_identity",
    "identity_grid",
    "run_identity",
    # Manifesto
    "ManifestRow",
    "load_manifest",
    "parse_manifest",
    "parse_manifest_line",
]
