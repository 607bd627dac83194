from .context import OperatorContext
from .willmore import (
    TERM_NAMES,
    W1_TERMS,
    W2_TERMS,
    W3_TERMS,
    WillmoreFields,
    assembly_residual,
    residual_norms,
    willmore,
    willmore_terms,
)
from .boundary import T_TERMS, aux_TU, aux_U, boundary_current

__all__ = [
    "OperatorContext",
    "TERM_NAMES",
    "W1_TERMS",
    "W2_TERMS",
    "W3_TERMS",
    "WillmoreFields",
    "assembly_residual",
    "residual_norms",
    "willmore",
    "willmore_terms",
    "T_TERMS",
    "aux_TU",
    "aux_U",
    "boundary_current",
]
