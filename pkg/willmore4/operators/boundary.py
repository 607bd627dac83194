"""
Corrente de fronteira V^j e os campos auxiliares T, U^i da identidade integral.

V (indice baixado, depois subido com g):
    V_j = 1/2 (D_j H . h^ik)(B . h_ik) + 1/2 D_j H . Dperp B
        - 2 (D^i H . h_ij)(H . B) + 2 (D^i H . B)(H . h_ij)
        - 1/2 Dperp H . D_j B + 1/2 D_j Dperp H . B
        - 1/2 (H . h^ik)(h_ik . D_j B) + 1/2 pi_n D_j Q . B
        - 2 (H . h^i_j)(H . D_i B) + 2 pi_n D_i S^i_j . B
        + 7 |H|^2 H . D_j B - 7 pi_n D_j(|H|^2 H) . B

Com ela, delta(e sqrt g) = (B . W + D_j V^j) sqrt g ponto a ponto.
"""
from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np

from ..geometry.calculus import check_normal, covariant_derivative, normal_gradient, normal_laplacian
from ..geometry.fields import GeometryFields, apply_projector
from .context import OperatorContext

logger = logging.getLogger(__name__)

# parcelas algebricas de W que compoem T
T_TERMS = ("w1_DH_DH_h", "w1_grad_sq", "w2_Hh_Hh_h", "w2_Hh_sq_H", "w2_Hh_hh_h", "w3_quartic")


def _raise(geo: GeometryFields, lowered: np.ndarray) -> np.ndarray:
    return np.einsum("...jk,...k->...j", geo.g_inv, lowered)


def boundary_current(
    geo: GeometryFields,
    B: np.ndarray,
    ctx: Optional[OperatorContext] = None,
    lowered: bool = False,
) -> np.ndarray:
    """V^j (ou V_j com lowered=True), dims + (4,).

    Raises:
        NormalityError: B com parte tangencial acima da tolerancia
    """
    check_normal(B, geo, "variacao B")
    c = ctx or OperatorContext(geo)
    H, h = geo.H, geo.h
    dB = covariant_derivative(B, geo, 0)                       # D_j B bruto
    LB = normal_laplacian(B, geo, 0, strict=False)
    Bh = np.einsum("...m,...ikm->...ik", B, h)
    HB = np.einsum("...m,...m->...", H, B)

    V = 0.5 * np.einsum("...jn,...ikn,...ik->...j", c.dH, c.h_upup, Bh, optimize=True)
    V += 0.5 * np.einsum("...jm,...m->...j", c.dH, LB)
    V -= 2.0 * np.einsum("...ln,...jln->...j", c.dH, c.h_up) * HB[..., None]
    dHB = np.einsum("...lm,...m->...l", c.dH, B)
    V += 2.0 * np.einsum("...l,...jl->...j", dHB, c.Hh_mixed)
    V -= 0.5 * np.einsum("...m,...jm->...j", c.LH, dB)
    V += 0.5 * np.einsum("...jm,...m->...j", covariant_derivative(c.LH, geo, 0), B)
    V -= 0.5 * np.einsum("...ik,...ikn,...jn->...j", c.Hh_up, h, dB, optimize=True)
    V += 0.5 * np.einsum("...jm,...m->...j", normal_gradient(c.Q, geo, 0), B)
    HdB = np.einsum("...m,...im->...i", H, dB)
    V -= 2.0 * np.einsum("...ji,...i->...j", c.Hh_mixed, HdB)
    V += 2.0 * np.einsum("...jm,...m->...j", apply_projector(geo.P_nor, c.div_S), B)
    V += 7.0 * c.H2[..., None] * HdB
    V -= 7.0 * np.einsum("...jm,...m->...j", normal_gradient(c.H2H, geo, 0), B)
    return V if lowered else _raise(geo, V)


def aux_TU(geo: GeometryFields, ctx: Optional[OperatorContext] = None) -> Tuple[np.ndarray, np.ndarray]:
    """T (vetor normal) e U^i (real) exatamente como exibidos na identidade integral."""
    from .willmore import willmore_terms

    c = ctx or OperatorContext(geo)
    terms = willmore_terms(geo, c, only=T_TERMS)
    T = sum(terms[k] for k in T_TERMS)
    return T, aux_U(geo, c)


def aux_U(geo: GeometryFields, ctx: Optional[OperatorContext] = None) -> np.ndarray:
    """U^i, dims + (4,)."""
    c = ctx or OperatorContext(geo)
    H = geo.H
    dLH = covariant_derivative(c.LH, geo, 0)
    dH2 = covariant_derivative(c.H2, geo, 0, ambient=False)
    U = -0.5 * np.einsum("...m,...im->...i", c.LH, c.dH)
    U += 0.5 * np.einsum("...m,...im->...i", H, dLH)
    U += 0.5 * np.einsum("...in,...jkn,...jk->...i", c.dH, geo.h, c.Hh_up, optimize=True)
    U -= 2.0 * np.einsum("...ln,...iln->...i", c.dH, c.h_up) * c.H2[..., None]
    U += np.einsum("...l,...il->...i", dH2, c.Hh_mixed)
    U += 0.5 * np.einsum("...im,...m->...i", covariant_derivative(c.Q, geo, 0), H)
    U += 2.0 * np.einsum("...im,...m->...i", c.div_S, H)
    U -= 7.0 * np.einsum("...im,...m->...i", covariant_derivative(c.H2H, geo, 0), H)
    return _raise(geo, U)
