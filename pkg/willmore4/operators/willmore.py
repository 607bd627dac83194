"""
Operador de Euler-Lagrange W = W1 - W2 + 7 W3 da energia de Willmore 4-D.

As catorze parcelas assinadas de W ficam acessiveis pelo nome (mesma ordem
da expansao: seis de W1, cinco de -W2, tres de 7 W3):

    w1_bilaplacian      -1/2 Dperp^2 H
    w1_laplacian_h      -1/2 (h_ik . Dperp H) h^ik
    w1_grad_sq          -4 |pi_n D H|^2 H
    w1_div_dH_h         +2 pi_n D_j ((h^j_i . D^i H) H)
    w1_div_Hh_DH        -2 pi_n D_j ((H . h^j_i) pi_n D^i H)
    w1_DH_DH_h          +2 (pi_n D_i H . pi_n D_j H) h^ij
    w2_laplacian_Q      -1/2 Dperp Q,             Q = (H . h^ij) h_ij
    w2_div_div_S        -2 pi_n D_i D_k S^ik,     S^ik = (H . h^ik) H (derivada bruta)
    w2_Hh_hh_h          -1/2 (H . h^ij)(h_ij . h_pq) h^pq
    w2_Hh_Hh_h          -4 (H . h_ij)(H . h^i_k) h^jk
    w2_Hh_sq_H          +4 |H . h|^2 H
    w3_quartic          -28 |H|^4 H
    w3_laplacian_H2H    +7 Dperp(|H|^2 H)
    w3_H2_Hh_h          +7 |H|^2 (H . h_ij) h^ij

Sinal: dE = +int B . W dmu para variacoes normais de suporte compacto.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from ..geometry.calculus import divergence, normal_laplacian
from ..geometry.fields import GeometryFields, apply_projector
from ..grid.lattice import NDIM, integrate, pointwise_norm, region_values
from .context import OperatorContext

logger = logging.getLogger(__name__)

W1_TERMS = (
    "w1_bilaplacian",
    "w1_laplacian_h",
    "w1_grad_sq",
    "w1_div_dH_h",
    "w1_div_Hh_DH",
    "w1_DH_DH_h",
)
W2_TERMS = (
    "w2_laplacian_Q",
    "w2_div_div_S",
    "w2_Hh_hh_h",
    "w2_Hh_Hh_h",
    "w2_Hh_sq_H",
)
W3_TERMS = (
    "w3_quartic",
    "w3_laplacian_H2H",
    "w3_H2_Hh_h",
)
TERM_NAMES = W1_TERMS + W2_TERMS + W3_TERMS


@dataclass(frozen=True, eq=False)
class WillmoreFields:
    """W e suas partes; V, T e U quando pedidos."""
    W1: np.ndarray
    W2: np.ndarray
    W3: np.ndarray
    W: np.ndarray
    terms: Dict[str, np.ndarray] = field(default_factory=dict)
    V: Optional[np.ndarray] = None
    T: Optional[np.ndarray] = None
    U: Optional[np.ndarray] = None


def _w2_Hh_hh_h(geo: GeometryFields, c: OperatorContext) -> np.ndarray:
    hh = np.einsum("...ijn,...pqn->...ijpq", geo.h, geo.h)
    return -0.5 * np.einsum("...ij,...ijpq,...pqm->...m", c.Hh_up, hh, c.h_upup, optimize=True)


_BUILDERS: Dict[str, Callable[[GeometryFields, OperatorContext], np.ndarray]] = {
    "w1_bilaplacian": lambda geo, c: -0.5 * normal_laplacian(c.LH, geo, 0, strict=False),
    "w1_laplacian_h": lambda geo, c: -0.5 * np.einsum(
        "...ikn,...n,...ikm->...m", geo.h, c.LH, c.h_upup, optimize=True),
    "w1_grad_sq": lambda geo, c: -4.0 * c.DH_sq[..., None] * geo.H,
    "w1_div_dH_h": lambda geo, c: 2.0 * apply_projector(geo.P_nor, divergence(
        np.einsum("...jin,...in->...j", c.h_up, c.dH)[..., None] * geo.H[..., None, :], geo, 1)),
    "w1_div_Hh_DH": lambda geo, c: -2.0 * apply_projector(geo.P_nor, divergence(
        np.einsum("...ji,...im->...jm", c.Hh_mixed, c.DH), geo, 1)),
    "w1_DH_DH_h": lambda geo, c: 2.0 * np.einsum(
        "...in,...jn,...ijm->...m", c.DH, c.DH, c.h_upup, optimize=True),
    "w2_laplacian_Q": lambda geo, c: -0.5 * normal_laplacian(c.Q, geo, 0),
    "w2_div_div_S": lambda geo, c: -2.0 * apply_projector(geo.P_nor, divergence(c.div_S, geo, 1)),
    "w2_Hh_hh_h": _w2_Hh_hh_h,
    "w2_Hh_Hh_h": lambda geo, c: -4.0 * np.einsum(
        "...ij,...il,...lk,...jkm->...m", c.Hh, geo.g_inv, c.Hh, c.h_upup, optimize=True),
    "w2_Hh_sq_H": lambda geo, c: 4.0 * c.Hh_sq[..., None] * geo.H,
    "w3_quartic": lambda geo, c: -28.0 * (c.H2 * c.H2)[..., None] * geo.H,
    "w3_laplacian_H2H": lambda geo, c: 7.0 * normal_laplacian(c.H2H, geo, 0),
    "w3_H2_Hh_h": lambda geo, c: 7.0 * c.H2[..., None] * np.einsum("...ij,...ijm->...m", c.Hh, c.h_upup),
}


def willmore_terms(
    geo: GeometryFields,
    ctx: Optional[OperatorContext] = None,
    only: Optional[Sequence[str]] = None,
) -> Dict[str, np.ndarray]:
    """Parcelas assinadas de W (todas, ou as de `only`), cada uma dims + (m,)."""
    c = ctx or OperatorContext(geo)
    names = TERM_NAMES if only is None else tuple(only)
    unknown = [n for n in names if n not in _BUILDERS]
    if unknown:
        raise KeyError(f"parcelas desconhecidas: {unknown}")
    return {name: _BUILDERS[name](geo, c) for name in names}


def willmore(geo: GeometryFields, ctx: Optional[OperatorContext] = None) -> WillmoreFields:
    """Monta W1, W2, W3 e W = W1 - W2 + 7 W3."""
    terms = willmore_terms(geo, ctx)
    W1 = sum(terms[k] for k in W1_TERMS)
    W2 = -sum(terms[k] for k in W2_TERMS)
    W3 = sum(terms[k] for k in W3_TERMS) / 7.0
    W = W1 - W2 + 7.0 * W3
    logger.debug("W montado em %s", geo.grid.dims)
    return WillmoreFields(W1=W1, W2=W2, W3=W3, W=W, terms=terms)


def _coefficient(term: np.ndarray, ref: np.ndarray) -> Optional[float]:
    den = float(np.sum(ref * ref))
    if den == 0.0:
        return None
    return float(np.sum(term * ref)) / den


def residual_norms(
    wf: WillmoreFields,
    geo: GeometryFields,
    reference: Optional[np.ndarray] = None,
    target: Optional[np.ndarray] = None,
) -> Dict[str, object]:
    """Normas de W - target no conjunto interior e tabela por parcela.

    Com `reference` (ex.: H), cada parcela ganha seu coeficiente de minimos
    quadrados contra ela.
    """
    grid = geo.grid
    diff = wf.W if target is None else wf.W - target
    region = region_values(diff, grid)
    mags = pointwise_norm(region, NDIM)
    linf = float(mags.max()) if mags.size else 0.0
    sq = pointwise_norm(diff, NDIM) ** 2
    l2 = float(np.sqrt(max(integrate(sq, geo.sqrt_det_g, grid=grid), 0.0)))
    tangential = float(pointwise_norm(region_values(apply_projector(geo.P_tan, wf.W), grid), NDIM).max())

    table = {}
    ref_region = None if reference is None else region_values(reference, grid)
    for name, values in wf.terms.items():
        reg = region_values(values, grid)
        row = {"linf": float(pointwise_norm(reg, NDIM).max()) if reg.size else 0.0}
        if ref_region is not None:
            row["coefficient"] = _coefficient(reg, ref_region)
        table[name] = row
    return {"linf": linf, "l2": l2, "tangential_linf": tangential, "terms": table}


def assembly_residual(wf: WillmoreFields) -> float:
    return float(np.nanmax(np.abs(wf.W - (wf.W1 - wf.W2 + 7.0 * wf.W3))))
