"""
Energia de Willmore 4-dimensional.

    e = |pi_n D H|^2 - |H.h|^2 + 7|H|^4
    E = int e dmu,   dmu = sqrt(det g) du
"""
from __future__ import annotations

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..geometry.calculus import normal_gradient
from ..geometry.fields import GeometryFields
from ..grid.cutoff import CutoffFields
from ..grid.lattice import ScalarField, gradient_array, integrate

logger = logging.getLogger(__name__)


def density_terms(geo: GeometryFields, grad_H: Optional[np.ndarray] = None) -> Dict[str, np.ndarray]:
    """As tres parcelas da densidade, ponto a ponto."""
    DH = normal_gradient(geo.H, geo, 0) if grad_H is None else grad_H
    grad_sq = np.einsum("...ij,...im,...jm->...", geo.g_inv, DH, DH, optimize=True)
    Hh = np.einsum("...m,...ijm->...ij", geo.H, geo.h)
    Hh_sq = np.einsum("...ik,...jl,...ij,...kl->...", geo.g_inv, geo.g_inv, Hh, Hh, optimize=True)
    H2 = np.einsum("...m,...m->...", geo.H, geo.H)
    return {"grad_H_sq": grad_sq, "H_dot_h_sq": -Hh_sq, "H_quartic": 7.0 * H2 * H2}


def energy_density(geo: GeometryFields) -> ScalarField:
    t = density_terms(geo)
    return ScalarField(geo.grid, t["grad_H_sq"] + t["H_dot_h_sq"] + t["H_quartic"])


def total_energy(
    geo: GeometryFields,
    cutoff: Optional[CutoffFields] = None,
    p: Optional[float] = None,
    box: Optional[Sequence[Optional[Tuple[int, int]]]] = None,
    density: Optional[ScalarField] = None,
) -> float:
    """int e (gamma^p) dmu sobre o conjunto interior ou uma caixa de indices."""
    e = energy_density(geo).values if density is None else density.values
    if cutoff is not None:
        e = e * cutoff.power(p)
    return integrate(e, geo.sqrt_det_g, grid=geo.grid, box=box)


def sobolev_ratio(geo: GeometryFields, u: np.ndarray) -> float:
    """(int |u|^(4/3))^(3/4) / int (|grad u| + |H| |u|), caso r = 1.

    Diagnostico sem aprovacao: a constante da desigualdade nao e' conhecida.
    """
    grad = gradient_array(u, geo.grid)
    grad_norm = np.sqrt(np.maximum(np.einsum("...i,...ij,...j->...", grad, geo.g_inv, grad), 0.0))
    Hn = np.sqrt(np.einsum("...m,...m->...", geo.H, geo.H))
    num = integrate(np.abs(u) ** (4.0 / 3.0), geo.sqrt_det_g, grid=geo.grid) ** 0.75
    den = integrate(grad_norm + Hn * np.abs(u), geo.sqrt_det_g, grid=geo.grid)
    ratio = num / den if den > 0 else float("inf")
    logger.debug("razao de Sobolev: %.6g / %.6g = %.6g", num, den, ratio)
    return float(ratio)
