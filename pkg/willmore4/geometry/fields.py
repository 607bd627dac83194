"""
Dados geometricos de primeira e segunda ordem de uma imersao amostrada.

Layout dos arrays (dims = shape da grade):
    g, g_inv       dims + (4, 4)
    Gamma          dims + (4, 4, 4)     Gamma[..., k, i, j] = Gamma^k_ij
    h, h0          dims + (4, 4, m)
    H              dims + (m,)
    P_tan, P_nor   dims + (m, m)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np

from ..config import EngineConfig, get_engine_config
from ..errors import DegenerateImmersionError
from ..grid.lattice import NDIM, AmbientTensorField, Grid4, ScalarField

if TYPE_CHECKING:
    from ..shapes.catalog import Jet2Field

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GeometryFields:
    grid: Grid4
    phi: np.ndarray
    dphi: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    sqrt_det_g: np.ndarray
    Gamma: np.ndarray
    h: np.ndarray
    H: np.ndarray
    h0: np.ndarray
    P_tan: np.ndarray
    P_nor: np.ndarray
    strict_normality: bool = True
    normality_rtol: float = 1e-6

    @property
    def ambient_dim(self) -> int:
        return int(self.H.shape[-1])

    @property
    def h_up(self) -> np.ndarray:
        """h_a^l = g^{lk} h_ak, indices [..., a, l, m]."""
        return np.einsum("...lk,...akm->...alm", self.g_inv, self.h)

    @property
    def h_upup(self) -> np.ndarray:
        """h^{ab} = g^{ai} g^{bj} h_ij."""
        return np.einsum("...ai,...bj,...ijm->...abm", self.g_inv, self.g_inv, self.h, optimize=True)

    def field(self, name: str) -> AmbientTensorField:
        if name == "H":
            return AmbientTensorField(self.grid, self.H)
        if name in ("h", "h0"):
            return AmbientTensorField(self.grid, getattr(self, name), symmetric=((0, 1),))
        raise KeyError(name)

    def volume_element(self) -> ScalarField:
        return ScalarField(self.grid, self.sqrt_det_g)


# ---------- Primeira forma ----------

def first_fundamental(
    dphi: np.ndarray,
    grid: Grid4,
    degeneracy_eps: float = 1e-10,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """g_ij = dPhi_i . dPhi_j, inversa e sqrt(det g).

    Pontos com jato indefinido (faixa NaN de eixo limitado) ficam NaN; o teste
    de degenerescencia olha so o conjunto interior.
    """
    g = np.einsum("...im,...jm->...ij", dphi, dphi)
    bad = ~np.isfinite(g).all(axis=(-1, -2))
    g_safe = np.where(bad[..., None, None], np.eye(NDIM), g)
    det = np.linalg.det(g_safe)
    det_in = np.where(grid.interior_mask() & ~bad, det, np.inf)
    k = int(np.argmin(det_in))
    det_min = float(det_in.ravel()[k])
    if det_min <= degeneracy_eps:
        idx = tuple(int(i) for i in np.unravel_index(k, det_in.shape))
        raise DegenerateImmersionError(
            f"imersao degenerada: det g = {det_min:.3e} <= {degeneracy_eps:.1e} em {idx}",
            index=idx, value=det_min,
        )
    # fora do interior det pode ser <= 0 numa imersao perturbada; vira NaN
    det_safe = np.where(det > 0.0, det, np.nan)
    g_inv = np.linalg.inv(np.where((bad | ~(det > 0.0))[..., None, None], np.eye(NDIM), g))
    g_inv[bad | ~(det > 0.0)] = np.nan
    det_safe[bad] = np.nan
    return g, g_inv, np.sqrt(det_safe)


def metric_derivative(dphi: np.ndarray, ddphi: np.ndarray) -> np.ndarray:
    """dg[..., k, i, j] = d_k g_ij = ddPhi_ki . dPhi_j + dPhi_i . ddPhi_kj"""
    a = np.einsum("...kim,...jm->...kij", ddphi, dphi)
    return a + np.swapaxes(a, -1, -2)


def christoffel(g_inv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)."""
    first_kind = 0.5 * (
        np.einsum("...ijl->...lij", dg)
        + np.einsum("...jil->...lij", dg)
        - dg
    )
    return np.einsum("...kl,...lij->...kij", g_inv, first_kind)


# ---------- Segunda forma ----------

def second_fundamental(
    ddphi: np.ndarray,
    dphi: np.ndarray,
    Gamma: np.ndarray,
    g: np.ndarray,
    g_inv: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """h = ddPhi - Gamma^k dPhi_k; H = 1/4 g^ij h_ij; h0 = h - g H."""
    h = ddphi - np.einsum("...kij,...km->...ijm", Gamma, dphi)
    H = 0.25 * np.einsum("...ij,...ijm->...m", g_inv, h)
    h0 = h - g[..., None] * H[..., None, None, :]
    return h, H, h0


def projectors(dphi: np.ndarray, g_inv: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """P_tan = dPhi_i g^ij dPhi_j^T e P_nor = I - P_tan."""
    p_tan = np.einsum("...im,...ij,...jn->...mn", dphi, g_inv, dphi, optimize=True)
    m = dphi.shape[-1]
    return p_tan, np.eye(m) - p_tan


def apply_projector(P: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Aplica P (dims + (m, m)) ao slot ambiente de um tensor de qualquer posto."""
    extra = values.ndim - P.ndim + 1
    Pb = P.reshape(P.shape[:NDIM] + (1,) * extra + P.shape[-2:])
    return np.matmul(Pb, values[..., None])[..., 0]


def project(field, which: str, geo: GeometryFields):
    """pi_n (which='normal') ou pi_T (which='tangent') componente a componente."""
    if which not in ("normal", "tangent"):
        raise ValueError(f"projecao desconhecida: {which!r}")
    P = geo.P_nor if which == "normal" else geo.P_tan
    if isinstance(field, AmbientTensorField):
        return AmbientTensorField(field.grid, apply_projector(P, field.values), field.symmetric)
    return apply_projector(P, np.asarray(field))


# ---------- Montagem ----------

def build_geometry(jet: "Jet2Field", config: Optional[EngineConfig] = None) -> GeometryFields:
    """Constroi todos os campos geometricos a partir de um 2-jato."""
    cfg = config or get_engine_config()
    grid = jet.grid
    g, g_inv, sqrt_det = first_fundamental(jet.dphi, grid, cfg.degeneracy_eps)
    Gamma = christoffel(g_inv, metric_derivative(jet.dphi, jet.ddphi))
    h, H, h0 = second_fundamental(jet.ddphi, jet.dphi, Gamma, g, g_inv)
    p_tan, p_nor = projectors(jet.dphi, g_inv)
    logger.debug("geometria %s montada em %s (m=%d)", jet.label, grid.dims, jet.ambient_dim)
    return GeometryFields(
        grid=grid,
        phi=jet.phi,
        dphi=jet.dphi,
        g=g,
        g_inv=g_inv,
        sqrt_det_g=sqrt_det,
        Gamma=Gamma,
        h=h,
        H=H,
        h0=h0,
        P_tan=p_tan,
        P_nor=p_nor,
        strict_normality=cfg.strict_normality,
        normality_rtol=cfg.normality_rtol,
    )


def structural_residuals(geo: GeometryFields) -> dict:
    """Residuos dos invariantes pontuais de GeometryFields no conjunto interior."""
    sl = geo.grid.interior_slices()
    m = geo.ambient_dim
    trace_g = np.einsum("...ij,...ij->...", geo.g_inv, geo.g)[sl]
    tan_h = apply_projector(geo.P_tan, geo.h)[sl]
    H_from_h = 0.25 * np.einsum("...ij,...ijm->...m", geo.g_inv, geo.h)[sl]
    tr_h0 = np.einsum("...ij,...ijm->...m", geo.g_inv, geo.h0)[sl]
    pt, pn = geo.P_tan[sl], geo.P_nor[sl]
    eye = np.eye(m)
    return {
        "trace_g": float(np.abs(trace_g - 4.0).max()),
        "h_tangential": float(np.abs(tan_h).max()),
        "mean_curvature": float(np.abs(H_from_h - geo.H[sl]).max()),
        "h0_trace": float(np.abs(tr_h0).max()),
        "projector_sum": float(np.abs(pt + pn - eye).max()),
        "projector_idempotent": float(np.abs(np.matmul(pt, pt) - pt).max()),
        "projector_symmetric": float(np.abs(pt - np.swapaxes(pt, -1, -2)).max()),
        "min_eig_g": float(np.linalg.eigvalsh(geo.g[sl]).min()),
    }
