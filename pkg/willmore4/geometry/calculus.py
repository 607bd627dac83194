"""
Calculo tensorial no fibrado normal.

Tensores sao arrays `dims + (4,)*posto + (m,)` (ambiente) ou
`dims + (4,)*posto` (reais, ambient=False). A derivada covariante insere o
novo indice logo depois dos eixos da grade:

    (D T)_{i a1..ak} = d_i T_{a1..ak} - sum_s Gamma^c_{i a_s} T_{..c..}

O slot R^m e' inerte (derivada ambiente componente a componente); a versao
normal aplica P_nor no fim. Divergencias e Laplacianos sao calculados fatia
por fatia, de modo que o maior array vivo tem o tamanho do proprio tensor.
"""
from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np

from ..errors import NormalityError
from ..grid.lattice import NDIM, partial_array
from .fields import GeometryFields, apply_projector

logger = logging.getLogger(__name__)

_SLOTS = "pqrstuvw"


def _tail(ambient: bool) -> str:
    return "m" if ambient else ""


def _gamma_correction(values: np.ndarray, Gi: np.ndarray, rank: int, ambient: bool) -> np.ndarray:
    """sum_s Gi^c_{a_s} T_{..c..}, com Gi[..., c, a] = Gamma^c_{i a} para i fixo."""
    letters = _SLOTS[:rank]
    tail = _tail(ambient)
    out = np.zeros_like(values)
    for s in range(rank):
        src = letters[:s] + "z" + letters[s + 1:]
        out += np.einsum(f"...z{letters[s]},...{src}{tail}->...{letters}{tail}", Gi, values)
    return out


def covariant_derivative_along(
    values: np.ndarray, geo: GeometryFields, rank: int, i: int, ambient: bool = True
) -> np.ndarray:
    """(D_i T) para um unico i; mesmo shape de T."""
    d = partial_array(values, geo.grid, i)
    if rank == 0:
        return d
    return d - _gamma_correction(values, geo.Gamma[..., :, i, :], rank, ambient)


def covariant_derivative(values: np.ndarray, geo: GeometryFields, rank: int, ambient: bool = True) -> np.ndarray:
    """Derivada covariante bruta (sem projecao); posto sobe um."""
    return np.stack(
        [covariant_derivative_along(values, geo, rank, i, ambient) for i in range(NDIM)],
        axis=NDIM,
    )


def check_normal(values: np.ndarray, geo: GeometryFields, what: str = "campo") -> None:
    """Levanta NormalityError se a parte tangencial passar da tolerancia relativa."""
    finite = np.isfinite(values)
    scale = float(np.abs(np.where(finite, values, 0.0)).max()) if values.size else 0.0
    if scale == 0.0:
        return
    tang = apply_projector(geo.P_tan, np.where(finite, values, 0.0))
    worst = float(np.abs(np.where(np.isfinite(tang), tang, 0.0)).max())
    if worst > geo.normality_rtol * scale:
        idx = np.unravel_index(int(np.nanargmax(np.abs(tang))), tang.shape)
        raise NormalityError(
            f"{what} nao e' normal: parte tangencial {worst:.3e} > "
            f"{geo.normality_rtol:.1e} * {scale:.3e} (ponto {tuple(int(i) for i in idx[:NDIM])})"
        )


def normal_gradient_along(
    values: np.ndarray, geo: GeometryFields, rank: int, i: int
) -> np.ndarray:
    return apply_projector(geo.P_nor, covariant_derivative_along(values, geo, rank, i))


def normal_gradient(
    values: np.ndarray, geo: GeometryFields, rank: int, strict: Optional[bool] = None
) -> np.ndarray:
    """pi_n D T de um campo normal; com modo estrito confere a normalidade antes."""
    if geo.strict_normality if strict is None else strict:
        check_normal(values, geo, f"tensor de posto {rank}")
    return apply_projector(geo.P_nor, covariant_derivative(values, geo, rank))


# ---------- Divergencias ----------

def sliced_divergence(
    slice_fn: Callable[[int], np.ndarray],
    geo: GeometryFields,
    rest_rank: int,
    ambient: bool = True,
) -> np.ndarray:
    """g^{ia} D_i Z_{a R} dado Z fatia a fatia (slice_fn(a) = Z_{a R}).

        g^{ia} D_i Z_{aR} = sum_a sum_i g^{ia} (d_i Z_a - Gamma-correcao em R)
                            - sum_e (g^{ia} Gamma^e_{ia}) Z_e
    """
    contracted = np.einsum("...ia,...eia->...e", geo.g_inv, geo.Gamma)
    acc = None
    for a in range(NDIM):
        Za = slice_fn(a)
        pad = (slice(None),) * NDIM + (None,) * (Za.ndim - NDIM)
        term = -contracted[..., a][pad] * Za
        for i in range(NDIM):
            DiZa = covariant_derivative_along(Za, geo, rest_rank, i, ambient)
            term = term + geo.g_inv[..., i, a][pad] * DiZa
        acc = term if acc is None else acc + term
    return acc


def divergence(values: np.ndarray, geo: GeometryFields, rank: int, ambient: bool = True) -> np.ndarray:
    """g^{ia} D_i T_{a...} (contrai a derivada com o primeiro slot); posto cai um."""
    if rank < 1:
        raise ValueError("divergencia exige posto >= 1")
    return sliced_divergence(lambda a: values[(slice(None),) * NDIM + (a,)], geo, rank - 1, ambient)


def laplacian(values: np.ndarray, geo: GeometryFields, rank: int = 0, ambient: bool = True) -> np.ndarray:
    """Laplaciano bruto g^{ij} D_i D_j T."""
    return sliced_divergence(
        lambda a: covariant_derivative_along(values, geo, rank, a, ambient), geo, rank, ambient
    )


def normal_laplacian(
    values: np.ndarray, geo: GeometryFields, rank: int = 0, strict: Optional[bool] = None
) -> np.ndarray:
    """Delta_perp T = g^{ij} pi_n D_i pi_n D_j T."""
    if geo.strict_normality if strict is None else strict:
        check_normal(values, geo, f"tensor de posto {rank}")
    out = sliced_divergence(lambda a: normal_gradient_along(values, geo, rank, a), geo, rank)
    return apply_projector(geo.P_nor, out)


def normal_bilaplacian(values: np.ndarray, geo: GeometryFields, rank: int = 0, strict: Optional[bool] = None) -> np.ndarray:
    return normal_laplacian(normal_laplacian(values, geo, rank, strict), geo, rank, strict=False)


def raise_first(values: np.ndarray, geo: GeometryFields) -> np.ndarray:
    """Sobe o primeiro indice covariante com g^{-1}."""
    rest = values.ndim - NDIM - 1
    letters = "cdefgh"[:rest]
    return np.einsum(f"...ab,...b{letters}->...a{letters}", geo.g_inv, values)


def dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Produto escalar no slot ambiente."""
    return np.einsum("...m,...m->...", a, b)
