"""
Funcao de corte gamma no espaco de parametros.

    gamma(u) = S(t),  t = clip((1 - (r/rho)^2) / (3/4), 0, 1),  S(t) = 6t^5 - 15t^4 + 10t^3

gamma = 1 na bola de raio rho/2, 0 fora do raio rho, C^2 na borda. A distancia
r usa imagem minima nos eixos periodicos e pode ser restrita a um subconjunto
de eixos (corte em faixa). Derivadas sao analiticas (regra da cadeia).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import CutoffSupportError
from .lattice import NDIM, Grid4, ScalarField

logger = logging.getLogger(__name__)

_PLATEAU = 0.75  # 1 - (1/2)^2


def smoothstep5(t: np.ndarray) -> np.ndarray:
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def smoothstep5_prime(t: np.ndarray) -> np.ndarray:
    return 30.0 * t * t * (1.0 - t) * (1.0 - t)


@dataclass(frozen=True, eq=False)
class CutoffFields:
    """gamma, seu gradiente coordenado e os parametros que o geraram."""
    grid: Grid4
    gamma: ScalarField
    grad: np.ndarray                        # dims + (4,)
    center: Optional[Tuple[float, ...]]
    rho: Optional[float]
    p: float
    axes: Tuple[int, ...]

    def power(self, p: Optional[float] = None) -> np.ndarray:
        """gamma**p"""
        p = self.p if p is None else p
        return self.gamma.values ** p

    def power_gradient(self, p: Optional[float] = None) -> np.ndarray:
        """gamma**(p-1) * d_i gamma, shape dims + (4,)"""
        p = self.p if p is None else p
        return (self.gamma.values ** (p - 1.0))[..., None] * self.grad

    def gradient_bound(self) -> float:
        """max |d gamma| * rho (norma coordenada)."""
        if self.rho is None:
            return 0.0
        return float(np.sqrt((self.grad ** 2).sum(axis=-1)).max() * self.rho)

    def support_mask(self) -> np.ndarray:
        return self.gamma.values > 0.0

    def describe(self) -> dict:
        return {
            "center": None if self.center is None else list(self.center),
            "rho": self.rho,
            "p": self.p,
            "axes": list(self.axes),
        }


def _displacements(grid: Grid4, center: Sequence[float], axes: Sequence[int]):
    mesh = grid.mesh()
    ext = grid.extent
    out = []
    for a in range(NDIM):
        if a not in axes:
            out.append(None)
            continue
        d = mesh[a] - center[a]
        if grid.periodic[a]:
            d = np.mod(d + 0.5 * ext[a], ext[a]) - 0.5 * ext[a]
        out.append(d)
    return out


def cutoff_field(
    grid: Grid4,
    center: Optional[Sequence[float]] = None,
    rho: Optional[float] = None,
    p: float = 4.0,
    axes: Optional[Sequence[int]] = None,
) -> CutoffFields:
    """Sintetiza gamma e suas derivadas.

    Args:
        grid: reticulado
        center: centro no espaco de parametros (padrao: meio do dominio)
        rho: raio do suporte; None = dominio inteiro (gamma = 1), so em grade periodica
        p: expoente usado por `power`/`power_gradient`
        axes: eixos em que a distancia e' medida (padrao: todos)

    Raises:
        CutoffSupportError: suporte encosta na faixa de margem de um eixo limitado,
            ou rho=None numa grade com eixo limitado
    """
    if p < 4:
        raise CutoffSupportError(f"expoente p={p} abaixo de 4")
    axes_t = tuple(range(NDIM)) if axes is None else tuple(sorted(set(int(a) for a in axes)))
    if any(a < 0 or a >= NDIM for a in axes_t):
        raise CutoffSupportError(f"eixos invalidos para o corte: {axes_t}")

    if rho is None:
        if not all(grid.periodic):
            bounded = [a for a in range(NDIM) if not grid.periodic[a]]
            raise CutoffSupportError(
                f"rho=None (gamma = 1 no dominio todo) exige grade periodica; eixos limitados: {bounded}"
            )
        gamma = ScalarField(grid, np.ones(grid.shape))
        return CutoffFields(grid, gamma, np.zeros(grid.shape + (NDIM,)), None, None, float(p), axes_t)
    if not rho > 0:
        raise CutoffSupportError(f"raio do corte deve ser positivo: {rho}")

    if center is None:
        center = tuple(o + 0.5 * e for o, e in zip(grid.origin, grid.extent))
    center_t = tuple(float(c) for c in center)
    if len(center_t) != NDIM:
        raise CutoffSupportError(f"centro precisa de {NDIM} coordenadas: {center_t}")

    disp = _displacements(grid, center_t, axes_t)
    r2 = np.zeros(grid.shape)
    for d in disp:
        if d is not None:
            r2 = r2 + d * d
    s = (1.0 - r2 / (rho * rho)) / _PLATEAU
    t = np.clip(s, 0.0, 1.0)
    gamma_vals = smoothstep5(t)

    # dgamma/du_a = S'(t) * dt/du_a, dt/du_a = -2 d_a / (rho^2 * 3/4) no miolo
    inside = (s > 0.0) & (s < 1.0)
    sp = np.where(inside, smoothstep5_prime(t), 0.0)
    grad = np.zeros(grid.shape + (NDIM,))
    for a, d in enumerate(disp):
        if d is not None:
            grad[..., a] = sp * (-2.0 * d / (rho * rho * _PLATEAU))

    support = gamma_vals > 0.0
    outside = ~grid.interior_mask()
    if (support & outside).any():
        idx = tuple(int(i) for i in np.argwhere(support & outside)[0])
        raise CutoffSupportError(
            f"suporte do corte (centro={center_t}, rho={rho}) encosta na margem em {idx}"
        )

    logger.debug("cutoff centro=%s rho=%.4g p=%g eixos=%s pontos no suporte=%d",
                 center_t, rho, p, axes_t, int(support.sum()))
    return CutoffFields(grid, ScalarField(grid, gamma_vals), grad, center_t, float(rho), float(p), axes_t)
