"""
Formas fechadas para produtos de esferas redondas S^k1(r1) x ... (sum k = 4).

Com a_f = 1/r_f e S = sum k_f^2 a_f^2:
    H   = -1/4 sum k_f a_f nu_f            |H|^2 = S / 16
    e   = -(1/16) sum k_f^3 a_f^4 + (7/256) S^2
    E   = e * prod vol(S^k_f(r_f))
    W   = sum w_f nu_f,  w_f = k_f a_f e + 1/4 k_f^3 a_f^5 - (7/64) S k_f^2 a_f^3
nu_f e' a normal unitaria externa do fator f. w_f sai de dE/dr_f = w_f * E/e,
ou seja, o mesmo sinal de dE = int B.W.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..errors import ShapeSpecError
from .catalog import Jet2Field, ShapeSpec, _sphere_components


def sphere_volume(k: int, r: float) -> float:
    """Volume k-dimensional de S^k(r)."""
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0) * r ** k


@dataclass(frozen=True)
class ProductOracle:
    kind: str
    orders: Tuple[int, ...]
    radii: Tuple[float, ...]
    density: float
    volume: float
    energy: float
    mean_curvature_sq: float
    w: Tuple[float, ...]

    @property
    def is_critical(self) -> bool:
        scale = max(abs(x) for x in self.w) if self.w else 0.0
        ref = max(1.0 / min(self.radii) ** 5, 1.0)
        return scale <= 1e-12 * ref

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "orders": list(self.orders),
            "radii": list(self.radii),
            "density": self.density,
            "volume": self.volume,
            "energy": self.energy,
            "mean_curvature_sq": self.mean_curvature_sq,
            "w": list(self.w),
        }


def product_oracle(spec: ShapeSpec) -> ProductOracle:
    if spec.kind == "flat_patch":
        return ProductOracle(spec.kind, (), (), 0.0, math.inf, 0.0, 0.0, ())
    factors = spec.factors()
    orders = tuple(k for k, _, _ in factors)
    radii = tuple(r * spec.scale for _, r, _ in factors)
    a = [1.0 / r for r in radii]
    S = sum(k * k * ai * ai for k, ai in zip(orders, a))
    e = -sum(k ** 3 * ai ** 4 for k, ai in zip(orders, a)) / 16.0 + 7.0 * S * S / 256.0
    vol = 1.0
    for k, r in zip(orders, radii):
        vol *= sphere_volume(k, r)
    w = tuple(
        k * ai * e + 0.25 * k ** 3 * ai ** 5 - 7.0 / 64.0 * S * k * k * ai ** 3
        for k, ai in zip(orders, a)
    )
    return ProductOracle(spec.kind, orders, radii, e, vol, e * vol, S / 16.0, w)


def factor_normals(spec: ShapeSpec, jet: Jet2Field) -> List[np.ndarray]:
    """nu_f por ponto: as colunas do fator f em Phi divididas pelo raio."""
    if spec.kind == "flat_patch":
        raise ShapeSpecError("flat_patch nao tem fatores esfericos")
    normals = []
    col = 0
    for k, r, axes in spec.factors():
        ncols = len(_sphere_components(k, axes))
        nu = np.zeros(jet.phi.shape)
        nu[..., col:col + ncols] = jet.phi[..., col:col + ncols] / (r * spec.scale)
        normals.append(nu)
        col += ncols
    return normals


def oracle_mean_curvature(spec: ShapeSpec, jet: Jet2Field) -> np.ndarray:
    oracle = product_oracle(spec)
    H = np.zeros(jet.phi.shape)
    for k, r, nu in zip(oracle.orders, oracle.radii, factor_normals(spec, jet)):
        H -= 0.25 * k / r * nu
    return H


def oracle_willmore(spec: ShapeSpec, jet: Jet2Field) -> np.ndarray:
    """W = sum w_f nu_f amostrado na grade do jato."""
    if spec.kind == "flat_patch":
        return np.zeros(jet.phi.shape)
    oracle = product_oracle(spec)
    W = np.zeros(jet.phi.shape)
    for wf, nu in zip(oracle.w, factor_normals(spec, jet)):
        W += wf * nu
    return W


def s2xs2_coefficient_ratio(r1: float, r2: float) -> float:
    """w_1 / a_1 para S^2(r1) x S^2(r2); zero so quando r1 = r2."""
    a1, a2 = 1.0 / r1, 1.0 / r2
    return (a1 ** 4 - a2 ** 4) / 8.0
