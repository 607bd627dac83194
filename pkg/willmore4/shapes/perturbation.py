"""
Variacoes normais B = b(u) * nu(u) e jatos perturbados Phi + eps*B.

b e' a funcao de corte do modulo de grade; nu segue a regra de direcao:
    "mean_curvature"      nu = H / |H|
    "vector:a1,...,am"    nu = P_nor a / |P_nor a|
Com normalize=False o fator 1/|.| e' omitido. B fica fixo em coordenadas
ambientes; o jato perturbado e' o jato analitico da base mais eps vezes o
jato numerico de B.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..config import EngineConfig, get_engine_config
from ..errors import NormalityError, ShapeSpecError
from ..grid.cutoff import CutoffFields, cutoff_field
from ..grid.lattice import NDIM, Grid4, partial_array
from .catalog import Jet2Field, ShapeSpec, check_immersion, sample_jet

logger = logging.getLogger(__name__)

_DEGENERATE_DIRECTION = 1e-8


@dataclass(frozen=True)
class PerturbationSpec:
    base: ShapeSpec
    amplitude: float = 1e-3
    center: Optional[Tuple[float, ...]] = None
    rho: Optional[float] = None
    direction: str = "mean_curvature"
    normalize: bool = True
    axes: Optional[Tuple[int, ...]] = None
    p: float = 4.0

    def __post_init__(self):
        parse_direction(self.direction, self.base.ambient_dim)
        if self.center is not None:
            object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.axes is not None:
            object.__setattr__(self, "axes", tuple(int(a) for a in self.axes))

    @property
    def kind(self) -> str:
        return "perturbed"

    @property
    def ambient_dim(self) -> int:
        return self.base.ambient_dim

    def with_amplitude(self, amplitude: float) -> "PerturbationSpec":
        return PerturbationSpec(self.base, amplitude, self.center, self.rho, self.direction,
                                self.normalize, self.axes, self.p)

    def describe(self) -> dict:
        return {
            "kind": "perturbed",
            "base": self.base.describe(),
            "amplitude": self.amplitude,
            "center": None if self.center is None else list(self.center),
            "rho": self.rho,
            "direction": self.direction,
            "normalize": self.normalize,
            "axes": None if self.axes is None else list(self.axes),
        }


@dataclass(frozen=True, eq=False)
class VariationField:
    """B e seu 2-jato numerico."""
    grid: Grid4
    B: np.ndarray            # dims + (m,)
    dB: np.ndarray           # dims + (4, m)
    ddB: np.ndarray          # dims + (4, 4, m)
    bump: CutoffFields
    wrapped: bool = field(default=False)

    def scaled(self, factor: float) -> "VariationField":
        return VariationField(self.grid, factor * self.B, factor * self.dB, factor * self.ddB,
                              self.bump, self.wrapped)

    def plus(self, other: "VariationField") -> "VariationField":
        return VariationField(self.grid, self.B + other.B, self.dB + other.dB, self.ddB + other.ddB,
                              self.bump, self.wrapped and other.wrapped)

    @property
    def sup_norm(self) -> float:
        return float(np.sqrt((self.B ** 2).sum(axis=-1)).max())


@dataclass(frozen=True, eq=False)
class PerturbedJet:
    jet: Jet2Field
    base: Jet2Field
    variation: VariationField
    amplitude: float

    @property
    def B(self) -> np.ndarray:
        return self.variation.B


def parse_direction(direction: str, m: int) -> Optional[np.ndarray]:
    """None para mean_curvature; vetor ambiente para vector:..."""
    d = direction.strip()
    if d == "mean_curvature":
        return None
    if d.startswith("vector:"):
        try:
            vec = np.array([float(x) for x in d[len("vector:"):].split(",")])
        except ValueError:
            raise ShapeSpecError(f"direcao com componente invalida: {direction!r}")
        if vec.shape != (m,):
            raise ShapeSpecError(f"direcao precisa de {m} componentes, recebeu {vec.size}")
        if not np.any(vec):
            raise ShapeSpecError("vetor de direcao nulo")
        return vec
    raise ShapeSpecError(f"regra de direcao desconhecida: {direction!r}")


def numeric_jet(values: np.ndarray, grid: Grid4, wrap: Optional[bool] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Primeira e segunda derivadas por estencil: dims+(4,)+rest e dims+(4,4)+rest."""
    d = np.stack([partial_array(values, grid, a, wrap) for a in range(NDIM)], axis=NDIM)
    dd = np.stack([partial_array(d, grid, a, wrap) for a in range(NDIM)], axis=NDIM)
    return d, 0.5 * (dd + np.swapaxes(dd, NDIM, NDIM + 1))


def _vanishes_on_bands(values: np.ndarray, grid: Grid4) -> bool:
    band = 2 * grid.halfwidth
    for a in range(NDIM):
        if grid.periodic[a]:
            continue
        lo = [slice(None)] * values.ndim
        hi = [slice(None)] * values.ndim
        lo[a] = slice(0, band)
        hi[a] = slice(grid.dims[a] - band, None)
        if np.any(values[tuple(lo)]) or np.any(values[tuple(hi)]):
            return False
    return True


def _unit_direction(pspec: PerturbationSpec, base: Jet2Field, support: np.ndarray, cfg: EngineConfig) -> np.ndarray:
    from ..geometry.fields import build_geometry

    geo = build_geometry(base, cfg)
    vec = parse_direction(pspec.direction, base.ambient_dim)
    if vec is None:
        nu = geo.H.copy()
        what = "vetor curvatura media"
    else:
        nu = np.einsum("...mn,n->...m", geo.P_nor, vec)
        what = f"projecao normal de {pspec.direction}"
    if not pspec.normalize:
        return nu
    norm = np.sqrt((nu ** 2).sum(axis=-1))
    scale = float(np.linalg.norm(vec)) if vec is not None else max(float(norm.max()), 1.0)
    bad = support & (norm <= _DEGENERATE_DIRECTION * scale)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise NormalityError(f"direcao degenerada: {what} se anula no suporte do bump em {idx}")
    return nu / np.where(norm > 0.0, norm, 1.0)[..., None]


def variation_field(
    pspec: PerturbationSpec,
    grid: Grid4,
    base: Optional[Jet2Field] = None,
    config: Optional[EngineConfig] = None,
) -> VariationField:
    """Monta B = b nu e seu jato numerico."""
    cfg = config or get_engine_config()
    base = base if base is not None else sample_jet(pspec.base, grid, cfg.degeneracy_eps)
    bump = cutoff_field(grid, pspec.center, pspec.rho, pspec.p, pspec.axes)
    b = bump.gamma.values
    nu = _unit_direction(pspec, base, b > 0.0, cfg)
    B = b[..., None] * nu
    wrapped = _vanishes_on_bands(B, grid)
    dB, ddB = numeric_jet(B, grid, wrap=True if wrapped else None)
    logger.debug("variacao %s: |B|inf=%.3e envolvida=%s", pspec.direction, float(np.abs(B).max()), wrapped)
    return VariationField(grid, B, dB, ddB, bump, wrapped)


def shifted_jet(base: Jet2Field, variation: VariationField, eps: float, degeneracy_eps: float = 1e-10) -> Jet2Field:
    """Jato de Phi + eps*B; eps = 0 devolve a base sem copiar."""
    if eps == 0.0:
        return base
    jet = Jet2Field(
        base.grid,
        base.phi + eps * variation.B,
        base.dphi + eps * variation.dB,
        base.ddphi + eps * variation.ddB,
        label=f"{base.label}+{eps:.3g}B",
    )
    check_immersion(jet, degeneracy_eps)
    return jet


def perturb_normal(
    pspec: PerturbationSpec,
    grid: Grid4,
    config: Optional[EngineConfig] = None,
    base: Optional[Jet2Field] = None,
) -> PerturbedJet:
    """Jato de Phi + eps*B e o proprio B.

    Raises:
        NormalityError: direcao degenerada no suporte do bump
        DegenerateImmersionError: eps grande demais
    """
    cfg = config or get_engine_config()
    base = base if base is not None else sample_jet(pspec.base, grid, cfg.degeneracy_eps)
    var = variation_field(pspec, grid, base, cfg)
    jet = shifted_jet(base, var, pspec.amplitude, cfg.degeneracy_eps)
    logger.info("perturbacao de %s com eps=%.3g (%s)", pspec.base.kind, pspec.amplitude, pspec.direction)
    return PerturbedJet(jet, base, var, pspec.amplitude)
