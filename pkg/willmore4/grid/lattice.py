"""
Reticulado 4-D, campos amostrados, derivadas por diferencas finitas e quadratura.

Convencoes:
- Eixos numerados 0..3. Um campo escalar tem shape `dims`; um campo tensorial
  ambiente de posto k tem shape `dims + (4,)*k + (m,)`.
- Eixos periodicos nao repetem o ponto da costura: spacing = extent / N.
  Eixos limitados incluem as duas pontas: spacing = extent / (N - 1).
- Em eixo limitado, cada aplicacao de `partial` preenche com NaN a faixa de
  meia-largura do estencil nas duas pontas. A regiao valida encolhe sozinha a
  medida que derivadas se empilham; reducoes olham so o conjunto interior e
  levantam StencilDomainError se sobrar NaN ali.
- Somas usam `tree_sum`, reducao em arvore de ordem fixa (determinismo).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import GridError, StencilDomainError

logger = logging.getLogger(__name__)

NDIM = 4

# Coeficientes centrais, deslocamentos -s..s
STENCILS = {
    2: (-1.0 / 2.0, 0.0, 1.0 / 2.0),
    4: (1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0),
    6: (-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0),
}


# ---------- Reticulado ----------

@dataclass(frozen=True)
class Grid4:
    """Reticulado retangular 4-D com flags de periodicidade por eixo."""
    dims: Tuple[int, int, int, int]
    spacing: Tuple[float, float, float, float]
    periodic: Tuple[bool, bool, bool, bool]
    origin: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    interior_margin: int = 0
    fd_order: int = 4

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.dims)

    @property
    def npoints(self) -> int:
        return int(np.prod(self.dims))

    @property
    def halfwidth(self) -> int:
        return self.fd_order // 2

    @property
    def extent(self) -> Tuple[float, ...]:
        return tuple(
            h * n if p else h * (n - 1)
            for h, n, p in zip(self.spacing, self.dims, self.periodic)
        )

    @property
    def h_min(self) -> float:
        return float(min(self.spacing))

    @property
    def h_max(self) -> float:
        return float(max(self.spacing))

    def axis_coords(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.spacing[axis] * np.arange(self.dims[axis], dtype=float)

    def mesh(self) -> Tuple[np.ndarray, ...]:
        """Coordenadas esparsas (broadcastable), indexacao ij."""
        return tuple(np.meshgrid(*[self.axis_coords(a) for a in range(NDIM)], indexing="ij", sparse=True))

    def required_margin(self, depth: int) -> int:
        """Margem necessaria para `depth` aplicacoes empilhadas do estencil."""
        return max(int(depth), 1) * self.halfwidth

    def with_margin(self, margin: int) -> "Grid4":
        return _validated(replace(self, interior_margin=int(margin)))

    def with_order(self, fd_order: int) -> "Grid4":
        return _validated(replace(self, fd_order=int(fd_order)))

    def interior_slices(self, margin: Optional[int] = None) -> Tuple[slice, ...]:
        m = self.interior_margin if margin is None else int(margin)
        return tuple(
            slice(None) if p else slice(m, n - m)
            for n, p in zip(self.dims, self.periodic)
        )

    def interior_mask(self, margin: Optional[int] = None) -> np.ndarray:
        mask = np.zeros(self.dims, dtype=bool)
        mask[self.interior_slices(margin)] = True
        return mask

    def interior_count(self, margin: Optional[int] = None) -> int:
        return int(self.interior_mask(margin).sum())

    def describe(self) -> dict:
        return {
            "dims": list(self.dims),
            "spacing": list(self.spacing),
            "periodic": list(self.periodic),
            "origin": list(self.origin),
            "interior_margin": self.interior_margin,
            "fd_order": self.fd_order,
        }


def _validated(grid: Grid4) -> Grid4:
    if grid.fd_order not in STENCILS:
        raise GridError(f"ordem de estencil nao suportada: {grid.fd_order}")
    width = 2 * grid.halfwidth + 1
    for a in range(NDIM):
        if grid.dims[a] < width:
            raise GridError(
                f"grid too small: eixo {a} tem {grid.dims[a]} pontos, estencil de ordem "
                f"{grid.fd_order} precisa de {width}"
            )
        if not grid.spacing[a] > 0:
            raise GridError(f"extensao nula no eixo {a}")
    bounded = [a for a in range(NDIM) if not grid.periodic[a]]
    if bounded:
        if grid.interior_margin < grid.halfwidth:
            raise GridError(
                f"margem {grid.interior_margin} menor que a meia-largura {grid.halfwidth} "
                f"em eixo nao periodico"
            )
        for a in bounded:
            if grid.dims[a] - 2 * grid.interior_margin < 1:
                raise GridError(
                    f"margem {grid.interior_margin} nao deixa pontos interiores no eixo {a} "
                    f"({grid.dims[a]} pontos)"
                )
    elif grid.interior_margin < 0:
        raise GridError("margem negativa")
    return grid


def build_grid(
    dims: Union[int, Sequence[int]],
    extents: Union[float, Sequence[float]] = 2.0 * np.pi,
    periodic: Union[bool, Sequence[bool]] = True,
    margin: Optional[int] = None,
    origin: Optional[Sequence[float]] = None,
    fd_order: int = 4,
) -> Grid4:
    """Monta um Grid4 validado.

    Args:
        dims: pontos por eixo (um inteiro vale para os quatro eixos)
        extents: extensao de parametro por eixo; eixos angulares usam 2*pi
        periodic: flags por eixo
        margin: pontos excluidos perto das bordas nao periodicas; padrao e' a
            meia-largura do estencil (ou 0 se tudo for periodico)
        origin: canto do dominio de parametros
        fd_order: 2, 4 ou 6

    Returns:
        Grid4 satisfazendo todos os invariantes
    """
    dims_t = _four(dims, int, "dims")
    ext_t = _four(extents, float, "extents")
    per_t = _four(periodic, bool, "periodic")
    org_t = _four(origin if origin is not None else 0.0, float, "origin")
    for a, e in enumerate(ext_t):
        if not e > 0:
            raise GridError(f"extensao nula ou negativa no eixo {a}: {e}")
    spacing = tuple(
        e / n if p else e / max(n - 1, 1)
        for e, n, p in zip(ext_t, dims_t, per_t)
    )
    halfwidth = fd_order // 2
    if margin is None:
        margin = 0 if all(per_t) else halfwidth
    grid = Grid4(dims_t, spacing, per_t, org_t, int(margin), int(fd_order))
    grid = _validated(grid)
    logger.debug("Grid4 %s spacing=%s periodic=%s margem=%d", dims_t, spacing, per_t, grid.interior_margin)
    return grid


def _four(value, cast, name):
    if np.isscalar(value) or isinstance(value, bool):
        return tuple(cast(value) for _ in range(NDIM))
    items = tuple(cast(v) for v in value)
    if len(items) != NDIM:
        raise GridError(f"{name} precisa de {NDIM} valores, recebeu {len(items)}")
    return items


# ---------- Campos ----------

@dataclass(frozen=True, eq=False)
class ScalarField:
    """Um real por ponto da grade."""
    grid: Grid4
    values: np.ndarray

    def __post_init__(self):
        if tuple(self.values.shape) != self.grid.shape:
            raise GridError(f"ScalarField com shape {self.values.shape}, grade {self.grid.shape}")


@dataclass(frozen=True, eq=False)
class AmbientTensorField:
    """Tensor covariante de posto k com componentes em R^m.

    `symmetric` lista pares de slots em que o tensor e' simetrico por construcao.
    """
    grid: Grid4
    values: np.ndarray
    symmetric: Tuple[Tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        shape = tuple(self.values.shape)
        if shape[:NDIM] != self.grid.shape or len(shape) < NDIM + 1:
            raise GridError(f"AmbientTensorField com shape {shape}, grade {self.grid.shape}")
        if any(s != 4 for s in shape[NDIM:-1]):
            raise GridError(f"indices covariantes devem ter dimensao 4: {shape[NDIM:-1]}")

    @property
    def rank(self) -> int:
        return self.values.ndim - NDIM - 1

    @property
    def ambient_dim(self) -> int:
        return int(self.values.shape[-1])

    def pointwise_norm(self) -> np.ndarray:
        return pointwise_norm(self.values, NDIM)


FieldLike = Union[ScalarField, AmbientTensorField, np.ndarray]


def values_of(f: FieldLike) -> np.ndarray:
    return f.values if isinstance(f, (ScalarField, AmbientTensorField)) else np.asarray(f)


def pointwise_norm(values: np.ndarray, ndim_grid: int = NDIM) -> np.ndarray:
    """Norma euclidiana das componentes em cada ponto."""
    if values.ndim == ndim_grid:
        return np.abs(values)
    axes = tuple(range(ndim_grid, values.ndim))
    return np.sqrt(np.sum(values * values, axis=axes))


# ---------- Derivadas ----------

def partial_array(
    values: np.ndarray,
    grid: Grid4,
    axis: int,
    wrap: Optional[bool] = None,
) -> np.ndarray:
    """Diferenca central de ordem `grid.fd_order` ao longo de `axis`.

    `wrap` sobrepoe a flag de periodicidade do eixo: False trata o eixo como
    limitado (faixa NaN), True envolve mesmo em eixo limitado (so e' exato se o
    campo se anula na faixa).
    """
    if axis < 0 or axis >= NDIM:
        raise GridError(f"eixo invalido: {axis}")
    coeffs = STENCILS[grid.fd_order]
    s = len(coeffs) // 2
    periodic = grid.periodic[axis] if wrap is None else bool(wrap)
    arr = np.asarray(values, dtype=float)
    out = np.zeros_like(arr)
    for k, c in zip(range(-s, s + 1), coeffs):
        if c == 0.0:
            continue
        out += c * np.roll(arr, -k, axis=axis)
    out /= grid.spacing[axis]
    if not periodic:
        band = [slice(None)] * arr.ndim
        band[axis] = slice(0, s)
        out[tuple(band)] = np.nan
        band[axis] = slice(arr.shape[axis] - s, None)
        out[tuple(band)] = np.nan
    return out


def partial(f: FieldLike, axis: int, grid: Optional[Grid4] = None) -> FieldLike:
    """Derivada parcial de um campo; devolve campo do mesmo tipo."""
    if isinstance(f, ScalarField):
        return ScalarField(f.grid, partial_array(f.values, f.grid, axis))
    if isinstance(f, AmbientTensorField):
        return AmbientTensorField(f.grid, partial_array(f.values, f.grid, axis), f.symmetric)
    if grid is None:
        raise GridError("partial de ndarray exige a grade")
    return partial_array(f, grid, axis)


def gradient_array(values: np.ndarray, grid: Grid4, wrap: Optional[bool] = None) -> np.ndarray:
    """Empilha as quatro parciais num novo eixo logo depois dos eixos da grade."""
    return np.stack([partial_array(values, grid, a, wrap) for a in range(NDIM)], axis=NDIM)


# ---------- Reducoes ----------

def tree_sum(values: np.ndarray) -> float:
    """Soma em arvore de ordem fixa: completa ate potencia de 2 e soma pares."""
    buf = np.asarray(values, dtype=float).ravel()
    if buf.size == 0:
        return 0.0
    size = 1 << int(np.ceil(np.log2(buf.size))) if buf.size > 1 else 1
    if size != buf.size:
        buf = np.concatenate([buf, np.zeros(size - buf.size)])
    while buf.size > 1:
        buf = buf[0::2] + buf[1::2]
    return float(buf[0])


def axis_weights(grid: Grid4, axis: int, lo: Optional[int] = None, hi: Optional[int] = None) -> np.ndarray:
    """Pesos 1-D: retangulo em eixo periodico completo, trapezio no resto.

    `lo`/`hi` (inclusive) recortam uma caixa; sem eles, eixo limitado usa o
    conjunto interior da margem da grade.
    """
    n = grid.dims[axis]
    h = grid.spacing[axis]
    w = np.zeros(n)
    if lo is None and hi is None:
        if grid.periodic[axis]:
            w[:] = h
            return w
        lo, hi = grid.interior_margin, n - 1 - grid.interior_margin
    lo = 0 if lo is None else int(lo)
    hi = n - 1 if hi is None else int(hi)
    if hi < lo:
        raise GridError(f"caixa vazia no eixo {axis}: {lo}..{hi}")
    w[lo:hi + 1] = h
    if hi > lo:
        w[lo] *= 0.5
        w[hi] *= 0.5
    return w


def quadrature_weights(grid: Grid4, box: Optional[Sequence[Optional[Tuple[int, int]]]] = None) -> np.ndarray:
    """Peso por ponto (produto tensorial dos pesos 1-D)."""
    w = np.ones(grid.dims)
    for a in range(NDIM):
        rng = None if box is None else box[a]
        wa = axis_weights(grid, a) if rng is None else axis_weights(grid, a, rng[0], rng[1])
        shape = [1] * NDIM
        shape[a] = grid.dims[a]
        w = w * wa.reshape(shape)
    return w


def _checked_product(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    support = weights != 0.0
    if support.ndim < values.ndim:
        support = support.reshape(support.shape + (1,) * (values.ndim - support.ndim))
    bad = np.isnan(values) & support
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0][:NDIM])
        raise StencilDomainError(
            f"reducao tocou ponto sem valor valido do estencil em {idx}; aumente a margem",
            index=idx,
        )
    return np.where(support, values, 0.0)


def integrate(
    f: FieldLike,
    weight: Optional[FieldLike] = None,
    grid: Optional[Grid4] = None,
    box: Optional[Sequence[Optional[Tuple[int, int]]]] = None,
) -> float:
    """Quadratura de sum f * weight * pesos sobre o conjunto interior (ou caixa)."""
    if grid is None:
        grid = f.grid if isinstance(f, (ScalarField, AmbientTensorField)) else None
    if grid is None:
        raise GridError("integrate de ndarray exige a grade")
    fv = values_of(f)
    if weight is not None:
        if isinstance(weight, (ScalarField, AmbientTensorField)) and weight.grid != grid:
            raise GridError("integrate: grades diferentes")
        wv = values_of(weight)
        if wv.shape != fv.shape[:NDIM] and wv.shape != fv.shape:
            raise GridError(f"integrate: peso com shape {wv.shape} para campo {fv.shape}")
    else:
        wv = 1.0
    q = quadrature_weights(grid, box)
    prod = _checked_product(fv * wv, q) if fv.ndim == NDIM else None
    if prod is None:
        raise GridError("integrate espera integrando escalar")
    return tree_sum(prod * q)


def region_values(values: np.ndarray, grid: Grid4, margin: Optional[int] = None) -> np.ndarray:
    """Valores no conjunto interior; NaN ali vira StencilDomainError."""
    sl = grid.interior_slices(margin)
    sub = values[sl]
    if np.isnan(sub).any():
        idx = tuple(int(i) for i in np.argwhere(np.isnan(sub))[0][:NDIM])
        raise StencilDomainError(f"regiao de avaliacao contem NaN em {idx} (relativo ao recorte)", index=idx)
    return sub


def max_norm(values: np.ndarray, grid: Grid4, margin: Optional[int] = None) -> float:
    sub = region_values(values, grid, margin)
    mags = pointwise_norm(sub, NDIM)
    return float(mags.max()) if mags.size else 0.0


def l2_norm(values: np.ndarray, grid: Grid4, weight: Optional[np.ndarray] = None) -> float:
    mags = pointwise_norm(values, NDIM)
    return float(np.sqrt(max(integrate(mags * mags, weight, grid=grid), 0.0)))
