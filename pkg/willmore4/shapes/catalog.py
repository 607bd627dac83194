"""
Catalogo de imersoes analiticas com 2-jatos exatos.

Cada forma de produto de esferas e' descrita como uma lista de fatores; cada
componente de Phi e' r * produto de cos/sin de coordenadas distintas, entao
primeira e segunda derivadas saem em forma fechada trocando o fator do eixo
pela sua derivada.

Coordenadas de S^k(r) em R^(k+1): colatitudes theta_1..theta_(k-1) (eixos
limitados, [delta, pi - delta]) e longitude phi (eixo periodico, 2*pi):

    x_0 = cos th1, x_1 = sin th1 cos th2, ..., x_(k-1) = sin th1..sin th_(k-1) cos phi,
    x_k = sin th1..sin th_(k-1) sin phi

Uso:
    spec = ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5))
    grid = default_grid(spec, 12)
    jet = sample_jet(spec, grid)
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DegenerateImmersionError, GridError, ShapeSpecError
from ..grid.lattice import NDIM, Grid4, build_grid, partial_array

logger = logging.getLogger(__name__)


# ---------- Tabela de formas ----------

# (dimensao da esfera, eixos que ela ocupa); esfera k usa k eixos
_FACTORS: Dict[str, Tuple[Tuple[int, Tuple[int, ...]], ...]] = {
    "sphere4_patch": ((4, (0, 1, 2, 3)),),
    "torus4": ((1, (0,)), (1, (1,)), (1, (2,)), (1, (3,))),
    "s2xs2": ((2, (0, 1)), (2, (2, 3))),
    "s1xs3": ((1, (0,)), (3, (1, 2, 3))),
    "s1xs1xs2": ((1, (0,)), (1, (1,)), (2, (2, 3))),
}

AMBIENT_DIMS = {
    "flat_patch": 5,
    "sphere4_patch": 5,
    "torus4": 8,
    "s2xs2": 6,
    "s1xs3": 6,
    "s1xs1xs2": 7,
}

RADII_COUNT = {
    "flat_patch": 0,
    "sphere4_patch": 1,
    "torus4": 4,
    "s2xs2": 2,
    "s1xs3": 2,
    "s1xs1xs2": 3,
}

KINDS = tuple(AMBIENT_DIMS) + ("perturbed",)

_ALIASES = {"flat": "flat_patch", "sphere4": "sphere4_patch", "sphere": "sphere4_patch", "torus": "torus4"}

_MAX_CLAMP = math.pi / 4.0


def canonical_kind(kind: str) -> str:
    k = kind.strip().lower()
    return _ALIASES.get(k, k)


@dataclass(frozen=True)
class ShapeSpec:
    """Forma do catalogo.

    `scale` multiplica a imersao inteira (Phi -> scale * Phi); usado nos
    testes de invariancia por escala.
    """
    kind: str
    radii: Tuple[float, ...] = ()
    clamp: float = 0.3
    scale: float = 1.0

    def __post_init__(self):
        kind = canonical_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if kind == "perturbed":
            raise ShapeSpecError("forma 'perturbed' e' descrita por PerturbationSpec")
        if kind not in AMBIENT_DIMS:
            raise ShapeSpecError(f"forma desconhecida: {self.kind!r}; opcoes: {', '.join(KINDS)}")
        if kind == "sphere4_patch" and not self.radii:
            object.__setattr__(self, "radii", (1.0,))
        expected = RADII_COUNT[kind]
        if len(self.radii) != expected:
            raise ShapeSpecError(f"{kind} espera {expected} raio(s), recebeu {len(self.radii)}")
        if any(not r > 0 for r in self.radii):
            raise ShapeSpecError(f"raios devem ser positivos: {self.radii}")
        if not 0 < self.clamp <= _MAX_CLAMP:
            raise ShapeSpecError(f"clamp polar fora de (0, pi/4]: {self.clamp}")
        if not self.scale > 0:
            raise ShapeSpecError(f"escala deve ser positiva: {self.scale}")

    @property
    def ambient_dim(self) -> int:
        return AMBIENT_DIMS[self.kind]

    @property
    def radii_sq_sum(self) -> float:
        return float(sum(r * r for r in self.radii))

    def factors(self) -> Tuple[Tuple[int, float, Tuple[int, ...]], ...]:
        """(k, raio, eixos) de cada esfera do produto."""
        if self.kind == "flat_patch":
            return ()
        return tuple((k, r, axes) for (k, axes), r in zip(_FACTORS[self.kind], self.radii))

    def axis_roles(self) -> Tuple[str, ...]:
        """'angle' (periodico, 2*pi), 'colatitude' (limitado) ou 'free' (plano)."""
        if self.kind == "flat_patch":
            return ("free",) * NDIM
        roles = [""] * NDIM
        for k, _, axes in self.factors():
            for pos, a in enumerate(axes):
                roles[a] = "angle" if pos == k - 1 else "colatitude"
        return tuple(roles)

    def with_scale(self, scale: float) -> "ShapeSpec":
        return ShapeSpec(self.kind, self.radii, self.clamp, scale)

    def describe(self) -> dict:
        return {"kind": self.kind, "radii": list(self.radii), "clamp": self.clamp, "scale": self.scale}


@dataclass(frozen=True, eq=False)
class Jet2Field:
    """Amostras de Phi e das derivadas parametricas ate segunda ordem."""
    grid: Grid4
    phi: np.ndarray       # dims + (m,)
    dphi: np.ndarray      # dims + (4, m)
    ddphi: np.ndarray     # dims + (4, 4, m)
    label: str = ""

    @property
    def ambient_dim(self) -> int:
        return int(self.phi.shape[-1])


# ---------- Grade compativel ----------

def default_grid(
    spec: ShapeSpec,
    n: int | Sequence[int] = 12,
    fd_order: int = 4,
    margin: Optional[int] = None,
    periodic_flat: bool = True,
    flat_extent: float = 2.0 * math.pi,
) -> Grid4:
    """Grade que casa com a periodicidade da forma.

    Eixos angulares: periodicos, extensao 2*pi. Colatitudes: [delta, pi-delta],
    limitados. flat_patch: periodico (ou limitado) com `flat_extent`.
    """
    roles = spec.axis_roles()
    periodic, extents, origin = [], [], []
    for role in roles:
        if role == "angle":
            periodic.append(True)
            extents.append(2.0 * math.pi)
            origin.append(0.0)
        elif role == "colatitude":
            periodic.append(False)
            extents.append(math.pi - 2.0 * spec.clamp)
            origin.append(spec.clamp)
        else:
            periodic.append(periodic_flat)
            extents.append(flat_extent)
            origin.append(0.0)
    return build_grid(n, extents, periodic, margin=margin, origin=origin, fd_order=fd_order)


def margined_grid(
    spec: ShapeSpec,
    n: int | Sequence[int],
    fd_order: int = 4,
    depth: int = 1,
    margin: Optional[int] = None,
) -> Grid4:
    """Grade com `n` pontos interiores em cada eixo limitado.

    Os eixos limitados ganham a margem exigida por `depth` aplicacoes
    empilhadas do estencil nas duas pontas; eixos periodicos ficam com `n`.
    `n` pode ser um inteiro ou um por eixo. Uma margem explicita substitui a
    exigida, desde que nao seja menor.

    Raises:
        GridError: margem explicita abaixo da exigida ou `n` sem quatro entradas
    """
    counts = [int(n)] * NDIM if isinstance(n, (int, np.integer)) else [int(c) for c in n]
    if len(counts) != NDIM:
        raise GridError(f"esperados {NDIM} pontos por eixo, recebeu {counts}")
    base = default_grid(spec, counts, fd_order)
    if all(base.periodic):
        return base
    needed = base.required_margin(depth)
    if margin is None:
        margin = needed
    elif int(margin) < needed:
        raise GridError(f"margem {margin} menor que a exigida ({needed}) para profundidade {depth}")
    margin = int(margin)
    dims = [c if p else c + 2 * margin for c, p in zip(counts, base.periodic)]
    return default_grid(spec, dims, fd_order, margin=margin)


def check_grid_compatible(spec: ShapeSpec, grid: Grid4) -> None:
    for a, role in enumerate(spec.axis_roles()):
        if role == "angle":
            if not grid.periodic[a]:
                raise ShapeSpecError(f"eixo {a} e' angular em {spec.kind} e deve ser periodico")
            if not math.isclose(grid.extent[a], 2.0 * math.pi, rel_tol=1e-12):
                raise ShapeSpecError(f"eixo angular {a} precisa de extensao 2*pi, tem {grid.extent[a]}")
        elif role == "colatitude":
            if grid.periodic[a]:
                raise ShapeSpecError(f"eixo {a} e' colatitude em {spec.kind} e nao pode ser periodico")
            lo = grid.origin[a]
            hi = lo + grid.extent[a]
            tol = 1e-12
            if lo < spec.clamp - tol or hi > math.pi - spec.clamp + tol:
                raise ShapeSpecError(
                    f"colatitude do eixo {a} em [{lo:.6g}, {hi:.6g}] sai de "
                    f"[{spec.clamp:.6g}, {math.pi - spec.clamp:.6g}]"
                )


# ---------- Jatos analiticos ----------

# valor, primeira e segunda derivada
_TRIG = {
    "cos": (np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)),
    "sin": (np.sin, np.cos, lambda x: -np.sin(x)),
}


def _sphere_components(k: int, axes: Tuple[int, ...]) -> List[List[Tuple[int, str]]]:
    """Componentes de S^k como listas de (eixo, 'cos'|'sin')."""
    comps: List[List[Tuple[int, str]]] = []
    sines: List[Tuple[int, str]] = []
    for pos in range(k - 1):
        ax = axes[pos]
        comps.append(sines + [(ax, "cos")])
        sines = sines + [(ax, "sin")]
    phi_ax = axes[k - 1]
    comps.append(sines + [(phi_ax, "cos")])
    comps.append(sines + [(phi_ax, "sin")])
    return comps


def _component_jet(factors: List[Tuple[int, str]], tables, shape):
    """Valor, gradiente (4,) e hessiana (4,4) de prod f(u_axis)."""
    by_axis = {ax: fn for ax, fn in factors}

    def prod(replace: Dict[int, int]):
        out = np.ones(shape)
        for ax, fn in by_axis.items():
            order = replace.get(ax, 0)
            out = out * tables[ax][fn][order]
        return out

    value = prod({})
    grad = np.zeros(shape + (NDIM,))
    hess = np.zeros(shape + (NDIM, NDIM))
    for a in by_axis:
        grad[..., a] = prod({a: 1})
        hess[..., a, a] = prod({a: 2})
        for b in by_axis:
            if b > a:
                v = prod({a: 1, b: 1})
                hess[..., a, b] = v
                hess[..., b, a] = v
    return value, grad, hess


def _axis_tables(grid: Grid4) -> Dict[int, Dict[str, Tuple[np.ndarray, ...]]]:
    tables = {}
    for a in range(NDIM):
        shape = [1] * NDIM
        shape[a] = grid.dims[a]
        x = grid.axis_coords(a).reshape(shape)
        tables[a] = {fn: tuple(f(x) for f in fs) for fn, fs in _TRIG.items()}
    return tables


def sample_jet(spec: ShapeSpec, grid: Grid4, degeneracy_eps: float = 1e-10) -> Jet2Field:
    """Amostra Phi, dPhi e ddPhi em forma fechada.

    Raises:
        ShapeSpecError: grade incompativel com a periodicidade da forma
        DegenerateImmersionError: det g abaixo do limiar
    """
    check_grid_compatible(spec, grid)
    shape = grid.shape
    m = spec.ambient_dim
    phi = np.zeros(shape + (m,))
    dphi = np.zeros(shape + (NDIM, m))
    ddphi = np.zeros(shape + (NDIM, NDIM, m))

    if spec.kind == "flat_patch":
        mesh = grid.mesh()
        for a in range(NDIM):
            phi[..., a] = mesh[a]
            dphi[..., a, a] = 1.0
    else:
        tables = _axis_tables(grid)
        col = 0
        for k, r, axes in spec.factors():
            for comp in _sphere_components(k, axes):
                v, g1, g2 = _component_jet(comp, tables, shape)
                phi[..., col] = r * v
                dphi[..., :, col] = r * g1
                ddphi[..., :, :, col] = r * g2
                col += 1
        if col != m:
            raise ShapeSpecError(f"{spec.kind}: montou {col} componentes, esperado {m}")

    if spec.scale != 1.0:
        phi *= spec.scale
        dphi *= spec.scale
        ddphi *= spec.scale

    jet = Jet2Field(grid, phi, dphi, ddphi, label=spec.kind)
    check_immersion(jet, degeneracy_eps)
    logger.debug("jato %s m=%d grade=%s", spec.kind, m, grid.dims)
    return jet


def check_immersion(jet: Jet2Field, degeneracy_eps: float = 1e-10) -> float:
    """Retorna min det g no conjunto interior; levanta se degenerado."""
    g = np.einsum("...im,...jm->...ij", jet.dphi, jet.dphi)
    det = np.linalg.det(g)
    det_in = np.where(jet.grid.interior_mask(), det, np.inf)
    if np.isnan(det_in).any():
        idx = tuple(int(i) for i in np.argwhere(np.isnan(det_in))[0])
        raise DegenerateImmersionError(f"det g indefinido em {idx}", index=idx, value=float("nan"))
    flat_idx = int(np.argmin(det_in))
    value = float(det_in.ravel()[flat_idx])
    if value <= degeneracy_eps:
        idx = tuple(int(i) for i in np.unravel_index(flat_idx, det_in.shape))
        raise DegenerateImmersionError(
            f"imersao degenerada: det g = {value:.3e} <= {degeneracy_eps:.1e} em {idx}",
            index=idx, value=value,
        )
    return value


def jet_consistency(jet: Jet2Field) -> Tuple[float, float]:
    """max |d(Phi) - dPhi| e max |d(dPhi) - ddPhi| com estencil, eixos tratados como limitados."""
    s = jet.grid.halfwidth
    sl = tuple(slice(s, n - s) for n in jet.grid.dims)
    err1 = 0.0
    err2 = 0.0
    for a in range(NDIM):
        d1 = partial_array(jet.phi, jet.grid, a, wrap=False)
        err1 = max(err1, float(np.abs(d1[sl] - jet.dphi[..., a, :][sl]).max()))
        d2 = partial_array(jet.dphi, jet.grid, a, wrap=False)
        err2 = max(err2, float(np.abs(d2[sl] - jet.ddphi[..., a, :, :][sl]).max()))
    return err1, err2
