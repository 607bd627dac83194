"""
Verificacao por diferencas finitas de que W e' o gradiente L2 da energia.

    dE/deps = int B . W dmu + int_{borda} V^j nu_j dsigma

A derivada direcional numerica usa diferenca central com eps em progressao
geometrica de razao 1/2 e extrapolacao de Richardson nos valores mais finos.
B fica fixo em coordenadas ambientes durante a varredura.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import EngineConfig, get_engine_config
from ..errors import CutoffSupportError, DegenerateImmersionError
from ..energy.functional import energy_density
from ..geometry.calculus import dot
from ..geometry.fields import GeometryFields, build_geometry
from ..grid.lattice import NDIM, Grid4, axis_weights, integrate, partial_array, tree_sum
from ..operators.boundary import boundary_current
from ..operators.context import OperatorContext
from ..operators.willmore import willmore
from ..reporting.report import CheckReport, timed
from ..shapes.catalog import Jet2Field, sample_jet
from ..shapes.perturbation import PerturbationSpec, VariationField, shifted_jet, variation_field

logger = logging.getLogger(__name__)

Box = Sequence[Optional[Tuple[int, int]]]

_MAX_SHRINKS = 8


@dataclass
class DirectionalDerivative:
    """Resultado da varredura em eps."""
    value: float
    raw: List[float]
    eps: List[float]
    orders: List[float]
    shrinks: int = 0
    pointwise: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def observed_order(self) -> float:
        finite = [o for o in self.orders if math.isfinite(o)]
        return float(np.median(finite)) if finite else math.nan

    def describe(self) -> dict:
        return {
            "value": self.value,
            "raw": list(self.raw),
            "eps": list(self.eps),
            "orders": list(self.orders),
            "shrinks": self.shrinks,
        }


def eps_schedule(variation: VariationField, config: Optional[EngineConfig] = None) -> List[float]:
    """eps_base * (1/2)**k / |B|inf, k = 0..eps_levels-1."""
    cfg = config or get_engine_config()
    scale = variation.sup_norm
    if scale == 0.0:
        scale = 1.0
    return [cfg.eps_base * 0.5 ** k / scale for k in range(cfg.eps_levels)]


def richardson(values: Sequence[float], ratio: float = 2.0, order: int = 2) -> float:
    """Extrapola uma sequencia de diferencas centrais com passos em razao fixa.

    O erro da diferenca central so tem potencias pares, entao cada nivel
    elimina o termo eps**(order + 2k).
    """
    if len(values) == 0:
        return math.nan
    return float(_extrapolate(list(values), ratio, order))


def _extrapolate(table: list, ratio: float = 2.0, order: int = 2):
    """Tabela de Richardson; serve para floats e arrays."""
    p = order
    while len(table) > 1:
        f = ratio ** p
        table = [(f * table[k + 1] - table[k]) / (f - 1.0) for k in range(len(table) - 1)]
        p += 2
    return table[0]


def observed_orders(values: Sequence[float], ratio: float = 2.0) -> List[float]:
    """log_ratio das razoes de diferencas sucessivas; NaN quando indefinido."""
    out = []
    for a, b, c in zip(values, values[1:], values[2:]):
        d1, d2 = abs(a - b), abs(b - c)
        if d1 > 0.0 and d2 > 0.0:
            out.append(math.log(d1 / d2) / math.log(ratio))
        else:
            out.append(math.nan)
    return out


def _weighted_density(jet: Jet2Field, cfg: EngineConfig) -> np.ndarray:
    geo = build_geometry(jet, cfg)
    return energy_density(geo).values * geo.sqrt_det_g


def _map(fn: Callable, items: Sequence, threads: int) -> list:
    """map com pool de threads; a ordem do resultado e' a da entrada."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def energy_directional_fd(
    base: Jet2Field,
    variation: VariationField,
    config: Optional[EngineConfig] = None,
    box: Optional[Box] = None,
    eps: Optional[Sequence[float]] = None,
) -> DirectionalDerivative:
    """(E(Phi + eps B) - E(Phi - eps B)) / (2 eps) com Richardson.

    Args:
        base: jato da imersao nao perturbada
        variation: B e seu jato
        config: configuracao (eps_base, eps_levels, richardson_points, threads)
        box: caixa de indices para a energia; None = conjunto interior
        eps: varredura explicita (decrescente); padrao vem de `eps_schedule`

    Returns:
        DirectionalDerivative com o valor extrapolado, as diferencas cruas,
        as ordens observadas e o campo pontual delta(e sqrt g) extrapolado.

    Raises:
        DegenerateImmersionError: se nem a varredura reduzida preserva a imersao
    """
    cfg = config or get_engine_config()
    schedule = list(eps) if eps is not None else eps_schedule(variation, cfg)
    grid = base.grid

    shrinks = 0
    while True:
        try:
            signed = [s * e for e in schedule for s in (1.0, -1.0)]
            jets = [shifted_jet(base, variation, e, cfg.degeneracy_eps) for e in signed]
            densities = _map(lambda j: _weighted_density(j, cfg), jets, cfg.threads)
            break
        except DegenerateImmersionError as exc:
            shrinks += 1
            if shrinks > _MAX_SHRINKS:
                raise
            schedule = [0.5 * e for e in schedule]
            logger.warning("varredura quebrou a imersao (%s); reduzindo eps para %.3e", exc, schedule[0])

    raw, diffs = [], []
    for k, e in enumerate(schedule):
        plus, minus = densities[2 * k], densities[2 * k + 1]
        diff = (plus - minus) / (2.0 * e)
        diffs.append(diff)
        raw.append(integrate(diff, None, grid=grid, box=box))
        logger.info("eps=%.4e  dE/deps=%.12e", e, raw[-1])

    n = min(cfg.richardson_points, len(raw))
    value = richardson(raw[-n:])
    pointwise = _extrapolate(diffs[-n:])

    result = DirectionalDerivative(value, raw, schedule, observed_orders(raw), shrinks, pointwise)
    logger.info("derivada direcional extrapolada %.12e (ordem observada %.3g)", value, result.observed_order)
    return result


def _variation_integral(geo: GeometryFields, B: np.ndarray, W: np.ndarray, box: Optional[Box]) -> float:
    support = np.any(B != 0.0, axis=-1)
    integrand = np.where(support, dot(B, W), 0.0)
    return integrate(integrand, geo.sqrt_det_g, grid=geo.grid, box=box)


def gradient_check(
    pspec: PerturbationSpec,
    grid: Grid4,
    config: Optional[EngineConfig] = None,
    tolerance: Optional[float] = None,
) -> CheckReport:
    """Compara delta_FD com int B . W dmu para B de suporte compacto.

    Aprova quando |delta_FD - delta_W| <= max(1e-3 |delta_FD|, 1e-7 E), ou
    abaixo de `tolerance` quando informada.
    """
    cfg = config or get_engine_config()
    report = CheckReport("gradient_check", shape=pspec.describe(), grid=grid.describe(), config=cfg.to_dict())
    with timed(report):
        base = sample_jet(pspec.base, grid, cfg.degeneracy_eps)
        var = variation_field(pspec, grid, base, cfg)
        fd = energy_directional_fd(base, var, cfg)

        geo = build_geometry(base, cfg)
        wf = willmore(geo)
        delta_w = _variation_integral(geo, var.B, wf.W, None)
        energy = integrate(energy_density(geo).values, geo.sqrt_det_g, grid=grid)

        if tolerance is None:
            tol, prov = max(1e-3 * abs(fd.value), 1e-7 * abs(energy)), "spec"
        else:
            tol, prov = float(tolerance), "user"
        report.check("gradient", abs(fd.value - delta_w), tol, prov)
        report.values.update({
            "delta_fd": fd.value,
            "delta_w": delta_w,
            "energy": energy,
            "sweep": fd.describe(),
        })
        report.orders["fd_central"] = fd.observed_order
    logger.info("gradient_check: delta_fd=%.10e delta_w=%.10e passou=%s", fd.value, delta_w, report.passed)
    return report


# ---------- Subdominio ----------

def normalize_box(grid: Grid4, box: Optional[Box]) -> List[Optional[Tuple[int, int]]]:
    """Valida a caixa contra o conjunto interior.

    Eixo periodico sem faixa = eixo inteiro (sem faces). Eixo limitado sem
    faixa = conjunto interior.

    Raises:
        CutoffSupportError: caixa encosta na margem ou sai da grade
    """
    box = list(box) if box is not None else [None] * NDIM
    if len(box) != NDIM:
        raise CutoffSupportError(f"caixa precisa de {NDIM} faixas, recebeu {len(box)}")
    out: List[Optional[Tuple[int, int]]] = []
    m = grid.interior_margin
    for a, rng in enumerate(box):
        n = grid.dims[a]
        if rng is None:
            out.append(None if grid.periodic[a] else (m, n - 1 - m))
            continue
        lo, hi = int(rng[0]), int(rng[1])
        floor, ceil = (0, n - 1) if grid.periodic[a] else (m, n - 1 - m)
        if lo < floor or hi > ceil or hi <= lo:
            raise CutoffSupportError(
                f"caixa {lo}..{hi} no eixo {a} encosta na margem (interior {floor}..{ceil})"
            )
        out.append((lo, hi))
    return out


def _face_weights(grid: Grid4, box: Sequence[Optional[Tuple[int, int]]], axis: int) -> np.ndarray:
    w = np.ones(tuple(grid.dims[b] for b in range(NDIM) if b != axis))
    k = 0
    for b in range(NDIM):
        if b == axis:
            continue
        rng = box[b]
        wb = axis_weights(grid, b) if rng is None else axis_weights(grid, b, rng[0], rng[1])
        shape = [1] * (NDIM - 1)
        shape[k] = grid.dims[b]
        w = w * wb.reshape(shape)
        k += 1
    return w


def face_flux(geo: GeometryFields, V: np.ndarray, box: Sequence[Optional[Tuple[int, int]]]) -> float:
    """Soma sobre as faces da caixa de +-int sqrt(g) V^a du' (normal para fora)."""
    flux_density = geo.sqrt_det_g[..., None] * V
    total = 0.0
    for a, rng in enumerate(box):
        if rng is None:
            continue
        w = _face_weights(geo.grid, box, a)
        for idx, sign in ((rng[1], 1.0), (rng[0], -1.0)):
            face = np.take(flux_density[..., a], idx, axis=a)
            vals = np.where(w != 0.0, face, 0.0)
            total += sign * tree_sum(vals * w)
    return total


def divergence_form_residual(
    geo: GeometryFields,
    delta_density: np.ndarray,
    B: np.ndarray,
    W: np.ndarray,
    V: np.ndarray,
    box: Sequence[Optional[Tuple[int, int]]],
) -> Tuple[float, float, int]:
    """max |delta(e sqrt g) - (B.W) sqrt g - d_j(sqrt g V^j)| dentro da caixa.

    Devolve (residuo, escala, pontos avaliados); pontos sem valor valido do
    estencil ficam de fora.
    """
    grid = geo.grid
    F = geo.sqrt_det_g[..., None] * V
    div = sum(partial_array(F[..., j], grid, j) for j in range(NDIM))
    r = delta_density - dot(B, W) * geo.sqrt_det_g - div
    sl = tuple(slice(None) if rng is None else slice(rng[0], rng[1] + 1) for rng in box)
    sub, ref = r[sl], delta_density[sl]
    ok = np.isfinite(sub) & np.isfinite(ref)
    if not ok.any():
        return math.nan, 0.0, 0
    return float(np.abs(sub[ok]).max()), float(np.abs(ref[ok]).max()), int(ok.sum())


def subdomain_flux_check(
    pspec: PerturbationSpec,
    grid: Grid4,
    box: Optional[Box],
    config: Optional[EngineConfig] = None,
    tolerance: Optional[float] = None,
) -> CheckReport:
    """delta int_Omega e dmu = int_Omega B.W dmu + fluxo de V pelas faces de Omega.

    Raises:
        CutoffSupportError: caixa encostando na margem
    """
    cfg = config or get_engine_config()
    omega = normalize_box(grid, box)
    report = CheckReport("subdomain_flux", shape=pspec.describe(), grid=grid.describe(), config=cfg.to_dict())
    with timed(report):
        base = sample_jet(pspec.base, grid, cfg.degeneracy_eps)
        var = variation_field(pspec, grid, base, cfg)
        fd = energy_directional_fd(base, var, cfg, box=omega)

        geo = build_geometry(base, cfg)
        ctx = OperatorContext(geo)
        W = willmore(geo, ctx).W
        V = boundary_current(geo, var.B, ctx)
        delta_w = _variation_integral(geo, var.B, W, omega)
        flux = face_flux(geo, V, omega)
        energy = integrate(energy_density(geo).values, geo.sqrt_det_g, grid=grid, box=omega)

        if tolerance is None:
            scale = max(abs(fd.value), abs(delta_w) + abs(flux), 1e-5 * abs(energy))
            tol, prov = 1e-2 * scale, "spec"
        else:
            tol, prov = float(tolerance), "user"
        report.check("flux_identity", abs(fd.value - delta_w - flux), tol, prov)

        resid, scale_pw, count = divergence_form_residual(geo, fd.pointwise, var.B, W, V, omega)
        report.record("divergence_form_linf", resid)
        report.values.update({
            "delta_fd": fd.value,
            "delta_w": delta_w,
            "flux": flux,
            "energy_omega": energy,
            "box": [None if r is None else list(r) for r in omega],
            "divergence_form_scale": scale_pw,
            "divergence_form_points": count,
            "sweep": fd.describe(),
        })
        report.orders["fd_central"] = fd.observed_order
    logger.info("subdomain_flux: fd=%.8e W=%.8e fluxo=%.8e passou=%s", fd.value, delta_w, flux, report.passed)
    return report
