"""
Suite de identidades exatas: pontuais (Codazzi, divergencia do traco-livre,
decomposicao de Delta H, identidade de Simon, trocas de derivadas) e integrais
com peso gamma^p (as tres identidades por parcela e a do operador completo).

Cada identidade roda em duas resolucoes; o relatorio traz o residuo das duas,
a ordem observada e a tolerancia com sua proveniencia.

Tolerancia derivada: um estencil central de ordem p erra a derivada de um
modo de frequencia 1 por kappa_p h^p (kappa = 1/6, 1/30, 1/140 para p = 2,
4, 6); com `depth` aplicacoes empilhadas a tolerancia relativa e'
4 * depth * kappa_p * h_max^p (o eixo mais grosso domina o erro).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import EngineConfig, get_engine_config
from ..energy.functional import total_energy
from ..geometry.calculus import (
    covariant_derivative,
    dot,
    laplacian,
    normal_gradient,
    normal_laplacian,
    raise_first,
)
from ..geometry.curvature import interchange_residual, mean_curvature_interchange, second_form_interchange
from ..geometry.fields import GeometryFields, build_geometry
from ..grid.cutoff import CutoffFields, cutoff_field
from ..grid.lattice import Grid4, integrate, region_values
from ..operators.boundary import aux_TU
from ..operators.context import OperatorContext
from ..operators.willmore import W1_TERMS, W2_TERMS, W3_TERMS, willmore, willmore_terms
from ..reporting.report import CheckReport, timed
from ..shapes.catalog import Jet2Field, ShapeSpec, default_grid, margined_grid, sample_jet
from ..shapes.perturbation import PerturbationSpec, perturb_normal

logger = logging.getLogger(__name__)

Target = Union[ShapeSpec, PerturbationSpec]

_KAPPA = {2: 1.0 / 6.0, 4: 1.0 / 30.0, 6: 1.0 / 140.0}
_FLOOR = 1e-10
MIN_ORDER = 2.0


class IdentityId(str, Enum):
    CODAZZI = "codazzi"
    TRACEFREE_DIV = "tracefree_div"
    LAPLACIAN_SPLIT = "laplacian_split"
    SIMON = "simon"
    INTERCHANGE_H = "interchange_H"
    INTERCHANGE_h = "interchange_h"
    PROP_32 = "prop_32"
    LEMMA_A1 = "lemma_A1"
    LEMMA_A2 = "lemma_A2"
    LEMMA_A3 = "lemma_A3"

    @classmethod
    def parse(cls, raw: str) -> "IdentityId":
        for member in cls:
            if member.value == raw:
                return member
        # interchange_H / interchange_h diferem so na caixa
        lowered = {m.value.lower(): m for m in cls if m.value.lower() != "interchange_h"}
        try:
            return lowered[raw.lower()]
        except KeyError:
            raise ValueError(f"identidade desconhecida: {raw!r}") from None

    @property
    def integral(self) -> bool:
        return self in INTEGRAL_IDS


INTEGRAL_IDS = frozenset({IdentityId.PROP_32, IdentityId.LEMMA_A1, IdentityId.LEMMA_A2, IdentityId.LEMMA_A3})

# aplicacoes empilhadas do estencil ate o residuo
DEPTH = {
    IdentityId.CODAZZI: 1,
    IdentityId.TRACEFREE_DIV: 1,
    IdentityId.LAPLACIAN_SPLIT: 2,
    IdentityId.SIMON: 2,
    IdentityId.INTERCHANGE_H: 3,
    IdentityId.INTERCHANGE_h: 3,
    IdentityId.PROP_32: 4,
    IdentityId.LEMMA_A1: 4,
    IdentityId.LEMMA_A2: 2,
    IdentityId.LEMMA_A3: 2,
}


@dataclass(frozen=True)
class GammaParams:
    """Parametros do corte; rho=None = peso 1 (so em grade periodica)."""
    center: Optional[Tuple[float, ...]] = None
    rho: Optional[float] = None
    p: float = 4.0
    axes: Optional[Tuple[int, ...]] = None

    def describe(self) -> dict:
        return {
            "center": None if self.center is None else list(self.center),
            "rho": self.rho,
            "p": self.p,
            "axes": None if self.axes is None else list(self.axes),
        }


@dataclass
class Evaluation:
    """Residuo de uma identidade numa resolucao."""
    residual: float
    scale: float
    terms: Dict[str, float] = field(default_factory=dict)
    diagnostics: Dict[str, float] = field(default_factory=dict)


def derived_rtol(grid: Grid4, depth: int) -> float:
    return 4.0 * depth * _KAPPA[grid.fd_order] * grid.h_max ** grid.fd_order


# ---------- Identidades pontuais ----------

def _linf(values: np.ndarray, grid: Grid4) -> float:
    sub = region_values(values, grid)
    return float(np.abs(sub).max()) if sub.size else 0.0


def _pointwise(residual: np.ndarray, parts: Sequence[np.ndarray], geo: GeometryFields, **diag) -> Evaluation:
    grid = geo.grid
    scale = max(_linf(p, grid) for p in parts)
    return Evaluation(_linf(residual, grid), scale, diagnostics=diag)


def check_codazzi(geo: GeometryFields, ctx: OperatorContext, cut: Optional[CutoffFields] = None) -> Evaluation:
    """pi_n D_i h_jk - pi_n D_j h_ik"""
    Dh = normal_gradient(geo.h, geo, 2)
    return _pointwise(Dh - np.swapaxes(Dh, 4, 5), [Dh], geo)


def check_tracefree_div(geo: GeometryFields, ctx: OperatorContext, cut: Optional[CutoffFields] = None) -> Evaluation:
    """g^ij pi_n D_i (h0)_jk - 3 pi_n D_k H"""
    Dh0 = normal_gradient(geo.h0, geo, 2)
    div = np.einsum("...ij,...ijkm->...km", geo.g_inv, Dh0)
    rhs = 3.0 * ctx.DH
    return _pointwise(div - rhs, [div, rhs], geo)


def check_laplacian_split(geo: GeometryFields, ctx: OperatorContext, cut: Optional[CutoffFields] = None) -> Evaluation:
    """Delta H = Dperp H - (H.h_ij) h^ij - 2 (D_s H . h^sk) D_k Phi - 2 D^k|H|^2 D_k Phi"""
    lap = laplacian(geo.H, geo, 0)
    dH2 = covariant_derivative(ctx.H2, geo, 0, ambient=False)
    grad_part = np.einsum("...k,...kl,...lm->...m", dH2, geo.g_inv, geo.dphi, optimize=True)
    shape_part = np.einsum("...sn,...skn,...km->...m", ctx.dH, ctx.h_upup, geo.dphi, optimize=True)
    rhs = ctx.LH - np.einsum("...ij,...ijm->...m", ctx.Hh, ctx.h_upup) - 2.0 * shape_part - 2.0 * grad_part
    return _pointwise(lap - rhs, [lap, rhs], geo)


def simon_cubic(geo: GeometryFields, ctx: OperatorContext) -> np.ndarray:
    """Parte cubica da identidade de Simon, indices [j, k, m]."""
    h, hup, hupup = geo.h, ctx.h_up, ctx.h_upup
    out = 4.0 * np.einsum("...ij,...kim->...jkm", ctx.Hh, hup)
    out -= np.einsum("...ien,...jkn,...iem->...jkm", h, h, hupup, optimize=True)
    out += 2.0 * np.einsum("...kin,...jen,...iem->...jkm", hup, h, hup, optimize=True)
    out -= np.einsum("...kin,...ien,...jem->...jkm", hup, h, hup, optimize=True)
    out -= np.einsum("...ien,...jin,...kem->...jkm", h, hup, hup, optimize=True)
    return out


def check_simon(geo: GeometryFields, ctx: OperatorContext, cut: Optional[CutoffFields] = None) -> Evaluation:
    """Dperp h_jk = 4 D_j D_k H + parte cubica; o residuo da forma traco-livre vai nos diagnosticos."""
    Lh = normal_laplacian(geo.h, geo, 2)
    DDH = normal_gradient(ctx.DH, geo, 1)
    cubic = simon_cubic(geo, ctx)
    rhs = 4.0 * DDH + cubic
    ev = _pointwise(Lh - rhs, [Lh, rhs], geo)

    # Dperp h0 = Dperp h - g Dperp H, pois g e' paralelo
    Lh0 = normal_laplacian(geo.h0, geo, 2)
    rhs0 = 4.0 * DDH - geo.g[..., None] * ctx.LH[..., None, None, :] + cubic
    ev.diagnostics["tracefree_form_linf"] = _linf(Lh0 - rhs0, geo.grid)
    return ev


def _interchange(out: dict, generic: dict, geo: GeometryFields) -> Evaluation:
    grid = geo.grid
    terms = {"lhs": _linf(out["lhs"], grid)}
    terms.update({f"rhs.{k}": _linf(v, grid) for k, v in out["parts"].items()})
    ev = Evaluation(_linf(out["residual"], grid), max(terms.values()), terms)
    ev.diagnostics["commutator_linf"] = _linf(generic["residual"], grid)
    return ev


def check_interchange_H(geo: GeometryFields, ctx: OperatorContext, cut: Optional[CutoffFields] = None) -> Evaluation:
    """Delta_perp D_k H contra a forma escrita com 3|H|^2 D_k H, M_k^l D_l H e U_k."""
    return _interchange(mean_curvature_interchange(geo), interchange_residual(geo.H, geo, 0), geo)


def check_interchange_h(geo: GeometryFields, ctx: OperatorContext, cut: Optional[CutoffFields] = None) -> Evaluation:
    """Delta_perp D_j h_kl contra D_j Delta_perp h_kl mais as parcelas de troca."""
    return _interchange(second_form_interchange(geo), interchange_residual(geo.h, geo, 2), geo)


# ---------- Identidades integrais ----------

def operator_part(geo: GeometryFields, c: OperatorContext, names: Sequence[str]) -> np.ndarray:
    """Soma das parcelas assinadas listadas."""
    return sum(willmore_terms(geo, c, only=names).values())


class _Weighted:
    """int X gamma^p dmu e p int X^k gamma^(p-1) d_k gamma dmu, mascarados no suporte."""

    def __init__(self, geo: GeometryFields, cut: CutoffFields):
        self.geo = geo
        self.cut = cut
        self.support = cut.support_mask()
        self.gp = cut.power()
        self.pg = cut.power_gradient()

    def __call__(self, values: np.ndarray) -> float:
        masked = np.where(self.support, values * self.gp, 0.0)
        return integrate(masked, self.geo.sqrt_det_g, grid=self.geo.grid)

    def boundary(self, lowered: np.ndarray) -> float:
        """`lowered` e' X_i; sobe com g e contrai com gamma^(p-1) d gamma."""
        Xk = np.einsum("...ik,...i->...k", self.geo.g_inv, lowered)
        vals = np.einsum("...k,...k->...", Xk, self.pg)
        masked = np.where(self.support, vals, 0.0)
        return self.cut.p * integrate(masked, self.geo.sqrt_det_g, grid=self.geo.grid)


def _integral(lhs: Dict[str, float], rhs: Dict[str, float], **diag) -> Evaluation:
    residual = sum(lhs.values()) - sum(rhs.values())
    scale = max([abs(v) for v in list(lhs.values()) + list(rhs.values())] + [0.0])
    terms = {f"lhs.{k}": v for k, v in lhs.items()}
    terms.update({f"rhs.{k}": v for k, v in rhs.items()})
    return Evaluation(abs(residual), scale, terms, diag)


def _common(geo: GeometryFields, c: OperatorContext) -> Dict[str, np.ndarray]:
    dQ = covariant_derivative(c.Q, geo, 0)
    DH_up = raise_first(c.DH, geo)
    HdH = np.einsum("...m,...km->...k", geo.H, c.dH)
    dH_h = np.einsum("...an,...akn->...k", c.dH, c.h_upup)            # D^j H . h^k_j
    return {
        "dQ": dQ,
        "DH_up": DH_up,
        "HdH": HdH,
        "dH_h": dH_h,
        "DH_dQ": np.einsum("...jm,...jm->...", DH_up, dQ),
        "dH_h_HdH": np.einsum("...k,...k->...", dH_h, HdH),
        "Hh_DH_dH": np.einsum("...jk,...jm,...km->...", c.Hh_mixed, DH_up, c.dH, optimize=True),
        "dS_dH": np.einsum("...im,...ia,...am->...", c.div_S, geo.g_inv, c.dH, optimize=True),
    }


def _w1_parts(geo: GeometryFields, c: OperatorContext, k: Dict[str, np.ndarray], I: _Weighted) -> Dict[str, float]:
    DHDH_hH = np.einsum("...in,...jn,...ij->...", c.DH, c.DH, c.Hh_up, optimize=True)
    dLH = covariant_derivative(c.LH, geo, 0)
    U1 = -0.5 * np.einsum("...m,...im->...i", c.LH, c.dH)
    U1 += 0.5 * np.einsum("...im,...m->...i", dLH, geo.H)
    U1 += 0.5 * np.einsum("...in,...jkn,...jk->...i", c.dH, geo.h, c.Hh_up, optimize=True)
    U1 -= 2.0 * np.einsum("...an,...ian->...i", c.dH, c.h_up) * c.H2[..., None]
    U1 += 2.0 * np.einsum("...ij,...j->...i", c.Hh_mixed, k["HdH"])
    return {
        "half_DH_dQ": 0.5 * I(k["DH_dQ"]),
        "dH_h_HdH": -2.0 * I(k["dH_h_HdH"]),
        "Hh_DH_dH": 2.0 * I(k["Hh_DH_dH"]),
        "DH_DH_h_H": I(2.0 * DHDH_hH - 4.0 * c.DH_sq * c.H2),
        "boundary_U1": I.boundary(U1),
    }


def _w2_parts(geo: GeometryFields, c: OperatorContext, k: Dict[str, np.ndarray], I: _Weighted) -> Dict[str, float]:
    cubic = np.einsum("...ij,...ki,...jk->...", c.Hh, c.Hh_mixed, c.Hh_up, optimize=True)
    X = 0.5 * np.einsum("...km,...m->...k", k["dQ"], geo.H) + 2.0 * np.einsum("...km,...m->...k", c.div_S, geo.H)
    return {
        "dQ_DH": -0.5 * I(k["DH_dQ"]),
        "dS_dH": -2.0 * I(k["dS_dH"]),
        "Hh_cubic": 4.0 * I(cubic),
        "Hh_sq_H2": -4.0 * I(c.Hh_sq * c.H2),
        "Q_sq": 0.5 * I(dot(c.Q, c.Q)),
        "boundary_QS": -I.boundary(X),
    }


def _w3_parts(geo: GeometryFields, c: OperatorContext, I: _Weighted) -> Dict[str, float]:
    dH2H = covariant_derivative(c.H2H, geo, 0)
    return {
        "dH2H_DH": -I(np.einsum("...jm,...ja,...am->...", dH2H, geo.g_inv, c.DH, optimize=True)),
        "H2_Hh_sq": I(c.H2 * c.Hh_sq),
        "H6": -4.0 * I(c.H2 ** 3),
        "boundary_H2H": -I.boundary(np.einsum("...jm,...m->...j", dH2H, geo.H)),
    }


def check_lemma_A1(geo: GeometryFields, c: OperatorContext, cut: CutoffFields) -> Evaluation:
    """1/2 int |Dperp H|^2 gamma^p = -int W1.H gamma^p + demais parcelas."""
    I = _Weighted(geo, cut)
    rhs = {"W1_H": -I(dot(operator_part(geo, c, W1_TERMS), geo.H))}
    rhs.update(_w1_parts(geo, c, _common(geo, c), I))
    return _integral({"half_LH_sq": 0.5 * I(dot(c.LH, c.LH))}, rhs)


def check_lemma_A2(geo: GeometryFields, c: OperatorContext, cut: CutoffFields) -> Evaluation:
    I = _Weighted(geo, cut)
    W2 = -operator_part(geo, c, W2_TERMS)
    return _integral({"W2_H": I(dot(W2, geo.H))}, _w2_parts(geo, c, _common(geo, c), I))


def check_lemma_A3(geo: GeometryFields, c: OperatorContext, cut: CutoffFields) -> Evaluation:
    I = _Weighted(geo, cut)
    W3 = operator_part(geo, c, W3_TERMS) / 7.0
    return _integral({"W3_H": I(dot(W3, geo.H))}, _w3_parts(geo, c, I))


def check_prop_32(geo: GeometryFields, c: OperatorContext, cut: CutoffFields) -> Evaluation:
    """int W.H gamma^p pela formula do operador completo.

    A combinacao (primeira) - (segunda) + 7 (terceira) deixa
    +7 int |H|^2 |H.h|^2 gamma^p, ausente do T exibido; o residuo oficial a
    inclui e o da forma literal vai nos diagnosticos.
    """
    I = _Weighted(geo, cut)
    k = _common(geo, c)
    wf = willmore(geo, c)
    T, U = aux_TU(geo, c)
    dH2H = covariant_derivative(c.H2H, geo, 0)
    U_low = np.einsum("...ij,...j->...i", geo.g, U)
    rhs = {
        "LH_sq": -0.5 * I(dot(c.LH, c.LH)),
        "DH_dQ": I(k["DH_dQ"]),
        "dH_h_HdH": -2.0 * I(k["dH_h_HdH"]),
        "Hh_DH_dH": 2.0 * I(k["Hh_DH_dH"]),
        "dS_dH": 2.0 * I(k["dS_dH"]),
        "dH2H_DH": -7.0 * I(np.einsum("...jm,...ja,...am->...", dH2H, geo.g_inv, c.DH, optimize=True)),
        "T_H": I(dot(T, geo.H)),
        "boundary_U": I.boundary(U_low),
        "H2_Hh_sq": 7.0 * I(c.H2 * c.Hh_sq),
    }
    lhs = I(dot(wf.W, geo.H))
    ev = _integral({"W_H": lhs}, rhs)
    literal = lhs - (sum(rhs.values()) - rhs["H2_Hh_sq"])
    ev.diagnostics["literal_residual"] = abs(literal)
    return ev


CHECKS: Dict[IdentityId, Callable[..., Evaluation]] = {
    IdentityId.CODAZZI: check_codazzi,
    IdentityId.TRACEFREE_DIV: check_tracefree_div,
    IdentityId.LAPLACIAN_SPLIT: check_laplacian_split,
    IdentityId.SIMON: check_simon,
    IdentityId.INTERCHANGE_H: check_interchange_H,
    IdentityId.INTERCHANGE_h: check_interchange_h,
    IdentityId.PROP_32: check_prop_32,
    IdentityId.LEMMA_A1: check_lemma_A1,
    IdentityId.LEMMA_A2: check_lemma_A2,
    IdentityId.LEMMA_A3: check_lemma_A3,
}


# ---------- Execucao ----------

def _base_spec(target: Target) -> ShapeSpec:
    return target.base if isinstance(target, PerturbationSpec) else target


def identity_grid(identity: IdentityId, target: Target, n: int, fd_order: int = 4,
                  margin: Optional[int] = None) -> Grid4:
    """Grade da forma com margem suficiente para a profundidade da identidade."""
    return margined_grid(_base_spec(target), n, fd_order, DEPTH[identity], margin)


def _jet(target: Target, grid: Grid4, cfg: EngineConfig) -> Jet2Field:
    if isinstance(target, PerturbationSpec):
        return perturb_normal(target, grid, cfg).jet
    return sample_jet(target, grid, cfg.degeneracy_eps)


def evaluate_identity(
    identity: IdentityId,
    target: Target,
    grid: Grid4,
    gamma: Optional[GammaParams] = None,
    config: Optional[EngineConfig] = None,
) -> Evaluation:
    """Uma identidade numa grade."""
    cfg = config or get_engine_config()
    geo = build_geometry(_jet(target, grid, cfg), cfg)
    ctx = OperatorContext(geo)
    cut = None
    if identity.integral:
        g = gamma or GammaParams()
        cut = cutoff_field(grid, g.center, g.rho, g.p, g.axes)
    ev = CHECKS[identity](geo, ctx, cut)
    logger.debug("%s em %s: residuo %.3e escala %.3e", identity.value, grid.dims, ev.residual, ev.scale)
    return ev


def run_identity(
    identity: Union[IdentityId, str],
    target: Target,
    resolutions: Sequence[int] = (8, 12),
    fd_order: int = 4,
    gamma: Optional[GammaParams] = None,
    tolerance: Optional[float] = None,
    config: Optional[EngineConfig] = None,
    margin: Optional[int] = None,
) -> CheckReport:
    """Roda a identidade em duas resolucoes e monta o CheckReport.

    Aprova quando o residuo da resolucao fina fica abaixo da tolerancia e,
    se os residuos estao acima do piso de arredondamento, a ordem observada
    e' pelo menos 2.

    Raises:
        CutoffSupportError: suporte de gamma fora do conjunto interior
        GridError: margem explicita menor que a exigida pela identidade
        ValueError: identidade desconhecida
    """
    identity = IdentityId.parse(identity) if isinstance(identity, str) else identity
    cfg = config or get_engine_config()
    if len(resolutions) != 2 or resolutions[0] >= resolutions[1]:
        raise ValueError(f"esperadas duas resolucoes crescentes, recebeu {tuple(resolutions)}")

    report = CheckReport(identity.value, shape=target.describe(), config=cfg.to_dict())
    with timed(report):
        grids = [identity_grid(identity, target, n, fd_order, margin) for n in resolutions]
        evals = [evaluate_identity(identity, target, g, gamma, cfg) for g in grids]
        coarse, fine = evals
        fine_grid = grids[1]
        report.grid = {"resolutions": list(resolutions), "coarse": grids[0].describe(), "fine": fine_grid.describe()}
        if gamma is not None and identity.integral:
            report.values["gamma"] = gamma.describe()

        if tolerance is None:
            tol = max(_FLOOR, derived_rtol(fine_grid, DEPTH[identity]) * fine.scale)
            prov = "derived"
        else:
            tol, prov = float(tolerance), "user"
        report.check("residual", fine.residual, tol, prov)
        report.record("residual_coarse", coarse.residual)

        floor = _FLOOR * max(1.0, fine.scale)
        order = math.nan
        if coarse.residual > floor and fine.residual > floor:
            order = math.log(coarse.residual / fine.residual) / math.log(grids[0].h_max / grids[1].h_max)
            report.check("order_deficit", max(0.0, MIN_ORDER - order), 0.0, "spec")
        report.orders["residual"] = order

        report.values.update({"scale": fine.scale, "scale_coarse": coarse.scale})
        report.terms = dict(fine.terms)
        for key, val in fine.diagnostics.items():
            report.record(key, val)
    logger.info("%s [%s] residuo=%.3e ordem=%.3g passou=%s",
                identity.value, _base_spec(target).kind, fine.residual, order, report.passed)
    return report


def energy_scale_invariance(target: ShapeSpec, n: int = 8, factors: Sequence[float] = (0.5, 2.0),
                            config: Optional[EngineConfig] = None) -> CheckReport:
    """E(lambda Phi) = E(Phi): a energia e' invariante por escala em dimensao 4."""
    cfg = config or get_engine_config()
    grid = default_grid(target, n)
    report = CheckReport("scale_invariance", shape=target.describe(), grid=grid.describe(), config=cfg.to_dict())
    with timed(report):
        ref = total_energy(build_geometry(sample_jet(target, grid, cfg.degeneracy_eps), cfg))
        report.values["energy"] = ref
        for lam in factors:
            e = total_energy(build_geometry(sample_jet(target.with_scale(lam), grid, cfg.degeneracy_eps), cfg))
            report.values[f"energy_x{lam:g}"] = e
            report.check(f"relative_x{lam:g}", abs(e - ref) / max(abs(ref), 1.0), 1e-6, "spec")
    return report
