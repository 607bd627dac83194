"""
Curvaturas via equacao de Gauss e comutadores de derivadas normais.

Convencoes (fixadas contra a esfera unitaria):
    R_abcd = h_ac.h_bd - h_ad.h_bc
    Rperp_ab xi = (xi.h_bl) h_a^l - (xi.h_al) h_b^l
    [D_a, D_b] T_c.. = Rperp_ab T_c.. + sum_s R_{ab c_s}^d T_..d..
onde D_a D_b T e' (D(DT))_{a b ...}.
"""
from __future__ import annotations

import numpy as np

from ..grid.lattice import NDIM
from .calculus import (
    covariant_derivative,
    covariant_derivative_along,
    laplacian,
    normal_gradient,
    normal_gradient_along,
    normal_laplacian,
    sliced_divergence,
)
from .fields import GeometryFields, apply_projector

_SLOTS = "pqrstuvw"


def gauss_riemann(geo: GeometryFields) -> np.ndarray:
    """R[..., i, j, k, l] = h_ik.h_jl - h_il.h_jk"""
    a = np.einsum("...ikm,...jlm->...ijkl", geo.h, geo.h)
    return a - np.swapaxes(a, -1, -2)


def riemann_mixed(geo: GeometryFields) -> np.ndarray:
    """R_{abc}^d"""
    return np.einsum("...abce,...ed->...abcd", gauss_riemann(geo), geo.g_inv)


def ricci_gauss(geo: GeometryFields) -> np.ndarray:
    """Ric_kl = g^{ij} R_ikjl = 4 H.h_kl - h_k^i.h_il"""
    return np.einsum("...ij,...ikjl->...kl", geo.g_inv, gauss_riemann(geo))


def tracefree_ricci(geo: GeometryFields) -> np.ndarray:
    """Ric_kl - 3|H|^2 g_kl escrito em h0: 2 H.h0_kl - h0_k^i.h0_il"""
    Hh0 = np.einsum("...m,...klm->...kl", geo.H, geo.h0)
    h0h0 = np.einsum("...ij,...kim,...jlm->...kl", geo.g_inv, geo.h0, geo.h0, optimize=True)
    return 2.0 * Hh0 - h0h0


def riemann_symmetry_residuals(geo: GeometryFields) -> dict:
    R = gauss_riemann(geo)[geo.grid.interior_slices()]
    bianchi = R + np.einsum("...ijkl->...jkil", R) + np.einsum("...ijkl->...kijl", R)
    return {
        "antisym_ij": float(np.abs(R + np.swapaxes(R, -4, -3)).max()),
        "antisym_kl": float(np.abs(R + np.swapaxes(R, -2, -1)).max()),
        "pair_sym": float(np.abs(R - np.einsum("...ijkl->...klij", R)).max()),
        "bianchi": float(np.abs(bianchi).max()),
    }


def normal_curvature(geo: GeometryFields, xi: np.ndarray, a: int, b: int) -> np.ndarray:
    """Rperp_ab aplicado a um campo normal xi (dims + (m,))."""
    hup = geo.h_up
    t1 = np.einsum("...l,...lm->...m", np.einsum("...n,...ln->...l", xi, geo.h[..., b, :, :]), hup[..., a, :, :])
    t2 = np.einsum("...l,...lm->...m", np.einsum("...n,...ln->...l", xi, geo.h[..., a, :, :]), hup[..., b, :, :])
    return t1 - t2


def riemann_commutator_slice(values: np.ndarray, rank: int, a: int, Rm: np.ndarray) -> np.ndarray:
    """sum_s R_{a b c_s}^d T_{..d..} para `a` fixo (comutador da derivada ambiente completa)."""
    R = _SLOTS[:rank]
    out = np.zeros(values.shape[:NDIM] + (NDIM,) + values.shape[NDIM:])
    Ra = Rm[..., a, :, :, :]
    for s in range(rank):
        src = R[:s] + "d" + R[s + 1:]
        out += np.einsum(f"...b{R[s]}d,...{src}m->...b{R}m", Ra, values)
    return out


def commutator_slice(values: np.ndarray, geo: GeometryFields, rank: int, a: int,
                     hup: np.ndarray = None, Rm: np.ndarray = None) -> np.ndarray:
    """C_{ab}(T) para `a` fixo e todo b: dims + (4,)[b] + (4,)*rank + (m,)."""
    hup = geo.h_up if hup is None else hup
    Rm = riemann_mixed(geo) if Rm is None else Rm
    R = _SLOTS[:rank]
    X = np.einsum(f"...{R}n,...bln->...b{R}l", values, geo.h)
    out = np.einsum(f"...b{R}l,...lm->...b{R}m", X, hup[..., a, :, :])
    Y = np.einsum(f"...{R}n,...ln->...{R}l", values, geo.h[..., a, :, :])
    out -= np.einsum(f"...{R}l,...blm->...b{R}m", Y, hup)
    return out + riemann_commutator_slice(values, rank, a, Rm)


def commutator(values: np.ndarray, geo: GeometryFields, rank: int) -> np.ndarray:
    """C_ab(T) completo; posto + 2. So para tensores pequenos."""
    hup, Rm = geo.h_up, riemann_mixed(geo)
    return np.stack([commutator_slice(values, geo, rank, a, hup, Rm) for a in range(NDIM)], axis=NDIM)


def traced_commutator(Y: np.ndarray, geo: GeometryFields, rank_y: int, normal_part: bool = True) -> np.ndarray:
    """g^{ia} C_ij(Y)_{a R} para todo j; Y tem slots (a, R). Resultado dims + (4,)[j] + R + (m,).

    Com normal_part=False fica so a parte de Riemann (derivada ambiente completa).
    """
    R = _SLOTS[:rank_y - 1]
    hup = geo.h_up
    Rm = riemann_mixed(geo)

    out = np.zeros(Y.shape)
    if normal_part:
        # Rperp: (Y_a.h_jl) h^{al} - (Y_a.h^a_l) h_j^l
        X = np.einsum(f"...a{R}n,...jln->...ja{R}l", Y, geo.h)
        out += np.einsum(f"...ja{R}l,...alm->...j{R}m", X, geo.h_upup)
        Z = np.einsum(f"...a{R}n,...lan->...{R}l", Y, hup)
        out -= np.einsum(f"...{R}l,...jlm->...j{R}m", Z, hup)

    # slot a de Y: g^{ia} R_{ija}^d Y_d
    K = np.einsum("...ia,...ijad->...jd", geo.g_inv, Rm)
    out += np.einsum(f"...jd,...d{R}m->...j{R}m", K, Y)
    # slots de R
    if rank_y > 1:
        M = np.einsum("...ia,...ijcd->...ajcd", geo.g_inv, Rm)
        for s in range(rank_y - 1):
            src = R[:s] + "d" + R[s + 1:]
            out += np.einsum(f"...aj{R[s]}d,...a{src}m->...j{R}m", M, Y)
    return out


def commutator_divergence(values: np.ndarray, geo: GeometryFields, rank: int) -> np.ndarray:
    """pi_n g^{ia} D_i C_{aj}(T) para todo j, sem materializar C inteiro."""
    hup, Rm = geo.h_up, riemann_mixed(geo)
    out = sliced_divergence(lambda a: commutator_slice(values, geo, rank, a, hup, Rm), geo, rank + 1)
    return apply_projector(geo.P_nor, out)


def interchange_residual(values: np.ndarray, geo: GeometryFields, rank: int) -> dict:
    """Delta_perp(D_j T) - D_j(Delta_perp T) - g^{ia}C_ij(DT)_a - g^{ia} D_i C_aj(T).

    Devolve o residuo e os dois lados para escala.
    """
    Y = normal_gradient(values, geo, rank, strict=False)
    lhs = normal_laplacian(Y, geo, rank + 1, strict=False)
    lhs -= normal_gradient(normal_laplacian(values, geo, rank, strict=False), geo, rank, strict=False)
    rhs = apply_projector(geo.P_nor, traced_commutator(Y, geo, rank + 1))
    rhs += commutator_divergence(values, geo, rank)
    return {"residual": lhs - rhs, "lhs": lhs, "rhs": rhs}


def _sum_parts(parts: dict) -> np.ndarray:
    total = None
    for v in parts.values():
        total = v.copy() if total is None else total + v
    return total


def mean_curvature_interchange(geo: GeometryFields) -> dict:
    """Delta_perp D_k H = D_k Delta_perp H + 3|H|^2 D_k H + M_k^l D_l H + U_k.

    M = tracefree_ricci(geo). U_k junta os termos que vem de trocar a derivada
    normal pela ambiente:
        - pi_n D_k Q,  Q = (H.h^ij) h_ij
        - 2 (D_s H.h^sj) h_jk - 2 D^i|H|^2 h_ik
        - pi_n Delta(pi_T D_k H) - pi_n g^ja D_j pi_T D_a (D_k H)
    Devolve residuo, lado esquerdo e as parcelas do lado direito por nome.
    """
    Pn, Pt = geo.P_nor, geo.P_tan
    H = geo.H
    dH = covariant_derivative(H, geo, 0)
    DH = apply_projector(Pn, dH)
    H2 = np.einsum("...m,...m->...", H, H)
    h_upup = geo.h_upup

    lhs = normal_laplacian(DH, geo, 1, strict=False)
    Q = np.einsum("...ij,...ijm->...m", np.einsum("...n,...ijn->...ij", H, h_upup), geo.h)
    DH_up = np.einsum("...la,...am->...lm", geo.g_inv, DH)
    dH2 = covariant_derivative(H2, geo, 0, ambient=False)
    tan_dH = apply_projector(Pt, dH)

    parts = {
        "D_LH": normal_gradient(normal_laplacian(H, geo, 0, strict=False), geo, 0, strict=False),
        "H2_DH": 3.0 * H2[..., None, None] * DH,
        "h_h0_DH": np.einsum("...kl,...lm->...km", tracefree_ricci(geo), DH_up),
        "U_dQ": -normal_gradient(Q, geo, 0, strict=False),
        "U_dH_h": -2.0 * np.einsum("...j,...jkm->...km", np.einsum("...sn,...sjn->...j", dH, h_upup), geo.h),
        "U_dH2_h": -2.0 * np.einsum("...ia,...a,...ikm->...km", geo.g_inv, dH2, geo.h),
        "U_lap_tan": -apply_projector(Pn, laplacian(tan_dH, geo, 1)),
        "U_div_tan": -apply_projector(Pn, sliced_divergence(
            lambda a: apply_projector(Pt, covariant_derivative_along(DH, geo, 1, a)), geo, 1)),
    }
    return {"residual": lhs - _sum_parts(parts), "lhs": lhs, "parts": parts}


def second_form_interchange(geo: GeometryFields) -> dict:
    """Delta_perp D_j h_kl escrito a partir de D_j Delta_perp h_kl.

    Troca pi_n D por D ambiente nos dois lados; o que sobra sao as parcelas
    tangenciais reprojetadas e o comutador de Riemann (o slot ambiente e' plano):
        D_Lh          pi_n D_j Delta_perp h
        d_tan_div_n   pi_n D_j pi_T g^ia D_i (pi_n D_a h)
        d_div_tan     pi_n D_j g^ia D_i (pi_T D_a h)
        riemann       pi_n [g^ia D_i C_aj(h) + g^ia C_ij(Dh)_a]
        lap_tan_dh    -pi_n Delta(pi_T D h)
        div_tan_Dh    -pi_n g^ia D_i pi_T D_a(pi_n D h)
    """
    Pn, Pt = geo.P_nor, geo.P_tan
    h = geo.h
    Rm = riemann_mixed(geo)
    dh = covariant_derivative(h, geo, 2)
    Dh = apply_projector(Pn, dh)

    lhs = normal_laplacian(Dh, geo, 3, strict=False)
    div_n = sliced_divergence(lambda a: normal_gradient_along(h, geo, 2, a), geo, 2)
    div_tan = sliced_divergence(
        lambda a: apply_projector(Pt, covariant_derivative_along(h, geo, 2, a)), geo, 2)
    riem = sliced_divergence(lambda a: riemann_commutator_slice(h, 2, a, Rm), geo, 3)
    riem += traced_commutator(dh, geo, 3, normal_part=False)

    parts = {
        "D_Lh": normal_gradient(normal_laplacian(h, geo, 2, strict=False), geo, 2, strict=False),
        "d_tan_div_n": normal_gradient(apply_projector(Pt, div_n), geo, 2, strict=False),
        "d_div_tan": normal_gradient(div_tan, geo, 2, strict=False),
        "riemann": apply_projector(Pn, riem),
        "lap_tan_dh": -apply_projector(Pn, laplacian(apply_projector(Pt, dh), geo, 3)),
        "div_tan_Dh": -apply_projector(Pn, sliced_divergence(
            lambda a: apply_projector(Pt, covariant_derivative_along(Dh, geo, 3, a)), geo, 3)),
    }
    return {"residual": lhs - _sum_parts(parts), "lhs": lhs, "parts": parts}
