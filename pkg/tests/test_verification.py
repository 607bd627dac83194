"""
Testes da suite de identidades, da checagem de gradiente e do fluxo por
subdominio (willmore4/verification).
"""
import dataclasses
import math

import numpy as np
import pytest

from willmore4.config import EngineConfig
from willmore4.errors import CutoffSupportError
from willmore4.grid import build_grid
from willmore4.geometry import build_geometry
from willmore4.operators import willmore
from willmore4.shapes import PerturbationSpec, ShapeSpec, default_grid, margined_grid, sample_jet, variation_field
from willmore4.verification import (
    GammaParams,
    IdentityId,
    derived_rtol,
    energy_directional_fd,
    energy_scale_invariance,
    gradient_check,
    identity_grid,
    normalize_box,
    observed_orders,
    richardson,
    run_identity,
    subdomain_flux_check,
)
from willmore4.verification.variation import _variation_integral

CFG = EngineConfig()
PLANO = ShapeSpec("flat")
TORO_NC = ShapeSpec("torus4", (0.6, 0.4, 0.5, 0.3))


# ── IdentityId ───────────────────────────────────────────────────────────

class TestIdentityId:
    def test_nome_exato(self):
        assert IdentityId.parse("simon") is IdentityId.SIMON
        assert IdentityId.parse("interchange_h") is IdentityId.INTERCHANGE_h
        assert IdentityId.parse("interchange_H") is IdentityId.INTERCHANGE_H

    def test_caixa_ignorada_fora_da_troca(self):
        assert IdentityId.parse("LEMMA_a1") is IdentityId.LEMMA_A1

    def test_troca_exige_caixa_exata(self):
        with pytest.raises(ValueError):
            IdentityId.parse("INTERCHANGE_H")

    def test_desconhecida(self):
        with pytest.raises(ValueError, match="desconhecida"):
            IdentityId.parse("gauss_bonnet")

    def test_integrais(self):
        assert IdentityId.PROP_32.integral
        assert not IdentityId.CODAZZI.integral


# ── Tolerancia derivada e extrapolacao ───────────────────────────────────

class TestTolerances:
    def test_derived_rtol(self):
        grid = build_grid(12, 2.0 * math.pi, True, fd_order=4)
        h = 2.0 * math.pi / 12
        assert derived_rtol(grid, 2) == pytest.approx(4.0 * 2 * h ** 4 / 30.0)

    def test_derived_rtol_usa_o_eixo_mais_grosso(self):
        grid = build_grid((12, 12, 12, 24), 2.0 * math.pi, True, fd_order=2)
        h = 2.0 * math.pi / 12
        assert derived_rtol(grid, 1) == pytest.approx(4.0 * h ** 2 / 6.0)

    def test_richardson_elimina_potencias_pares(self):
        eps = [0.1 * 0.5 ** k for k in range(3)]
        valores = [2.0 + 3.0 * e ** 2 - 5.0 * e ** 4 for e in eps]
        assert richardson(valores) == pytest.approx(2.0, abs=1e-12)

    def test_richardson_vazio(self):
        assert math.isnan(richardson([]))

    def test_ordens_observadas(self):
        eps = [0.1 * 0.5 ** k for k in range(4)]
        ordens = observed_orders([1.0 + e ** 2 for e in eps])
        assert len(ordens) == 2
        assert ordens == pytest.approx([2.0, 2.0], abs=1e-6)

    def test_ordem_indefinida(self):
        assert math.isnan(observed_orders([1.0, 1.0, 1.0])[0])


# ── Identidades ──────────────────────────────────────────────────────────

class TestRunIdentity:
    @pytest.mark.parametrize("ident", list(IdentityId))
    def test_plano_passa_em_todas(self, ident):
        rep = run_identity(ident, PLANO, resolutions=(8, 10), config=CFG)
        assert rep.passed
        assert rep.residuals["residual"] == 0.0
        assert "residual_coarse" in rep.residuals
        assert math.isnan(rep.orders["residual"])

    @pytest.mark.parametrize("ident", ["codazzi", "tracefree_div", "laplacian_split", "lemma_A2", "lemma_A3"])
    def test_toro_nao_critico(self, ident):
        rep = run_identity(ident, TORO_NC, resolutions=(8, 12), config=CFG)
        assert rep.passed, rep.residuals
        assert rep.tolerances["residual"]["provenance"] == "derived"

    @pytest.mark.parametrize("ident, parcela", [("interchange_H", "rhs.U_dQ"), ("interchange_h", "rhs.riemann")])
    def test_troca_de_derivadas_no_toro(self, ident, parcela):
        rep = run_identity(ident, TORO_NC, resolutions=(8, 12), config=CFG)
        assert rep.passed, rep.residuals
        assert rep.tolerances["residual"]["provenance"] == "derived"
        assert "commutator_linf" in rep.residuals
        assert "lhs" in rep.terms
        assert parcela in rep.terms

    def test_troca_da_curvatura_media_traz_termo_explicito(self):
        rep = run_identity("interchange_H", TORO_NC, resolutions=(8, 12), config=CFG)
        assert {"rhs.D_LH", "rhs.H2_DH", "rhs.h_h0_DH", "rhs.U_lap_tan", "rhs.U_div_tan"} <= set(rep.terms)

    @pytest.mark.parametrize("p", [4.0, 6.0])
    @pytest.mark.parametrize("corte", [
        dict(center=(math.pi,) * 4, rho=2.5),
        dict(center=(1.0, 2.0, 4.0, 5.5), rho=2.5),
        dict(center=(math.pi,) * 4, rho=2.5, axes=(0, 2)),
    ], ids=["centro", "deslocado", "faixa"])
    @pytest.mark.parametrize("ident", ["lemma_A1", "lemma_A2", "lemma_A3", "prop_32"])
    def test_integrais_no_toro_com_corte(self, ident, corte, p):
        gamma = GammaParams(p=p, **corte)
        rep = run_identity(ident, TORO_NC, resolutions=(8, 12), gamma=gamma, config=CFG)
        assert rep.passed, rep.residuals
        assert rep.values["gamma"]["p"] == p

    def test_parcelas_das_integrais(self):
        rep = run_identity("lemma_A3", TORO_NC, resolutions=(8, 12), config=CFG)
        assert "lhs.W3_H" in rep.terms
        assert "rhs.H6" in rep.terms

    def test_simon_traz_forma_traco_livre(self):
        rep = run_identity("simon", PLANO, resolutions=(8, 10), config=CFG)
        assert "tracefree_form_linf" in rep.residuals

    def test_prop_32_traz_residuo_literal(self):
        rep = run_identity("prop_32", PLANO, resolutions=(8, 10), config=CFG)
        assert "literal_residual" in rep.residuals

    def test_tolerancia_do_usuario(self):
        rep = run_identity("codazzi", TORO_NC, resolutions=(8, 12), tolerance=1e-6, config=CFG)
        assert rep.tolerances["residual"] == {"value": 1e-6, "provenance": "user"}

    def test_corte_registrado(self):
        gamma = GammaParams(center=(math.pi,) * 4, rho=2.5)
        rep = run_identity("lemma_A3", PLANO, resolutions=(8, 10), gamma=gamma, config=CFG)
        assert rep.passed
        assert rep.values["gamma"]["rho"] == 2.5

    @pytest.mark.parametrize("res", [(12, 8), (8,), (8, 12, 16)])
    def test_resolucoes_invalidas(self, res):
        with pytest.raises(ValueError):
            run_identity("codazzi", PLANO, resolutions=res, config=CFG)

    def test_margem_da_grade_cresce_com_a_profundidade(self):
        esfera = ShapeSpec("sphere4")
        rasa = identity_grid(IdentityId.CODAZZI, esfera, 10)
        funda = identity_grid(IdentityId.INTERCHANGE_H, esfera, 10)
        assert funda.interior_margin > rasa.interior_margin
        # pontos interiores nos eixos limitados continuam 10
        assert funda.dims[0] - 2 * funda.interior_margin == 10
        assert funda.dims[3] == 10

    def test_invariancia_por_escala(self):
        rep = energy_scale_invariance(TORO_NC, n=8, config=CFG)
        assert rep.passed
        assert set(rep.tolerances) == {"relative_x0.5", "relative_x2"}


# ── Checagem de gradiente ────────────────────────────────────────────────

class TestGradientCheck:
    def test_plano_com_direcao_fixa(self):
        pspec = PerturbationSpec(PLANO, center=(math.pi,) * 4, rho=2.5, direction="vector:0,0,0,0,1")
        rep = gradient_check(pspec, default_grid(PLANO, 8), CFG)
        assert rep.passed
        assert rep.values["delta_fd"] == 0.0
        assert rep.values["delta_w"] == 0.0

    def test_toro_nao_critico_variacao_radial(self):
        pspec = PerturbationSpec(TORO_NC)
        rep = gradient_check(pspec, default_grid(TORO_NC, 12), CFG)
        fd, dw = rep.values["delta_fd"], rep.values["delta_w"]
        assert abs(fd) > 1.0
        assert abs(fd - dw) <= 0.05 * abs(fd)
        assert len(rep.values["sweep"]["raw"]) == CFG.eps_levels

    def test_rho_none_em_forma_limitada(self):
        esfera = ShapeSpec("sphere4")
        with pytest.raises(CutoffSupportError, match="periodica"):
            gradient_check(PerturbationSpec(esfera), default_grid(esfera, 10), CFG)

    def test_forma_limitada_com_bump_compacto(self):
        # eixos 1 e 2 sao colatitudes de S3; o bump nao depende dos angulos
        spec = ShapeSpec("s1xs3", (0.6, 0.8))
        grid = margined_grid(spec, (8, 16, 16, 8), depth=4)
        pspec = PerturbationSpec(spec, rho=0.6, axes=(1, 2))
        rep = gradient_check(pspec, grid, CFG, tolerance=math.inf)
        fd, dw = rep.values["delta_fd"], rep.values["delta_w"]
        assert abs(fd) > 1e-3
        assert abs(fd - dw) <= 0.1 * abs(fd)

    def test_delta_w_e_linear_em_b(self):
        grid = default_grid(TORO_NC, 8)
        base = sample_jet(TORO_NC, grid, CFG.degeneracy_eps)
        geo = build_geometry(base, CFG)
        W = willmore(geo).W
        v1 = variation_field(PerturbationSpec(TORO_NC, center=(math.pi,) * 4, rho=2.5), grid, base, CFG)
        v2 = variation_field(PerturbationSpec(TORO_NC, center=(1.0, 2.0, 4.0, 5.5), rho=2.0), grid, base, CFG)
        a, b = 0.7, -1.3
        soma = v1.scaled(a).plus(v2.scaled(b))
        d1, d2 = _variation_integral(geo, v1.B, W, None), _variation_integral(geo, v2.B, W, None)
        ds = _variation_integral(geo, soma.B, W, None)
        assert abs(d1) > 1e-6
        assert ds == pytest.approx(a * d1 + b * d2, rel=1e-12, abs=1e-14)

    def test_delta_fd_e_linear_em_b(self):
        grid = default_grid(TORO_NC, 8)
        base = sample_jet(TORO_NC, grid, CFG.degeneracy_eps)
        v1 = variation_field(PerturbationSpec(TORO_NC, center=(math.pi,) * 4, rho=2.5), grid, base, CFG)
        v2 = variation_field(PerturbationSpec(TORO_NC, center=(1.0, 2.0, 4.0, 5.5), rho=2.0), grid, base, CFG)
        eps = [1e-3 * 0.5 ** k for k in range(4)]
        d1 = energy_directional_fd(base, v1, CFG, eps=eps).value
        d2 = energy_directional_fd(base, v2, CFG, eps=eps).value
        ds = energy_directional_fd(base, v1.plus(v2), CFG, eps=eps).value
        assert ds == pytest.approx(d1 + d2, rel=1e-6)

    def test_varredura_paralela_igual_a_sequencial(self):
        grid = default_grid(TORO_NC, 8)
        base = sample_jet(TORO_NC, grid, CFG.degeneracy_eps)
        var = variation_field(PerturbationSpec(TORO_NC), grid, base, CFG)
        seq = energy_directional_fd(base, var, CFG)
        par = energy_directional_fd(base, var, dataclasses.replace(CFG, threads=2))
        assert par.raw == seq.raw
        assert par.value == seq.value
        assert par.eps == sorted(par.eps, reverse=True)


# ── Fluxo por subdominio ─────────────────────────────────────────────────

class TestSubdomainFlux:
    def test_normalize_box_periodico(self):
        grid = default_grid(TORO_NC, 8)
        assert normalize_box(grid, None) == [None] * 4
        assert normalize_box(grid, [(1, 5), None, None, None])[0] == (1, 5)

    def test_normalize_box_limitado(self):
        grid = build_grid(12, 1.0, (True, True, True, False), margin=2)
        assert normalize_box(grid, None)[3] == (2, 9)
        with pytest.raises(CutoffSupportError, match="margem"):
            normalize_box(grid, [None, None, None, (1, 6)])

    def test_normalize_box_invalido(self):
        grid = default_grid(TORO_NC, 8)
        with pytest.raises(CutoffSupportError):
            normalize_box(grid, [(4, 4), None, None, None])
        with pytest.raises(CutoffSupportError):
            normalize_box(grid, [(1, 5)])

    def test_b_fora_da_caixa(self):
        grid = default_grid(TORO_NC, 12)
        h = grid.spacing[0]
        pspec = PerturbationSpec(TORO_NC, center=(2.0 * h,) * 4, rho=1.0)
        rep = subdomain_flux_check(pspec, grid, [(7, 10)] * 4, CFG)
        assert rep.passed
        assert rep.values["delta_fd"] == 0.0
        assert rep.values["delta_w"] == 0.0
        assert rep.values["flux"] == 0.0
        assert rep.values["energy_omega"] > 0.0
        assert rep.values["box"] == [[7, 10]] * 4

    def test_b_dentro_da_caixa(self):
        # bump so no eixo 0, bem resolvido; faces do eixo 0 longe do suporte
        grid = default_grid(TORO_NC, (24, 12, 12, 12))
        pspec = PerturbationSpec(TORO_NC, center=(math.pi,) * 4, rho=2.0, axes=(0,))
        rep = subdomain_flux_check(pspec, grid, [(1, 23), None, None, None], CFG)
        v = rep.values
        assert rep.passed, rep.residuals
        assert abs(v["delta_fd"]) > 1e-3
        assert abs(v["flux"]) <= 1e-10 * abs(v["delta_fd"])
        assert v["delta_w"] == pytest.approx(v["delta_fd"], rel=1e-2)

    def test_caixa_na_margem(self):
        esfera = ShapeSpec("sphere4")
        grid = default_grid(esfera, 10, margin=4)
        pspec = PerturbationSpec(esfera, rho=0.5)
        with pytest.raises(CutoffSupportError):
            subdomain_flux_check(pspec, grid, [(0, 3), None, None, None], CFG)


class TestFaceFlux:
    def test_campo_linear_cumpre_o_teorema_da_divergencia(self):
        from willmore4.geometry import build_geometry
        from willmore4.shapes import sample_jet
        from willmore4.verification import face_flux

        toro = ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5))
        grid = default_grid(toro, 8)
        geo = build_geometry(sample_jet(toro, grid), CFG)
        V = np.zeros(grid.shape + (4,))
        V[..., 0] = grid.mesh()[0]
        h = grid.spacing[0]
        fluxo = face_flux(geo, V, [(2, 6)] * 4)
        # div V = 1, sqrt g = 1/16
        assert fluxo == pytest.approx((4 * h) ** 4 / 16.0, rel=1e-12)
