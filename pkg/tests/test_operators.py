"""
Testes do operador de Willmore, da corrente de fronteira e de T, U
(willmore4/operators).
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from willmore4.config import EngineConfig
from willmore4.errors import NormalityError
from willmore4.geometry import build_geometry
from willmore4.grid import region_values
from willmore4.operators import (
    T_TERMS,
    TERM_NAMES,
    OperatorContext,
    assembly_residual,
    aux_TU,
    boundary_current,
    residual_norms,
    willmore,
    willmore_terms,
)
from willmore4.shapes import ShapeSpec, default_grid, oracle_willmore, sample_jet
from willmore4.verification import derived_rtol

CFG = EngineConfig()
TORO_MEIO = ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5))
TORO_NC = ShapeSpec("torus4", (0.6, 0.4, 0.5, 0.3))


def _geo_jet(spec, n=8):
    grid = default_grid(spec, n)
    jet = sample_jet(spec, grid)
    return build_geometry(jet, CFG), jet


@pytest.fixture(scope="module")
def toro_meio():
    geo, jet = _geo_jet(TORO_MEIO)
    return geo, jet, willmore(geo)


# ── Montagem de W ────────────────────────────────────────────────────────

class TestWillmore:
    def test_catorze_parcelas(self, toro_meio):
        _, _, wf = toro_meio
        assert len(TERM_NAMES) == 14
        assert tuple(wf.terms) == TERM_NAMES

    def test_montagem(self, toro_meio):
        _, _, wf = toro_meio
        assert assembly_residual(wf) < 1e-12

    def test_plano_tem_w_nulo(self):
        geo, _ = _geo_jet(ShapeSpec("flat"))
        assert np.abs(willmore(geo).W).max() == 0.0

    def test_toro_meio_e_critico(self, toro_meio):
        geo, jet, wf = toro_meio
        escala = max(float(np.abs(t).max()) for t in wf.terms.values())
        tol = derived_rtol(geo.grid, 4) * escala
        assert np.abs(region_values(wf.W, geo.grid)).max() <= tol

    def test_w_e_normal(self, toro_meio):
        geo, _, wf = toro_meio
        assert residual_norms(wf, geo)["tangential_linf"] < 1e-8

    def test_parcela_desconhecida(self, toro_meio):
        geo, _, _ = toro_meio
        with pytest.raises(KeyError):
            willmore_terms(geo, only=["w9_inexistente"])

    def test_parcela_algebrica_isolada(self, toro_meio):
        geo, _, wf = toro_meio
        t = willmore_terms(geo, only=["w3_quartic"])
        # |H| = 1
        assert_allclose(t["w3_quartic"], -28.0 * geo.H, atol=1e-12)
        assert_allclose(t["w3_quartic"], wf.terms["w3_quartic"])

    def test_contexto_reutilizado(self, toro_meio):
        geo, _, wf = toro_meio
        ctx = OperatorContext(geo)
        assert_allclose(willmore(geo, ctx).W, wf.W)


# ── Convergencia contra a forma fechada ──────────────────────────────────

class TestResidualNorms:
    def test_ordem_no_toro_nao_critico(self):
        erros = []
        for n in (8, 12):
            geo, jet = _geo_jet(TORO_NC, n)
            wf = willmore(geo)
            norms = residual_norms(wf, geo, target=oracle_willmore(TORO_NC, jet))
            erros.append(norms["linf"])
        ordem = math.log(erros[0] / erros[1]) / math.log(12 / 8)
        assert ordem >= 2.0

    def test_tabela_com_coeficientes(self, toro_meio):
        geo, _, wf = toro_meio
        norms = residual_norms(wf, geo, reference=geo.H)
        assert set(norms["terms"]) == set(TERM_NAMES)
        # parcela algebrica: coeficiente exato contra H
        assert norms["terms"]["w3_quartic"]["coefficient"] == pytest.approx(-28.0, rel=1e-12)
        assert norms["terms"]["w2_Hh_sq_H"]["coefficient"] == pytest.approx(16.0, rel=1e-12)


# ── Corrente de fronteira e T, U ─────────────────────────────────────────

class TestBoundaryCurrent:
    def test_forma(self, toro_meio):
        geo, _, _ = toro_meio
        V = boundary_current(geo, geo.H)
        assert V.shape == geo.grid.shape + (4,)
        assert np.isfinite(V).all()

    def test_b_tangente_rejeitado(self, toro_meio):
        geo, jet, _ = toro_meio
        with pytest.raises(NormalityError):
            boundary_current(geo, jet.dphi[..., 1, :])

    def test_baixado_e_subido(self, toro_meio):
        geo, _, _ = toro_meio
        V = boundary_current(geo, geo.H)
        V_low = boundary_current(geo, geo.H, lowered=True)
        assert_allclose(np.einsum("...jk,...k->...j", geo.g_inv, V_low), V, atol=1e-12)

    def test_t_e_u_no_toro_meio(self, toro_meio):
        geo, _, wf = toro_meio
        T, U = aux_TU(geo)
        assert_allclose(T, sum(wf.terms[k] for k in T_TERMS), atol=1e-12)
        assert np.abs(U).max() < 1e-10
