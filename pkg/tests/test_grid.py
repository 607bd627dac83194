"""
Testes do reticulado, estenceis, quadratura e funcao de corte (willmore4/grid).
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from willmore4.errors import CutoffSupportError, GridError, StencilDomainError
from willmore4.grid import (
    ScalarField,
    build_grid,
    cutoff_field,
    integrate,
    partial,
    partial_array,
    region_values,
    smoothstep5,
    tree_sum,
)


@pytest.fixture
def grade_periodica():
    return build_grid(12, 2.0 * math.pi, True)


@pytest.fixture
def grade_limitada():
    return build_grid(12, 1.0, (True, True, True, False), margin=2)


# ── build_grid ───────────────────────────────────────────────────────────

class TestBuildGrid:
    def test_espacamento_periodico_sem_costura(self, grade_periodica):
        assert grade_periodica.spacing[0] == pytest.approx(2.0 * math.pi / 12)
        assert grade_periodica.interior_margin == 0

    def test_espacamento_limitado_inclui_pontas(self, grade_limitada):
        assert grade_limitada.spacing[3] == pytest.approx(1.0 / 11)
        assert grade_limitada.extent[3] == pytest.approx(1.0)

    def test_margem_padrao_e_meia_largura(self):
        grid = build_grid(10, 1.0, False, fd_order=6)
        assert grid.interior_margin == 3

    def test_grade_pequena_demais(self):
        with pytest.raises(GridError, match="grid too small"):
            build_grid(4, 1.0, True, fd_order=6)

    def test_extensao_nula(self):
        with pytest.raises(GridError):
            build_grid(8, (1.0, 0.0, 1.0, 1.0), True)

    def test_margem_menor_que_estencil(self):
        with pytest.raises(GridError):
            build_grid(8, 1.0, False, margin=1, fd_order=4)

    def test_required_margin(self, grade_limitada):
        assert grade_limitada.required_margin(3) == 6
        assert grade_limitada.required_margin(0) == 2

    def test_interior_count(self, grade_limitada):
        assert grade_limitada.interior_count() == 12 ** 3 * 8


# ── Derivadas ────────────────────────────────────────────────────────────

class TestPartial:
    @pytest.mark.parametrize("ordem", [2, 4, 6])
    def test_ordem_observada(self, ordem):
        erros = []
        for n in (16, 32):
            grid = build_grid(n, 2.0 * math.pi, True, fd_order=ordem)
            x = grid.mesh()[1]
            f = np.broadcast_to(np.sin(x), grid.shape)
            d = partial_array(f, grid, 1)
            erros.append(float(np.abs(d - np.cos(x)).max()))
        assert math.log2(erros[0] / erros[1]) == pytest.approx(ordem, abs=0.3)

    def test_polinomio_exato_no_grau_do_estencil(self):
        grid = build_grid(12, 1.0, False, fd_order=4)
        x = grid.mesh()[0]
        f = np.broadcast_to(x ** 3, grid.shape)
        d = partial_array(f, grid, 0)
        s = grid.halfwidth
        assert_allclose(d[s:-s], np.broadcast_to(3 * x ** 2, grid.shape)[s:-s], atol=1e-10)

    def test_faixa_nan_em_eixo_limitado(self, grade_limitada):
        f = np.ones(grade_limitada.shape)
        d = partial_array(f, grade_limitada, 3)
        assert np.isnan(d[..., :2]).all()
        assert np.isnan(d[..., -2:]).all()
        assert_allclose(d[..., 2:-2], 0.0)

    def test_eixo_invalido(self, grade_periodica):
        with pytest.raises(GridError):
            partial_array(np.zeros(grade_periodica.shape), grade_periodica, 4)

    def test_partial_preserva_o_tipo(self, grade_periodica):
        x = grade_periodica.mesh()[2]
        campo = ScalarField(grade_periodica, np.broadcast_to(np.sin(x), grade_periodica.shape).copy())
        d = partial(campo, 2)
        assert isinstance(d, ScalarField)
        assert d.grid is grade_periodica
        assert_allclose(d.values, partial_array(campo.values, grade_periodica, 2))

    def test_partial_de_ndarray_exige_grade(self, grade_periodica):
        with pytest.raises(GridError):
            partial(np.zeros(grade_periodica.shape), 0)


# ── Quadratura ───────────────────────────────────────────────────────────

class TestIntegrate:
    def test_volume_do_toro_de_parametros(self, grade_periodica):
        vol = integrate(np.ones(grade_periodica.shape), grid=grade_periodica)
        assert vol == pytest.approx((2.0 * math.pi) ** 4, rel=1e-13)

    def test_trigonometrico_exato_em_eixo_periodico(self, grade_periodica):
        x = grade_periodica.mesh()[0]
        f = np.broadcast_to(np.cos(x) ** 2, grade_periodica.shape)
        assert integrate(f, grid=grade_periodica) == pytest.approx(math.pi * (2 * math.pi) ** 3, rel=1e-12)

    def test_nan_no_interior_levanta(self, grade_limitada):
        f = np.ones(grade_limitada.shape)
        f[0, 0, 0, 5] = np.nan
        with pytest.raises(StencilDomainError):
            integrate(f, grid=grade_limitada)

    def test_nan_na_margem_e_ignorado(self, grade_limitada):
        f = np.ones(grade_limitada.shape)
        f[..., 0] = np.nan
        assert math.isfinite(integrate(f, grid=grade_limitada))

    def test_region_values(self, grade_limitada):
        sub = region_values(np.zeros(grade_limitada.shape), grade_limitada)
        assert sub.shape == (12, 12, 12, 8)

    def test_tree_sum_determinista(self):
        rng = np.random.default_rng(7)
        v = rng.standard_normal(1000)
        assert tree_sum(v) == tree_sum(v.copy())
        assert tree_sum(v) == pytest.approx(float(v.sum()), abs=1e-10)
        assert tree_sum(np.array([])) == 0.0


# ── Funcao de corte ──────────────────────────────────────────────────────

class TestCutoff:
    def test_smoothstep_nas_pontas(self):
        assert smoothstep5(np.array(0.0)) == 0.0
        assert smoothstep5(np.array(1.0)) == 1.0

    def test_plato_e_suporte(self, grade_periodica):
        centro = (math.pi,) * 4
        cut = cutoff_field(grade_periodica, centro, rho=2.0)
        g = cut.gamma.values
        assert g.max() == pytest.approx(1.0)
        assert g.min() == 0.0
        assert g[6, 6, 6, 6] == pytest.approx(1.0)

    def test_gradiente_analitico_confere_com_estencil(self):
        grid = build_grid(24, 2.0 * math.pi, True, fd_order=6)
        cut = cutoff_field(grid, (math.pi,) * 4, rho=2.5)
        d = partial_array(cut.gamma.values, grid, 0)
        assert_allclose(d, cut.grad[..., 0], atol=0.1)

    def test_rho_none_e_identicamente_um(self, grade_periodica):
        cut = cutoff_field(grade_periodica)
        assert_allclose(cut.gamma.values, 1.0)
        assert cut.gradient_bound() == 0.0

    def test_rho_none_em_eixo_limitado(self, grade_limitada):
        with pytest.raises(CutoffSupportError, match="periodica"):
            cutoff_field(grade_limitada)

    def test_corte_em_faixa(self, grade_periodica):
        cut = cutoff_field(grade_periodica, (math.pi,) * 4, rho=2.0, axes=(0,))
        assert_allclose(cut.grad[..., 1:], 0.0)
        assert_allclose(cut.gamma.values[6], 1.0)

    def test_power_gradient(self, grade_periodica):
        cut = cutoff_field(grade_periodica, (math.pi,) * 4, rho=2.0, p=6)
        esperado = (cut.gamma.values ** 5)[..., None] * cut.grad
        assert_allclose(cut.power_gradient(), esperado)

    def test_p_menor_que_quatro(self, grade_periodica):
        with pytest.raises(CutoffSupportError):
            cutoff_field(grade_periodica, rho=1.0, p=3)

    def test_suporte_encosta_na_margem(self, grade_limitada):
        with pytest.raises(CutoffSupportError):
            cutoff_field(grade_limitada, (math.pi, math.pi, math.pi, 0.05), rho=0.5)
