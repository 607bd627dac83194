"""
Testes dos campos geometricos, do calculo normal e das curvaturas
(willmore4/geometry).
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from willmore4.config import EngineConfig
from willmore4.errors import DegenerateImmersionError, NormalityError
from willmore4.geometry import (
    build_geometry,
    first_fundamental,
    gauss_riemann,
    laplacian,
    normal_gradient,
    normal_laplacian,
    project,
    ricci_gauss,
    riemann_symmetry_residuals,
    structural_residuals,
    tracefree_ricci,
)
from willmore4.grid import build_grid
from willmore4.shapes import ShapeSpec, default_grid, oracle_mean_curvature, sample_jet

CFG = EngineConfig()


def _geo(spec, n=10, fd_order=4):
    grid = default_grid(spec, n, fd_order)
    jet = sample_jet(spec, grid)
    return build_geometry(jet, CFG), jet


@pytest.fixture(scope="module")
def toro():
    return _geo(ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5)), n=12)


@pytest.fixture(scope="module")
def esfera():
    return _geo(ShapeSpec("sphere4", (1.0,)))


# ── GeometryFields ───────────────────────────────────────────────────────

class TestBuildGeometry:
    @pytest.mark.parametrize("spec", [
        ShapeSpec("torus4", (0.6, 0.4, 0.5, 0.3)),
        ShapeSpec("s2xs2", (0.8, 0.6)),
        ShapeSpec("s1xs3", (0.5, 1.0)),
    ])
    def test_invariantes_estruturais(self, spec):
        geo, _ = _geo(spec, n=8)
        res = structural_residuals(geo)
        for chave in ("trace_g", "h_tangential", "mean_curvature", "h0_trace",
                      "projector_sum", "projector_idempotent", "projector_symmetric"):
            assert res[chave] < 1e-10, chave
        assert res["min_eig_g"] > 0.0

    def test_esfera_curvatura_media(self, esfera):
        geo, jet = esfera
        assert_allclose(geo.H, -jet.phi, atol=1e-12)
        assert_allclose(geo.H, oracle_mean_curvature(ShapeSpec("sphere4"), jet), atol=1e-12)

    def test_esfera_e_umbilica(self, esfera):
        geo, _ = esfera
        assert np.abs(geo.h0).max() < 1e-12

    def test_toro_nao_e_umbilico(self, toro):
        geo, _ = toro
        assert np.abs(geo.h0).max() > 0.1

    def test_first_fundamental_degenerado(self):
        grid = build_grid(8)
        dphi = np.zeros(grid.shape + (4, 5))
        with pytest.raises(DegenerateImmersionError) as exc:
            first_fundamental(dphi, grid)
        assert exc.value.index is not None

    def test_project_desconhecida(self, toro):
        geo, _ = toro
        with pytest.raises(ValueError):
            project(geo.H, "oblíqua", geo)

    def test_project_normal_preserva_h(self, toro):
        geo, _ = toro
        assert_allclose(project(geo.H, "normal", geo), geo.H, atol=1e-14)
        assert np.abs(project(geo.H, "tangent", geo)).max() < 1e-14


# ── Calculo normal ───────────────────────────────────────────────────────

class TestNormalCalculus:
    def test_toro_h_paralelo(self, toro):
        geo, _ = toro
        assert np.abs(normal_gradient(geo.H, geo, 0)).max() < 1e-12
        assert np.abs(normal_laplacian(geo.H, geo, 0)).max() < 1e-12

    def test_laplaciano_de_phi_e_4h_com_fator_do_estencil(self, toro):
        geo, jet = toro
        h = geo.grid.h_min
        lam = (8.0 * math.sin(h) - math.sin(2.0 * h)) / (6.0 * h)
        lap = laplacian(jet.phi, geo, 0)
        assert_allclose(lap, lam ** 2 * 4.0 * geo.H, atol=1e-12)

    def test_modo_estrito_rejeita_campo_tangente(self, toro):
        geo, jet = toro
        with pytest.raises(NormalityError, match="nao e' normal"):
            normal_gradient(jet.dphi[..., 0, :], geo, 0)

    def test_modo_estrito_desligado(self, toro):
        geo, jet = toro
        out = normal_gradient(jet.dphi[..., 0, :], geo, 0, strict=False)
        assert out.shape == geo.grid.shape + (4, 8)


# ── Curvatura ────────────────────────────────────────────────────────────

class TestCurvature:
    def test_toro_e_plano(self, toro):
        geo, _ = toro
        assert np.abs(gauss_riemann(geo)).max() < 1e-12

    def test_esfera_unitaria_curvatura_seccional_um(self, esfera):
        geo, _ = esfera
        g = geo.g
        esperado = np.einsum("...ik,...jl->...ijkl", g, g) - np.einsum("...il,...jk->...ijkl", g, g)
        assert_allclose(gauss_riemann(geo), esperado, atol=1e-12)

    def test_simetrias_de_riemann(self):
        geo, _ = _geo(ShapeSpec("s2xs2", (0.8, 0.6)), n=8)
        res = riemann_symmetry_residuals(geo)
        assert max(res.values()) < 1e-12

    def test_ricci_da_esfera_unitaria(self, esfera):
        geo, _ = esfera
        assert_allclose(ricci_gauss(geo), 3.0 * geo.g, atol=1e-12)
        assert np.abs(tracefree_ricci(geo)).max() < 1e-12

    def test_ricci_separa_a_parte_traco_livre(self):
        geo, _ = _geo(ShapeSpec("s2xs2", (0.8, 0.6)), n=8)
        H2 = np.einsum("...m,...m->...", geo.H, geo.H)
        M = tracefree_ricci(geo)
        assert np.abs(M).max() > 0.1
        assert_allclose(ricci_gauss(geo) - 3.0 * H2[..., None, None] * geo.g, M, atol=1e-10)
