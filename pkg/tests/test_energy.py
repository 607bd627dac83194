"""
Testes da densidade e da energia de Willmore (willmore4/energy).
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from willmore4.config import EngineConfig
from willmore4.energy import density_terms, energy_density, sobolev_ratio, total_energy
from willmore4.geometry import build_geometry
from willmore4.grid import cutoff_field, region_values
from willmore4.shapes import ShapeSpec, default_grid, product_oracle, sample_jet

CFG = EngineConfig()


def _geo(spec, n=8):
    grid = default_grid(spec, n)
    return build_geometry(sample_jet(spec, grid), CFG)


# ── Densidade ────────────────────────────────────────────────────────────

class TestEnergyDensity:
    @pytest.mark.parametrize("spec", [
        ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5)),
        ShapeSpec("sphere4", (1.0,)),
        ShapeSpec("s2xs2", (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))),
    ])
    def test_densidade_tres(self, spec):
        geo = _geo(spec)
        e = region_values(energy_density(geo).values, geo.grid)
        assert_allclose(e, 3.0, atol=1e-6)

    @pytest.mark.parametrize("spec", [
        ShapeSpec("torus4", (0.6, 0.4, 0.5, 0.3)),
        ShapeSpec("s1xs3", (0.5, 0.9)),
        ShapeSpec("s1xs1xs2", (0.5, 0.6, 0.7)),
    ])
    def test_densidade_confere_com_forma_fechada(self, spec):
        geo = _geo(spec)
        e = region_values(energy_density(geo).values, geo.grid)
        assert_allclose(e, product_oracle(spec).density, atol=1e-6 * max(1.0, abs(product_oracle(spec).density)))

    def test_parcelas(self):
        geo = _geo(ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5)))
        t = density_terms(geo)
        assert set(t) == {"grad_H_sq", "H_dot_h_sq", "H_quartic"}
        assert np.abs(t["grad_H_sq"]).max() < 1e-12
        # |H|^2 = 1, |H.h|^2 = 4
        assert_allclose(t["H_quartic"], 7.0, atol=1e-12)
        assert_allclose(t["H_dot_h_sq"], -4.0, atol=1e-12)

    def test_plano_tem_densidade_nula(self):
        geo = _geo(ShapeSpec("flat"))
        assert np.abs(energy_density(geo).values).max() == 0.0


# ── Energia total ────────────────────────────────────────────────────────

class TestTotalEnergy:
    def test_toro_meio(self):
        geo = _geo(ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5)))
        assert total_energy(geo) == pytest.approx(3.0 * math.pi ** 4, rel=1e-10)

    def test_toro_nao_critico(self):
        spec = ShapeSpec("torus4", (0.6, 0.4, 0.5, 0.3))
        assert total_energy(_geo(spec)) == pytest.approx(product_oracle(spec).energy, rel=1e-10)

    @pytest.mark.parametrize("fator", [0.5, 2.0])
    def test_invariancia_por_escala(self, fator):
        spec = ShapeSpec("torus4", (0.6, 0.4, 0.5, 0.3))
        e0 = total_energy(_geo(spec))
        e1 = total_energy(_geo(spec.with_scale(fator)))
        assert e1 == pytest.approx(e0, rel=1e-10)

    def test_corte_reduz_a_energia(self):
        geo = _geo(ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5)))
        cut = cutoff_field(geo.grid, (math.pi,) * 4, rho=2.0)
        parcial = total_energy(geo, cutoff=cut)
        assert 0.0 < parcial < total_energy(geo)

    def test_caixa(self):
        geo = _geo(ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5)))
        # densidade 3, sqrt g = 1/16, caixa de 4 intervalos de h em cada eixo
        h = geo.grid.spacing[0]
        box = [(2, 6)] * 4
        assert total_energy(geo, box=box) == pytest.approx(3.0 / 16.0 * (4 * h) ** 4, rel=1e-10)


# ── Diagnostico de Sobolev ───────────────────────────────────────────────

class TestSobolevRatio:
    def test_razao_finita_e_positiva(self):
        geo = _geo(ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5)))
        u = cutoff_field(geo.grid, (math.pi,) * 4, rho=2.5).gamma.values
        r = sobolev_ratio(geo, u)
        assert math.isfinite(r) and r > 0.0

    def test_u_nulo(self):
        geo = _geo(ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5)))
        assert math.isinf(sobolev_ratio(geo, np.zeros(geo.grid.shape)))
