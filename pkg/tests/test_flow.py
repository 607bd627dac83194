"""
Testes do fluxo explicito de demonstracao (willmore4/flow).
"""
import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from willmore4.config import EngineConfig
from willmore4.errors import ShapeSpecError
from willmore4.flow import FlowRow, FlowTrace, cfl_dt, flow_step, initial_state, run_flow, tangential_drift
from willmore4.shapes import ShapeSpec

CFG = EngineConfig()
TORO_NC = ShapeSpec("torus4", (0.6, 0.4, 0.5, 0.3))


@pytest.fixture(scope="module")
def estado():
    return initial_state(TORO_NC, n=8, config=CFG)


class TestInitialState:
    def test_grade_limitada_rejeitada(self):
        with pytest.raises(ShapeSpecError, match="periodica"):
            initial_state(ShapeSpec("sphere4"), n=8, config=CFG)

    def test_energia_e_residuo(self, estado):
        assert estado.energy > 0.0
        assert estado.residual_linf > 0.0
        assert estado.min_det_g > 0.0
        assert estado.step == 0


class TestFlowStep:
    def test_dt_nulo_devolve_o_mesmo_estado(self, estado):
        novo, arrasto = flow_step(estado, 0.0, CFG)
        assert novo is estado
        assert arrasto == 0.0

    def test_dt_negativo(self, estado):
        with pytest.raises(ValueError):
            flow_step(estado, -1e-6, CFG)

    def test_passo_pequeno_reduz_a_energia(self, estado):
        novo, arrasto = flow_step(estado, cfl_dt(estado, CFG), CFG)
        assert novo.step == 1
        assert novo.energy < estado.energy
        # W e' normal, entao o passo quase nao tem parte tangente
        assert arrasto < 1e-6

    def test_arrasto_de_um_deslocamento_tangente(self, estado):
        deslocado = estado.phi + 1e-3 * estado.geo.dphi[..., 0, :]
        assert tangential_drift(estado, deslocado) == pytest.approx(1.0, rel=1e-12)
        assert tangential_drift(estado, estado.phi) == 0.0

    def test_cfl(self, estado):
        h = estado.grid.h_min
        assert cfl_dt(estado, CFG) == pytest.approx(CFG.flow_cfl * h ** 6 / max(estado.residual_linf, 1.0))


class TestRunFlow:
    def test_limite_de_passos(self):
        cfg = dataclasses.replace(CFG, flow_max_steps=3)
        with pytest.raises(ValueError):
            run_flow(TORO_NC, steps=4, config=cfg)

    def test_zero_passos(self, estado):
        trace = run_flow(estado, steps=0, config=CFG)
        assert len(trace.rows) == 1
        assert trace.final is estado
        assert trace.describe()["steps"] == 0

    def test_energia_monotona(self, estado):
        trace = run_flow(estado, steps=3, config=CFG)
        assert trace.stopped == "completed"
        assert len(trace.rows) == 4
        assert trace.monotone()
        assert trace.energies[-1] < trace.energies[0]
        assert len(trace.drift) == 3
        assert trace.final.step == 3

    def test_toro_meio_quase_parado(self):
        toro = ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5))
        trace = run_flow(toro, steps=2, n=8, config=CFG)
        assert_allclose(trace.energies, trace.energies[0], rtol=1e-8)


class TestFlowTrace:
    def test_monotonia(self):
        linhas = [FlowRow(k, e, 0.0, 1.0, 0.0) for k, e in enumerate([3.0, 2.0, 2.0, 1.5])]
        assert FlowTrace(rows=linhas).monotone()
        linhas.append(FlowRow(4, 1.6, 0.0, 1.0, 0.0))
        assert not FlowTrace(rows=linhas).monotone()

    def test_descricao(self):
        trace = FlowTrace(rows=[FlowRow(0, 2.0, 1.0, 1.0, 0.0), FlowRow(1, 1.0, 0.5, 1.0, 1e-3)], drift=[1e-9])
        d = trace.describe()
        assert d["steps"] == 1
        assert d["energy_first"] == 2.0
        assert d["energy_last"] == 1.0
        assert d["max_tangential_drift"] == 1e-9

    def test_linha_como_tupla(self):
        assert FlowRow(2, 1.0, 0.1, 0.9, 1e-4).as_tuple() == (2, 1.0, 0.1, 0.9, 1e-4)
        assert np.isfinite(FlowRow(2, 1.0, 0.1, 0.9, 1e-4).as_tuple()).all()
