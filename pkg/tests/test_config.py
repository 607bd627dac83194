"""
Testes da configuracao do motor (willmore4/config/settings.py).
Cobre leitura do ambiente, validacao de faixas e o singleton.
"""
from dataclasses import replace

import pytest

from willmore4.config import EngineConfig, get_engine_config, reset_engine_config


@pytest.fixture(autouse=True)
def _limpa_singleton():
    reset_engine_config()
    yield
    reset_engine_config()


# ── EngineConfig ─────────────────────────────────────────────────────────

class TestEngineConfig:
    def test_padroes_validos(self):
        cfg = EngineConfig()
        assert cfg.is_valid()
        assert cfg.fd_order == 4
        assert cfg.richardson_points <= cfg.eps_levels

    def test_from_env_le_prefixo(self, monkeypatch):
        monkeypatch.setenv("WILLMORE4_FD_ORDER", "6")
        monkeypatch.setenv("WILLMORE4_THREADS", "3")
        monkeypatch.setenv("WILLMORE4_STRICT_NORMALITY", "false")
        monkeypatch.setenv("WILLMORE4_LOG_LEVEL", "debug")
        cfg = EngineConfig.from_env()
        assert cfg.fd_order == 6
        assert cfg.threads == 3
        assert cfg.strict_normality is False
        assert cfg.log_level == "DEBUG"

    def test_from_env_prefixo_customizado(self, monkeypatch):
        monkeypatch.setenv("OUTRO_EPS_LEVELS", "8")
        assert EngineConfig.from_env(prefix="OUTRO").eps_levels == 8

    @pytest.mark.parametrize("campo,valor", [
        ("fd_order", 3),
        ("degeneracy_eps", 0.0),
        ("default_clamp", 1.0),
        ("richardson_points", 7),
        ("threads", 0),
        ("flow_cfl", -1.0),
    ])
    def test_faixas_invalidas(self, campo, valor):
        assert not replace(EngineConfig(), **{campo: valor}).is_valid()

    def test_to_dict_ecoa_todos_os_campos(self):
        d = EngineConfig().to_dict()
        assert d["fd_order"] == 4
        assert d["log_level"] == "INFO"
        assert set(d) >= {"eps_base", "eps_levels", "flow_max_steps", "threads"}


# ── Singleton ────────────────────────────────────────────────────────────

class TestSingleton:
    def test_mesma_instancia(self):
        assert get_engine_config() is get_engine_config()

    def test_reset_recarrega_ambiente(self, monkeypatch):
        assert get_engine_config().fd_order == 4
        monkeypatch.setenv("WILLMORE4_FD_ORDER", "2")
        assert get_engine_config().fd_order == 4
        reset_engine_config()
        assert get_engine_config().fd_order == 2

    def test_ambiente_fora_de_faixa_usa_padroes(self, monkeypatch):
        monkeypatch.setenv("WILLMORE4_FD_ORDER", "5")
        assert get_engine_config() == EngineConfig()
