"""
Configuracao do motor willmore4.

Os valores vem do ambiente (ou de um .env) via python-decouple, com prefixo
WILLMORE4_. Flags da CLI sobrepoem campos para uma execucao so, atraves de
dataclasses.replace; a configuracao efetiva e' ecoada em todo relatorio.
"""

import logging
from dataclasses import asdict, dataclass
from threading import Lock
from typing import Any, Dict, Optional

from decouple import config

logger = logging.getLogger(__name__)

VALID_FD_ORDERS = (2, 4, 6)


@dataclass(frozen=True)
class EngineConfig:
    """Configuracao numerica do motor."""
    # Estencil e geometria
    fd_order: int = 4                   # estencil central de ordem 2, 4 ou 6
    degeneracy_eps: float = 1e-10       # det g abaixo disso = imersao degenerada
    strict_normality: bool = True       # pre-checagem de normalidade no gradiente normal
    normality_rtol: float = 1e-6        # tolerancia relativa da parte tangencial
    default_clamp: float = 0.3          # delta do clamp polar (radianos)

    # Varredura de diferencas finitas da energia
    eps_base: float = 1e-2              # primeiro epsilon, em unidades de 1/|B|inf
    eps_levels: int = 6                 # eps_base * (1/2)**k, k = 0..eps_levels-1
    richardson_points: int = 3          # valores mais finos usados na extrapolacao

    # Fluxo explicito
    flow_max_steps: int = 50
    flow_max_halvings: int = 5
    flow_cfl: float = 1e-4              # dt = flow_cfl * h_min**6

    # Execucao
    threads: int = 1
    log_level: str = "INFO"

    @classmethod
    def from_env(cls, prefix: str = "WILLMORE4") -> "EngineConfig":
        """Cria configuracao a partir de variaveis de ambiente / .env"""
        defaults = cls()
        return cls(
            fd_order=config(f"{prefix}_FD_ORDER", default=defaults.fd_order, cast=int),
            degeneracy_eps=config(f"{prefix}_DEGENERACY_EPS", default=defaults.degeneracy_eps, cast=float),
            strict_normality=config(f"{prefix}_STRICT_NORMALITY", default=defaults.strict_normality, cast=bool),
            normality_rtol=config(f"{prefix}_NORMALITY_RTOL", default=defaults.normality_rtol, cast=float),
            default_clamp=config(f"{prefix}_DEFAULT_CLAMP", default=defaults.default_clamp, cast=float),
            eps_base=config(f"{prefix}_EPS_BASE", default=defaults.eps_base, cast=float),
            eps_levels=config(f"{prefix}_EPS_LEVELS", default=defaults.eps_levels, cast=int),
            richardson_points=config(f"{prefix}_RICHARDSON_POINTS", default=defaults.richardson_points, cast=int),
            flow_max_steps=config(f"{prefix}_FLOW_MAX_STEPS", default=defaults.flow_max_steps, cast=int),
            flow_max_halvings=config(f"{prefix}_FLOW_MAX_HALVINGS", default=defaults.flow_max_halvings, cast=int),
            flow_cfl=config(f"{prefix}_FLOW_CFL", default=defaults.flow_cfl, cast=float),
            threads=config(f"{prefix}_THREADS", default=defaults.threads, cast=int),
            log_level=config(f"{prefix}_LOG_LEVEL", default=defaults.log_level).upper(),
        )

    def is_valid(self) -> bool:
        """Verifica faixas dos campos numericos."""
        return all([
            self.fd_order in VALID_FD_ORDERS,
            self.degeneracy_eps > 0,
            self.normality_rtol > 0,
            0 < self.default_clamp <= 0.7853981633974483,
            self.eps_base > 0,
            self.eps_levels >= 2,
            2 <= self.richardson_points <= self.eps_levels,
            self.flow_max_steps >= 0,
            self.flow_max_halvings >= 0,
            self.flow_cfl > 0,
            self.threads >= 1,
        ])

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ==================== SINGLETON ====================

_engine_config: Optional[EngineConfig] = None
_config_lock = Lock()


def get_engine_config() -> EngineConfig:
    """Retorna a configuracao do processo, carregando do ambiente na primeira chamada."""
    global _engine_config

    with _config_lock:
        if _engine_config is None:
            cfg = EngineConfig.from_env()
            if not cfg.is_valid():
                logger.warning("Configuracao do ambiente fora de faixa, usando padroes: %s", cfg)
                cfg = EngineConfig()
            _engine_config = cfg
    return _engine_config


def reset_engine_config() -> None:
    """Descarta a configuracao em cache (usado por testes e pela CLI)."""
    global _engine_config

    with _config_lock:
        _engine_config = None
