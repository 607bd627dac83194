"""Hierarquia de erros do motor willmore4.

Todas as excecoes levantadas pelo pacote derivam de Willmore4Error, de modo
que a CLI consegue separar falha de uso/entrada (exit 2) de verificacao
reprovada (exit 1, sem excecao: o CheckReport volta com passed=False).
"""
from __future__ import annotations

from typing import Any, List, Optional, Tuple


class Willmore4Error(Exception):
    """Base de todos os erros do pacote."""


class GridError(Willmore4Error):
    """Reticulado invalido: poucos pontos para o estencil, extensao nula, margem ruim."""


class StencilDomainError(Willmore4Error):
    """Uma reducao encontrou ponto sem valor valido (faixa do estencil em eixo nao periodico)."""

    def __init__(self, message: str, index: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.index = index


class DegenerateImmersionError(Willmore4Error):
    """det g abaixo do limiar configurado; `index` aponta o ponto da grade."""

    def __init__(self, message: str, index: Optional[Tuple[int, ...]] = None, value: float = 0.0):
        super().__init__(message)
        self.index = index
        self.value = value


class NormalityError(Willmore4Error):
    """Campo que deveria ser normal tem parte tangencial acima da tolerancia."""


class CutoffSupportError(Willmore4Error):
    """Suporte do cutoff (ou subdominio) encosta na faixa de margem."""


class ShapeSpecError(Willmore4Error):
    """Texto de forma malformado, contagem de raios errada ou periodicidade incompativel."""


class ManifestError(Willmore4Error):
    """Linha invalida no manifesto da suite de identidades."""

    def __init__(self, message: str, line_no: int = 0):
        super().__init__(f"linha {line_no}: {message}" if line_no else message)
        self.line_no = line_no


class StiffnessLimit(Willmore4Error):
    """Fluxo explicito esgotou as reducoes de passo; `trace` guarda o historico aceito."""

    def __init__(self, message: str, trace: Optional[List[Any]] = None):
        super().__init__(message)
        self.trace = list(trace or [])
