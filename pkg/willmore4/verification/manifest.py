"""
Manifesto da suite de identidades: uma verificacao por linha.

    # id              forma                     grade   gamma              p    tol
    codazzi           flat                      8,12    none               4    -
    simon             sphere4                   12,16   none               4    1e-3
    lemma_A1          torus4:0.6,0.4,0.5,0.3    8,12    mid@2.5            4    -
    lemma_A2          torus4:0.5,0.5,0.5,0.5    8,12    3.1,3.1,3.1,3.1@2  6    -

Campos:
    forma   nome do catalogo, opcionalmente `:r1,r2,...`
    grade   `N` (a fina fica em round(1.5 N)) ou `N1,N2`
    gamma   `none`, `mid@rho` (centro no meio do dominio) ou `c0,c1,c2,c3@rho`
    p       expoente do corte (>= 4)
    tol     tolerancia absoluta, ou `-` para a derivada
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

from ..errors import ManifestError, ShapeSpecError
from ..shapes.catalog import ShapeSpec
from .identities import GammaParams, IdentityId

logger = logging.getLogger(__name__)

_FIELDS = ("id", "shape", "grid", "gamma", "p", "tol")


@dataclass(frozen=True)
class ManifestRow:
    identity: IdentityId
    shape: ShapeSpec
    resolutions: Tuple[int, int]
    gamma: Optional[GammaParams]
    p: float
    tolerance: Optional[float]
    line_no: int = 0

    def describe(self) -> dict:
        return {
            "line": self.line_no,
            "identity": self.identity.value,
            "shape": self.shape.describe(),
            "resolutions": list(self.resolutions),
            "gamma": None if self.gamma is None else self.gamma.describe(),
            "p": self.p,
            "tolerance": self.tolerance,
        }


def parse_shape_token(token: str) -> ShapeSpec:
    kind, _, radii = token.partition(":")
    values = tuple(float(r) for r in radii.split(",") if r.strip()) if radii else ()
    return ShapeSpec(kind, values)


def _resolutions(token: str, line_no: int) -> Tuple[int, int]:
    try:
        values = [int(x) for x in token.split(",")]
    except ValueError:
        raise ManifestError(f"grade invalida {token!r}", line_no) from None
    if len(values) == 1:
        values.append(int(round(1.5 * values[0])))
    if len(values) != 2 or values[0] >= values[1] or values[0] < 1:
        raise ManifestError(f"grade precisa de N ou N1,N2 crescentes: {token!r}", line_no)
    return values[0], values[1]


def _gamma(token: str, p: float, line_no: int) -> Optional[GammaParams]:
    if token.lower() == "none":
        return GammaParams(p=p)
    center_raw, sep, rho_raw = token.partition("@")
    if not sep:
        raise ManifestError(f"gamma deve ser 'none', 'mid@rho' ou 'c0,c1,c2,c3@rho': {token!r}", line_no)
    try:
        rho = float(rho_raw)
        center = None if center_raw.lower() == "mid" else tuple(float(c) for c in center_raw.split(","))
    except ValueError:
        raise ManifestError(f"gamma com numero invalido: {token!r}", line_no) from None
    if center is not None and len(center) != 4:
        raise ManifestError(f"centro de gamma precisa de 4 coordenadas: {token!r}", line_no)
    return GammaParams(center=center, rho=rho, p=p)


def parse_manifest_line(line: str, line_no: int = 0) -> Optional[ManifestRow]:
    """Uma linha; None para linha vazia ou comentario."""
    body = line.split("#", 1)[0].strip()
    if not body:
        return None
    parts = body.split()
    if len(parts) != len(_FIELDS):
        raise ManifestError(f"esperados {len(_FIELDS)} campos ({' '.join(_FIELDS)}), recebeu {len(parts)}", line_no)
    raw_id, raw_shape, raw_grid, raw_gamma, raw_p, raw_tol = parts
    try:
        identity = IdentityId.parse(raw_id)
    except ValueError as e:
        raise ManifestError(str(e), line_no) from None
    try:
        shape = parse_shape_token(raw_shape)
    except (ShapeSpecError, ValueError) as e:
        raise ManifestError(f"forma invalida {raw_shape!r}: {e}", line_no) from None
    try:
        p = float(raw_p)
        tol = None if raw_tol == "-" else float(raw_tol)
    except ValueError:
        raise ManifestError(f"p ou tol invalido: {raw_p!r} {raw_tol!r}", line_no) from None
    if p < 4:
        raise ManifestError(f"p={p} abaixo de 4", line_no)
    if tol is not None and not tol > 0:
        raise ManifestError(f"tolerancia deve ser positiva: {tol}", line_no)
    return ManifestRow(identity, shape, _resolutions(raw_grid, line_no), _gamma(raw_gamma, p, line_no), p, tol, line_no)


def parse_manifest(text: str) -> List[ManifestRow]:
    rows = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        row = parse_manifest_line(line, line_no)
        if row is not None:
            rows.append(row)
    if not rows:
        raise ManifestError("manifesto sem linhas de verificacao")
    logger.debug("manifesto com %d linhas", len(rows))
    return rows


def load_manifest(path: Union[str, Path]) -> List[ManifestRow]:
    p = Path(path)
    if not p.is_file():
        raise ManifestError(f"manifesto nao encontrado: {p}")
    return parse_manifest(p.read_text(encoding="utf-8"))
