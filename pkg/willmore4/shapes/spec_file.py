"""
Formato texto de formas (linhas chave = valor, '#' comenta).

Exemplo:

    kind = torus4
    radii = 0.6, 0.4, 0.5, 0.3
    clamp = 0.3
    grid = 12                    # ou 12,12,12,12
    fd_order = 4
    perturb.amplitude = 1e-3
    perturb.center = 3.14159, 3.14159, 3.14159, 3.14159
    perturb.rho = 2.5
    perturb.axes = 0,1,2,3
    perturb.direction = mean_curvature
    perturb.normalize = true

`kind = perturbed` exige `base = <forma>`; qualquer chave perturb.* tambem
liga a perturbacao sobre `kind`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from ..errors import ShapeSpecError
from .catalog import ShapeSpec
from .perturbation import PerturbationSpec

logger = logging.getLogger(__name__)

_TOP_KEYS = {"kind", "base", "radii", "clamp", "scale", "grid", "fd_order", "margin"}
_PERTURB_KEYS = {"amplitude", "center", "rho", "axes", "direction", "normalize", "p"}
_TRUE = {"1", "true", "yes", "on", "sim"}
_FALSE = {"0", "false", "no", "off", "nao"}


@dataclass(frozen=True)
class ShapeFile:
    spec: ShapeSpec
    grid_dims: Optional[Tuple[int, ...]] = None
    fd_order: Optional[int] = None
    margin: Optional[int] = None
    perturbation: Optional[PerturbationSpec] = None

    @property
    def target(self) -> Union[ShapeSpec, PerturbationSpec]:
        return self.perturbation if self.perturbation is not None else self.spec


def _floats(raw: str, key: str, line_no: int) -> Tuple[float, ...]:
    try:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise ShapeSpecError(f"linha {line_no}: valor invalido para {key}: {raw!r}")


def _ints(raw: str, key: str, line_no: int) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise ShapeSpecError(f"linha {line_no}: inteiro invalido para {key}: {raw!r}")


def parse_shape_text(text: str) -> ShapeFile:
    """Interpreta o texto; erros citam a linha."""
    entries: Dict[str, Tuple[str, int]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ShapeSpecError(f"linha {line_no}: esperado 'chave = valor', recebeu {body!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        key = key.lower()
        name = key[len("perturb."):] if key.startswith("perturb.") else key
        known = _PERTURB_KEYS if key.startswith("perturb.") else _TOP_KEYS
        if name not in known:
            raise ShapeSpecError(f"linha {line_no}: chave desconhecida {key!r}")
        if key in entries:
            raise ShapeSpecError(f"linha {line_no}: chave repetida {key!r}")
        entries[key] = (raw, line_no)

    if "kind" not in entries:
        raise ShapeSpecError("texto de forma sem 'kind'")

    def get(key, default=None):
        return entries[key][0] if key in entries else default

    def line(key):
        return entries[key][1] if key in entries else 0

    kind = get("kind").strip().lower()
    perturbed = kind == "perturbed" or any(k.startswith("perturb.") for k in entries)
    if kind == "perturbed":
        if "base" not in entries:
            raise ShapeSpecError(f"linha {line('kind')}: kind = perturbed exige 'base'")
        kind = get("base").strip().lower()

    try:
        spec = ShapeSpec(
            kind=kind,
            radii=_floats(get("radii", ""), "radii", line("radii")),
            clamp=float(get("clamp", 0.3)),
            scale=float(get("scale", 1.0)),
        )
    except ValueError as e:
        raise ShapeSpecError(f"valor numerico invalido: {e}")

    grid_dims = None
    if "grid" in entries:
        dims = _ints(get("grid"), "grid", line("grid"))
        if len(dims) == 1:
            dims = dims * 4
        if len(dims) != 4:
            raise ShapeSpecError(f"linha {line('grid')}: grid precisa de 1 ou 4 inteiros")
        grid_dims = dims
    fd_order = _ints(get("fd_order"), "fd_order", line("fd_order"))[0] if "fd_order" in entries else None
    margin = _ints(get("margin"), "margin", line("margin"))[0] if "margin" in entries else None

    perturbation = None
    if perturbed:
        normalize_raw = get("perturb.normalize", "true").strip().lower()
        if normalize_raw not in _TRUE | _FALSE:
            raise ShapeSpecError(f"linha {line('perturb.normalize')}: booleano invalido {normalize_raw!r}")
        center = _floats(get("perturb.center"), "perturb.center", line("perturb.center")) \
            if "perturb.center" in entries else None
        axes = _ints(get("perturb.axes"), "perturb.axes", line("perturb.axes")) \
            if "perturb.axes" in entries else None
        try:
            perturbation = PerturbationSpec(
                base=spec,
                amplitude=float(get("perturb.amplitude", 1e-3)),
                center=center,
                rho=float(get("perturb.rho")) if "perturb.rho" in entries else None,
                direction=get("perturb.direction", "mean_curvature"),
                normalize=normalize_raw in _TRUE,
                axes=axes,
                p=float(get("perturb.p", 4.0)),
            )
        except ValueError as e:
            raise ShapeSpecError(f"perturbacao invalida: {e}")

    logger.debug("forma lida: %s perturbada=%s grade=%s", spec.kind, perturbed, grid_dims)
    return ShapeFile(spec, grid_dims, fd_order, margin, perturbation)


def load_shape_file(path: Union[str, Path]) -> ShapeFile:
    p = Path(path)
    if not p.is_file():
        raise ShapeSpecError(f"arquivo de forma nao encontrado: {p}")
    return parse_shape_text(p.read_text(encoding="utf-8"))
