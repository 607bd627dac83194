"""
CheckReport e escrita deterministica de relatorios.

JSON com ordem de chaves estavel (ordem de insercao) e floats com 17
algarismos significativos; a unica parte que muda entre execucoes iguais e'
`seconds`.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

PROVENANCE_TAGS = ("spec", "derived", "user")


@dataclass
class CheckReport:
    """Resultado de uma verificacao."""
    name: str
    shape: Dict[str, Any] = field(default_factory=dict)
    grid: Dict[str, Any] = field(default_factory=dict)
    residuals: Dict[str, float] = field(default_factory=dict)
    tolerances: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    orders: Dict[str, float] = field(default_factory=dict)
    terms: Dict[str, Any] = field(default_factory=dict)
    values: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    seconds: float = 0.0

    def check(self, key: str, residual: float, tolerance: float, provenance: str = "derived") -> bool:
        """Registra um residuo com sua tolerancia; devolve se passou."""
        if provenance not in PROVENANCE_TAGS:
            raise ValueError(f"proveniencia desconhecida: {provenance!r}")
        residual = float(residual)
        self.residuals[key] = residual
        self.tolerances[key] = {"value": float(tolerance), "provenance": provenance}
        ok = math.isfinite(residual) and residual <= tolerance
        if not ok:
            logger.info("%s: %s = %.3e acima de %.3e", self.name, key, residual, tolerance)
        return ok

    def record(self, key: str, residual: float) -> None:
        """Residuo sem tolerancia (diagnostico, nao entra no veredito)."""
        self.residuals[key] = float(residual)

    @property
    def passed(self) -> bool:
        for key, tol in self.tolerances.items():
            r = self.residuals.get(key, math.nan)
            if not (math.isfinite(r) and r <= tol["value"]):
                return False
        return True

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "name": self.name,
            "passed": self.passed,
            "shape": self.shape,
            "grid": self.grid,
            "residuals": self.residuals,
            "tolerances": self.tolerances,
            "orders": self.orders,
            "terms": self.terms,
            "values": self.values,
            "config": self.config,
            "notes": self.notes,
        }
        if include_timing:
            out["seconds"] = self.seconds
        return out


@contextmanager
def timed(report: CheckReport) -> Iterator[CheckReport]:
    start = time.perf_counter()
    try:
        yield report
    finally:
        report.seconds = time.perf_counter() - start


# ---------- Serializacao ----------

def _float_text(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = "%.17g" % x
    if "." not in text and "e" not in text and "n" not in text:
        text += ".0"
    return text


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float_text(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, CheckReport):
        return _encode(obj.to_dict(), indent, level)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"tipo nao serializavel no relatorio: {type(obj).__name__}")


def dumps_report(obj: Any, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_report(path: Union[str, Path], document: Dict[str, Any]) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps_report(document), encoding="utf-8")
    logger.info("relatorio escrito em %s", p)
    return p


TRACE_COLUMNS = ("step", "energy", "residual_linf", "min_det_g", "dt")


def write_trace_csv(path: Union[str, Path], rows: Iterable[Sequence[Any]], columns: Sequence[str] = TRACE_COLUMNS) -> Path:
    p = Path(path)
    with p.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_float_text(v) if isinstance(v, float) else v for v in row])
    logger.info("traco escrito em %s", p)
    return p


def build_document(command: str, reports: Sequence[CheckReport], config: Optional[Dict[str, Any]] = None,
                   extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Documento JSON de uma execucao da CLI."""
    from .. import __version__

    doc: Dict[str, Any] = {
        "tool": "willmore4",
        "version": __version__,
        "command": command,
        "passed": all(r.passed for r in reports),
        "config": config or {},
        "reports": [r.to_dict() for r in reports],
    }
    if extra:
        doc.update(extra)
    return doc
