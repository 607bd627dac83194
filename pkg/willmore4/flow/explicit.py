"""
Fluxo explicito de demonstracao: Phi <- Phi - dt W.

Jatos recalculados numericamente a cada passo a partir das amostras de Phi,
por isso so vale em grade toda periodica (familia torus4, perturbada ou nao).
Um passo que aumenta a energia e' refeito com dt/2, ate flow_max_halvings
vezes; esgotado o limite, StiffnessLimit com o traco aceito.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import EngineConfig, get_engine_config
from ..energy.functional import total_energy
from ..errors import DegenerateImmersionError, ShapeSpecError, StiffnessLimit
from ..geometry.fields import GeometryFields, apply_projector, build_geometry
from ..grid.lattice import Grid4, pointwise_norm
from ..operators.willmore import willmore
from ..shapes.catalog import Jet2Field, ShapeSpec, default_grid, sample_jet
from ..shapes.perturbation import PerturbationSpec, numeric_jet, perturb_normal

logger = logging.getLogger(__name__)

Target = Union[ShapeSpec, PerturbationSpec]


@dataclass(frozen=True, eq=False)
class FlowState:
    """Amostras de Phi e a geometria/energia correspondentes."""
    grid: Grid4
    phi: np.ndarray
    geo: GeometryFields
    energy: float
    W: np.ndarray
    step: int = 0

    @property
    def residual_linf(self) -> float:
        return float(pointwise_norm(self.W).max())

    @property
    def min_det_g(self) -> float:
        return float(np.nanmin(self.geo.sqrt_det_g) ** 2)


@dataclass(frozen=True)
class FlowRow:
    step: int
    energy: float
    residual_linf: float
    min_det_g: float
    dt: float

    def as_tuple(self) -> Tuple[int, float, float, float, float]:
        return (self.step, self.energy, self.residual_linf, self.min_det_g, self.dt)


@dataclass
class FlowTrace:
    rows: List[FlowRow] = field(default_factory=list)
    drift: List[float] = field(default_factory=list)
    halvings: int = 0
    stopped: str = "completed"
    final: Optional[FlowState] = None

    @property
    def energies(self) -> List[float]:
        return [r.energy for r in self.rows]

    def monotone(self, rtol: float = 1e-12) -> bool:
        e = self.energies
        return all(b <= a + rtol * max(1.0, abs(a)) for a, b in zip(e, e[1:]))

    def describe(self) -> dict:
        return {
            "steps": len(self.rows) - 1,
            "halvings": self.halvings,
            "stopped": self.stopped,
            "monotone": self.monotone(),
            "max_tangential_drift": max(self.drift) if self.drift else 0.0,
            "energy_first": self.rows[0].energy if self.rows else None,
            "energy_last": self.rows[-1].energy if self.rows else None,
        }


def state_from_samples(phi: np.ndarray, grid: Grid4, config: Optional[EngineConfig] = None, step: int = 0) -> FlowState:
    """Jato numerico de Phi, geometria, W e energia.

    Raises:
        DegenerateImmersionError: det g abaixo do limiar
    """
    cfg = config or get_engine_config()
    d, dd = numeric_jet(phi, grid)
    geo = build_geometry(Jet2Field(grid, phi, d, dd, label=f"fluxo[{step}]"), cfg)
    W = willmore(geo).W
    return FlowState(grid, phi, geo, total_energy(geo), W, step)


def initial_state(target: Target, n: Union[int, Sequence[int]] = 8, fd_order: int = 4,
                  config: Optional[EngineConfig] = None) -> FlowState:
    cfg = config or get_engine_config()
    spec = target.base if isinstance(target, PerturbationSpec) else target
    grid = default_grid(spec, n, fd_order)
    if not all(grid.periodic):
        raise ShapeSpecError(f"fluxo exige grade toda periodica; {spec.kind} tem eixo limitado")
    if isinstance(target, PerturbationSpec):
        phi = perturb_normal(target, grid, cfg).jet.phi
    else:
        phi = sample_jet(target, grid, cfg.degeneracy_eps).phi
    return state_from_samples(phi, grid, cfg)


def tangential_drift(state: FlowState, new_phi: np.ndarray) -> float:
    """max |pi_T(Phi_new - Phi)| / max |Phi_new - Phi|."""
    delta = new_phi - state.phi
    total = float(pointwise_norm(delta).max())
    if total == 0.0:
        return 0.0
    return float(pointwise_norm(apply_projector(state.geo.P_tan, delta)).max()) / total


def flow_step(state: FlowState, dt: float, config: Optional[EngineConfig] = None) -> Tuple[FlowState, float]:
    """Um passo de Euler explicito; devolve o novo estado e o arrasto tangencial.

    dt = 0 devolve o proprio estado.

    Raises:
        DegenerateImmersionError: o passo quebrou a imersao
    """
    if dt < 0:
        raise ValueError(f"dt negativo: {dt}")
    if dt == 0.0:
        return state, 0.0
    new_phi = state.phi - dt * state.W
    drift = tangential_drift(state, new_phi)
    new = state_from_samples(new_phi, state.grid, config, state.step + 1)
    logger.debug("passo %d: E %.12e -> %.12e (dt=%.3e, arrasto %.2e)",
                 new.step, state.energy, new.energy, dt, drift)
    return new, drift


def cfl_dt(state: FlowState, config: Optional[EngineConfig] = None) -> float:
    """flow_cfl * h_min**6, normalizado por max(|W|inf, 1)."""
    cfg = config or get_engine_config()
    return cfg.flow_cfl * state.grid.h_min ** 6 / max(state.residual_linf, 1.0)


def run_flow(
    target: Union[Target, FlowState],
    steps: int,
    dt: Optional[float] = None,
    n: Union[int, Sequence[int]] = 8,
    fd_order: int = 4,
    config: Optional[EngineConfig] = None,
) -> FlowTrace:
    """Roda `steps` passos aceitos e devolve o traco de energia.

    Raises:
        ValueError: steps acima de flow_max_steps
        StiffnessLimit: energia sobe mesmo apos flow_max_halvings reducoes
    """
    cfg = config or get_engine_config()
    if steps < 0 or steps > cfg.flow_max_steps:
        raise ValueError(f"steps={steps} fora de 0..{cfg.flow_max_steps}")
    state = target if isinstance(target, FlowState) else initial_state(target, n, fd_order, cfg)
    step_dt = cfl_dt(state, cfg) if dt is None else float(dt)

    trace = FlowTrace(final=state)
    trace.rows.append(FlowRow(0, state.energy, state.residual_linf, state.min_det_g, 0.0))
    logger.info("fluxo: E0=%.12e dt=%.3e passos=%d", state.energy, step_dt, steps)

    for k in range(1, steps + 1):
        current = step_dt
        for attempt in range(cfg.flow_max_halvings + 1):
            try:
                new, drift = flow_step(state, current, cfg)
            except DegenerateImmersionError as exc:
                trace.stopped = "degenerate"
                logger.warning("passo %d quebrou a imersao (%s); mantendo o ultimo estado", k, exc)
                return trace
            floor = 1e-12 * max(1.0, abs(state.energy))
            if new.energy <= state.energy + floor:
                break
            trace.halvings += 1
            current *= 0.5
            logger.info("passo %d aumentou a energia; dt -> %.3e", k, current)
        else:
            trace.stopped = "stiffness_limit"
            raise StiffnessLimit(
                f"energia subiu no passo {k} apos {cfg.flow_max_halvings} reducoes de dt", trace.rows
            )
        state = new
        step_dt = current
        trace.final = state
        trace.drift.append(drift)
        trace.rows.append(FlowRow(k, state.energy, state.residual_linf, state.min_det_g, current))
        logger.info("passo %d: E=%.12e |W|inf=%.3e dt=%.3e", k, state.energy, state.residual_linf, current)
    return trace
