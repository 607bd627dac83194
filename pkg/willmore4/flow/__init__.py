from .explicit import (
    FlowRow,
    FlowState,
    FlowTrace,
    cfl_dt,
    flow_step,
    initial_state,
    run_flow,
    state_from_samples,
    tangential_drift,
)

__all__ = [
    "FlowRow",
    "FlowState",
    "FlowTrace",
    "cfl_dt",
    "flow_step",
    "initial_state",
    "run_flow",
    "state_from_samples",
    "tangential_drift",
]
