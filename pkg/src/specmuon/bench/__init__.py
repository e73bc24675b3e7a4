from .harness import (
    OptimizerSpec,
    RunConfig,
    load_config,
    reproduce_fig1,
    run_experiment,
    run_steps,
    sweep_rtop,
    write_trajectory_csv,
)

__all__ = [
    "OptimizerSpec",
    "RunConfig",
    "load_config",
    "reproduce_fig1",
    "run_experiment",
    "run_steps",
    "sweep_rtop",
    "write_trajectory_csv",
]
