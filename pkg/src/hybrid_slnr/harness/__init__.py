from .config import (
    SCHEMES,
    ChannelModel,
    ExperimentConfig,
    beam_config,
    convergence_config,
    load_config,
    oracle_config,
    save_config,
    sum_rate_config,
)
from .experiments import (
    BeamResult,
    OracleRow,
    ResultTable,
    SweepRow,
    noise_power,
    run_beam_pattern,
    run_convergence_trace,
    run_oracle_check,
    run_scheme,
    run_sum_rate_sweep,
)
from .probe import ChannelProbe
