from .config import ConfigError, ExperimentConfig, load_config, parse_config, resolve_r
from .experiment import RunRecord, load_summary, run_experiment, summarize
from .stats import wilson_interval

__all__ = ["ConfigError", "ExperimentConfig", "RunRecord", "load_config", "load_summary", "parse_config",
           "resolve_r", "run_experiment", "summarize", "wilson_interval"]
