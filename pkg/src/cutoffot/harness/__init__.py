"""Study harness: configs, runners, rate fits and plots."""
from .config import StudyConfig, build_config, read_config_file
from .fit import RateFit, fit_rate
from .plot import EmptyData, emit_plot
from .studies import RUNNERS, StudyReport, run_study

__all__ = ["EmptyData", "RUNNERS", "RateFit", "StudyConfig", "StudyReport", "build_config", "emit_plot",
           "fit_rate", "read_config_file", "run_study"]
