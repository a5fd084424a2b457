"""Configuration, experiment presets, replicated runs and output."""
from .config import load_config, society_from_dict
from .emit import emit, load_summary
from .presets import PRESETS, get_preset
from .runner import RunSummary, run_experiment

__all__ = ["load_config", "society_from_dict", "emit", "load_summary", "PRESETS", "get_preset",
           "RunSummary", "run_experiment"]
