"""Experiment configuration, registry, report emission and command line."""
from .config import ExperimentConfig, parse_config, parse_text
from .experiments import EXPERIMENTS, ExperimentResult, Verdict, run_experiment
