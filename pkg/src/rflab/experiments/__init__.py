"""Reproducible experiment scenarios with CSV/JSON reports and a CLI."""
from .config import DomainSpec, ExperimentConfig, default_corpus
from .reports import write_run
from .scenarios import (Check, ScenarioResult, SpectrumCache, run, run_cesaro, run_corpus,
                        run_hadamard, run_monotonicity, run_oracle, run_weyl)

__all__ = [
    "Check", "DomainSpec", "ExperimentConfig", "ScenarioResult", "SpectrumCache",
    "default_corpus", "run", "run_cesaro", "run_corpus", "run_hadamard", "run_monotonicity",
    "run_oracle", "run_weyl", "write_run",
]
