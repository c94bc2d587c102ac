"""Episode orchestration, dataset generation and scenario sweeps."""

from .config import EpisodeConfig, load_config, parse_config
from .dataset import Dataset, DatasetTemplate, generate_dataset
from .episode import EpisodeLog, Models, run_episode
from .evaluate import Scenario, evaluate, medians, scenario_matrix, write_rows

__all__ = [
    "EpisodeConfig", "load_config", "parse_config", "Dataset", "DatasetTemplate", "generate_dataset",
    "EpisodeLog", "Models", "run_episode", "Scenario", "evaluate", "medians", "scenario_matrix", "write_rows",
]
