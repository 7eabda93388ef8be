"""Seeded Monte Carlo experiments, multi-relay sessions and CSV output."""

from .config import EXPERIMENTS, ExperimentConfig, load_config, make_config
from .experiments import run_experiment
from .multirelay import MultiRelaySession, find_simultaneously_good, run_multirelay_session
from .output import HEADER, ResultRow, rows_to_csv, write_csv
from .rng import sample_channel, stream
