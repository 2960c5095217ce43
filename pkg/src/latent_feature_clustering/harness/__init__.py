"""Harness module: training loop, experiments, grid search and checkpoints"""

from .checkpoint import MAGIC, VERSION, decode_state, encode_state, load_checkpoint, save_checkpoint
from .trainer import Trainer, TrainingHistory, batches, train_model
from .experiment import (
    RunResult,
    build_training_pool,
    encode_dataset,
    load_latents,
    run_experiment,
    save_latents,
)
from .grid import SEARCH_SPACE, GridResult, coefficient_grid, expand_grid, grid_search, row_label, summarize

__all__ = [
    'MAGIC',
    'VERSION',
    'decode_state',
    'encode_state',
    'load_checkpoint',
    'save_checkpoint',
    'Trainer',
    'TrainingHistory',
    'batches',
    'train_model',
    'RunResult',
    'build_training_pool',
    'encode_dataset',
    'load_latents',
    'run_experiment',
    'save_latents',
    'SEARCH_SPACE',
    'GridResult',
    'coefficient_grid',
    'expand_grid',
    'grid_search',
    'row_label',
    'summarize',
]
