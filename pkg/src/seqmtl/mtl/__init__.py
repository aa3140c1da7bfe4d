"""Multi-task training over partially tied seq2seq models."""

from .checkpoint import Checkpoint, load_models
from .engine import MTLEngine, TaskSpec, TrainConfig, adapt, mtl_objective, train
from .optim import Adam
from .plan import SharingPlan, build_mtl_models, canonical_names
from .schedule import EpochSampler, TaskScheduler, split_rng

__all__ = [
    "Adam", "Checkpoint", "EpochSampler", "MTLEngine", "SharingPlan", "TaskScheduler",
    "TaskSpec", "TrainConfig", "adapt", "build_mtl_models", "canonical_names",
    "load_models", "mtl_objective", "split_rng", "train",
]
