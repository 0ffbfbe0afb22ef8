"""Optimisation of the clip classifier"""

from .config import TrainConfig
from .optimizer import (
    OptimizerState,
    applies_weight_decay,
    clip_by_global_norm,
    global_norm,
    sgd_momentum_step,
)
from .schedule import cosine_lr
from .trainer import EpochRecord, TrainingError, TrainResult, evaluate_accuracy, shuffled_order, train
