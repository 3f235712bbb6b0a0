from .model import (
    AbutmentRegressor,
    ExpertBank,
    RegressConfig,
    SlotBatch,
    ToothConditioner,
    regression_loss,
)
from .train import RegressTrainConfig, train_regressor
from .infer import infer_case

__all__ = [
    "RegressConfig",
    "ToothConditioner",
    "ExpertBank",
    "SlotBatch",
    "AbutmentRegressor",
    "regression_loss",
    "RegressTrainConfig",
    "train_regressor",
    "infer_case",
]
