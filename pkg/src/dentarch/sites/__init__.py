from .model import AbstractionLevel, SiteClassifier, SiteNetConfig, SitePrediction
from .metrics import site_metrics
from .train import SiteTrainConfig, train_site_classifier

__all__ = [
    "AbstractionLevel",
    "SiteNetConfig",
    "SiteClassifier",
    "SitePrediction",
    "site_metrics",
    "SiteTrainConfig",
    "train_site_classifier",
]
