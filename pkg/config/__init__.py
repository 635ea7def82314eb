# Configuration module
from config.hyperparameters import DATASETS, DatasetProfile, get_profile
from config.settings import RuntimeSettings, create_runtime_settings

__all__ = [
    "DATASETS",
    "DatasetProfile",
    "get_profile",
    "RuntimeSettings",
    "create_runtime_settings",
]
