"""Outlier detection with forests of randomized-PCA trees."""

from ._core import (
    DegenerateInputError,
    IoError,
    ParameterError,
    RPCAForest,
    UndefinedMetricError,
    ValidationError,
    evaluate,
    iforest_score,
    knn_outlier_score,
    load_csv,
    randomized_pca,
    roc_auc,
)

__all__ = [
    "DegenerateInputError",
    "IoError",
    "ParameterError",
    "RPCAForest",
    "UndefinedMetricError",
    "ValidationError",
    "evaluate",
    "iforest_score",
    "knn_outlier_score",
    "load_csv",
    "randomized_pca",
    "roc_auc",
]
