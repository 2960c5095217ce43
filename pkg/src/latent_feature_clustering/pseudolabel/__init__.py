"""Pseudo-label module: gated classifier trained on the manual subset"""

from .classifier import ClassifierConfig, ClassifierParams, predict_labels, train_classifier

__all__ = [
    'ClassifierConfig',
    'ClassifierParams',
    'predict_labels',
    'train_classifier',
]
