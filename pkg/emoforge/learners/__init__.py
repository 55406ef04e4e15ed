# Weak learners module
from .base import WeakLearner
from .factory import LearnerFactory, fit_weak_learner, predict_distribution

__all__ = ["WeakLearner", "LearnerFactory", "fit_weak_learner", "predict_distribution"]
