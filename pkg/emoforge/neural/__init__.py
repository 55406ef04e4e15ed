"""
Minimal numpy neural kernel: layers, training, the contextual encoder and the
sequence classifiers.
"""
from .encoder import ContextualEncoder, TokenIndexer, build_indexer, encode_contextual
from .gradcheck import grad_check
from .graph import MODEL_FORMAT_VERSION, ModelGraph
from .hybrid import build_hybrid, classifier_specs, hybrid_forward
from .layers import LayerSpec
from .losses import softmax, softmax_cross_entropy, weighted_cross_entropy
from .optim import AdamState, adam_step
from .training import Dataset, EarlyStopping, TrainingHistory, predict_proba, train_supervised

__all__ = [
    "AdamState",
    "ContextualEncoder",
    "Dataset",
    "EarlyStopping",
    "LayerSpec",
    "MODEL_FORMAT_VERSION",
    "ModelGraph",
    "TokenIndexer",
    "TrainingHistory",
    "adam_step",
    "build_hybrid",
    "build_indexer",
    "classifier_specs",
    "encode_contextual",
    "grad_check",
    "hybrid_forward",
    "predict_proba",
    "softmax",
    "softmax_cross_entropy",
    "train_supervised",
    "weighted_cross_entropy",
]
