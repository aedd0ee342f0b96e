"""Small float64 transformer encoder with adapters and manual backprop."""

from .layers import GradBag, softmax
from .encoder import (
    AdapterLayer,
    AdapterStack,
    EncoderModel,
    EntityHead,
    ModelConfig,
    init_model,
)
from .training import (
    AdamW,
    TrainConfig,
    build_examples,
    evaluate_head,
    infusion_loss,
    softmax_cross_entropy,
    train_adapter,
)
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "GradBag",
    "softmax",
    "AdapterLayer",
    "AdapterStack",
    "EncoderModel",
    "EntityHead",
    "ModelConfig",
    "init_model",
    "AdamW",
    "TrainConfig",
    "build_examples",
    "evaluate_head",
    "infusion_loss",
    "softmax_cross_entropy",
    "train_adapter",
    "load_checkpoint",
    "save_checkpoint",
]
