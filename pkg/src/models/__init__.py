"""HMPNN, HGraphSage and entity baselines on the tape engine."""

from .config import MODEL_LABELS, ModelConfig, ModelKind
from .forward import bind, forward, loss_closure, predict
from .hetero import aggregate, message_pass_step
from .inputs import ModelInputs, prepare_graph, prepare_inputs, standardize
from .params import ModelParams, count_parameters, init_params, param_shapes

__all__ = [
    "MODEL_LABELS", "ModelConfig", "ModelInputs", "ModelKind", "ModelParams",
    "aggregate", "bind", "count_parameters", "forward", "init_params", "loss_closure",
    "message_pass_step", "param_shapes", "predict", "prepare_graph", "prepare_inputs",
    "standardize",
]
