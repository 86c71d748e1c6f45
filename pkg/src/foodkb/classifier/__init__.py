from foodkb.classifier.baseline import (
    BaselineModel,
    HyperParams,
    fit,
    load_model,
    predict_proba,
    save_model,
)
from foodkb.classifier.contract import (
    BASELINE_GRID,
    TRANSFORMER_GRID,
    BackendModelError,
    BackendTransportError,
    BaselineBackend,
    ClassifierBackend,
)
from foodkb.classifier.encoding import SEPARATOR, encode_input
from foodkb.classifier.remote import RemoteBackend
from foodkb.classifier.search import grid_search

__all__ = [
    "BASELINE_GRID",
    "TRANSFORMER_GRID",
    "BackendModelError",
    "BackendTransportError",
    "BaselineBackend",
    "BaselineModel",
    "ClassifierBackend",
    "HyperParams",
    "RemoteBackend",
    "SEPARATOR",
    "encode_input",
    "fit",
    "grid_search",
    "load_model",
    "predict_proba",
    "save_model",
]
