"""
ModelGraph: an ordered stack of layers with one flat parameter store.
"""
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DataFormatError, DimensionError
from .layers import Layer, LayerSpec, build_layer

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = "emoforge-model/1"


class ModelGraph:
    """
    Sequential network. Parameter names are ``"<layer index>.<name>"``.

    Layers are built from ``specs`` with a generator seeded by ``seed``, so two
    graphs with the same specs and seed start from identical parameters.
    """

    def __init__(self, specs: Sequence[LayerSpec], seed: int = 0, dtype=np.float32,
                 config: Optional[Dict[str, Any]] = None):
        self.specs: List[LayerSpec] = list(specs)
        self.seed = seed
        self.dtype = np.dtype(dtype)
        self.config = dict(config or {})
        rng = np.random.default_rng(seed)
        self.layers: List[Layer] = [build_layer(spec, i, rng, self.dtype)
                                    for i, spec in enumerate(self.specs)]
        self._check_compatible()
        logger.debug("ModelGraph with %d layers, %d parameters", len(self.layers),
                     self.parameter_count())

    def _check_compatible(self) -> None:
        width: Optional[int] = None
        for layer in self.layers:
            if layer.in_dim is not None and width is not None and layer.in_dim != width:
                raise DimensionError(f"{layer.spec.kind} expects width {layer.in_dim} but the "
                                     f"previous layer produces {width}", layer_index=layer.index)
            if layer.out_dim is not None:
                width = layer.out_dim

    # -----------------------------
    # Computation
    # -----------------------------
    def forward(self, x: np.ndarray, mask: Optional[np.ndarray] = None, mode: str = "infer",
                rng: Optional[np.random.Generator] = None,
                stop: Optional[int] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        """Run layers ``[0, stop)`` (all by default); returns (output, mask)."""
        out = x if np.issubdtype(np.asarray(x).dtype, np.integer) else np.asarray(x, dtype=self.dtype)
        for layer in self.layers[:stop]:
            out, mask = layer.forward(out, mask, mode, rng)
        return out, mask

    def backward(self, grad: np.ndarray) -> Dict[str, np.ndarray]:
        """Back-propagate through every layer; returns gradients keyed like ``params``."""
        grads: Dict[str, np.ndarray] = {}
        for layer in reversed(self.layers):
            grad, layer_grads = layer.backward(grad)
            for name, g in layer_grads.items():
                grads[f"{layer.index}.{name}"] = g
        return grads

    # -----------------------------
    # Parameters
    # -----------------------------
    @property
    def params(self) -> Dict[str, np.ndarray]:
        """Live views of every parameter array (mutating them updates the model)."""
        return {f"{layer.index}.{name}": p for layer in self.layers for name, p in layer.params.items()}

    def get_params(self) -> Dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params.items()}

    def set_params(self, values: Dict[str, np.ndarray]) -> None:
        for layer in self.layers:
            for name in layer.params:
                key = f"{layer.index}.{name}"
                if key in values:
                    new = np.asarray(values[key], dtype=self.dtype)
                    if new.shape != layer.params[name].shape:
                        raise DimensionError(f"parameter {key}: shape {new.shape} != "
                                             f"{layer.params[name].shape}", layer_index=layer.index)
                    layer.params[name] = new.copy()

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def astype(self, dtype) -> "ModelGraph":
        """A copy of this graph holding its parameters in ``dtype``."""
        clone = ModelGraph(self.specs, self.seed, dtype, self.config)
        clone.set_params(self.params)
        return clone

    def copy(self) -> "ModelGraph":
        return self.astype(self.dtype)

    def layer_index(self, kind: str, last: bool = False) -> int:
        hits = [layer.index for layer in self.layers if layer.spec.kind == kind]
        if not hits:
            raise DimensionError(f"graph has no {kind} layer")
        return hits[-1] if last else hits[0]

    # -----------------------------
    # Serialization
    # -----------------------------
    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": MODEL_FORMAT_VERSION,
            "config": self.config,
            "seed": self.seed,
            "dtype": self.dtype.name,
            "layers": [spec.model_dump(exclude_defaults=True) for spec in self.specs],
            "params": {k: {"shape": list(v.shape), "values": v.ravel().tolist()}
                       for k, v in self.params.items()},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelGraph":
        if data.get("version") != MODEL_FORMAT_VERSION:
            raise DataFormatError(f"unsupported model format {data.get('version')!r}")
        specs = [LayerSpec.model_validate(spec) for spec in data["layers"]]
        graph = cls(specs, int(data.get("seed", 0)), np.dtype(data.get("dtype", "float32")),
                    data.get("config"))
        graph.set_params({k: np.asarray(v["values"], dtype=graph.dtype).reshape(v["shape"])
                          for k, v in data["params"].items()})
        return graph
