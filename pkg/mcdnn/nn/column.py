"""Uma coluna DNN: arquitetura, parâmetros por camada e semente."""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from mcdnn.arch_dsl import infer_shapes, render_arch
from mcdnn.models.arch import ArchSpec, Conv, Full, MaxPool
from mcdnn.models.evaluation import ClassScores
from mcdnn.nn import layers

logger = logging.getLogger(__name__)


@dataclass
class LayerParams:
    weight: np.ndarray
    bias: np.ndarray


@dataclass(eq=False)
class Column:
    """Uma rede treinada de forma independente (uma linha da tabela de redes)."""

    spec: ArchSpec
    params: list[LayerParams]
    seed: int
    name: Optional[str] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name is None:
            self.name = self.spec.tag or f"seed{self.seed}"

    @property
    def dtype(self):
        return self.params[0].weight.dtype

    @property
    def class_count(self) -> int:
        return self.spec.class_count

    @property
    def arch(self) -> str:
        return render_arch(self.spec)

    def astype(self, dtype) -> "Column":
        """Cópia com todos os tensores convertidos (float64 para verificação)."""
        return Column(
            spec=self.spec,
            params=[LayerParams(p.weight.astype(dtype), p.bias.astype(dtype)) for p in self.params],
            seed=self.seed,
            name=self.name,
            metadata=dict(self.metadata),
        )

    def copy(self) -> "Column":
        return self.astype(self.dtype)

    def parameter_bytes(self) -> bytes:
        return b"".join(p.weight.tobytes() + p.bias.tobytes() for p in self.params)

    def distance(self, other: "Column") -> float:
        """Distância euclidiana entre os parâmetros de duas colunas da mesma arquitetura."""
        total = 0.0
        for a, b in zip(self.params, other.params):
            total += float(np.sum((a.weight.astype(np.float64) - b.weight) ** 2))
            total += float(np.sum((a.bias.astype(np.float64) - b.bias) ** 2))
        return total ** 0.5


def parameter_shapes(spec: ArchSpec) -> list[tuple[tuple, tuple]]:
    """Formas (peso, bias) de cada camada paramétrica, pela ordem da arquitetura."""
    plan = infer_shapes(spec)
    shapes = []
    maps, flat = 1, None
    prev = None
    for layer, shape in zip(spec.layers, plan.layers):
        if isinstance(layer, Conv):
            shapes.append(((layer.maps, maps, layer.kernel, layer.kernel), (layer.maps,)))
        elif isinstance(layer, Full):
            n_in = flat if flat is not None else prev.size
            shapes.append(((layer.neurons, n_in), (layer.neurons,)))
            flat = layer.neurons
        maps = shape.maps
        prev = shape
    return shapes


def init_column(spec: ArchSpec, seed: int, dtype=np.float32) -> Column:
    """Pesos uniformes em ±sqrt(6 / (fan_in + fan_out)), biases a zero."""
    rng = np.random.default_rng(seed)
    params = []
    for w_shape, b_shape in parameter_shapes(spec):
        if len(w_shape) == 4:
            m_out, m_in, k, _ = w_shape
            fan_in, fan_out = m_in * k * k, m_out * k * k
        else:
            fan_out, fan_in = w_shape
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weight = rng.uniform(-limit, limit, size=w_shape).astype(dtype)
        params.append(LayerParams(weight=weight, bias=np.zeros(b_shape, dtype=dtype)))
    return Column(spec=spec, params=params, seed=seed)


def _check_input(col: Column, x: np.ndarray) -> np.ndarray:
    if x.ndim == 2:
        x = x[np.newaxis]
    expected = (1, col.spec.input_h, col.spec.input_w)
    if x.shape != expected:
        raise ValueError(f"entrada {x.shape} não corresponde a {expected}")
    return x.astype(col.dtype, copy=False)


def _forward_trace(col: Column, x: np.ndarray) -> tuple[np.ndarray, list]:
    """Passagem direta que guarda o necessário para a retropropagação."""
    trace = []
    out = _check_input(col, x)
    n_layers = len(col.spec.layers)
    param_iter = iter(col.params)
    for index, layer in enumerate(col.spec.layers):
        if isinstance(layer, Conv):
            p = next(param_iter)
            y = layers.activation(layers.conv_forward(out, p.weight, p.bias))
            trace.append(("conv", out, p, y))
            out = y
        elif isinstance(layer, MaxPool):
            y, argmax = layers.maxpool_forward(out, layer.pool)
            trace.append(("maxpool", out.shape, argmax))
            out = y
        else:
            p = next(param_iter)
            flat = out.reshape(-1)
            z = layers.fc_forward(flat, p.weight, p.bias)
            if index == n_layers - 1:
                trace.append(("logits", flat, p, out.shape))
                out = z
            else:
                y = layers.activation(z)
                trace.append(("full", flat, p, out.shape, y))
                out = y
    return out, trace


def forward_column(col: Column, x: np.ndarray) -> ClassScores:
    logits, _ = _forward_trace(col, x)
    return ClassScores(layers.softmax(logits.astype(np.float64)))


def forward_logits(col: Column, x: np.ndarray) -> np.ndarray:
    logits, _ = _forward_trace(col, x)
    return logits


def backward_column(col: Column, x: np.ndarray, label: int) -> tuple[float, list[LayerParams]]:
    """Perda e gradientes exatos de todos os pesos e biases, pela ordem de `col.params`."""
    logits, trace = _forward_trace(col, x)
    _, loss, grad = layers.softmax_xent(logits, label)

    grads: list[LayerParams] = []
    for position, entry in enumerate(reversed(trace)):
        first = position == len(trace) - 1
        kind = entry[0]
        if kind == "logits":
            _, flat, p, in_shape = entry
            dx, dw, db = layers.fc_backward(flat, p.weight, grad)
            grads.append(LayerParams(dw, db))
            grad = dx.reshape(in_shape)
        elif kind == "full":
            _, flat, p, in_shape, y = entry
            dz = grad * layers.activation_grad_from_output(y)
            dx, dw, db = layers.fc_backward(flat, p.weight, dz)
            grads.append(LayerParams(dw, db))
            grad = dx.reshape(in_shape)
        elif kind == "maxpool":
            _, in_shape, argmax = entry
            grad = layers.maxpool_backward(grad, argmax, in_shape)
        else:
            _, inp, p, y = entry
            dz = grad * layers.activation_grad_from_output(y)
            dx, dw, db = layers.conv_backward(inp, p.weight, dz, need_dx=not first)
            grads.append(LayerParams(dw, db))
            grad = dx

    grads.reverse()
    return loss, grads


def loss_of(col: Column, x: np.ndarray, label: int) -> float:
    logits = forward_logits(col, x)
    return layers.softmax_xent(logits, label)[1]
