"""Parser e análise da notação compacta de arquiteturas.

Gramática: arch = size *( "-" layer ) [ "-" tag ]
           size = int "x" int
           layer = int "C" int / "MP" int / int ("N" / "FC")
           tag = 1*DIGIT

Convolução em modo válido (sem padding, passo 1); pooling não sobreposto com
divisão exata obrigatória.
"""

import logging
import re

from mcdnn.errors import ArchError, ShapeError
from mcdnn.models.arch import ArchSpec, Conv, Full, LayerShape, LayerSpec, MaxPool, ShapePlan

logger = logging.getLogger(__name__)

SIZE_RE = re.compile(r"^(\d+)x(\d+)$")
CONV_RE = re.compile(r"^(\d+)C(\d+)$")
POOL_RE = re.compile(r"^MP(\d+)$")
FULL_RE = re.compile(r"^(\d+)(N|FC)$")
TAG_RE = re.compile(r"^\d+$")


def _parse_layer(token: str, index: int) -> LayerSpec:
    match = CONV_RE.match(token)
    if match:
        maps, kernel = int(match.group(1)), int(match.group(2))
        if maps < 1 or kernel < 1:
            raise ArchError(f"convolução precisa de maps >= 1 e kernel >= 1: '{token}'", index)
        return Conv(maps=maps, kernel=kernel)

    match = POOL_RE.match(token)
    if match:
        pool = int(match.group(1))
        if pool < 2:
            raise ArchError(f"max-pooling precisa de pool >= 2: '{token}'", index)
        return MaxPool(pool=pool)

    match = FULL_RE.match(token)
    if match:
        neurons = int(match.group(1))
        if neurons < 1:
            raise ArchError(f"camada completa precisa de neurons >= 1: '{token}'", index)
        return Full(neurons=neurons)

    raise ArchError(f"token mal formado: '{token}'", index)


def parse_arch(text: str) -> ArchSpec:
    """Converte uma string como "48x48-100C3-MP2-500N-3755N" num ArchSpec validado."""
    if not text:
        raise ArchError("string de arquitetura vazia", 0)

    tokens = text.split("-")
    size = SIZE_RE.match(tokens[0])
    if not size:
        raise ArchError(f"falta o token de entrada HxW, encontrado '{tokens[0]}'", 0)
    input_h, input_w = int(size.group(1)), int(size.group(2))
    if input_h < 1 or input_w < 1:
        raise ArchError("dimensões de entrada têm de ser >= 1", 0)

    tag = None
    layer_tokens = tokens[1:]
    if len(layer_tokens) > 0 and TAG_RE.match(layer_tokens[-1]):
        tag = layer_tokens[-1]
        layer_tokens = layer_tokens[:-1]

    layers: list[LayerSpec] = []
    for offset, token in enumerate(layer_tokens, start=1):
        layers.append(_parse_layer(token, offset))

    if not layers:
        raise ArchError("arquitetura sem camadas", len(tokens))

    seen_full = False
    for offset, layer in enumerate(layers, start=1):
        if isinstance(layer, Full):
            seen_full = True
        elif seen_full:
            raise ArchError("camada completa (N/FC) antes de Conv/MaxPool", offset)

    if not isinstance(layers[0], Conv):
        raise ArchError("a primeira camada depois da entrada tem de ser convolucional", 1)
    if not isinstance(layers[-1], Full):
        raise ArchError("a última camada tem de ser completa (N/FC)", len(layers))

    spec = ArchSpec(input_h=input_h, input_w=input_w, layers=tuple(layers), tag=tag)
    infer_shapes(spec)
    return spec


def render_arch(spec: ArchSpec) -> str:
    """String canónica; a tag, se existir, vai no fim."""
    parts = [f"{spec.input_h}x{spec.input_w}"]
    for layer in spec.layers:
        if isinstance(layer, Conv):
            parts.append(f"{layer.maps}C{layer.kernel}")
        elif isinstance(layer, MaxPool):
            parts.append(f"MP{layer.pool}")
        else:
            parts.append(f"{layer.neurons}N")
    if spec.tag is not None:
        parts.append(spec.tag)
    return "-".join(parts)


def infer_shapes(spec: ArchSpec) -> ShapePlan:
    """Propaga dimensões camada a camada e conta parâmetros e multiply-adds."""
    maps, h, w = 1, spec.input_h, spec.input_w
    flat = None
    shapes: list[LayerShape] = []

    for index, layer in enumerate(spec.layers, start=1):
        if isinstance(layer, Conv):
            out_h, out_w = h - layer.kernel + 1, w - layer.kernel + 1
            if out_h < 1 or out_w < 1:
                raise ShapeError(
                    f"kernel {layer.kernel} maior que a entrada {h}x{w}", index
                )
            k2 = layer.kernel * layer.kernel
            params = layer.maps * (maps * k2 + 1)
            madds = layer.maps * out_h * out_w * maps * k2
            shapes.append(LayerShape(layer.kind, layer.maps, out_h, out_w, params, madds))
            maps, h, w = layer.maps, out_h, out_w
        elif isinstance(layer, MaxPool):
            if h % layer.pool or w % layer.pool:
                raise ShapeError(
                    f"{h}x{w} não é divisível por pool {layer.pool}", index
                )
            h, w = h // layer.pool, w // layer.pool
            shapes.append(LayerShape(layer.kind, maps, h, w, 0, 0))
        else:
            n_in = flat if flat is not None else maps * h * w
            params = layer.neurons * (n_in + 1)
            madds = layer.neurons * n_in
            shapes.append(LayerShape(layer.kind, layer.neurons, 1, 1, params, madds))
            flat = layer.neurons

    return ShapePlan(input_maps=1, input_h=spec.input_h, input_w=spec.input_w, layers=tuple(shapes))


def count_cost(plan: ShapePlan) -> tuple[int, int]:
    """Total de parâmetros e de multiply-accumulates por passagem direta."""
    return plan.total_params, plan.total_madds


def feature_trace(spec: ArchSpec) -> str:
    """Resumo da forma final, ex.: "450×2×2 → 1000 → 3755"."""
    plan = infer_shapes(spec)
    parts: list[str] = []
    last_spatial = None
    for layer in plan.layers:
        if layer.kind == "full":
            if last_spatial is not None and not parts:
                parts.append(f"{last_spatial.maps}×{last_spatial.h}×{last_spatial.w}")
            parts.append(str(layer.maps))
        else:
            last_spatial = layer
    return " → ".join(parts)
