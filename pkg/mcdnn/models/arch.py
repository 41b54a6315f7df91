"""Modelos da descrição de arquitetura: camadas, especificação e plano de dimensões."""

import json
from dataclasses import dataclass, field, asdict
from typing import Optional, Union


@dataclass(frozen=True)
class Conv:
    """Camada convolucional: `maps` mapas com filtros `kernel`×`kernel`."""

    maps: int
    kernel: int

    @property
    def kind(self) -> str:
        return "conv"


@dataclass(frozen=True)
class MaxPool:
    """Max-pooling não sobreposto `pool`×`pool`."""

    pool: int

    @property
    def kind(self) -> str:
        return "maxpool"


@dataclass(frozen=True)
class Full:
    """Camada totalmente ligada com `neurons` neurónios."""

    neurons: int

    @property
    def kind(self) -> str:
        return "full"


LayerSpec = Union[Conv, MaxPool, Full]


@dataclass(frozen=True)
class ArchSpec:
    """Arquitetura já analisada: geometria de entrada, camadas e tag opcional."""

    input_h: int
    input_w: int
    layers: tuple[LayerSpec, ...]
    tag: Optional[str] = None

    @property
    def class_count(self) -> int:
        return self.layers[-1].neurons

    def without_tag(self) -> "ArchSpec":
        return ArchSpec(self.input_h, self.input_w, self.layers, None)


@dataclass(frozen=True)
class LayerShape:
    """Saída de uma camada: mapas × altura × largura, parâmetros e custo."""

    kind: str
    maps: int
    h: int
    w: int
    params: int
    madds: int

    @property
    def size(self) -> int:
        return self.maps * self.h * self.w


@dataclass(frozen=True)
class ShapePlan:
    """Resultado da inferência de dimensões para todas as camadas."""

    input_maps: int
    input_h: int
    input_w: int
    layers: tuple[LayerShape, ...] = field(default_factory=tuple)

    @property
    def total_params(self) -> int:
        return sum(layer.params for layer in self.layers)

    @property
    def total_madds(self) -> int:
        return sum(layer.madds for layer in self.layers)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["total_params"] = self.total_params
        data["total_madds"] = self.total_madds
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)
