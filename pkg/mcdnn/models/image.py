"""Modelos de imagem e de configuração do pré-processamento."""

import json
from dataclasses import dataclass, field, asdict
from enum import Enum

import numpy as np

from mcdnn.errors import ConfigError


@dataclass(frozen=True)
class GrayImage:
    """Raster de 8 bits em tons de cinzento, linhas contíguas."""

    width: int
    height: int
    pixels: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"dimensões inválidas: {self.width}x{self.height}")
        if len(self.pixels) != self.width * self.height:
            raise ValueError(
                f"{len(self.pixels)} pixels para uma imagem {self.width}x{self.height}"
            )

    @classmethod
    def from_array(cls, array: np.ndarray) -> "GrayImage":
        array = np.ascontiguousarray(array, dtype=np.uint8)
        if array.ndim != 2:
            raise ValueError(f"esperado um array 2D, recebido {array.shape}")
        return cls(width=array.shape[1], height=array.shape[0], pixels=array.tobytes())

    @classmethod
    def filled(cls, width: int, height: int, value: int) -> "GrayImage":
        return cls(width, height, bytes([value]) * (width * height))

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width)


class PipelineOrder(Enum):
    CONTRAST_THEN_SCALE = "contrast-then-scale"
    SCALE_THEN_CONTRAST = "scale-then-contrast"


@dataclass(frozen=True)
class PreprocessConfig:
    box: int = 40
    canvas: int = 48
    order: PipelineOrder = PipelineOrder.CONTRAST_THEN_SCALE
    fill: int = 255

    def __post_init__(self):
        if not 1 <= self.box <= self.canvas:
            raise ConfigError(f"é preciso 1 <= box <= canvas (box={self.box}, canvas={self.canvas})")
        if not 0 <= self.fill <= 255:
            raise ConfigError(f"fill fora de 0..255: {self.fill}")

    def to_dict(self) -> dict:
        return {"box": self.box, "canvas": self.canvas, "order": self.order.value, "fill": self.fill}

    @classmethod
    def from_dict(cls, data: dict) -> "PreprocessConfig":
        data = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        if "order" in data and not isinstance(data["order"], PipelineOrder):
            try:
                data["order"] = PipelineOrder(data["order"])
            except ValueError:
                raise ConfigError(f"ordem de pré-processamento desconhecida: {data['order']}")
        return cls(**data)


@dataclass
class SkewReport:
    """Diferenças entre dois pipelines aplicados ao mesmo corpus."""

    per_image: list[float] = field(default_factory=list)
    mean_diff: float = 0.0
    max_diff: float = 0.0
    max_pixel_diff: int = 0
    identical_count: int = 0
    corpus_size: int = 0
    config_a: dict = field(default_factory=dict)
    config_b: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)
