"""Hiperparâmetros de treino, deformações e registo por época."""

import json
from dataclasses import dataclass, field, asdict

from mcdnn.errors import ConfigError


@dataclass(frozen=True)
class DeformParams:
    """Deformação afim aleatória aplicada a cada amostra de treino."""

    max_translate: float = 4.0
    max_rotate: float = 10.0
    scale_min: float = 0.9
    scale_max: float = 1.1
    enabled: bool = True

    def __post_init__(self):
        if self.max_translate < 0 or self.max_rotate < 0:
            raise ConfigError("amplitudes de deformação têm de ser >= 0")
        if not 0 < self.scale_min <= self.scale_max:
            raise ConfigError(f"intervalo de escala inválido: {self.scale_min}..{self.scale_max}")

    @property
    def is_identity(self) -> bool:
        return (
            not self.enabled
            or (self.max_translate == 0 and self.max_rotate == 0
                and self.scale_min == 1.0 and self.scale_max == 1.0)
        )

    @classmethod
    def for_canvas(cls, canvas: int, box: int, **overrides) -> "DeformParams":
        """Translação máxima igual à margem (canvas - box) / 2."""
        overrides.setdefault("max_translate", (canvas - box) / 2)
        return cls(**overrides)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "DeformParams":
        return cls(**{k: v for k, v in data.items() if k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class Hyperparams:
    epochs: int = 10
    lr0: float = 0.001
    lr_decay: float = 0.993
    deform: DeformParams = field(default_factory=DeformParams)
    eval_every: int = 1
    momentum: float = 0.0
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs tem de ser >= 1, recebido {self.epochs}")
        if self.lr0 < 0:
            raise ConfigError(f"lr0 não pode ser negativo: {self.lr0}")
        if not 0 < self.lr_decay <= 1:
            raise ConfigError(f"lr_decay tem de estar em (0, 1]: {self.lr_decay}")
        if self.eval_every < 1:
            raise ConfigError(f"eval_every tem de ser >= 1: {self.eval_every}")
        if not 0 <= self.momentum < 1:
            raise ConfigError(f"momentum tem de estar em [0, 1): {self.momentum}")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay não pode ser negativo: {self.weight_decay}")

    def learning_rate(self, epoch: int) -> float:
        """Taxa na época `epoch` (0-based): lr0 × lr_decay^epoch."""
        return self.lr0 * self.lr_decay ** epoch

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict, deform: DeformParams = None) -> "Hyperparams":
        values = {k: v for k, v in data.items() if k in cls.__dataclass_fields__ and k != "deform"}
        if deform is None:
            deform = DeformParams.from_dict(data.get("deform", {}))
        return cls(deform=deform, **values)


@dataclass
class EpochLog:
    epoch: int
    loss: float
    val_top1: float
    lr: float

    def to_line(self) -> str:
        return f"epoch={self.epoch} loss={self.loss:.6g} val_top1={self.val_top1:.6g} lr={self.lr:.6g}"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainingLog:
    """Histórico de treino de uma coluna."""

    seed: int
    arch: str
    epochs: list[EpochLog] = field(default_factory=list)
    best_epoch: int = 0
    best_val_top1: float = 1.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)
