"""Modelos de dataset: amostras rotuladas com identificação do escritor."""

from dataclasses import dataclass, field
from typing import Optional

from mcdnn.errors import LabelRangeError
from mcdnn.models.image import GrayImage


@dataclass(frozen=True)
class Sample:
    image: GrayImage
    label: int
    writer: int = 0


@dataclass
class Dataset:
    """Conjunto de amostras com contagem de classes fixa."""

    samples: list[Sample]
    class_count: int
    class_names: Optional[list[str]] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for index, sample in enumerate(self.samples):
            if not 0 <= sample.label < self.class_count:
                raise LabelRangeError(
                    f"amostra {index}: rótulo {sample.label} fora de 0..{self.class_count - 1}"
                )

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def writers(self) -> list[int]:
        return sorted({s.writer for s in self.samples})

    def labels(self) -> list[int]:
        return [s.label for s in self.samples]

    def map_images(self, fn) -> "Dataset":
        """Novo dataset com `fn` aplicada a cada imagem (rótulos e escritores mantidos)."""
        return Dataset(
            samples=[Sample(fn(s.image), s.label, s.writer) for s in self.samples],
            class_count=self.class_count,
            class_names=self.class_names,
            metadata=dict(self.metadata),
        )

    def subset(self, indices) -> "Dataset":
        return Dataset(
            samples=[self.samples[i] for i in indices],
            class_count=self.class_count,
            class_names=self.class_names,
            metadata=dict(self.metadata),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.class_count == other.class_count and self.samples == other.samples
