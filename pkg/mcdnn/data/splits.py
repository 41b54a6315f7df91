"""Partição de datasets por escritor."""

import logging
from typing import Iterable

from mcdnn.models.dataset import Dataset

logger = logging.getLogger(__name__)


def split_by_writer(
    ds: Dataset, train_writers: Iterable[int], val_writers: Iterable[int]
) -> tuple[Dataset, Dataset]:
    """Separa treino/validação por escritor; amostras de escritores não listados são descartadas.

    O número de descartes fica em `metadata["dropped_samples"]` de ambos os resultados.
    """
    train_set, val_set = set(train_writers), set(val_writers)
    overlap = train_set & val_set
    if overlap:
        raise ValueError(f"escritores em treino e validação ao mesmo tempo: {sorted(overlap)}")

    train, val = [], []
    dropped = 0
    for sample in ds.samples:
        if sample.writer in train_set:
            train.append(sample)
        elif sample.writer in val_set:
            val.append(sample)
        else:
            dropped += 1

    if dropped:
        logger.info(f"[split] {dropped} amostras de escritores não listados descartadas")
    metadata = dict(ds.metadata, dropped_samples=dropped)
    return (
        Dataset(train, ds.class_count, ds.class_names, dict(metadata, split="train")),
        Dataset(val, ds.class_count, ds.class_names, dict(metadata, split="val")),
    )
