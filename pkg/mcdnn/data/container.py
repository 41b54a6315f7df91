"""Contentor portátil de imagens rotuladas.

Layout (little-endian):
    magic "MCDS" | u16 versão | u32 class_count | u32 sample_count |
    por amostra: u32 label | u32 writer | u16 w | u16 h | w*h bytes
"""

import logging
import struct
from pathlib import Path

from mcdnn.errors import BadMagicError, ContainerError, LabelRangeError, TruncatedError
from mcdnn.models.dataset import Dataset, Sample
from mcdnn.models.image import GrayImage
from mcdnn.utils import content_hash

logger = logging.getLogger(__name__)

MAGIC = b"MCDS"
VERSION = 1
HEADER = struct.Struct("<4sHII")
RECORD = struct.Struct("<IIHH")


def dataset_to_bytes(ds: Dataset) -> bytes:
    parts = [HEADER.pack(MAGIC, VERSION, ds.class_count, len(ds.samples))]
    for sample in ds.samples:
        img = sample.image
        parts.append(RECORD.pack(sample.label, sample.writer, img.width, img.height))
        parts.append(img.pixels)
    return b"".join(parts)


def dataset_from_bytes(data: bytes) -> Dataset:
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError("ficheiro não é um contentor MCDS (magic inválido)")
    if len(data) < HEADER.size:
        raise TruncatedError("cabeçalho do contentor truncado")
    _, version, class_count, sample_count = HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise ContainerError(f"versão de contentor não suportada: {version}")

    offset = HEADER.size
    samples = []
    for index in range(sample_count):
        if offset + RECORD.size > len(data):
            raise TruncatedError(f"amostra {index}: registo truncado")
        label, writer, width, height = RECORD.unpack_from(data, offset)
        if width == 0 or height == 0:
            raise ContainerError(f"amostra {index}: dimensões vazias {width}x{height}")
        offset += RECORD.size
        end = offset + width * height
        if end > len(data):
            raise TruncatedError(f"amostra {index}: pixels truncados")
        if label >= class_count:
            raise LabelRangeError(f"amostra {index}: rótulo {label} fora de 0..{class_count - 1}")
        samples.append(Sample(GrayImage(width, height, bytes(data[offset:end])), label, writer))
        offset = end

    if offset != len(data):
        raise ContainerError(f"{len(data) - offset} bytes a mais no fim do contentor")
    return Dataset(samples=samples, class_count=class_count)


def write_container(path, ds: Dataset) -> str:
    """Escreve o dataset e retorna o caminho do ficheiro."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = dataset_to_bytes(ds)
    path.write_bytes(data)
    logger.info(f"Contentor guardado: {path} ({len(ds)} amostras, sha256 {content_hash(data)[:16]})")
    return str(path)


def read_container(path) -> Dataset:
    ds = dataset_from_bytes(Path(path).read_bytes())
    logger.info(f"Contentor lido: {path} ({len(ds)} amostras, {ds.class_count} classes)")
    return ds


def dataset_digest(ds: Dataset) -> str:
    return content_hash(dataset_to_bytes(ds))
