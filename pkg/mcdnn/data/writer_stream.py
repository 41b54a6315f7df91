"""Leitor do formato de registos por caractere do corpus da competição.

Cada registo: u32 tamanho | 2 bytes código | u16 largura | u16 altura | pixels,
little-endian, com tamanho == 10 + largura * altura.
"""

import logging
import struct
from pathlib import Path

from mcdnn.errors import MalformedRecordError, PrematureEndError, StreamError
from mcdnn.models.dataset import Sample
from mcdnn.models.image import GrayImage

logger = logging.getLogger(__name__)

RECORD_HEADER = struct.Struct("<I2sHH")


def load_code_table(path) -> dict[str, int]:
    """Lê linhas "hexcode índice"; linhas vazias e comentários (#) são ignorados."""
    table: dict[str, int] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise StreamError(f"{path}:{line_no}: esperado 'hexcode índice', recebido '{line}'")
        table[parts[0].lower()] = int(parts[1])
    return table


def read_writer_stream(
    data: bytes,
    code_table: dict[str, int],
    writer: int = 0,
    on_unknown: str = "skip",
) -> list[Sample]:
    """Uma amostra por registo; códigos desconhecidos são saltados ou dão erro."""
    if on_unknown not in ("skip", "error"):
        raise ValueError(f"on_unknown tem de ser 'skip' ou 'error', recebido '{on_unknown}'")

    samples: list[Sample] = []
    skipped = 0
    offset = 0
    record = 0
    while offset < len(data):
        if offset + RECORD_HEADER.size > len(data):
            raise PrematureEndError(f"registo {record}: cabeçalho incompleto no offset {offset}")
        size, code, width, height = RECORD_HEADER.unpack_from(data, offset)
        if width == 0 or height == 0:
            raise MalformedRecordError(f"registo {record}: dimensões vazias {width}x{height}")
        if size != RECORD_HEADER.size + width * height:
            raise MalformedRecordError(
                f"registo {record}: tamanho {size} != 10 + {width}x{height}"
            )
        if offset + size > len(data):
            raise PrematureEndError(f"registo {record}: pixels incompletos no offset {offset}")

        key = code.hex()
        start = offset + RECORD_HEADER.size
        offset += size
        record += 1
        if key not in code_table:
            if on_unknown == "error":
                raise StreamError(f"registo {record - 1}: código desconhecido {key}")
            skipped += 1
            continue
        image = GrayImage(width, height, bytes(data[start:offset]))
        samples.append(Sample(image=image, label=code_table[key], writer=writer))

    if skipped:
        logger.warning(f"[writer {writer}] {skipped} registos com código desconhecido saltados")
    return samples


def write_writer_stream(samples: list[tuple[bytes, GrayImage]]) -> bytes:
    """Serializa pares (código de 2 bytes, imagem) no mesmo formato de registos."""
    parts = []
    for code, img in samples:
        if len(code) != 2:
            raise ValueError(f"código tem de ter 2 bytes, recebido {code!r}")
        parts.append(RECORD_HEADER.pack(RECORD_HEADER.size + img.width * img.height, code, img.width, img.height))
        parts.append(img.pixels)
    return b"".join(parts)
