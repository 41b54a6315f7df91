"""Utilidades gerais."""

import hashlib
import math

import numpy as np


def round_half_up(values):
    """Arredonda metade para cima (valores não negativos), em precisão dupla."""
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


def to_uint8(values) -> np.ndarray:
    """Arredonda e satura para intensidades de 8 bits."""
    return np.clip(round_half_up(values), 0, 255).astype(np.uint8)


def fmt6(value: float) -> str:
    """Formato fixo com 6 algarismos significativos, estável entre execuções."""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.6g}"


def content_hash(data: bytes) -> str:
    """Hash de conteúdo para comparar artefactos byte a byte."""
    return hashlib.sha256(data).hexdigest()


def parse_int_list(text: str) -> list[int]:
    """Converte "1,5,10" ou "0-3,7" numa lista ordenada de inteiros."""
    result: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            result.extend(range(int(lo), int(hi) + 1))
        else:
            result.append(int(part))
    return result
