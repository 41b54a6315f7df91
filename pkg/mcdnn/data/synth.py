"""Gerador determinístico de glifos sintéticos para experiências à escala de secretária.

Cada classe tem um protótipo de 3 a 6 traços (retas e arcos) num canvas 64×64.
Cada amostra aplica ruído nos pontos, espessura e uma transformação afim global;
o escritor desloca sistematicamente essas distribuições e fixa a intensidade da
tinta (10 a 110, nunca preto puro). Os traços são desenhados
com anti-aliasing (tinta escura sobre fundo branco) e a imagem é recortada à
caixa da tinta, como um caractere já segmentado.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from mcdnn.models.dataset import Dataset, Sample
from mcdnn.models.image import GrayImage
from mcdnn.utils import to_uint8

logger = logging.getLogger(__name__)

CANVAS = 64
ARC_POINTS = 9


@dataclass(frozen=True)
class WriterStyle:
    shear: float
    rotation: float
    scale_x: float
    scale_y: float
    thickness: float
    ink: float


def _prototype(seed: int, label: int) -> list[np.ndarray]:
    rng = np.random.default_rng([seed, 0, label])
    strokes = []
    for _ in range(int(rng.integers(3, 7))):
        if rng.random() < 0.6:
            strokes.append(rng.uniform(12, 52, size=(2, 2)))
        else:
            center = rng.uniform(22, 42, size=2)
            radius = rng.uniform(6, 16)
            start = rng.uniform(0, 2 * math.pi)
            sweep = rng.uniform(math.pi / 2, 3 * math.pi / 2)
            angles = start + np.linspace(0.0, sweep, ARC_POINTS)
            strokes.append(center + radius * np.stack([np.cos(angles), np.sin(angles)], axis=1))
    return strokes


def _writer_style(seed: int, writer: int) -> WriterStyle:
    rng = np.random.default_rng([seed, 1, writer])
    return WriterStyle(
        shear=rng.uniform(-0.25, 0.25),
        rotation=math.radians(rng.uniform(-6, 6)),
        scale_x=rng.uniform(0.85, 1.1),
        scale_y=rng.uniform(0.85, 1.1),
        thickness=rng.uniform(-0.5, 0.8),
        ink=rng.uniform(10, 110),
    )


def _render(strokes: list[np.ndarray], thickness: float, ink: float = 0.0) -> np.ndarray:
    starts = np.concatenate([s[:-1] for s in strokes])
    ends = np.concatenate([s[1:] for s in strokes])
    coords = np.arange(CANVAS, dtype=np.float64) + 0.5
    px, py = np.meshgrid(coords, coords)
    pixels = np.stack([px.ravel(), py.ravel()], axis=1)

    seg = ends - starts
    length2 = np.maximum((seg * seg).sum(axis=1), 1e-12)
    rel = pixels[:, np.newaxis, :] - starts[np.newaxis, :, :]
    t = np.clip((rel * seg[np.newaxis]).sum(axis=2) / length2, 0.0, 1.0)
    nearest = starts[np.newaxis] + t[..., np.newaxis] * seg[np.newaxis]
    dist = np.sqrt(((pixels[:, np.newaxis, :] - nearest) ** 2).sum(axis=2)).min(axis=1)

    coverage = np.clip(thickness / 2 + 0.5 - dist, 0.0, 1.0)
    return to_uint8(255.0 - (255.0 - ink) * coverage).reshape(CANVAS, CANVAS)


def _crop_to_ink(arr: np.ndarray) -> np.ndarray:
    rows = np.flatnonzero((arr < 255).any(axis=1))
    cols = np.flatnonzero((arr < 255).any(axis=0))
    if rows.size == 0:
        return arr
    top, bottom = max(rows[0] - 1, 0), min(rows[-1] + 2, arr.shape[0])
    left, right = max(cols[0] - 1, 0), min(cols[-1] + 2, arr.shape[1])
    return arr[top:bottom, left:right]


def render_glyph(seed: int, label: int, index: int, writer: int) -> GrayImage:
    """Uma amostra da classe `label` escrita por `writer`."""
    style = _writer_style(seed, writer)
    rng = np.random.default_rng([seed, 2, label, index])

    angle = style.rotation + math.radians(rng.normal(0.0, 3.0))
    scale = rng.uniform(0.95, 1.05)
    shear = style.shear + rng.normal(0.0, 0.05)
    cos, sin = math.cos(angle), math.sin(angle)
    affine = np.array([[cos, -sin], [sin, cos]]) @ np.array(
        [[style.scale_x * scale, shear], [0.0, style.scale_y * scale]]
    )
    shift = rng.uniform(-3, 3, size=2)
    center = np.array([CANVAS / 2, CANVAS / 2])

    strokes = []
    for stroke in _prototype(seed, label):
        noisy = stroke + rng.normal(0.0, 1.5, size=stroke.shape)
        strokes.append((noisy - center) @ affine.T + center + shift)
    thickness = max(1.0, 2.0 + style.thickness + rng.uniform(-0.3, 0.3))
    return GrayImage.from_array(_crop_to_ink(_render(strokes, thickness, style.ink)))


def synth_glyphs(class_count: int, per_class: int, writers: int, seed: int) -> Dataset:
    """Dataset sintético; função pura dos argumentos."""
    if class_count < 1 or per_class < 1 or writers < 1:
        raise ValueError(
            f"contagens têm de ser >= 1 (classes={class_count}, por classe={per_class}, escritores={writers})"
        )
    samples = []
    for label in range(class_count):
        for index in range(per_class):
            writer = index % writers
            samples.append(Sample(render_glyph(seed, label, index, writer), label, writer))
    logger.info(
        f"[synth seed={seed}] {len(samples)} amostras, {class_count} classes, {writers} escritores"
    )
    return Dataset(
        samples=samples,
        class_count=class_count,
        class_names=[f"glyph{label:04d}" for label in range(class_count)],
        metadata={"generator": "synth", "seed": seed, "writers": writers},
    )
