"""Treino SGD de colunas com deformações aleatórias e escolha pela validação."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from mcdnn.arch_dsl import render_arch
from mcdnn.errors import ClassCountMismatchError, ConfigError, EmptyDatasetError
from mcdnn.imageprep import normalize_for_net
from mcdnn.models.arch import ArchSpec
from mcdnn.models.dataset import Dataset
from mcdnn.models.image import GrayImage
from mcdnn.models.training import DeformParams, EpochLog, Hyperparams, TrainingLog
from mcdnn.nn.column import Column, backward_column, forward_logits, init_column
from mcdnn.utils import to_uint8

logger = logging.getLogger(__name__)


def affine_warp(
    img: GrayImage,
    tx: float = 0.0,
    ty: float = 0.0,
    angle_deg: float = 0.0,
    scale: float = 1.0,
    fill: int = 255,
) -> GrayImage:
    """Translação, rotação e escala em torno do centro, com amostragem bilinear.

    Vizinhos fora da imagem contam com o valor `fill`.
    """
    if tx == 0 and ty == 0 and angle_deg == 0 and scale == 1:
        return img
    arr = img.to_array().astype(np.float64)
    h, w = arr.shape
    padded = np.pad(arr, 1, constant_values=float(fill))

    theta = math.radians(angle_deg)
    cos, sin = math.cos(theta), math.sin(theta)
    cx, cy = w / 2, h / 2
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    dx = xs + 0.5 - cx - tx
    dy = ys + 0.5 - cy - ty
    # mapeamento inverso: destino -> origem
    sx = (cos * dx + sin * dy) / scale + cx - 0.5
    sy = (-sin * dx + cos * dy) / scale + cy - 0.5

    # coordenadas no array com margem de 1 pixel
    sx = np.clip(sx + 1, 0.0, w + 1 - 1e-9)
    sy = np.clip(sy + 1, 0.0, h + 1 - 1e-9)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w + 1)
    y1 = np.minimum(y0 + 1, h + 1)
    fx = sx - x0
    fy = sy - y0
    top = (1.0 - fx) * padded[y0, x0] + fx * padded[y0, x1]
    bottom = (1.0 - fx) * padded[y1, x0] + fx * padded[y1, x1]
    return GrayImage.from_array(to_uint8((1.0 - fy) * top + fy * bottom))


def deform(img: GrayImage, params: DeformParams, rng: np.random.Generator, fill: int = 255) -> GrayImage:
    """Uma transformação afim aleatória; o mesmo estado do rng dá a mesma saída."""
    if params.is_identity:
        return img
    tx, ty = rng.uniform(-params.max_translate, params.max_translate, size=2)
    angle = rng.uniform(-params.max_rotate, params.max_rotate)
    scale = rng.uniform(params.scale_min, params.scale_max)
    return affine_warp(img, float(tx), float(ty), float(angle), float(scale), fill)


def top1_error(col: Column, ds: Dataset) -> float:
    """Erro top-1 com desempate pelo índice de classe mais baixo."""
    if len(ds) == 0:
        return float("nan")
    wrong = 0
    for sample in ds.samples:
        logits = forward_logits(col, normalize_for_net(sample.image, col.dtype))
        if int(np.argmax(logits)) != sample.label:
            wrong += 1
    return wrong / len(ds)


@dataclass
class TrainingResult:
    column: Column
    log: TrainingLog


def _check_inputs(spec: ArchSpec, train: Dataset, val: Dataset):
    if len(train) == 0:
        raise EmptyDatasetError("conjunto de treino vazio")
    for ds, name in ((train, "treino"), (val, "validação")):
        if ds.class_count != spec.class_count:
            raise ClassCountMismatchError(
                f"{name}: {ds.class_count} classes, arquitetura com {spec.class_count} saídas"
            )
    expected = (spec.input_w, spec.input_h)
    for sample in train.samples[:1] + val.samples[:1]:
        if (sample.image.width, sample.image.height) != expected:
            raise ConfigError(
                f"imagens {sample.image.width}x{sample.image.height} não correspondem à entrada "
                f"{spec.input_w}x{spec.input_h}; pré-processe os dados primeiro"
            )


def train_column(
    spec: ArchSpec,
    train: Dataset,
    val: Dataset,
    hp: Hyperparams,
    seed: int,
    log_path: Optional[str] = None,
    on_checkpoint: Optional[Callable[[Column, int], None]] = None,
    fill: int = 255,
) -> TrainingResult:
    """SGD por amostra; devolve os parâmetros da época com menor erro de validação."""
    _check_inputs(spec, train, val)
    column = init_column(spec, seed)
    rng = np.random.default_rng([seed, 7])
    velocity = [(np.zeros_like(p.weight), np.zeros_like(p.bias)) for p in column.params]
    selection = val if len(val) else train
    if not len(val):
        logger.warning(f"[column seed={seed}] validação vazia: seleção pelo erro de treino")

    log = TrainingLog(seed=seed, arch=render_arch(spec))
    best: Optional[Column] = None
    log_file = open(log_path, "a", encoding="utf-8") if log_path else None
    try:
        for epoch in range(hp.epochs):
            lr = hp.learning_rate(epoch)
            order = rng.permutation(len(train))
            total_loss = 0.0
            for index in order:
                sample = train.samples[index]
                image = deform(sample.image, hp.deform, rng, fill)
                x = normalize_for_net(image, column.dtype)
                loss, grads = backward_column(column, x, sample.label)
                total_loss += loss
                if lr == 0:
                    continue
                for p, g, v in zip(column.params, grads, velocity):
                    for tensor, grad, vel in ((p.weight, g.weight, v[0]), (p.bias, g.bias, v[1])):
                        step = grad + hp.weight_decay * tensor if hp.weight_decay else grad
                        if hp.momentum:
                            vel *= hp.momentum
                            vel += step
                            step = vel
                        tensor -= (lr * step).astype(tensor.dtype)

            number = epoch + 1
            if number % hp.eval_every and number != hp.epochs:
                continue
            val_top1 = top1_error(column, selection)
            entry = EpochLog(epoch=number, loss=total_loss / len(train), val_top1=val_top1, lr=lr)
            log.epochs.append(entry)
            logger.info(f"[column seed={seed}] {entry.to_line()}")
            if log_file:
                log_file.write(entry.to_line() + "\n")
                log_file.flush()
            if best is None or val_top1 < log.best_val_top1:
                best = column.copy()
                log.best_epoch, log.best_val_top1 = number, val_top1
                if on_checkpoint:
                    on_checkpoint(best, number)
    finally:
        if log_file:
            log_file.close()

    best.metadata.update(best_epoch=log.best_epoch, best_val_top1=log.best_val_top1)
    return TrainingResult(column=best, log=log)


def _train_job(args) -> TrainingResult:
    spec, train, val, hp, seed, fill = args
    return train_column(spec, train, val, hp, seed, fill=fill)


def train_columns(
    specs: Sequence[ArchSpec],
    seeds: Sequence[int],
    train: Dataset,
    val: Dataset,
    hp: Hyperparams,
    threads: int = 1,
    fill: int = 255,
) -> list[TrainingResult]:
    """Treina colunas independentes; o resultado não depende da ordem de execução."""
    if len(specs) != len(seeds):
        raise ValueError(f"{len(specs)} arquiteturas para {len(seeds)} sementes")
    jobs = [(spec, train, val, hp, seed, fill) for spec, seed in zip(specs, seeds)]
    if threads <= 1 or len(jobs) <= 1:
        return [_train_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_train_job, jobs))
