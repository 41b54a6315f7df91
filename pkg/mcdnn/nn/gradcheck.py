"""Verificação de gradientes por diferenças finitas centradas."""

import logging

import numpy as np

from mcdnn.arch_dsl import parse_arch
from mcdnn.errors import GradientCheckError
from mcdnn.nn.column import Column, backward_column, init_column, loss_of
from mcdnn.utils import fmt6

logger = logging.getLogger(__name__)

# abaixo deste valor as magnitudes contam como zero no denominador
REL_FLOOR = 1e-5


def grad_check(col: Column, x: np.ndarray, label: int, eps: float = 1e-5) -> float:
    """Pior erro relativo entre gradiente analítico e numérico, parâmetro a parâmetro.

    Corre sempre em precisão dupla, sobre uma cópia da coluna.
    """
    if not eps > 0:
        raise ValueError(f"eps tem de ser > 0, recebido {eps}")

    col64 = col.astype(np.float64)
    x64 = np.asarray(x, dtype=np.float64)
    _, analytic = backward_column(col64, x64, label)

    worst = 0.0
    for index, (params, grads) in enumerate(zip(col64.params, analytic)):
        for tensor, grad in ((params.weight, grads.weight), (params.bias, grads.bias)):
            flat = tensor.reshape(-1)
            flat_grad = grad.reshape(-1)
            for i in range(flat.size):
                original = flat[i]
                flat[i] = original + eps
                plus = loss_of(col64, x64, label)
                flat[i] = original - eps
                minus = loss_of(col64, x64, label)
                flat[i] = original
                numeric = (plus - minus) / (2 * eps)
                denom = max(abs(numeric), abs(flat_grad[i]), REL_FLOOR)
                worst = max(worst, abs(numeric - flat_grad[i]) / denom)

    logger.debug(f"[gradcheck {col.arch}] erro relativo máximo {fmt6(worst)}")
    return worst


SELF_TEST_ARCH = "8x8-2C3-MP2-4N-3N"
SELF_TEST_TOLERANCE = 1e-4


def self_test(seed: int = 0, arch: str = SELF_TEST_ARCH, tolerance: float = SELF_TEST_TOLERANCE) -> float:
    """Gradient check numa coluna pequena com entrada aleatória; falha com GradientCheckError."""
    spec = parse_arch(arch)
    col = init_column(spec, seed, dtype=np.float64)
    rng = np.random.default_rng([seed, 3])
    x = rng.uniform(-1.0, 1.0, size=(1, spec.input_h, spec.input_w))
    label = int(rng.integers(spec.class_count))
    worst = grad_check(col, x, label)
    if not worst < tolerance:
        raise GradientCheckError(
            f"gradient check falhou em {arch} (seed {seed}): erro relativo {fmt6(worst)} >= {tolerance:g}"
        )
    logger.info(f"[gradcheck] {arch} seed {seed}: erro relativo máximo {fmt6(worst)}")
    return worst
