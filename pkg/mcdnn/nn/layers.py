"""Camadas de uma coluna: convolução válida, max-pooling, camada completa, tanh e softmax.

Os gradientes são derivados à mão camada a camada. A convolução usa im2col sobre
uma vista deslizante e um único produto matricial; a ordem de acumulação dentro
do produto é a da BLAS instalada, fixa para a mesma build e o mesmo layout.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _im2col(x: np.ndarray, k: int) -> np.ndarray:
    # (C, H, W) -> (Ho*Wo, C*k*k)
    c = x.shape[0]
    windows = sliding_window_view(x, (k, k), axis=(1, 2))
    ho, wo = windows.shape[1], windows.shape[2]
    return windows.transpose(1, 2, 0, 3, 4).reshape(ho * wo, c * k * k)


def conv_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """out[m, y, x] = b[m] + soma_{c,i,j} x[c, y+i, x+j] * w[m, c, i, j]."""
    if x.ndim != 3 or w.ndim != 4 or b.ndim != 1:
        raise ValueError(f"dimensões inválidas: x{x.shape} w{w.shape} b{b.shape}")
    m_out, m_in, k, k2 = w.shape
    if k != k2 or x.shape[0] != m_in or b.shape[0] != m_out:
        raise ValueError(f"formas incompatíveis: x{x.shape} w{w.shape} b{b.shape}")
    if x.shape[1] < k or x.shape[2] < k:
        raise ValueError(f"kernel {k} maior que a entrada {x.shape[1]}x{x.shape[2]}")
    ho, wo = x.shape[1] - k + 1, x.shape[2] - k + 1
    cols = _im2col(x, k)
    out = cols @ w.reshape(m_out, -1).T + b
    return out.T.reshape(m_out, ho, wo)


def conv_backward(
    x: np.ndarray, w: np.ndarray, dout: np.ndarray, need_dx: bool = True
) -> tuple:
    """Gradientes (dx, dw, db) de conv_forward; dx é None se `need_dx` for falso."""
    m_out, m_in, k, _ = w.shape
    ho, wo = dout.shape[1], dout.shape[2]
    cols = _im2col(x, k)
    dflat = dout.reshape(m_out, ho * wo)
    dw = (dflat @ cols).reshape(w.shape)
    db = dflat.sum(axis=1)
    if not need_dx:
        return None, dw, db

    dcols = (dflat.T @ w.reshape(m_out, -1)).reshape(ho, wo, m_in, k, k)
    dcols = dcols.transpose(2, 3, 4, 0, 1)
    dx = np.zeros_like(x)
    for i in range(k):
        for j in range(k):
            dx[:, i:i + ho, j:j + wo] += dcols[:, i, j]
    return dx, dw, db


def maxpool_forward(x: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Máximo de cada janela p×p e o índice plano (em x) do vencedor.

    Em empates ganha o primeiro elemento na ordem de varrimento da janela.
    """
    c, h, w = x.shape
    if p < 1 or h % p or w % p:
        raise ValueError(f"{h}x{w} não é divisível por pool {p}")
    ho, wo = h // p, w // p
    windows = x.reshape(c, ho, p, wo, p).transpose(0, 1, 3, 2, 4).reshape(c, ho, wo, p * p)
    local = windows.argmax(axis=3)
    out = np.take_along_axis(windows, local[..., np.newaxis], axis=3)[..., 0]

    rows = np.arange(ho)[np.newaxis, :, np.newaxis] * p + local // p
    cols = np.arange(wo)[np.newaxis, np.newaxis, :] * p + local % p
    maps = np.arange(c)[:, np.newaxis, np.newaxis]
    argmax = (maps * h + rows) * w + cols
    return out, argmax


def maxpool_backward(dout: np.ndarray, argmax: np.ndarray, in_shape: tuple) -> np.ndarray:
    """Encaminha cada gradiente para a posição vencedora registada."""
    dx = np.zeros(int(np.prod(in_shape)), dtype=dout.dtype)
    dx[argmax.ravel()] = dout.ravel()
    return dx.reshape(in_shape)


def fc_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    if w.ndim != 2 or x.ndim != 1 or w.shape[1] != x.shape[0] or b.shape != (w.shape[0],):
        raise ValueError(f"formas incompatíveis: x{x.shape} w{w.shape} b{b.shape}")
    return w @ x + b


def fc_backward(x: np.ndarray, w: np.ndarray, dout: np.ndarray, need_dx: bool = True) -> tuple:
    dw = np.outer(dout, x)
    db = dout.copy()
    dx = w.T @ dout if need_dx else None
    return dx, dw, db


def activation(x: np.ndarray) -> np.ndarray:
    return np.tanh(x)


def activation_grad(x: np.ndarray) -> np.ndarray:
    """Derivada de tanh em x."""
    y = np.tanh(x)
    return 1.0 - y * y


def activation_grad_from_output(y: np.ndarray) -> np.ndarray:
    return 1.0 - y * y


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    e = np.exp(shifted)
    return e / e.sum()


def softmax_xent(logits: np.ndarray, label: int) -> tuple[np.ndarray, float, np.ndarray]:
    """Scores, perda -log(scores[label]) e gradiente scores - onehot(label)."""
    if not 0 <= label < logits.shape[0]:
        raise ValueError(f"rótulo {label} fora de 0..{logits.shape[0] - 1}")
    shifted = logits - logits.max()
    e = np.exp(shifted)
    total = e.sum()
    scores = e / total
    loss = float(np.log(total) - shifted[label])
    dlogits = scores.copy()
    dlogits[label] -= 1
    return scores, loss, dlogits
