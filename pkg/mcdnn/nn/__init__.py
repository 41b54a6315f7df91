"""Núcleo numérico de uma coluna: camadas, passagem direta/inversa e verificação."""

from mcdnn.nn.column import (
    Column,
    LayerParams,
    backward_column,
    forward_column,
    init_column,
)
from mcdnn.nn.gradcheck import grad_check, self_test
from mcdnn.nn.serialization import column_from_bytes, column_to_bytes

__all__ = [
    "Column",
    "LayerParams",
    "backward_column",
    "forward_column",
    "init_column",
    "grad_check",
    "self_test",
    "column_from_bytes",
    "column_to_bytes",
]
