"""Formato binário versionado de colunas.

Layout (little-endian):
    magic "MCDC" | u16 versão | u32 comprimento + arquitetura UTF-8 | u64 semente |
    por camada paramétrica, pela ordem da arquitetura: pesos float32, depois biases float32
"""

import struct

import numpy as np

from mcdnn.arch_dsl import parse_arch, render_arch
from mcdnn.errors import ArchError, BadMagicError, ContainerError, TruncatedError
from mcdnn.nn.column import Column, LayerParams, parameter_shapes

MAGIC = b"MCDC"
VERSION = 1


def column_to_bytes(col: Column) -> bytes:
    arch = render_arch(col.spec).encode("utf-8")
    parts = [
        MAGIC,
        struct.pack("<H", VERSION),
        struct.pack("<I", len(arch)),
        arch,
        struct.pack("<Q", col.seed),
    ]
    for p in col.params:
        parts.append(np.ascontiguousarray(p.weight, dtype="<f4").tobytes())
        parts.append(np.ascontiguousarray(p.bias, dtype="<f4").tobytes())
    return b"".join(parts)


def column_from_bytes(data: bytes, name: str = None) -> Column:
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError("ficheiro não é uma coluna (magic inválido)")
    offset = 4
    if len(data) < offset + 6:
        raise TruncatedError("cabeçalho da coluna truncado")
    version, arch_len = struct.unpack_from("<HI", data, offset)
    offset += 6
    if version != VERSION:
        raise ContainerError(f"versão de coluna não suportada: {version}")
    if len(data) < offset + arch_len + 8:
        raise TruncatedError("cabeçalho da coluna truncado")
    try:
        spec = parse_arch(data[offset:offset + arch_len].decode("utf-8"))
    except (UnicodeDecodeError, ArchError) as err:
        raise ContainerError(f"arquitetura da coluna corrompida: {err}") from err
    offset += arch_len
    (seed,) = struct.unpack_from("<Q", data, offset)
    offset += 8

    params = []
    for w_shape, b_shape in parameter_shapes(spec):
        tensors = []
        for shape in (w_shape, b_shape):
            count = int(np.prod(shape))
            end = offset + 4 * count
            if end > len(data):
                raise TruncatedError(f"tensores truncados ({len(data)} bytes, esperados >= {end})")
            tensors.append(np.frombuffer(data, dtype="<f4", count=count, offset=offset)
                           .reshape(shape).astype(np.float32))
            offset = end
        params.append(LayerParams(*tensors))
    if offset != len(data):
        raise ContainerError(f"{len(data) - offset} bytes a mais no fim da coluna")
    return Column(spec=spec, params=params, seed=seed, name=name)
