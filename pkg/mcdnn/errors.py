"""Hierarquia de erros do workbench e respetivos códigos de saída."""

from typing import Optional


class McdnnError(Exception):
    """Erro base; `exit_code` é o código devolvido pelo CLI."""

    exit_code: int = 1


class UsageError(McdnnError):
    exit_code = 1


class ConfigError(UsageError, ValueError):
    """Configuração ou flags inválidas (ex.: box > canvas)."""


class ArchError(UsageError, ValueError):
    """Erro de gramática numa string de arquitetura."""

    def __init__(self, message: str, token_index: Optional[int] = None):
        self.token_index = token_index
        if token_index is not None:
            message = f"token {token_index}: {message}"
        super().__init__(message)


class ShapeError(ArchError):
    """A inferência de dimensões falhou (lado não positivo ou pooling não divisível)."""


class DataError(McdnnError):
    exit_code = 2


class ContainerError(DataError):
    pass


class BadMagicError(ContainerError):
    pass


class TruncatedError(ContainerError):
    pass


class LabelRangeError(ContainerError):
    pass


class StreamError(DataError):
    pass


class MalformedRecordError(StreamError):
    pass


class PrematureEndError(StreamError):
    pass


class ClassCountMismatchError(DataError):
    pass


class EmptyDatasetError(DataError):
    pass


class ImageReadError(DataError):
    pass


class NumericError(McdnnError):
    exit_code = 3


class GradientCheckError(NumericError):
    pass
