"""Armazenamento de colunas treinadas e dos respetivos checkpoints."""

import logging
from pathlib import Path
from typing import Optional

from mcdnn.nn.column import Column
from mcdnn.nn.serialization import column_from_bytes, column_to_bytes

logger = logging.getLogger(__name__)

SUFFIX = ".col"


def save_column(column: Column, path) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(column_to_bytes(column))
    return str(path)


def load_column(path) -> Column:
    """Lê uma coluna; o nome passa a ser o nome do ficheiro sem extensão."""
    path = Path(path)
    return column_from_bytes(path.read_bytes(), name=path.stem)


class ColumnStorage:
    """Guarda e recupera colunas e checkpoints por época."""

    def __init__(self, base_dir: str = "data/models", max_checkpoints: int = 5):
        self.base_dir = Path(base_dir)
        self.max_checkpoints = max_checkpoints
        self.base_dir.mkdir(parents=True, exist_ok=True)

    def _checkpoint_dir(self, name: str) -> Path:
        path = self.base_dir / "checkpoints" / name
        path.mkdir(parents=True, exist_ok=True)
        return path

    def column_path(self, name: str) -> Path:
        return self.base_dir / f"{name}{SUFFIX}"

    def save_column(self, column: Column, name: Optional[str] = None) -> str:
        """Guarda a coluna final e retorna o caminho do ficheiro."""
        filepath = save_column(column, self.column_path(name or column.name))
        logger.info(f"Coluna guardada: {filepath}")
        return filepath

    def save_checkpoint(self, column: Column, name: str, epoch: int) -> str:
        filepath = self._checkpoint_dir(name) / f"{name}_e{epoch:04d}{SUFFIX}"
        save_column(column, filepath)
        logger.info(f"Checkpoint guardado: {filepath}")
        self._cleanup_old_checkpoints(name)
        return str(filepath)

    def get_latest_checkpoint(self, name: str) -> Optional[Column]:
        files = self._checkpoint_files(name)
        if not files:
            return None
        return load_column(files[0])

    def list_columns(self) -> list[str]:
        return [str(p) for p in sorted(self.base_dir.glob(f"*{SUFFIX}"))]

    def _checkpoint_files(self, name: str) -> list[Path]:
        return sorted(self._checkpoint_dir(name).glob(f"{name}_e*{SUFFIX}"), reverse=True)

    def _cleanup_old_checkpoints(self, name: str):
        """Remove checkpoints antigos se exceder o limite."""
        files = self._checkpoint_files(name)
        if len(files) > self.max_checkpoints:
            for f in files[self.max_checkpoints:]:
                f.unlink()
                logger.info(f"Checkpoint antigo removido: {f}")
