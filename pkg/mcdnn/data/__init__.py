"""Ingestão e geração de datasets."""

from mcdnn.data.container import dataset_digest, read_container, write_container
from mcdnn.data.pgm import read_corpus_dir, read_pgm, write_pgm
from mcdnn.data.splits import split_by_writer
from mcdnn.data.synth import synth_glyphs
from mcdnn.data.writer_stream import load_code_table, read_writer_stream

__all__ = [
    "dataset_digest",
    "read_container",
    "write_container",
    "read_corpus_dir",
    "read_pgm",
    "write_pgm",
    "split_by_writer",
    "synth_glyphs",
    "load_code_table",
    "read_writer_stream",
]
