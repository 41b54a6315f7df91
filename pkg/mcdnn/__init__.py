"""MCDNN Workbench - Multi-Column DNN para reconhecimento de caracteres escritos à mão."""

__version__ = "1.0.0"
