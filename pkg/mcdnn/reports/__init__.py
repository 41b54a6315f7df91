"""Geração de relatórios de avaliação e de desvio."""
