"""Command-line interface and structure-file serialization."""

from .main import build_parser, main

__all__ = ["build_parser", "main"]
