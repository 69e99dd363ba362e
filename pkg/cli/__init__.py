"""Command-line interface."""
from cli.main import CliConfig, main

__all__ = ["CliConfig", "main"]
