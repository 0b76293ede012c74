"""
Exception hierarchy shared by every package.

The CLI maps these onto exit codes:
  ConfigError                 -> 2  (usage / configuration)
  everything else             -> 3  (runtime)
"""

from __future__ import annotations

from typing import Optional, Sequence


class AutoSampleError(Exception):
    """Base class for errors raised deliberately by this library."""


class DomainError(AutoSampleError, ValueError):
    """An input violates a documented precondition (ids out of range, empty pools...)."""


class DataFormatError(DomainError):
    """A malformed line in an interaction file."""

    def __init__(self, path: str, line_no: int, line: str, reason: str = "expected two integer tokens"):
        self.path    = path
        self.line_no = line_no
        self.line    = line
        super().__init__(f"{path}:{line_no}: {reason}, got {line.rstrip()!r}")


class ConfigError(AutoSampleError, ValueError):
    """Invalid or unknown configuration."""

    def __init__(self, message: str, key: Optional[str] = None, suggestion: Optional[str] = None):
        self.key        = key
        self.suggestion = suggestion
        if suggestion:
            message = f"{message} (did you mean '{suggestion}'?)"
        super().__init__(message)


class TrainingDivergedError(AutoSampleError, RuntimeError):
    """A non-finite loss was produced during training."""

    def __init__(self, epoch: int, batch: int, losses: Sequence[float]):
        self.epoch  = epoch
        self.batch  = batch
        self.losses = list(losses)
        super().__init__(
            f"non-finite loss at epoch {epoch}, batch {batch}: per-sampler losses={self.losses}"
        )
