"""
Exception hierarchy shared by every emoforge module.

Each error also derives from the closest builtin so callers can catch
either the domain type or the familiar builtin.
"""
from typing import Any, Dict, List, Optional


class EmoforgeError(Exception):
    """Base class for all emoforge errors."""


class DataFormatError(EmoforgeError, ValueError):
    """Malformed input data (corpus lines, word lists, embedding files)."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(message if line is None else f"{message} at line {line}")

    @classmethod
    def from_decode(cls, path: str, exc: UnicodeDecodeError) -> "DataFormatError":
        """Report invalid UTF-8 in ``path`` at the line holding the bad byte."""
        line = bytes(exc.object[:exc.start]).count(b"\n") + 1
        return cls(f"{path} is not valid UTF-8 ({exc.reason})", line=line)


class PersistenceError(EmoforgeError, OSError):
    """Reading or writing an artifact failed."""


class SampleNotFoundError(EmoforgeError, KeyError):
    """A sample id is not present in the corpus."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "sample not found"


class PreconditionError(EmoforgeError, ValueError):
    """An operation was called with inputs that violate its contract."""


class DimensionError(EmoforgeError, ValueError):
    """Array shapes do not line up."""

    def __init__(self, message: str, layer_index: Optional[int] = None):
        self.layer_index = layer_index
        if layer_index is not None:
            message = f"layer {layer_index}: {message}"
        super().__init__(message)


class NumericError(EmoforgeError, ArithmeticError):
    """NaN or infinite values where finite values are required."""


class StateError(EmoforgeError, RuntimeError):
    """An object was used before the state it needs exists."""


class TrainingError(EmoforgeError, RuntimeError):
    """Training could not produce a usable model."""

    def __init__(self, message: str, epoch: Optional[int] = None):
        self.epoch = epoch
        if epoch is not None:
            message = f"{message} (epoch {epoch})"
        super().__init__(message)


class BalancingError(EmoforgeError, ValueError):
    """Oversampling cannot synthesize points for a class."""


class BoostingError(TrainingError):
    """Boosting gave up after too many rejected rounds."""

    def __init__(self, message: str, diagnostics: Optional[List[Dict[str, Any]]] = None):
        self.diagnostics = diagnostics or []
        detail = "; ".join(
            f"round {d.get('round')}: error={d.get('error'):.4f} ({d.get('status')})"
            for d in self.diagnostics
        )
        super().__init__(f"{message}: {detail}" if detail else message)


class RoundRejectedError(EmoforgeError, ValueError):
    """A boosting round's weak learner is no better than chance."""

    def __init__(self, message: str, error: float):
        self.error = error
        super().__init__(message)
