"""
Error Handling

Structured error hierarchy for the vecfont pipeline. Every error carries a
severity, a category (which fixes the CLI exit code) and free-form context
data, so the CLI can report failures uniformly.
"""

import uuid
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional


class ErrorSeverity(Enum):
    """Error severity levels"""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class ErrorCategory(Enum):
    """Error categories; each maps to a CLI exit code"""
    VALIDATION = "validation"
    IO = "io"
    NUMERIC = "numeric"

    @property
    def exit_code(self) -> int:
        return {
            ErrorCategory.VALIDATION: 2,
            ErrorCategory.IO: 3,
            ErrorCategory.NUMERIC: 4,
        }[self]


@dataclass
class ErrorContext:
    """Context information for errors"""
    timestamp: datetime = field(default_factory=datetime.now)
    operation: str = ""
    additional_data: Dict[str, Any] = field(default_factory=dict)


class ApplicationError(Exception):
    """Base application error with enhanced information"""

    category = ErrorCategory.VALIDATION
    severity = ErrorSeverity.MEDIUM

    def __init__(
        self,
        message: str,
        recovery_suggestions: Optional[List[str]] = None,
        context: Optional[ErrorContext] = None,
    ):
        super().__init__(message)
        self.message = message
        self.recovery_suggestions = recovery_suggestions or []
        self.context = context or ErrorContext()
        self.error_id = self._generate_error_id()

    def _generate_error_id(self) -> str:
        return f"ERR_{self.category.value.upper()}_{uuid.uuid4().hex[:8]}"

    @property
    def exit_code(self) -> int:
        return self.category.exit_code

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary"""
        return {
            'error_id': self.error_id,
            'message': self.message,
            'error_type': self.__class__.__name__,
            'severity': self.severity.value,
            'category': self.category.value,
            'recovery_suggestions': self.recovery_suggestions,
            'context': {
                'timestamp': self.context.timestamp.isoformat(),
                'operation': self.context.operation,
                'additional_data': self.context.additional_data,
            },
        }


class ConfigError(ApplicationError):
    """Invalid configuration value or file"""

    def __init__(self, key: str, constraint: str, **kwargs):
        super().__init__(f"Invalid configuration for '{key}': {constraint}", **kwargs)
        self.key = key
        self.constraint = constraint


# svg_core ----------------------------------------------------------------

class SvgError(ApplicationError):
    """Base for path-data and glyph structure errors"""


class UnsupportedCommand(SvgError):
    def __init__(self, letter: str, position: int, **kwargs):
        super().__init__(
            f"Unsupported path command '{letter}' at offset {position}; "
            "only absolute M, L, C, Z are accepted",
            **kwargs,
        )
        self.letter = letter
        self.position = position


class MalformedNumber(SvgError):
    def __init__(self, token: str, position: int, **kwargs):
        super().__init__(f"Malformed number '{token}' at offset {position}", **kwargs)
        self.token = token
        self.position = position


class ArityMismatch(SvgError):
    def __init__(self, letter: str, expected: int, got: int, **kwargs):
        super().__init__(
            f"Command '{letter}' takes {expected} arguments, got {got}", **kwargs
        )
        self.letter = letter
        self.expected = expected
        self.got = got


class DegenerateViewbox(SvgError):
    def __init__(self, width: float, height: float, **kwargs):
        super().__init__(f"Viewbox must have positive extent, got {width} x {height}", **kwargs)
        self.width = width
        self.height = height


class TooManyPaths(SvgError):
    def __init__(self, index: int, limit: int, **kwargs):
        super().__init__(f"Path {index} exceeds the limit of {limit} paths", **kwargs)
        self.index = index
        self.limit = limit


class TooManyCommands(SvgError):
    def __init__(self, index: int, count: int, limit: int, **kwargs):
        super().__init__(
            f"Path {index} has {count} commands; at most {limit} fit before EOS", **kwargs
        )
        self.index = index
        self.count = count
        self.limit = limit


class InvalidGlyph(SvgError):
    def __init__(self, reason: str, path_index: Optional[int] = None, **kwargs):
        where = f" (path {path_index})" if path_index is not None else ""
        super().__init__(f"Invalid glyph{where}: {reason}", **kwargs)
        self.reason = reason
        self.path_index = path_index


# geometry ----------------------------------------------------------------

class NonDrawingCommand(ApplicationError):
    def __init__(self, kind: str, **kwargs):
        super().__init__(f"Command {kind} has no parametric curve", **kwargs)
        self.kind = kind


class InvalidPenSequence(ApplicationError):
    def __init__(self, index: int, **kwargs):
        super().__init__(f"Drawing command at position {index} precedes any M", **kwargs)
        self.index = index


class EmptyCloud(ApplicationError):
    category = ErrorCategory.NUMERIC

    def __init__(self, which: str = "point cloud", **kwargs):
        super().__init__(f"Chamfer distance needs non-empty clouds; {which} is empty", **kwargs)


class ResolutionMismatch(ApplicationError):
    def __init__(self, a, b, **kwargs):
        super().__init__(f"Raster resolutions differ: {a} vs {b}", **kwargs)


# training ----------------------------------------------------------------

class GenerationFailed(ApplicationError):
    category = ErrorCategory.NUMERIC

    def __init__(self, what: str, attempts: int, **kwargs):
        super().__init__(f"Could not generate {what} within {attempts} attempts", **kwargs)
        self.attempts = attempts


class NonFiniteLoss(ApplicationError):
    category = ErrorCategory.NUMERIC
    severity = ErrorSeverity.HIGH

    def __init__(self, step: int, breakdown: Optional[Dict[str, float]] = None, **kwargs):
        super().__init__(f"Non-finite loss at step {step}: {breakdown}", **kwargs)
        self.step = step
        self.breakdown = breakdown or {}


class DatasetError(ApplicationError):
    category = ErrorCategory.IO


class CheckpointError(ApplicationError):
    category = ErrorCategory.IO
    severity = ErrorSeverity.HIGH


class VersionMismatch(CheckpointError):
    def __init__(self, found: int, expected: int, **kwargs):
        super().__init__(f"Checkpoint format version {found}, expected {expected}", **kwargs)
        self.found = found
        self.expected = expected


class ShapeMismatch(CheckpointError):
    def __init__(self, name: str, found, expected, **kwargs):
        super().__init__(
            f"Tensor '{name}' has shape {tuple(found)} in checkpoint, model expects {tuple(expected)}",
            **kwargs,
        )
        self.name = name


class CorruptFile(CheckpointError):
    def __init__(self, path: str, reason: str, **kwargs):
        super().__init__(f"Corrupt checkpoint {path}: {reason}", **kwargs)
        self.path = path


@contextmanager
def error_context(operation: str = "", **context_data):
    """Attach context to any ApplicationError raised inside the block"""
    try:
        yield
    except ApplicationError as e:
        if operation and not e.context.operation:
            e.context.operation = operation
        e.context.additional_data.update(context_data)
        raise
