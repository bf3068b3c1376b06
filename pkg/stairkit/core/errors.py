"""
StairKit - Error Hierarchy
Every failure carries the pipeline stage it came from and a process exit code
"""

from typing import Optional


# ============================================================================
# EXIT CODES
# ============================================================================

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_INSUFFICIENT = 4


class StairKitError(Exception):
    """Base error for all toolkit failures"""

    exit_code: int = 1

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.stage = stage

    def with_stage(self, stage: str) -> "StairKitError":
        """Tag the error with a stage name unless one is already set"""
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message


# ============================================================================
# INPUT ERRORS (exit 2)
# ============================================================================

class InputError(StairKitError):
    """Malformed or inconsistent input"""
    exit_code = EXIT_INPUT


class LabelParseError(InputError):
    """A label-file record could not be parsed"""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}", stage="parse")
        self.line_no = line_no
        self.reason = reason


class FormatError(InputError):
    """A binary or JSON artifact does not follow its declared format"""


class DimensionMismatchError(InputError):
    """Two operands that must share dimensions do not"""


# ============================================================================
# GEOMETRY ERRORS (exit 3)
# ============================================================================

class DegenerateGeometryError(StairKitError):
    """Degenerate fit, parallel line, gimbal lock or invalid pose"""
    exit_code = EXIT_DEGENERATE


# ============================================================================
# DATA ERRORS (exit 4)
# ============================================================================

class InsufficientDataError(StairKitError):
    """Too few points, lines or valid depth samples"""
    exit_code = EXIT_INSUFFICIENT


class DepthHoleError(InsufficientDataError):
    """Depth is missing (0.0, negative or non-finite) at a sample"""
