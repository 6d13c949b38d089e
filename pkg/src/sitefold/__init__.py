"""sitefold: model an information space as a program, specialize it against
user input, and re-render the residual as a personalized browsable space."""

__version__ = "0.1.0"

from .ir import (
    Assignment,
    ContentPayload,
    InteractionProgram,
    Var,
    Vocabulary,
    canonical_parse,
    canonical_serialize,
    close_assignment,
)
from .specialize import (
    incremental_pe,
    optimize_residual,
    partial_evaluate,
    total_evaluate,
)

__all__ = [
    "Assignment",
    "ContentPayload",
    "InteractionProgram",
    "Var",
    "Vocabulary",
    "canonical_parse",
    "canonical_serialize",
    "close_assignment",
    "incremental_pe",
    "optimize_residual",
    "partial_evaluate",
    "total_evaluate",
    "__version__",
]
