"""Grammar-derived transformation languages for component & connector models.

Thin wrapper over the C++ core. Errors raise ``cnctrans.Error`` with
``args == (kind, message)``.
"""

from ._cnctrans import (
    DEFAULT_MAX_APPLY,
    Error,
    check,
    cnc_grammar,
    derive_grammar,
    format_model,
    match,
    transform,
)

__all__ = [
    "DEFAULT_MAX_APPLY",
    "Error",
    "check",
    "cnc_grammar",
    "derive_grammar",
    "format_model",
    "match",
    "transform",
]
