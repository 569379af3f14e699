"""Nonholonomic mechanics toolkit.

Thin Python shell over the C++ core: system bundles, constrained
integration, the named verification checks, and the Chaplygin reduction
pipeline. Reports are plain dicts with the same shape as the CLI's JSON
output.
"""

from ._core import (
    ConfigError,
    DimensionError,
    DomainError,
    Error,
    NumericalError,
    System,
    check,
    check_names,
    get_system,
    reduce,
    simulate,
    systems,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "DomainError",
    "Error",
    "NumericalError",
    "System",
    "check",
    "check_names",
    "get_system",
    "reduce",
    "simulate",
    "systems",
]

__version__ = "0.1.0"
