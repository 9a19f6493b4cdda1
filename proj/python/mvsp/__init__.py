"""Model-variant selection and placement for edge inference."""

from ._core import (
    ConfigError,
    Error,
    Instance,
    IntegrityError,
    IoError,
    ParseError,
    SearchSpaceError,
    Solution,
    ValidationError,
    average_cost,
    average_latency,
    check_feasibility,
    column_names,
    export_mps,
    import_values,
    objective,
    run_experiment,
    solve,
)

__all__ = [
    "ConfigError",
    "Error",
    "Instance",
    "IntegrityError",
    "IoError",
    "ParseError",
    "SearchSpaceError",
    "Solution",
    "ValidationError",
    "average_cost",
    "average_latency",
    "check_feasibility",
    "column_names",
    "export_mps",
    "import_values",
    "objective",
    "run_experiment",
    "solve",
]
