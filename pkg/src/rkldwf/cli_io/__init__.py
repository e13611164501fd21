"""Command-line interface, configuration documents and file formats."""

from .arrayfile import (
    DTYPE_C64,
    DTYPE_F64,
    FORMAT_VERSION,
    MAGIC,
    decode_array,
    encode_array,
    read_array,
    write_array,
)
from .config_file import (
    Settings,
    load_experiment,
    load_settings,
    load_solver_config,
    parse_experiment,
    parse_solver,
)
from .cli import EXIT_IO, EXIT_OK, EXIT_USAGE, main
from .logs import JsonFormatter, configure_logging
from .results import (
    TRACE_COLUMNS,
    read_trials_csv,
    write_aggregates_csv,
    write_curves_csv,
    write_json,
    write_trace_csv,
    write_trials_csv,
)

__all__ = [
    "DTYPE_C64",
    "DTYPE_F64",
    "FORMAT_VERSION",
    "MAGIC",
    "decode_array",
    "encode_array",
    "read_array",
    "write_array",
    "Settings",
    "load_experiment",
    "load_settings",
    "load_solver_config",
    "parse_experiment",
    "parse_solver",
    "EXIT_IO",
    "EXIT_OK",
    "EXIT_USAGE",
    "main",
    "JsonFormatter",
    "configure_logging",
    "TRACE_COLUMNS",
    "read_trials_csv",
    "write_aggregates_csv",
    "write_curves_csv",
    "write_json",
    "write_trace_csv",
    "write_trials_csv",
]
