"""
********************************************************************************
compas_mepoly.utilities
********************************************************************************

.. currentmodule:: compas_mepoly.utilities

Package containing a set of utility functions.

File functions
==============

.. autosummary::
    :toctree: generated/
    :nosignatures:

    ensure_directory
    format_value
    read_csv_to_dictionary
    read_pgm
    write_csv
    write_pgm

Logging
=======

.. autosummary::
    :toctree: generated/
    :nosignatures:

    get_logger
    set_log_level

Workers
=======

.. autosummary::
    :toctree: generated/
    :nosignatures:

    worker_count
    map_chunks

"""

from .file_io import (
    ensure_directory,
    format_value,
    read_csv_to_dictionary,
    read_pgm,
    write_csv,
    write_pgm,
)
from .log import (
    LOG,
    get_logger,
    set_log_level,
)
from .workers import (
    THREADS_VARIABLE,
    map_chunks,
    worker_count,
)

__all__ = [
    # file_io
    'ensure_directory',
    'format_value',
    'read_csv_to_dictionary',
    'read_pgm',
    'write_csv',
    'write_pgm',
    # log
    'LOG',
    'get_logger',
    'set_log_level',
    # workers
    'THREADS_VARIABLE',
    'map_chunks',
    'worker_count',
]
