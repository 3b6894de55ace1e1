from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = [
    'THREADS_VARIABLE',
    'worker_count',
    'map_chunks',
]

THREADS_VARIABLE = 'MEPOLY_THREADS'


def worker_count(default=4):
    """Number of worker threads, capped by the ``MEPOLY_THREADS`` environment variable.

    Returns
    -------
    :obj:`int`
        At least 1.
    """
    cpus = os.cpu_count() or 1
    value = os.environ.get(THREADS_VARIABLE)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise ValueError('{} must be an integer, got {!r}'.format(THREADS_VARIABLE, value))
    return max(1, min(default, cpus))


def map_chunks(function, count, chunk_size=4096, workers=None):
    """Apply ``function(start, stop)`` to consecutive index ranges covering ``range(count)``.

    Results are returned in index order whatever the number of workers, so
    callers can concatenate them deterministically.

    Parameters
    ----------
    function : callable
        Called as ``function(start, stop)``.
    count : :obj:`int`
        Total number of items.
    chunk_size : :obj:`int`, optional
        Items per chunk.
    workers : :obj:`int`, optional
        Defaults to :func:`worker_count`.

    Returns
    -------
    :obj:`list`
        One result per chunk.
    """
    bounds = [(start, min(start + chunk_size, count)) for start in range(0, count, chunk_size)]
    workers = workers or worker_count()
    if workers == 1 or len(bounds) <= 1:
        return [function(start, stop) for start, stop in bounds]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(function, start, stop) for start, stop in bounds]
        return [future.result() for future in futures]
