from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import csv
import os

import numpy as np

__all__ = [
    'ensure_directory',
    'format_value',
    'read_csv_to_dictionary',
    'read_pgm',
    'write_csv',
    'write_pgm',
]


def ensure_directory(path):
    """Create ``path`` (and its parents) if it does not exist yet and return it."""
    if path and not os.path.isdir(path):
        os.makedirs(path)
    return path


def format_value(value):
    """Format a cell for CSV output.

    Floats use the shortest representation that round-trips, so equal inputs
    always produce byte-identical files.
    """
    if isinstance(value, (bool, np.bool_)):
        return '1' if value else '0'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(filepath, header, rows):
    """Write rows to a comma separated file with a header row.

    Parameters
    ----------
    filepath : :obj:`str`
        The path of the file to write.
    header : :obj:`list` of :obj:`str`
        Column names.
    rows : iterable of sequences
        One sequence of values per row, in header order.
    """
    ensure_directory(os.path.dirname(filepath))
    with open(filepath, mode='w', newline='') as outfile:
        writer = csv.writer(outfile, delimiter=',', lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])


def read_csv_to_dictionary(csvfile, delimiter=','):
    """Reads a csv file and returns a dictionary with the respective keys
    specified in the first row of the csv file.

    Parameters
    ----------
    csvfile : str
        The path to csv file.
    delimiter : str, optional
        The character used to separate the values. Default ``,``

    Returns
    -------
    dict
        Column name to list of string values.
    """
    with open(csvfile, mode='r', newline='') as infile:
        reader = csv.reader(infile, delimiter=delimiter)
        data = [row for row in reader if row]
    if not data:
        raise ValueError("CSV file '{}' is empty".format(csvfile))
    columns = zip(*data)  # transpose data
    data_dict = {}
    for col in columns:
        data_dict[col[0]] = list(col[1:])
    return data_dict


def write_pgm(filepath, image):
    """Write a 2D array with values in ``[0, 1]`` as a binary portable graymap.

    Row 0 of ``image`` is the top row of the picture.

    Parameters
    ----------
    filepath : :obj:`str`
        Target path, usually ending in ``.pgm``.
    image : :class:`numpy.ndarray`
        Array of shape ``(height, width)``.
    """
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ValueError('Graymap images must be 2D, got shape {}'.format(image.shape))
    pixels = np.rint(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
    height, width = pixels.shape
    ensure_directory(os.path.dirname(filepath))
    with open(filepath, 'wb') as f:
        f.write('P5\n{} {}\n255\n'.format(width, height).encode('ascii'))
        f.write(pixels.tobytes())


def read_pgm(filepath):
    """Read a binary portable graymap written by :func:`write_pgm`.

    Returns
    -------
    :class:`numpy.ndarray`
        ``uint8`` array of shape ``(height, width)``.
    """
    with open(filepath, 'rb') as f:
        content = f.read()
    parts = content.split(b'\n', 3)
    if len(parts) < 4 or parts[0] != b'P5':
        raise ValueError("'{}' is not a binary graymap".format(filepath))
    width, height = [int(v) for v in parts[1].split()]
    pixels = np.frombuffer(parts[3], dtype=np.uint8)
    return pixels[:width * height].reshape(height, width)
