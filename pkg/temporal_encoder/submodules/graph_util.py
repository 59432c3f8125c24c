# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Delimited text helpers shared by the graph, embedding and dynamics files."""

import logging

import numpy as np
import pandas as pd

from .exceptions import GraphIOError

_LOGGER = logging.getLogger(__name__)

COMMENT_CHAR = '#'


def sniff_delimiter(path):
    """Return the delimiter of a text file, tab or comma, from its first data line."""
    try:
        with open(path, 'r', encoding='utf-8') as text_file:
            for line in text_file:
                stripped = line.strip()
                if not stripped or stripped.startswith(COMMENT_CHAR):
                    continue
                return '\t' if '\t' in line else ','
    except OSError as exc:
        raise GraphIOError(f'cannot open file ({exc.strerror})', path=path) from exc
    # No data lines; any delimiter parses an empty file.
    return ','


def leading_comment(path):
    """Return the text of the first line when it is a '#' comment, else None."""
    try:
        with open(path, 'r', encoding='utf-8') as text_file:
            first = text_file.readline().strip()
    except OSError as exc:
        raise GraphIOError(f'cannot open file ({exc.strerror})', path=path) from exc
    if not first.startswith(COMMENT_CHAR):
        return None
    return first[len(COMMENT_CHAR):].strip()


def _read_csv(path, delimiter, header, dtype):
    try:
        return pd.read_csv(
            path, sep=delimiter, header=0 if header else None, comment=COMMENT_CHAR,
            dtype=dtype, skip_blank_lines=True, keep_default_na=False,
            skipinitialspace=True, engine='c', float_precision='round_trip')
    except pd.errors.ParserError as exc:
        raise GraphIOError(f'malformed delimited text ({exc})', path=path) from exc
    except OSError as exc:
        raise GraphIOError(f'cannot read file ({exc.strerror})', path=path) from exc


def read_table(path, columns, optional_columns=(), header=False, numeric=()):
    """Read a delimiter-separated file into a frame of raw string cells.

    Comment lines starting with '#' and blank lines are skipped. Without a header
    the frame gets the given column names and `optional_columns` may be absent
    from the file; with a header the named columns must be present. Columns in
    `numeric` come back as float64 when every cell parses, else as strings like
    the rest so the caller can name the offending row.
    """
    delimiter = sniff_delimiter(path)
    names = list(columns) + list(optional_columns)
    try:
        frame = None
        if numeric and not header:
            dtype = {position: str for position in range(len(columns))}
            dtype.update({names.index(name): np.float64 for name in numeric})
            try:
                frame = _read_csv(path, delimiter, header, dtype)
            except (TypeError, ValueError):
                _LOGGER.debug('Non-numeric cells in %s; reading as text', path)
        if frame is None:
            frame = _read_csv(path, delimiter, header, str)
    except pd.errors.EmptyDataError:
        return pd.DataFrame({name: pd.Series(dtype=str) for name in columns})

    width = frame.shape[1]
    if header:
        frame.columns = [str(name).strip() for name in frame.columns]
        missing = [name for name in columns if name not in frame.columns]
        if missing:
            raise GraphIOError(f'missing columns {", ".join(missing)}', path=path)
    elif width < len(columns) or width > len(names):
        expected = len(columns) if not optional_columns else f'{len(columns)}-{len(names)}'
        raise GraphIOError(f'expected {expected} columns, found {width}', path=path)
    else:
        frame.columns = names[:width]
    _LOGGER.debug('Read %d rows from %s', len(frame), path)
    return frame


def write_table(path, frame, comment=None):
    """Write a frame as comma-separated text with shortest round-trip floats."""
    try:
        with open(path, 'w', encoding='utf-8', newline='') as text_file:
            if comment is not None:
                text_file.write(f'{COMMENT_CHAR} {comment}\n')
            frame.to_csv(text_file, index=False, header=comment is None,
                         lineterminator='\n')
    except OSError as exc:
        raise GraphIOError(f'cannot write file ({exc.strerror})', path=path) from exc
    _LOGGER.debug('Wrote %d rows to %s', len(frame), path)


def _row_numbers(count, rows):
    return np.arange(1, count + 1) if rows is None else np.asarray(rows)


def parse_reals(cells, what='weight', path=None, rows=None):
    """Convert cells to float64, naming the first row that does not parse.

    `rows` holds the 1-based data row of every cell and defaults to 1..len(cells).
    Numeric arrays pass straight through; text cells are converted exactly as
    `float` would, and on failure only the cells the vectorized `pd.to_numeric`
    rejects are re-checked to find the culprit.
    """
    cells = np.asarray(cells)
    if cells.dtype.kind in 'fiu':
        return cells.astype(np.float64, copy=False)
    cells = cells.astype(object)
    try:
        return cells.astype(np.float64)
    except (TypeError, ValueError):
        pass
    coerced = pd.to_numeric(pd.Series(cells), errors='coerce').to_numpy(dtype=np.float64)
    for offset in np.flatnonzero(np.isnan(coerced)):
        try:
            float(cells[offset])
        except (TypeError, ValueError):
            row = int(_row_numbers(len(cells), rows)[offset])
            raise GraphIOError(f'{what} {cells[offset]!r} is not a real number',
                               path=path, row=row) from None
    # Unreachable unless to_numeric accepts a cell that float rejects.
    raise GraphIOError(f'{what} column is not numeric', path=path)


def parse_integers(cells, what='value', path=None, rows=None):
    """Convert cells to int64, naming the first row that does not parse.

    Float cells are accepted when they hold whole numbers.
    """
    cells = np.asarray(cells)
    if cells.dtype.kind in 'iu':
        return cells.astype(np.int64, copy=False)
    if cells.dtype.kind == 'f':
        whole = np.isfinite(cells) & (cells == np.trunc(cells))
        if whole.all():
            return cells.astype(np.int64)
        offset = int(np.flatnonzero(~whole)[0])
        row = int(_row_numbers(len(cells), rows)[offset])
        raise GraphIOError(f'{what} {float(cells[offset])!r} is not an integer',
                           path=path, row=row)
    try:
        return cells.astype(object).astype(np.int64)
    except (TypeError, ValueError, OverflowError):
        pass
    values = np.empty(len(cells), dtype=np.int64)
    for offset, cell in enumerate(cells):
        try:
            values[offset] = int(str(cell).strip())
        except (TypeError, ValueError):
            row = int(_row_numbers(len(cells), rows)[offset])
            raise GraphIOError(f'{what} {cell!r} is not an integer',
                               path=path, row=row) from None
    return values
