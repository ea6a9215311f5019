"""CSV ingestion and dataset dumps (header row, UTF-8, '.' decimals)."""
import numpy as np
import pandas as pd

from networks.exceptions import ParseError


def load_series_csv(path, column):
    """Ordered numeric series from one CSV column.

    Data rows are numbered from 1 (the header is not counted) in error messages.
    """
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
    if column not in frame.columns:
        raise ParseError(
            f'column {column!r} not found; available columns: {", ".join(frame.columns)}')
    raw = frame[column].str.strip()
    values = pd.to_numeric(raw, errors='coerce')
    bad = np.flatnonzero(values.isna().to_numpy())
    if bad.size:
        rows = [int(i) + 1 for i in bad]
        raise ParseError(
            f'non-numeric value {raw.iloc[bad[0]]!r} in column {column!r} at row {rows[0]}'
            + (f' (also rows {rows[1:10]})' if len(rows) > 1 else ''),
            row=rows[0],
        )
    return values.to_numpy(dtype=float)


def dataset_frame(dataset, transform=None):
    """Long-format frame with columns ``split,x0[,x1],y``."""
    frames = []
    for name, split in dataset.splits():
        frame = pd.DataFrame(split.X, columns=[f'x{i}' for i in range(dataset.m)])
        frame.insert(0, 'split', name)
        frame['y'] = transform(split.y) if transform else split.y
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def write_dataset_csv(dataset, path, transform=None):
    dataset_frame(dataset, transform).to_csv(path, index=False)


def write_decomposition_csv(decomposition, path):
    decomposition.to_frame().to_csv(path, index=False)
