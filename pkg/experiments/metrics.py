from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from networks.exceptions import LengthMismatch

METRICS_COLUMNS = ['model', 'split', 'mse', 'mae', 'complex_params', 'real_params', 'wall_ms',
                   'mean_abs_imag', 'note']


def _errors(preds, truths):
    preds = np.asarray(preds, dtype=float).reshape(-1)
    truths = np.asarray(truths, dtype=float).reshape(-1)
    if preds.shape != truths.shape:
        raise LengthMismatch(f'{preds.size} predictions but {truths.size} targets')
    if preds.size == 0:
        raise LengthMismatch('metrics need at least one prediction')
    return preds - truths


def metric_mse(preds, truths):
    return float(np.mean(_errors(preds, truths) ** 2))


def metric_mae(preds, truths):
    return float(np.mean(np.abs(_errors(preds, truths))))


@dataclass
class MetricsReport:
    model: str
    split: str
    mse: float
    mae: float
    abs_errors: np.ndarray = field(repr=False)
    complex_params: Optional[int]
    real_params: int
    wall_ms: Optional[float] = None
    mean_abs_imag: Optional[float] = None
    note: str = ''

    @classmethod
    def from_predictions(cls, model, split, preds, truths, complex_params, real_params,
                         wall_ms=None, mean_abs_imag=None, note=''):
        errors = _errors(preds, truths)
        return cls(
            model=model,
            split=split,
            mse=float(np.mean(errors ** 2)),
            mae=float(np.mean(np.abs(errors))),
            abs_errors=np.abs(errors),
            complex_params=complex_params,
            real_params=real_params,
            wall_ms=wall_ms,
            mean_abs_imag=mean_abs_imag,
            note=note,
        )

    def as_row(self):
        return {
            'model': self.model,
            'split': self.split,
            'mse': self.mse,
            'mae': self.mae,
            'complex_params': self.complex_params,
            'real_params': self.real_params,
            'wall_ms': self.wall_ms,
            'mean_abs_imag': self.mean_abs_imag,
            'note': self.note,
        }
