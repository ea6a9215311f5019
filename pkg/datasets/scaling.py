from dataclasses import dataclass
from functools import cached_property

import numpy as np
from django.conf import settings
from sklearn.preprocessing import MinMaxScaler

from networks.exceptions import DegenerateRange


@dataclass(frozen=True)
class ScalerState:
    """Observed target range [min, max] and the interval it is mapped onto."""

    min: float
    max: float
    range_lo: float = 0.0
    range_hi: float = 1.0

    def __post_init__(self):
        if not self.max > self.min:
            raise DegenerateRange(f'scaler needs max > min, got [{self.min}, {self.max}]')
        if not self.range_hi > self.range_lo:
            raise DegenerateRange(
                f'scaler target range is empty: [{self.range_lo}, {self.range_hi}]')

    @cached_property
    def transformer(self):
        scaler = MinMaxScaler(feature_range=(self.range_lo, self.range_hi))
        return scaler.fit(np.array([[self.min], [self.max]]))

    def as_dict(self):
        return {
            'min': self.min,
            'max': self.max,
            'range_lo': self.range_lo,
            'range_hi': self.range_hi,
        }


def scaler_fit(values, feature_range=None):
    """Min-max scaler mapping the observed range of ``values`` onto ``feature_range``."""
    lo, hi = feature_range or settings.CAUCHYNET['SCALER_RANGE']
    values = np.asarray(values, dtype=float)
    if values.size < 2 or values.min() == values.max():
        raise DegenerateRange('scaler_fit needs at least two distinct values')
    return ScalerState(float(values.min()), float(values.max()), float(lo), float(hi))


def _columnwise(method, values):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return values.copy()
    return method(values.reshape(-1, 1)).reshape(values.shape)


def scaler_apply(state, values):
    return _columnwise(state.transformer.transform, values)


def scaler_invert(state, scaled):
    return _columnwise(state.transformer.inverse_transform, scaled)
