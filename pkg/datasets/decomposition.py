"""Classical multiplicative seasonal decomposition.

series = trend * seasonal * residual. The heavy lifting is statsmodels'
``seasonal_decompose``: a centred moving average for the trend (the
half-weighted 2 x period window for even periods) and per-phase means of
series / trend, normalised to mean one, for the seasonal factors. Trend and
residual are NaN where the moving average is undefined.
"""
from dataclasses import dataclass

import numpy as np
import pandas as pd
from statsmodels.tsa.seasonal import seasonal_decompose

from networks.exceptions import NonPositiveValue


@dataclass(frozen=True)
class Decomposition:
    series: np.ndarray
    trend: np.ndarray
    seasonal: np.ndarray
    residual: np.ndarray
    period: int

    @property
    def defined(self):
        return ~np.isnan(self.trend)

    def reconstruct(self):
        return self.trend * self.seasonal * self.residual

    def to_frame(self):
        return pd.DataFrame({
            't': np.arange(len(self.series)),
            'series': self.series,
            'trend': self.trend,
            'seasonal': self.seasonal,
            'residual': self.residual,
        })


def seasonal_decompose_multiplicative(series, period):
    series = np.asarray(series, dtype=float).reshape(-1)
    if period < 2:
        raise ValueError('period must be >= 2')
    if len(series) < 2 * period:
        raise ValueError(f'need at least {2 * period} observations for period {period}')
    if np.any(~(series > 0)):
        bad = int(np.flatnonzero(~(series > 0))[0])
        raise NonPositiveValue(
            f'multiplicative decomposition needs positive data; index {bad} is {series[bad]}')

    result = seasonal_decompose(series, model='multiplicative', period=period, two_sided=True)
    return Decomposition(
        series,
        np.asarray(result.trend, dtype=float),
        np.asarray(result.seasonal, dtype=float),
        np.asarray(result.resid, dtype=float),
        period,
    )
