"""Trend-forecasting datasets from a single positive series.

The series is decomposed multiplicatively, the defined part of its trend is
min-max scaled to [-1, 1], and samples are either (scaled time index -> trend)
or (previous ``window`` trend values -> next trend value). Splits are
chronological so validation and test lie after the training stretch.
"""
import numpy as np

from .decomposition import seasonal_decompose_multiplicative
from .scaling import scaler_apply, scaler_fit
from .splits import make_split


def trend_samples(trend, window=0):
    n = len(trend)
    if window == 0:
        t = np.linspace(-1.0, 1.0, n) if n > 1 else np.zeros(1)
        return t.reshape(-1, 1), trend.copy()
    if window >= n:
        raise ValueError(f'window {window} leaves no samples in a trend of length {n}')
    X = np.lib.stride_tricks.sliding_window_view(trend[:-1], window)
    return np.ascontiguousarray(X), trend[window:].copy()


def build_trend_dataset(series, period, window=0, fractions=(0.5, 0.25, 0.25),
                        feature_range=(-1.0, 1.0), provenance=None):
    """Returns ``(dataset, scaler, decomposition)``; the dataset is already scaled."""
    decomposition = seasonal_decompose_multiplicative(series, period)
    trend = decomposition.trend[decomposition.defined]
    scaler = scaler_fit(trend, feature_range)
    X, y = trend_samples(scaler_apply(scaler, trend), window)
    dataset = make_split(
        X, y, fractions, strategy='chronological',
        provenance=dict(provenance or {}, period=period, window=window),
    )
    return dataset, scaler, decomposition
