"""CauchyNet: one hidden layer of Cauchy activations with complex biases.

For an input ``x`` in R^m every hidden unit ``k`` computes
``h_k = prod_i (x_i + B[k, i] + eps)^-1`` and the output is
``o = sum_k C[k] h_k = y + i e``. The prediction is ``y``; ``e`` is the
imaginary error term penalised by the loss.

Theorem-style statements write the kernel as ``(b - x)^-1``; here the bias is
added, so a kernel point ``xi`` corresponds to ``B = -xi`` (see
``kernels.quadrature.expansion_to_model``).
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from django.conf import settings

from .activation import cauchy_activation_batch
from .exceptions import LengthMismatch, NonFinite
from .linalg import COMPLEX, REAL, normal_complex

logger = logging.getLogger(__name__)

PARAMETER_COUNT_NOTE = (
    'real parameters follow 2h(m+1); the published parameter table lists '
    'h(m+1), which is the complex parameter count'
)


def default_epsilon():
    return settings.CAUCHYNET['EPSILON']


@dataclass
class CauchyNetModel:
    B: np.ndarray
    C: np.ndarray
    epsilon: float = 1e-8

    model_type = 'cauchynet'

    def __post_init__(self):
        self.B = np.array(self.B, dtype=COMPLEX, ndmin=2)
        self.C = np.array(self.C, dtype=COMPLEX).reshape(-1)
        self.epsilon = float(self.epsilon)
        if self.B.ndim != 2 or self.B.shape[0] < 1 or self.B.shape[1] < 1:
            raise LengthMismatch(f'B must be a non-empty h x m matrix, got {self.B.shape}')
        if self.C.shape != (self.B.shape[0],):
            raise LengthMismatch(
                f'C must have length h={self.B.shape[0]}, got {self.C.shape[0]}')
        if not self.epsilon >= 0:
            raise ValueError('epsilon must be >= 0')

    @property
    def h(self):
        return self.B.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    def parameters(self):
        return [self.B, self.C]

    def copy(self):
        return CauchyNetModel(self.B.copy(), self.C.copy(), self.epsilon)

    def predict(self, X):
        return predict(self, X)

    def loss_and_gradients(self, X, y_true, lam):
        from .grad import batch_loss_and_gradients
        return batch_loss_and_gradients(self, X, y_true, lam)

    def evaluate(self, X, y_true, lam):
        from .grad import batch_loss
        return batch_loss(self, X, y_true, lam)


@dataclass
class ForwardOutput:
    y: float
    e: float
    o: complex
    hidden: np.ndarray


class ParameterCount(NamedTuple):
    complex_params: int
    real_params: int


def init_xavier_complex(h, m, rng, epsilon=None):
    """Real and imaginary parts of B and C drawn from N(0, 2/(m+h))."""
    if h < 1 or m < 1:
        raise ValueError('h and m must be >= 1')
    sigma = math.sqrt(2.0 / (m + h))
    B = normal_complex(rng, sigma, (h, m))
    C = normal_complex(rng, sigma, h)
    logger.debug('xavier-complex init h=%d m=%d sigma=%.4g', h, m, sigma)
    return CauchyNetModel(B, C, default_epsilon() if epsilon is None else epsilon)


def init_elliptical(h, m, rng, semi_major=6.0, semi_minor=2.0, epsilon=None):
    """Experimental: biases spread evenly along an axis-aligned ellipse.

    Row ``k`` sits at angle ``2 pi k / h`` plus a random phase per input
    dimension; C keeps the Xavier-complex draw.
    """
    if h < 1 or m < 1:
        raise ValueError('h and m must be >= 1')
    if semi_major <= 0 or semi_minor <= 0:
        raise ValueError('ellipse semi-axes must be positive')
    phase = rng.uniform(0.0, 2 * np.pi, size=m)
    angles = 2 * np.pi * np.arange(h)[:, None] / h + phase[None, :]
    B = semi_major * np.cos(angles) + 1j * semi_minor * np.sin(angles)
    C = normal_complex(rng, math.sqrt(2.0 / (m + h)), h)
    logger.debug('elliptical init h=%d m=%d axes=(%.3g, %.3g)', h, m, semi_major, semi_minor)
    return CauchyNetModel(B, C, default_epsilon() if epsilon is None else epsilon)


INITIALIZERS = {
    'xavier': init_xavier_complex,
    'elliptical': init_elliptical,
}


def _as_inputs(model, X):
    X = np.asarray(X, dtype=REAL)
    if X.ndim == 1:
        X = X.reshape(-1, model.m) if model.m > 1 else X.reshape(-1, 1)
    if X.shape[1] != model.m:
        raise LengthMismatch(f'model expects {model.m} inputs, got {X.shape[1]}')
    return X


def forward_batch(model, X):
    """Vectorised forward pass. Returns ``(y, e, o, hidden)`` with ``hidden`` of shape (n, h)."""
    X = _as_inputs(model, X)
    H = X[:, None, :] + model.B[None, :, :]
    hidden = cauchy_activation_batch(H, model.epsilon)
    with np.errstate(over='ignore', invalid='ignore'):
        o = hidden @ model.C
    if not np.all(np.isfinite(o)):
        raise NonFinite('forward pass produced a non-finite output')
    return o.real, o.imag, o, hidden


def forward(model, x):
    x = np.asarray(x, dtype=REAL).reshape(-1)
    if x.shape[0] != model.m:
        raise LengthMismatch(f'model expects {model.m} inputs, got {x.shape[0]}')
    y, e, o, hidden = forward_batch(model, x[None, :])
    return ForwardOutput(y=float(y[0]), e=float(e[0]), o=complex(o[0]), hidden=hidden[0])


def predict(model, X):
    return forward_batch(model, X)[0]


def mean_abs_imag(model, X):
    """Mean |Im o| over ``X``, in scaled target units."""
    return float(np.mean(np.abs(forward_batch(model, X)[1])))


def parameter_count(model):
    complex_params = sum(p.size for p in model.parameters())
    real_params = sum(p.view(REAL).size for p in model.parameters())
    return ParameterCount(complex_params, real_params)
