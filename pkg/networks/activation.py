"""The Cauchy activation: component-wise inversion multiplied across inputs.

``X(z) = prod_i (z_i + eps)^-1`` is holomorphic away from its poles, so its
complex derivative is also its Wirtinger derivative with respect to ``z``
and ``dX/dz_bar`` vanishes.
"""
import numpy as np

from .exceptions import NonFinite, PoleEncountered
from .linalg import COMPLEX


def _shift(z, epsilon):
    shifted = np.asarray(z, dtype=COMPLEX) + float(epsilon)
    if np.any(shifted == 0):
        raise PoleEncountered(
            f'shifted input has a zero component (epsilon={epsilon})',
            where=np.argwhere(shifted == 0))
    return shifted


def _checked(value):
    if not np.all(np.isfinite(value)):
        raise NonFinite('Cauchy activation overflowed')
    return value


def cauchy_activation_batch(H, epsilon):
    """Activation over the last axis of ``H``; returns an array of shape ``H.shape[:-1]``."""
    shifted = _shift(H, epsilon)
    with np.errstate(over='ignore', invalid='ignore'):
        hidden = np.prod(1.0 / shifted, axis=-1)
    return _checked(hidden)


def cauchy_activation(z, epsilon=0.0):
    z = np.atleast_1d(np.asarray(z, dtype=COMPLEX))
    return complex(cauchy_activation_batch(z, epsilon))


def cauchy_activation_partials(z, epsilon=0.0):
    """Partials ``-X(z) * (z_j + eps)^-1`` for every component ``j``."""
    shifted = _shift(np.atleast_1d(z), epsilon)
    with np.errstate(over='ignore', invalid='ignore'):
        inverse = 1.0 / shifted
        partials = -np.prod(inverse) * inverse
    return _checked(partials)


def cauchy_activation_derivative(z, epsilon=0.0):
    """``-(z + eps)^-2`` for a scalar, the vector of partials otherwise."""
    if np.ndim(z) == 0:
        return complex(cauchy_activation_partials(z, epsilon)[0])
    return cauchy_activation_partials(z, epsilon)


def wirtinger_residual(f, z, step=1e-6):
    """Central-difference estimate of ``|df/dz_bar| = |(df/dx + i df/dy) / 2|``."""
    z = complex(z)
    dfdx = (f(z + step) - f(z - step)) / (2 * step)
    dfdy = (f(z + 1j * step) - f(z - 1j * step)) / (2 * step)
    return abs(0.5 * (dfdx + 1j * dfdy))
