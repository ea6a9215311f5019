"""Dense complex helpers and the seeded random source used across the project.

Complex scalars are plain Python ``complex`` values; vectors and matrices are
``numpy`` arrays of dtype ``complex128`` in row-major (C) order.
"""
import math

import numpy as np

from .exceptions import DivisionByZero, LengthMismatch, NonFinite

COMPLEX = np.complex128
REAL = np.float64


def complex_scalar(re, im=0.0):
    re, im = float(re), float(im)
    if not (math.isfinite(re) and math.isfinite(im)):
        raise NonFinite(f'non-finite complex component ({re}, {im})')
    return complex(re, im)


def complex_vector(values):
    data = np.asarray(values, dtype=COMPLEX)
    if data.ndim != 1:
        raise LengthMismatch(f'expected a flat sequence, got shape {data.shape}')
    if not np.all(np.isfinite(data)):
        raise NonFinite('complex vector has non-finite entries')
    return data


def complex_matrix(rows, cols, data):
    flat = np.asarray(data, dtype=COMPLEX).reshape(-1)
    if flat.size != rows * cols:
        raise LengthMismatch(
            f'{rows}x{cols} matrix needs {rows * cols} entries, got {flat.size}')
    if not np.all(np.isfinite(flat)):
        raise NonFinite('complex matrix has non-finite entries')
    return flat.reshape(rows, cols)


def cmul(a, b):
    return complex(a) * complex(b)


def cinv(a):
    """Scaled reciprocal; stays finite wherever 1/a is representable."""
    a = complex(a)
    if a == 0:
        raise DivisionByZero('inverse of 0+0i')
    scale = max(abs(a.real), abs(a.imag))
    scaled = complex(a.real / scale, a.imag / scale)
    inverse = scaled.conjugate() / (scaled.real * scaled.real + scaled.imag * scaled.imag) / scale
    return complex_scalar(inverse.real, inverse.imag)


class Rng:
    """Seedable stream backed by numpy's PCG64 bit generator.

    PCG64 output for a given ``SeedSequence`` entropy is fixed by numpy's
    stream-compatibility policy, so a seed replays the same draws on every
    platform.
    """

    def __init__(self, seed, *keys):
        self.seed = int(seed)
        self.keys = tuple(int(key) for key in keys)
        sequence = np.random.SeedSequence([self.seed, *self.keys])
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def spawn(self, *keys):
        return Rng(self.seed, *self.keys, *keys)

    def normal(self, sigma, size=None):
        return self.generator.normal(0.0, sigma, size=size)

    def uniform(self, low, high, size=None):
        return self.generator.uniform(low, high, size=size)

    def permutation(self, n):
        return self.generator.permutation(n)

    def __repr__(self):
        return f'Rng(seed={self.seed}, keys={self.keys})'


def normal_complex(rng, sigma, size=None):
    """Draw re and im independently from N(0, sigma^2).

    Returns a ``complex`` when ``size`` is None, else a complex128 array.
    """
    if sigma < 0:
        raise ValueError('sigma must be non-negative')
    if size is None:
        re, im = rng.normal(sigma, size=2) if sigma > 0 else (0.0, 0.0)
        return complex(re, im)
    if sigma == 0:
        return np.zeros(size, dtype=COMPLEX)
    parts = rng.normal(sigma, size=(2, *np.atleast_1d(size)))
    return (parts[0] + 1j * parts[1]).astype(COMPLEX)
