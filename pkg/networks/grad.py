"""Loss, backward pass and a finite-difference gradient oracle.

Gradients are reported per real parameter component and packed as
``dL/d(re theta) + i dL/d(im theta)``. Because the output ``o`` is holomorphic
in every parameter, the packed gradient of ``theta`` is
``conj(do/dtheta) * (dL/dy + i dL/de)``.
"""
from dataclasses import dataclass

import numpy as np

from .cauchynet import _as_inputs, forward, forward_batch
from .exceptions import NonFinite, PoleEncountered
from .linalg import COMPLEX, REAL


@dataclass
class LossValue:
    total: float
    fit: float
    imag_penalty: float


@dataclass
class GradientSet:
    dB: np.ndarray
    dC: np.ndarray

    def as_list(self):
        return [self.dB, self.dC]

    def __add__(self, other):
        return GradientSet(self.dB + other.dB, self.dC + other.dC)

    def __mul__(self, factor):
        return GradientSet(self.dB * factor, self.dC * factor)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * -1.0

    def max_abs(self):
        return max(np.max(np.abs(g.view(REAL))) for g in self.as_list())


def _check_lambda(lam):
    if lam < 0:
        raise ValueError('lambda must be >= 0')


def loss(y, e, y_true, lam):
    _check_lambda(lam)
    fit = (y - y_true) ** 2
    imag_penalty = lam * e ** 2
    return LossValue(total=fit + imag_penalty, fit=fit, imag_penalty=imag_penalty)


def _finite(grads):
    for g in grads.as_list():
        if not np.all(np.isfinite(g)):
            raise NonFinite('gradient has non-finite entries')
    return grads


def _shifted(model, X):
    shifted = X[:, None, :] + model.B[None, :, :] + model.epsilon
    if np.any(shifted == 0):
        raise PoleEncountered('pole while re-deriving hidden partials')
    return shifted


def backward(model, fo, x, y_true, lam):
    """Real-component partials of the single-sample loss."""
    _check_lambda(lam)
    x = np.asarray(x, dtype=REAL).reshape(1, -1)
    dl_do = 2.0 * (fo.y - y_true) + 2j * lam * fo.e
    dC = np.conj(fo.hidden) * dl_do
    shifted = _shifted(model, x)[0]
    do_dB = -(model.C * fo.hidden)[:, None] / shifted
    dB = np.conj(do_dB) * dl_do
    return _finite(GradientSet(dB.astype(COMPLEX), dC.astype(COMPLEX)))


def batch_loss(model, X, y_true, lam):
    _check_lambda(lam)
    X = _as_inputs(model, X)
    y, e, _, _ = forward_batch(model, X)
    residual = y - np.asarray(y_true, dtype=REAL)
    fit = float(np.mean(residual ** 2))
    imag_penalty = float(lam * np.mean(e ** 2))
    return LossValue(total=fit + imag_penalty, fit=fit, imag_penalty=imag_penalty)


def batch_loss_and_gradients(model, X, y_true, lam):
    """Mean loss over the batch and its gradient."""
    _check_lambda(lam)
    X = _as_inputs(model, X)
    n = X.shape[0]
    y, e, _, hidden = forward_batch(model, X)
    residual = y - np.asarray(y_true, dtype=REAL)
    fit = float(np.mean(residual ** 2))
    imag_penalty = float(lam * np.mean(e ** 2))

    dl_do = (2.0 * residual + 2j * lam * e) / n
    dC = np.conj(hidden).T @ dl_do
    do_dB = -(model.C[None, :, None] * hidden[:, :, None]) / _shifted(model, X)
    dB = np.einsum('nkm,n->km', np.conj(do_dB), dl_do)
    grads = _finite(GradientSet(dB, dC))
    return LossValue(total=fit + imag_penalty, fit=fit, imag_penalty=imag_penalty), grads


def finite_difference_gradients(model, x, y_true, lam, step=1e-6):
    """Central differences of the total loss in every real and imaginary component."""
    if not step > 0:
        raise ValueError('finite-difference step must be > 0')
    x = np.asarray(x, dtype=REAL)
    if x.ndim <= 1:
        def total(perturbed):
            fo = forward(perturbed, x)
            return loss(fo.y, fo.e, y_true, lam).total
    else:
        def total(perturbed):
            return batch_loss(perturbed, x, y_true, lam).total

    perturbed = model.copy()
    packed = []
    for param in perturbed.parameters():
        grad = np.zeros_like(param)
        flat, out = param.reshape(-1), grad.reshape(-1)
        for index in range(flat.size):
            original = flat[index]
            partials = []
            for direction in (1.0, 1j):
                flat[index] = original + step * direction
                upper = total(perturbed)
                flat[index] = original - step * direction
                lower = total(perturbed)
                partials.append((upper - lower) / (2 * step))
            flat[index] = original
            out[index] = partials[0] + 1j * partials[1]
        packed.append(grad)
    return GradientSet(*packed)
