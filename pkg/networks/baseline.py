"""Single-hidden-layer ReLU MLP used as the real-valued comparison model."""
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import LengthMismatch
from .grad import LossValue
from .linalg import REAL


@dataclass
class MlpModel:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    model_type = 'relu_mlp'

    def __post_init__(self):
        self.W1 = np.array(self.W1, dtype=REAL, ndmin=2)
        self.b1 = np.array(self.b1, dtype=REAL).reshape(-1)
        self.W2 = np.array(self.W2, dtype=REAL).reshape(-1)
        self.b2 = np.array(self.b2, dtype=REAL).reshape(())
        h = self.W1.shape[0]
        if self.b1.shape != (h,) or self.W2.shape != (h,):
            raise LengthMismatch(
                f'inconsistent MLP shapes W1={self.W1.shape} b1={self.b1.shape} W2={self.W2.shape}')

    @property
    def h(self):
        return self.W1.shape[0]

    @property
    def m(self):
        return self.W1.shape[1]

    def parameters(self):
        return [self.W1, self.b1, self.W2, self.b2]

    def copy(self):
        return MlpModel(self.W1.copy(), self.b1.copy(), self.W2.copy(), self.b2.copy())

    def predict(self, X):
        return mlp_forward_batch(self, X)

    def loss_and_gradients(self, X, y_true, lam=0.0):
        return mlp_loss_and_gradients(self, X, y_true)

    def evaluate(self, X, y_true, lam=0.0):
        mse = float(np.mean((mlp_forward_batch(self, X) - np.asarray(y_true, dtype=REAL)) ** 2))
        return LossValue(total=mse, fit=mse, imag_penalty=0.0)


@dataclass
class MlpGradients:
    dW1: np.ndarray
    db1: np.ndarray
    dW2: np.ndarray
    db2: np.ndarray

    def as_list(self):
        return [self.dW1, self.db1, self.dW2, self.db2]


def init_kaiming_mlp(h, m, rng):
    W1 = rng.normal(math.sqrt(2.0 / m), size=(h, m))
    W2 = rng.normal(math.sqrt(2.0 / h), size=h)
    return MlpModel(W1, np.zeros(h), W2, 0.0)


def mlp_parameter_count(model):
    return model.h * (model.m + 2) + 1


def _inputs(model, X):
    X = np.asarray(X, dtype=REAL)
    if X.ndim == 1:
        X = X.reshape(-1, model.m)
    if X.shape[1] != model.m:
        raise LengthMismatch(f'model expects {model.m} inputs, got {X.shape[1]}')
    return X


def mlp_forward_batch(model, X):
    X = _inputs(model, X)
    return np.maximum(X @ model.W1.T + model.b1, 0.0) @ model.W2 + model.b2


def mlp_forward(model, x):
    return float(mlp_forward_batch(model, np.asarray(x, dtype=REAL).reshape(1, -1))[0])


def mlp_loss_and_gradients(model, X, y_true):
    """Mean squared error over the batch and its exact gradient.

    The ReLU subgradient at zero is taken as zero.
    """
    X = _inputs(model, X)
    n = X.shape[0]
    pre = X @ model.W1.T + model.b1
    active = pre > 0
    hidden = np.where(active, pre, 0.0)
    residual = hidden @ model.W2 + model.b2 - np.asarray(y_true, dtype=REAL)
    mse = float(np.mean(residual ** 2))

    dy = 2.0 * residual / n
    dpre = np.outer(dy, model.W2) * active
    grads = MlpGradients(
        dW1=dpre.T @ X,
        db1=dpre.sum(axis=0),
        dW2=hidden.T @ dy,
        db2=np.array(dy.sum()),
    )
    return LossValue(total=mse, fit=mse, imag_penalty=0.0), grads


def mlp_backward(model, x, y_true):
    return mlp_loss_and_gradients(model, np.asarray(x, dtype=REAL).reshape(1, -1), y_true)[1]


def mlp_finite_difference(model, x, y_true, step=1e-6):
    if not step > 0:
        raise ValueError('finite-difference step must be > 0')
    x = np.asarray(x, dtype=REAL).reshape(1, -1)
    perturbed = model.copy()
    packed = []
    for param in perturbed.parameters():
        grad = np.zeros_like(param)
        flat, out = param.reshape(-1), grad.reshape(-1)
        for index in range(flat.size):
            original = flat[index]
            flat[index] = original + step
            upper = (mlp_forward_batch(perturbed, x)[0] - y_true) ** 2
            flat[index] = original - step
            lower = (mlp_forward_batch(perturbed, x)[0] - y_true) ** 2
            flat[index] = original
            out[index] = (upper - lower) / (2 * step)
        packed.append(grad)
    return MlpGradients(*packed)
