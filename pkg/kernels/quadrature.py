"""Cauchy kernels, contour meshes and discretised Cauchy-integral expansions.

A ``KernelExpansion`` is the finite sum ``sum_k theta_k K(xi_k, x)`` with
``K(xi, x) = prod_i 1 / (xi_i - x_i)``. ``quadrature_expansion`` builds the
weights from boundary values with the trapezoidal rule on parametrised closed
contours (tensor products of contours when N > 1), which is spectrally
accurate for analytic periodic integrands.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from django.conf import settings

from networks.cauchynet import CauchyNetModel
from networks.exceptions import LengthMismatch, NonFinite, PoleEncountered, SingularSystem
from networks.linalg import COMPLEX

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundaryMesh:
    nodes: tuple
    increments: tuple

    def __post_init__(self):
        if len(self.nodes) != len(self.increments) or not self.nodes:
            raise LengthMismatch('mesh needs matching node and increment lists per dimension')
        for zeta, dzeta in zip(self.nodes, self.increments):
            if len(zeta) < 4 or len(zeta) != len(dzeta):
                raise ValueError('each contour needs at least 4 nodes with one increment each')
            closure = abs(np.sum(dzeta))
            if closure > 1e-12 * max(1.0, np.sum(np.abs(dzeta))):
                raise ValueError(f'contour is not closed: increments sum to {closure:.3g}')

    @property
    def dim(self):
        return len(self.nodes)


@dataclass(frozen=True)
class KernelExpansion:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=COMPLEX)
        weights = np.asarray(self.weights, dtype=COMPLEX).reshape(-1)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.shape[0] != weights.shape[0]:
            raise LengthMismatch(
                f'{points.shape[0]} kernel points but {weights.shape[0]} weights')
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'weights', weights)

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.weights.shape[0]


def cauchy_kernel(xi, x):
    diff = np.atleast_1d(np.asarray(xi, dtype=COMPLEX)) - np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(diff == 0):
        raise PoleEncountered('kernel point coincides with the evaluation point')
    return complex(np.prod(1.0 / diff))


def ellipse_mesh(a, b, center=0j, nodes=64):
    """Nodes ``center + a cos t + i b sin t`` at ``t_j = 2 pi j / nodes``."""
    if not (a > 0 and b > 0):
        raise ValueError('ellipse semi-axes must be positive')
    if nodes < 4:
        raise ValueError('an ellipse mesh needs at least 4 nodes')
    t = 2 * np.pi * np.arange(nodes) / nodes
    zeta = complex(center) + a * np.cos(t) + 1j * b * np.sin(t)
    dzeta = (-a * np.sin(t) + 1j * b * np.cos(t)) * (2 * np.pi / nodes)
    return BoundaryMesh(nodes=(zeta,), increments=(dzeta,))


def circle_mesh(radius, center=0j, nodes=64):
    return ellipse_mesh(radius, radius, center, nodes)


def tensor_mesh(*meshes):
    return BoundaryMesh(
        nodes=tuple(zeta for mesh in meshes for zeta in mesh.nodes),
        increments=tuple(dzeta for mesh in meshes for dzeta in mesh.increments),
    )


def quadrature_expansion(f_boundary, mesh):
    """``theta_k = f(zeta_k) * prod dzeta_k / (2 pi i)^N`` over the tensor grid of nodes.

    ``f_boundary`` is called with one complex array per dimension.
    """
    grids = np.meshgrid(*mesh.nodes, indexing='ij')
    steps = np.meshgrid(*mesh.increments, indexing='ij')
    points = np.stack([g.reshape(-1) for g in grids], axis=1)
    measure = np.prod(np.stack([s.reshape(-1) for s in steps], axis=1), axis=1)
    values = np.asarray(f_boundary(*points.T), dtype=COMPLEX) * np.ones(len(points))
    if not np.all(np.isfinite(values)):
        raise NonFinite('boundary function is not finite on the contour')
    weights = values * measure / (2j * np.pi) ** mesh.dim
    return KernelExpansion(points, weights)


def kernel_matrix(points, X):
    """Matrix ``A[j, k] = K(xi_k, x_j)`` for inputs X of shape (n, N)."""
    diff = points[None, :, :] - X[:, None, :]
    if np.any(diff == 0):
        raise PoleEncountered('an evaluation point lies on a kernel point')
    return np.prod(1.0 / diff, axis=2)


def _inputs(expansion, x):
    X = np.asarray(x, dtype=float)
    single = X.ndim <= 1 and X.size == expansion.dim
    X = X.reshape(-1, expansion.dim)
    return X, single


def evaluate_expansion(expansion, x):
    """``sum_k theta_k K(xi_k, x)``; a scalar for one point, an array for a batch."""
    X, single = _inputs(expansion, x)
    if len(expansion) == 0:
        values = np.zeros(len(X), dtype=COMPLEX)
    else:
        values = kernel_matrix(expansion.points, X) @ expansion.weights
    return complex(values[0]) if single else values


def fit_expansion_least_squares(X, values, points, tau=None):
    """Weights minimising ``|A theta - f|^2 + tau |theta|^2`` via the normal equations."""
    tau = settings.CAUCHYNET['RIDGE_TAU'] if tau is None else tau
    points = np.asarray(points, dtype=COMPLEX)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    X = np.asarray(X, dtype=float).reshape(-1, points.shape[1])
    values = np.asarray(values, dtype=COMPLEX).reshape(-1)
    if len(X) < 1 or len(points) < 1:
        raise ValueError('least-squares fit needs at least one sample and one point')
    if len(X) != len(values):
        raise LengthMismatch(f'{len(X)} samples but {len(values)} values')

    A = kernel_matrix(points, X)
    gram = A.conj().T @ A + tau * np.eye(len(points))
    rhs = A.conj().T @ values
    try:
        weights = scipy.linalg.solve(gram, rhs, assume_a='her')
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularSystem(f'regularised normal equations are singular (tau={tau})') from exc
    if not np.all(np.isfinite(weights)):
        raise SingularSystem(f'normal equations produced non-finite weights (tau={tau})')
    logger.debug('fitted %d kernel weights to %d samples', len(points), len(X))
    return KernelExpansion(points, weights)


def expansion_to_model(expansion, epsilon=0.0):
    """A CauchyNet whose forward pass equals ``evaluate_expansion``.

    The network computes ``prod (x_i + B_i + eps)^-1``, so ``B = -xi - eps``
    and the sign ``(-1)^N`` moves into ``C``.
    """
    return CauchyNetModel(
        B=-expansion.points - epsilon,
        C=(-1) ** expansion.dim * expansion.weights,
        epsilon=epsilon,
    )
