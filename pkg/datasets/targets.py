"""Synthetic target functions and a turning-point finder.

All targets accept scalars or numpy arrays and are evaluated in float64.
"""
import numpy as np
from scipy.optimize import brentq


def target_intro_spike(x):
    """Smooth oscillation plus a sharp rational spike at x = 0.5."""
    x = np.asarray(x, dtype=float)
    return np.sin(3 * x) + 4.0 / ((x - 0.5) ** 2 + 0.01)


def target_exp1(x):
    """Rational peak, Gaussian dip and a sign-switched oscillation; sign(0) = 0."""
    x = np.asarray(x, dtype=float)
    return (
        1.0 / ((x + 0.6) ** 2 + 0.005)
        - 40.0 * np.exp(-2.0 * (x + 0.4) ** 2)
        + 50.0 * np.sign(x) * np.abs(np.sin(3 * x) + 0.8) ** 1.5 * np.sin(10 * x)
    )


def target_exp2_gap(x):
    x = np.asarray(x, dtype=float)
    return (
        np.sin(2 * x - 4)
        + 0.5 * np.cos(5 * x - 5)
        + 0.05 / ((x - 1) ** 2 + 0.1)
        + 0.01 / ((x + 0.5) ** 2 + 0.05)
        - 0.01 * (x ** 2 - x ** 3)
    )


def target_2d_missing_disk(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return 3 - x ** 2 + x * y - y ** 2 - 1.0 / (5 + (x - 1) ** 2)


def target_2d_surface(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return x ** 2 - x * y + 3 * y + y ** 2 + 1.0 / (5 + x ** 2)


# name -> (function, input dimension, default domain per dimension)
TARGETS = {
    'intro_spike': (target_intro_spike, 1, [(-1.0, 1.0)]),
    'exp1': (target_exp1, 1, [(-1.0, 1.0)]),
    'exp2_gap': (target_exp2_gap, 1, [(-2.0, 2.0)]),
    '2d_missing_disk': (target_2d_missing_disk, 2, [(-0.8, 0.8), (-0.8, 0.8)]),
    '2d_surface': (target_2d_surface, 2, [(-1.5, 1.5), (-1.5, 1.5)]),
}


def evaluate_target(name, X):
    """Evaluate a registered target on an (n, m) input array."""
    function, dim, _ = TARGETS[name]
    X = np.asarray(X, dtype=float).reshape(-1, dim)
    return function(*X.T)


def find_turning_points(f, domain, grid=2000, tol=1e-8):
    """Abscissae where the numerical derivative of ``f`` changes sign.

    Sign changes of a central-difference derivative on a dense grid are
    bracketed, then refined with Brent's method on the same derivative.
    """
    if grid < 100:
        raise ValueError('grid must be >= 100')
    lo, hi = domain
    step = (hi - lo) / grid * 1e-3

    def derivative(x):
        return (f(x + step) - f(x - step)) / (2 * step)

    xs = np.linspace(lo, hi, grid + 1)
    ds = np.array([float(derivative(x)) for x in xs])
    if np.all(np.abs(ds) <= 1e-12):
        return []

    # a node with an exactly zero derivative inherits the previous sign
    signs = np.sign(ds)
    for i in range(1, signs.size):
        if signs[i] == 0:
            signs[i] = signs[i - 1]

    points = []
    for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        points.append(brentq(derivative, xs[i], xs[i + 1], xtol=tol))
    return points
