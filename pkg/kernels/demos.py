"""Registered holomorphic targets and the node-doubling convergence table."""
import numpy as np
import pandas as pd

from .quadrature import ellipse_mesh, evaluate_expansion, quadrature_expansion

HOLOMORPHIC_DEMOS = {
    'one': lambda z: np.ones_like(z),
    'square': lambda z: z ** 2,
    'exp': np.exp,
    'pole': lambda z: 1.0 / (2.0 - z),
}


def _inside(x, a, b, center):
    offset = np.asarray(x, dtype=complex) - complex(center)
    return (offset.real / a) ** 2 + (offset.imag / b) ** 2 < 1.0


def convergence_table(target, a=2.0, b=1.0, center=0j, node_counts=(16, 32, 64, 128),
                      interval=(-1.0, 1.0), grid=201):
    """Sup-norm error of the quadrature expansion over a real interval, per node count."""
    if target not in HOLOMORPHIC_DEMOS:
        raise KeyError(f'unknown demo target {target!r}; choose from {sorted(HOLOMORPHIC_DEMOS)}')
    f = HOLOMORPHIC_DEMOS[target]
    x = np.linspace(interval[0], interval[1], grid)
    if not np.all(_inside(x, a, b, center)):
        raise ValueError('evaluation interval must lie strictly inside the contour')
    exact = f(x.astype(complex))

    rows = []
    for nodes in node_counts:
        expansion = quadrature_expansion(f, ellipse_mesh(a, b, center, nodes))
        approx = evaluate_expansion(expansion, x.reshape(-1, 1))
        rows.append({'nodes': int(nodes), 'sup_error': float(np.max(np.abs(approx - exact)))})
    return pd.DataFrame(rows, columns=['nodes', 'sup_error'])
