"""Imaginary-penalty ablation and hyperparameter sensitivity grids.

Cells run in a thread pool; each cell owns its model, and result rows are
collected in submission order so tables do not depend on scheduling.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import pandas as pd
from django.conf import settings

from networks.exceptions import CauchyNetError, SchemaError
from networks.optim import train

from .metrics import metric_mse
from .runner import build_dataset, build_model, unscaled_predictions

logger = logging.getLogger(__name__)

ABLATION_COLUMNS = ['lambda', 'seed', 'epoch', 'test_mse']
GRID_COLUMNS = ['h', 'n', 'lr', 'wd', 'test_mse', 'note']


def worker_count(threads=None):
    cap = settings.CAUCHYNET['MAX_THREADS']
    if threads is None:
        return cap
    if threads < 1:
        raise SchemaError('--threads must be >= 1')
    return min(threads, cap)


def _ablation_cell(spec, prepared, lam, snapshot_every):
    model = build_model(spec, prepared.dataset.m)
    test = prepared.raw.test
    rows = []

    def monitor(epoch, current):
        if epoch % snapshot_every == 0 or epoch == spec.train.epochs:
            preds = unscaled_predictions(current, test.X, prepared.scaler)
            rows.append({'lambda': lam, 'seed': spec.seed, 'epoch': epoch,
                         'test_mse': metric_mse(preds, test.y)})

    train(model, prepared.dataset, spec.with_train(lam=lam).train, monitor=monitor)
    return rows


def run_lambda_ablation(spec, lambdas, snapshot_every=1, threads=None):
    """One train/eval per lambda on a shared dataset, init and seed.

    Returns a long table ``lambda,seed,epoch,test_mse`` with a row per lambda
    at every ``snapshot_every``-th epoch and at the final epoch.
    """
    lambdas = list(lambdas)
    if not lambdas:
        raise SchemaError('lambda list must not be empty', {'lambdas': lambdas})
    if any(not (math.isfinite(lam) and lam >= 0) for lam in lambdas):
        raise SchemaError('lambdas must be finite and >= 0', {'lambdas': lambdas})
    if snapshot_every < 1:
        raise SchemaError('snapshot_every must be >= 1')

    prepared = build_dataset(spec)
    if not len(prepared.raw.test):
        raise SchemaError('lambda ablation needs a non-empty test split')
    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        futures = [pool.submit(_ablation_cell, spec, prepared, lam, snapshot_every) for lam in lambdas]
        rows = [row for future in futures for row in future.result()]
    logger.info('%s: lambda ablation over %s finished', spec.name, lambdas)
    return pd.DataFrame(rows, columns=ABLATION_COLUMNS)


def _grid_cell(spec, h, n, lr, wd):
    cell = spec.with_generator(n=n).with_model(h=h).with_train(lr0=lr, weight_decay=wd)
    row = {'h': h, 'n': n, 'lr': lr, 'wd': wd, 'test_mse': math.nan, 'note': ''}
    try:
        prepared = build_dataset(cell)
        model = build_model(cell, prepared.dataset.m)
        train(model, prepared.dataset, cell.train)
        preds = unscaled_predictions(model, prepared.raw.test.X, prepared.scaler)
        row['test_mse'] = metric_mse(preds, prepared.raw.test.y)
    except (CauchyNetError, ValueError, ArithmeticError) as exc:
        logger.warning('grid cell h=%s n=%s lr=%s wd=%s failed: %s', h, n, lr, wd, exc)
        row['note'] = f'{type(exc).__name__}: {exc}'
    return row


def run_sensitivity_grid(spec, hidden, data_sizes, lrs, wds, threads=None):
    """Cross product of the four axes; failing cells become NaN rows with a note."""
    axes = {'hidden': hidden, 'sizes': data_sizes, 'lrs': lrs, 'wds': wds}
    empty = [name for name, values in axes.items() if not len(values)]
    if empty:
        raise SchemaError(f'sweep axes must not be empty: {", ".join(empty)}', {'empty': empty})

    cells = list(itertools.product(hidden, data_sizes, lrs, wds))
    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        futures = [pool.submit(_grid_cell, spec, *cell) for cell in cells]
        rows = [future.result() for future in futures]
    frame = pd.DataFrame(rows, columns=GRID_COLUMNS)
    failed = int(frame['test_mse'].isna().sum())
    logger.info('%s: %d grid cells, %d failed', spec.name, len(frame), failed)
    return frame


def run_sweep_tables(spec, sweep=None, threads=None):
    """The two sensitivity heat maps: hidden size x data size, then lr x weight decay.

    Axes not being swept stay at the spec's own values.
    """
    sweep = sweep or spec.sweep
    if sweep is None:
        raise SchemaError('no sweep axes configured', {'sweep': None})
    return {
        'grid_capacity': run_sensitivity_grid(
            spec, sweep.hidden, sweep.sizes, [spec.train.lr0], [spec.train.weight_decay], threads),
        'grid_optimizer': run_sensitivity_grid(
            spec, [spec.model.h], [spec.generator.n], sweep.lrs, sweep.wds, threads),
    }


def all_cells_failed(frame):
    return bool(len(frame)) and bool(frame['test_mse'].isna().all())
