"""Builds datasets and models from an ``ExperimentSpec``, trains, evaluates and writes run files.

Every random draw is keyed off the spec's seed: inputs, splits, CauchyNet
init and baseline init use separate ``Rng`` streams, and minibatch shuffles
are derived inside ``networks.optim.train``. Two runs of the same spec write
byte-identical ``trainlog.csv``, ``predictions.csv`` and ``checkpoint.json``.
"""
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from django.conf import settings

from datasets.forecasting import build_trend_dataset
from datasets.io import dataset_frame, load_series_csv, write_decomposition_csv
from datasets.scaling import scaler_apply, scaler_fit, scaler_invert
from datasets.splits import (MissingMask, SplitDataset, evenly_spaced, make_masked_split,
                             make_split, uniform_box)
from datasets.targets import TARGETS, evaluate_target, find_turning_points
from networks.baseline import init_kaiming_mlp, mlp_parameter_count
from networks.cauchynet import (INITIALIZERS, PARAMETER_COUNT_NOTE, forward_batch,
                                mean_abs_imag, parameter_count)
from networks.exceptions import LengthMismatch, TrainingDiverged
from networks.optim import train
from networks.serializers import load_checkpoint, save_checkpoint
from networks.linalg import Rng

from .metrics import METRICS_COLUMNS, MetricsReport, metric_mae, metric_mse
from .records import finish_run, start_run
from .reports import RunWriter, plot_loss_curves, plot_predictions

logger = logging.getLogger(__name__)

# Rng stream keys under the experiment seed
SAMPLING_KEY = 1
SPLIT_KEY = 2
INIT_KEY = 3
BASELINE_KEY = 4
# networks.optim.SHUFFLE_KEY = 5 drives minibatch order.

SEEDS_COLUMNS = ['seed', 'model', 'val_mse', 'test_mse', 'test_mae']


@dataclass
class PreparedData:
    dataset: SplitDataset
    raw: SplitDataset
    scaler: object
    mask: Optional[MissingMask] = None
    decomposition: Optional[object] = None


@dataclass
class RunResult:
    spec: object
    output_dir: Path
    status: str
    reports: list
    model: object
    log: object
    baseline: Optional[object] = None
    baseline_log: Optional[object] = None
    imputation: dict = field(default_factory=dict)
    manifest: dict = field(default_factory=dict)

    def report(self, model='cauchynet', split='test'):
        for report in self.reports:
            if report.model == model and report.split == split:
                return report
        raise KeyError((model, split))


def sample_inputs(generator, rng):
    domain = generator.domain
    if generator.sampling == 'uniform':
        return uniform_box(domain, generator.n, rng)
    if len(domain) == 1:
        return evenly_spaced(domain[0], generator.n)
    per_axis = max(2, int(round(generator.n ** (1.0 / len(domain)))))
    axes = np.meshgrid(*[np.linspace(lo, hi, per_axis) for lo, hi in domain], indexing='ij')
    return np.column_stack([axis.reshape(-1) for axis in axes])


def build_mask(spec):
    config = spec.mask
    if config is None:
        return None
    if config.kind == 'turning_points':
        function = TARGETS[spec.generator.target][0]
        centers = find_turning_points(function, spec.generator.domain[0])
        if not centers:
            raise ValueError(f'target {spec.generator.target!r} has no turning points to mask')
        return MissingMask('intervals', centers=tuple(centers), half_width=config.half_width)
    if config.kind == 'intervals':
        return MissingMask('intervals', centers=config.centers, half_width=config.half_width)
    return MissingMask('disk', center=config.center, radius=config.radius)


def build_dataset(spec):
    """Scaled training data plus its unscaled twin, the scaler and any mask."""
    generator = spec.generator
    provenance = {'generator': generator.target, 'seed': spec.seed}

    if generator.from_csv:
        series = load_series_csv(generator.path, generator.column)
        dataset, scaler, decomposition = build_trend_dataset(
            series, generator.period, generator.window, generator.fractions,
            feature_range=spec.scaler_range, provenance=provenance,
        )
        raw = dataset.with_targets(lambda y: scaler_invert(scaler, y))
        return PreparedData(dataset, raw, scaler, decomposition=decomposition)

    X = sample_inputs(generator, Rng(spec.seed, SAMPLING_KEY))
    y = evaluate_target(generator.target, X)
    split_rng = Rng(spec.seed, SPLIT_KEY)
    mask = build_mask(spec)
    if mask is not None:
        raw = make_masked_split(X, y, mask, split_rng, spec.mask.visible_fractions, provenance)
    else:
        raw = make_split(X, y, generator.fractions, split_rng, generator.split, provenance)
    scaler = scaler_fit(raw.train.y, spec.scaler_range)
    dataset = raw.with_targets(lambda values: scaler_apply(scaler, values))
    return PreparedData(dataset, raw, scaler, mask=mask)


def build_model(spec, m):
    config = spec.model
    rng = Rng(spec.seed, INIT_KEY)
    if config.init == 'elliptical':
        return INITIALIZERS['elliptical'](
            config.h, m, rng, config.semi_major, config.semi_minor, epsilon=config.epsilon)
    return INITIALIZERS[config.init](config.h, m, rng, epsilon=config.epsilon)


def build_baseline(spec, m):
    return init_kaiming_mlp(spec.model.h, m, Rng(spec.seed, BASELINE_KEY))


def baseline_train_config(spec):
    return spec.with_train(
        lam=0.0,
        lr0=spec.baseline_lr0 if spec.baseline_lr0 is not None else spec.train.lr0,
    ).train


def parameter_counts(model):
    if model.model_type == 'cauchynet':
        counts = parameter_count(model)
        return counts.complex_params, counts.real_params
    return None, mlp_parameter_count(model)


def unscaled_predictions(model, X, scaler):
    return scaler_invert(scaler, model.predict(X))


def predictions_frame(model, prepared):
    """``split,x0[,x1],y_true,y_pred,e_pred,abs_err`` in unscaled target units."""
    frames = []
    for name, split in prepared.raw.splits():
        frame = pd.DataFrame(split.X, columns=[f'x{i}' for i in range(prepared.raw.m)])
        frame.insert(0, 'split', name)
        frame['y_true'] = split.y
        if len(split):
            frame['y_pred'] = unscaled_predictions(model, split.X, prepared.scaler)
            if model.model_type == 'cauchynet':
                frame['e_pred'] = forward_batch(model, split.X)[1]
            else:
                frame['e_pred'] = 0.0
        else:
            frame['y_pred'] = frame['e_pred'] = pd.Series(dtype=float)
        frame['abs_err'] = (frame['y_pred'] - frame['y_true']).abs()
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def evaluate_model(model, prepared, split='test', wall_ms=None, label=None):
    data = getattr(prepared.raw, split)
    complex_params, real_params = parameter_counts(model)
    cauchy = model.model_type == 'cauchynet'
    return MetricsReport.from_predictions(
        label or model.model_type, split,
        unscaled_predictions(model, data.X, prepared.scaler), data.y,
        complex_params, real_params, wall_ms=wall_ms,
        mean_abs_imag=mean_abs_imag(model, data.X) if cauchy else None,
        note=PARAMETER_COUNT_NOTE if cauchy else '',
    )


def _reports(model, prepared, wall_ms, label=None):
    return [
        evaluate_model(model, prepared, split, wall_ms, label)
        for split in ('val', 'test') if len(getattr(prepared.raw, split))
    ]


def _fit(model, prepared, config, writer, prefix=''):
    started = time.perf_counter()
    try:
        log = train(model, prepared.dataset, config)
    except TrainingDiverged as exc:
        writer.write_frame(f'{prefix}trainlog.csv', exc.log.to_frame(
            wall_time=settings.CAUCHYNET['RECORD_WALL_TIME']))
        raise
    wall_ms = (time.perf_counter() - started) * 1000.0
    writer.write_frame(f'{prefix}trainlog.csv', log.to_frame(
        wall_time=settings.CAUCHYNET['RECORD_WALL_TIME']))
    return log, wall_ms


def imputation_summary(model, prepared, writer):
    """Hidden-region errors, ``signed_error.csv`` and the constant-mean comparison."""
    hidden = prepared.raw.test
    preds = unscaled_predictions(model, hidden.X, prepared.scaler)
    frame = pd.DataFrame(hidden.X, columns=[f'x{i}' for i in range(prepared.raw.m)])
    frame['y_true'] = hidden.y
    frame['y_pred'] = preds
    frame['signed_error'] = preds - hidden.y
    writer.write_frame('signed_error.csv', frame)

    mask = prepared.mask
    return {
        'hidden_points': len(hidden),
        'masked_zones': len(mask.centers) if mask.kind == 'intervals' else 1,
        'hidden_mae': metric_mae(preds, hidden.y),
        'hidden_mse': metric_mse(preds, hidden.y),
        'constant_mean_mae': _constant_mean_report(prepared).mae,
        'signed_error_min': float(frame['signed_error'].min()),
        'signed_error_max': float(frame['signed_error'].max()),
    }


def _constant_mean_report(prepared):
    hidden = prepared.raw.test
    constant = np.full(len(hidden), float(np.mean(prepared.raw.train.y)))
    return MetricsReport.from_predictions(
        'constant_mean', 'test', constant, hidden.y, None, 1,
        note='mean of the training targets')


def _execute(spec, writer, plot):
    prepared = build_dataset(spec)
    logger.info('%s: %s', spec.name, {name: len(split) for name, split in prepared.raw.splits()})
    writer.write_frame('dataset.csv', dataset_frame(prepared.raw))
    if prepared.decomposition is not None:
        with writer.atomic('decomposition.csv') as tmp:
            write_decomposition_csv(prepared.decomposition, tmp)

    model = build_model(spec, prepared.dataset.m)
    result = RunResult(spec=spec, output_dir=writer.output_dir, status='running',
                       reports=[], model=model, log=None)
    result.log, wall_ms = _fit(model, prepared, spec.train, writer)
    with writer.atomic('checkpoint.json') as tmp:
        save_checkpoint(model, prepared.scaler, tmp, seed=spec.seed)
    predictions = predictions_frame(model, prepared)
    writer.write_frame('predictions.csv', predictions)
    result.reports.extend(_reports(model, prepared, wall_ms))

    if prepared.mask is not None:
        result.imputation = imputation_summary(model, prepared, writer)
        result.reports.append(_constant_mean_report(prepared))

    logs = {'cauchynet': result.log}
    if spec.compare_baseline:
        baseline = build_baseline(spec, prepared.dataset.m)
        result.baseline = baseline
        result.baseline_log, baseline_ms = _fit(
            baseline, prepared, baseline_train_config(spec), writer, prefix='baseline_')
        with writer.atomic('baseline_checkpoint.json') as tmp:
            save_checkpoint(baseline, prepared.scaler, tmp, seed=spec.seed)
        writer.write_frame('baseline_predictions.csv', predictions_frame(baseline, prepared))
        result.reports.extend(_reports(baseline, prepared, baseline_ms))
        logs['relu_mlp'] = result.baseline_log

    writer.write_frame('metrics.csv', pd.DataFrame(
        [report.as_row() for report in result.reports], columns=METRICS_COLUMNS))
    if plot:
        plot_loss_curves(writer, logs)
        plot_predictions(writer, predictions)
    return result


def default_output_dir(spec):
    return Path(spec.output_dir or Path(settings.CAUCHYNET['OUTPUT_ROOT']) / spec.name)


def run_experiment(spec, output_dir=None, command='train', plot=False, record=True):
    """Train and evaluate one spec; returns a ``RunResult`` after writing the run directory.

    Failures still write ``manifest.json`` (status ``partial`` after a divergence,
    ``failed`` otherwise) before the exception propagates.
    """
    writer = RunWriter(output_dir or default_output_dir(spec))
    details = {'name': spec.name, 'command': command, 'seed': spec.seed, 'spec': spec.document}
    run = start_run(spec.name, command, spec.seed, spec.document, writer.output_dir, record)
    try:
        result = _execute(spec, writer, plot)
    except TrainingDiverged as exc:
        manifest = writer.write_manifest('partial', error=str(exc), **details)
        finish_run(run, 'partial', artifacts=manifest['files'], error=str(exc))
        raise
    except Exception as exc:
        manifest = writer.write_manifest('failed', error=f'{type(exc).__name__}: {exc}', **details)
        finish_run(run, 'failed', artifacts=manifest['files'], error=str(exc))
        raise

    result.status = 'complete'
    metrics = [report.as_row() for report in result.reports]
    result.manifest = writer.write_manifest(
        'complete', error=None, metrics=metrics, imputation=result.imputation or None, **details)
    finish_run(run, 'complete', metrics=metrics, artifacts=result.manifest['files'])
    for report in result.reports:
        if report.model == 'cauchynet' and report.split == 'test':
            logger.info('%s: test mse=%.6g mae=%.6g', spec.name, report.mse, report.mae)
    return result


def run_seeds(spec, seeds, output_dir=None, command='train', plot=False, record=True):
    """One sub-run per seed under ``seed_<n>/`` plus a ``seeds.csv`` summary."""
    if not seeds:
        raise ValueError('seed list must not be empty')
    root = Path(output_dir or default_output_dir(spec))
    writer = RunWriter(root)
    rows, results = [], []
    for seed in seeds:
        result = run_experiment(spec.with_train(seed=seed), root / f'seed_{seed}',
                                command=command, plot=plot, record=record)
        results.append(result)
        for model in ('cauchynet', 'relu_mlp'):
            reports = {r.split: r for r in result.reports if r.model == model}
            if 'test' not in reports:
                continue
            rows.append({
                'seed': seed,
                'model': model,
                'val_mse': reports['val'].mse if 'val' in reports else None,
                'test_mse': reports['test'].mse,
                'test_mae': reports['test'].mae,
            })
    writer.write_frame('seeds.csv', pd.DataFrame(rows, columns=SEEDS_COLUMNS))
    return results


def evaluate_checkpoint(spec, checkpoint_path, split='test', output_dir=None):
    """Score a saved model on one split of the spec's (re-generated) dataset."""
    model, scaler = load_checkpoint(checkpoint_path)
    prepared = build_dataset(spec)
    if scaler is not None:
        prepared.scaler = scaler
    if model.m != prepared.raw.m:
        raise LengthMismatch(f'checkpoint expects {model.m} inputs, dataset has {prepared.raw.m}')
    report = evaluate_model(model, prepared, split)
    if output_dir is not None:
        writer = RunWriter(output_dir)
        frame = predictions_frame(model, prepared)
        writer.write_frame('evaluation_predictions.csv', frame[frame['split'] == split])
        writer.write_frame('evaluation.csv', pd.DataFrame([report.as_row()], columns=METRICS_COLUMNS))
    return report
