import math
import os
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock, skipUnless

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings, tag
from rest_framework import status
from rest_framework.test import APITestCase

from kernels.serializers import load_expansion
from networks.exceptions import LengthMismatch, PoleEncountered, SchemaError, TrainingDiverged
from networks.optim import TrainLog

from .config import apply_overrides, apply_seed_env, build_spec, load_config_file, resolve_spec
from .metrics import METRICS_COLUMNS, MetricsReport, metric_mae, metric_mse
from .models import ExperimentRun, RunArtifact
from .presets import preset_document, preset_names
from .records import finish_run, start_run
from .reports import RunWriter, read_manifest, sha256_file
from .runner import build_dataset, evaluate_checkpoint, run_experiment, run_seeds
from .specs import SweepConfig
from .sweeps import (ABLATION_COLUMNS, GRID_COLUMNS, all_cells_failed, run_lambda_ablation,
                     run_sensitivity_grid, run_sweep_tables, worker_count)

FAST = ('train.epochs=2', 'model.h=8')


def spec_for(preset, *overrides, environ=None):
    return resolve_spec(preset=preset, overrides=list(overrides), environ=environ or {})


def write_series(path, n=48, column='value'):
    t = np.arange(n)
    values = (20 + 0.5 * t) * (1 + 0.1 * np.cos(2 * np.pi * t / 12))
    pd.DataFrame({'t': t, column: values}).to_csv(path, index=False)
    return path


class TemporaryOutputMixin:
    """A scratch OUTPUT_ROOT per test."""

    def setUp(self):
        super().setUp()
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.tmp = Path(tmp.name)
        patcher = override_settings(CAUCHYNET=dict(settings.CAUCHYNET, OUTPUT_ROOT=self.tmp / 'runs'))
        patcher.enable()
        self.addCleanup(patcher.disable)


class MetricsTestCase(SimpleTestCase):
    def test_examples(self):
        self.assertEqual((metric_mse([1, 2], [1, 2]), metric_mae([1, 2], [1, 2])), (0.0, 0.0))
        self.assertEqual((metric_mse([1, 3], [0, 0]), metric_mae([1, 3], [0, 0])), (5.0, 2.0))
        self.assertEqual((metric_mse([2.5], [2.0]), metric_mae([2.5], [2.0])), (0.25, 0.5))

    def test_length_mismatch(self):
        with self.assertRaises(LengthMismatch):
            metric_mse([1, 2], [1])
        with self.assertRaises(LengthMismatch):
            metric_mae([], [])

    def test_report_row(self):
        report = MetricsReport.from_predictions('cauchynet', 'test', [1, 3], [0, 0], 256, 512, wall_ms=12.5)
        self.assertEqual(report.abs_errors.tolist(), [1.0, 3.0])
        row = report.as_row()
        self.assertEqual(list(row), METRICS_COLUMNS)
        self.assertEqual(row['wall_ms'], 12.5)
        self.assertIsNone(row['mean_abs_imag'])
        self.assertEqual((row['complex_params'], row['real_params']), (256, 512))

    def test_squared_mae_never_exceeds_mse(self):
        rng = np.random.default_rng(3)
        for n in (1, 2, 7, 50, 400):
            preds = rng.normal(scale=10.0, size=n)
            truths = rng.standard_cauchy(size=n)
            report = MetricsReport.from_predictions('relu_mlp', 'test', preds, truths, None, 1)
            self.assertLessEqual(report.mae ** 2, report.mse * (1 + 1e-12))


class ConfigTestCase(SimpleTestCase):
    def test_presets_build(self):
        for name in preset_names():
            if name == 'exp4-csv':
                continue
            spec = spec_for(name)
            self.assertEqual(spec.name, name)
            self.assertEqual(spec.document['version'], 1)

    def test_exp1_defaults(self):
        spec = spec_for('exp1')
        self.assertEqual(spec.generator.target, 'exp1')
        self.assertEqual(spec.generator.domain, ((-1.0, 1.0),))
        self.assertEqual((spec.train.epochs, spec.train.batch_size, spec.seed), (200, 32, 10))
        self.assertEqual((spec.train.lr0, spec.train.lam, spec.model.h), (0.01, 0.1, 128))
        self.assertEqual(spec.scaler_range, (0.0, 1.0))
        self.assertTrue(spec.compare_baseline)

    def test_sweep_preset_axes(self):
        sweep = spec_for('exp5-grid').sweep
        self.assertEqual(len(sweep.hidden) * len(sweep.sizes), 24)
        self.assertEqual(len(sweep.lrs) * len(sweep.wds), 9)
        self.assertEqual(spec_for('exp5-lambda').ablation.lambdas, (0.1, 0.3, 0.5, 1.0, 1.5))

    def test_csv_preset_needs_a_path(self):
        with self.assertRaises(SchemaError) as caught:
            spec_for('exp4-csv')
        self.assertIn('generator', caught.exception.errors)
        spec = spec_for('exp4-csv', 'generator.path=/data/series.csv')
        self.assertTrue(spec.generator.from_csv)
        self.assertEqual(spec.scaler_range, (-1.0, 1.0))

    def test_unknown_generator_is_rejected(self):
        document = preset_document('exp1')
        document['generator']['target'] = 'sinc'
        with self.assertRaises(SchemaError) as caught:
            build_spec(document)
        self.assertIn('Unknown generator', str(caught.exception.errors['generator']['target']))

    def test_version_is_checked(self):
        document = preset_document('exp1')
        document['version'] = 2
        with self.assertRaises(SchemaError) as caught:
            build_spec(document)
        self.assertIn('version', caught.exception.errors)

    def test_mask_dimension_is_checked(self):
        document = preset_document('exp3-surface')
        document['mask'] = {'kind': 'intervals', 'centers': [0.0], 'half_width': 0.1}
        with self.assertRaises(SchemaError):
            build_spec(document)

    def test_invalid_values(self):
        for override in ('train.batch_size=0', 'train.lr0=0', 'model.h=0', 'generator.n=2',
                         'generator.fractions=[0.5, 0.5, 0.5]', 'sweep.hidden=[]'):
            with self.subTest(override=override), self.assertRaises(SchemaError):
                spec_for('exp5-grid', override)

    def test_overrides(self):
        document = apply_overrides(preset_document('exp1'), [
            'train.epochs=7', 'model.h=16', 'train.lr0=0.001', 'model.init=elliptical'])
        spec = build_spec(document)
        self.assertEqual((spec.train.epochs, spec.model.h, spec.train.lr0), (7, 16, 0.001))
        self.assertEqual(spec.model.init, 'elliptical')
        self.assertEqual(apply_overrides({}, ['mask.kind=disk']), {'mask': {'kind': 'disk'}})

    def test_malformed_overrides(self):
        with self.assertRaises(SchemaError):
            apply_overrides(preset_document('exp1'), ['train.epochs'])
        with self.assertRaises(SchemaError):
            apply_overrides(preset_document('exp1'), ['name.value=3'])

    def test_seed_from_environment(self):
        self.assertEqual(spec_for('exp1', environ={'CAUCHYNET_SEED': '42'}).seed, 42)
        self.assertEqual(apply_seed_env({'train': {'seed': 1}}, {'CAUCHYNET_SEED': ''}), {'train': {'seed': 1}})
        with self.assertRaises(SchemaError):
            apply_seed_env({}, {'CAUCHYNET_SEED': 'ten'})

    def test_exactly_one_source(self):
        with self.assertRaises(SchemaError):
            resolve_spec(environ={})
        with self.assertRaises(SchemaError):
            resolve_spec(preset='exp1', config='exp1.yaml', environ={})
        with self.assertRaises(SchemaError):
            resolve_spec(preset='exp9', environ={})

    def test_yaml_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'run.yaml'
            path.write_text(
                'version: 1\nname: small\ngenerator:\n  target: exp2_gap\n  n: 50\n'
                'train:\n  epochs: 3\n  lam: 0.5\n', encoding='utf-8')
            spec = resolve_spec(config=str(path), environ={})
            self.assertEqual((spec.name, spec.generator.n, spec.train.lam), ('small', 50, 0.5))
            self.assertEqual(spec.model.h, 128)

            path.write_text('version: 1\nname: [unclosed\n', encoding='utf-8')
            with self.assertRaises(SchemaError):
                load_config_file(path)
            path.write_text('- 1\n- 2\n', encoding='utf-8')
            with self.assertRaises(SchemaError):
                load_config_file(path)
            with self.assertRaises(OSError):
                load_config_file(Path(tmp) / 'absent.yaml')


class RunWriterTestCase(SimpleTestCase):
    def test_failed_write_leaves_nothing_behind(self):
        with tempfile.TemporaryDirectory() as tmp:
            writer = RunWriter(Path(tmp) / 'run')
            with self.assertRaises(RuntimeError):
                with writer.atomic('table.csv') as partial:
                    partial.write_text('half', encoding='utf-8')
                    raise RuntimeError('interrupted')
            self.assertEqual(list(writer.output_dir.iterdir()), [])
            self.assertEqual(writer.files, [])

    def test_manifest_lists_hashes(self):
        with tempfile.TemporaryDirectory() as tmp:
            writer = RunWriter(tmp)
            writer.write_frame('b.csv', pd.DataFrame({'x': [1, 2]}))
            writer.write_json('a.json', {'k': 1})
            manifest = writer.write_manifest('complete', name='unit')
            self.assertEqual([entry['name'] for entry in manifest['files']], ['a.json', 'b.csv'])
            for entry in manifest['files']:
                self.assertEqual(entry['sha256'], sha256_file(Path(tmp) / entry['name']))
            self.assertEqual(read_manifest(tmp)['status'], 'complete')


class RunnerTestCase(TemporaryOutputMixin, TestCase):
    def test_run_writes_the_run_directory(self):
        spec = spec_for('exp1', 'generator.n=40', *FAST)
        out = self.tmp / 'exp1'
        result = run_experiment(spec, out)

        manifest = read_manifest(out)
        self.assertEqual(manifest['status'], 'complete')
        self.assertEqual({entry['name'] for entry in manifest['files']}, {
            'dataset.csv', 'trainlog.csv', 'checkpoint.json', 'predictions.csv', 'metrics.csv',
            'baseline_trainlog.csv', 'baseline_checkpoint.json', 'baseline_predictions.csv',
        })
        for entry in manifest['files']:
            self.assertEqual(entry['sha256'], sha256_file(out / entry['name']))
            self.assertEqual(entry['size'], (out / entry['name']).stat().st_size)

        predictions = pd.read_csv(out / 'predictions.csv')
        self.assertEqual(list(predictions.columns), ['split', 'x0', 'y_true', 'y_pred', 'e_pred', 'abs_err'])
        self.assertEqual(predictions['split'].value_counts().to_dict(), {'train': 20, 'val': 10, 'test': 10})

        trainlog = pd.read_csv(out / 'trainlog.csv')
        self.assertEqual(trainlog['epoch'].tolist(), [1, 2])
        self.assertTrue(trainlog['wall_ms'].isna().all())

        metrics = pd.read_csv(out / 'metrics.csv')
        self.assertEqual(list(metrics.columns), METRICS_COLUMNS)
        self.assertEqual(len(metrics), 4)
        cauchy = metrics[metrics['model'] == 'cauchynet'].iloc[0]
        self.assertEqual((cauchy['complex_params'], cauchy['real_params']), (16, 32))
        self.assertIn('2h(m+1)', cauchy['note'])
        self.assertEqual(metrics[metrics['model'] == 'relu_mlp']['real_params'].tolist(), [25, 25])
        trained = metrics[metrics['model'].isin(['cauchynet', 'relu_mlp'])]
        self.assertTrue((trained['wall_ms'] > 0).all())
        self.assertTrue((metrics[metrics['model'] == 'cauchynet']['mean_abs_imag'] >= 0).all())
        self.assertTrue(metrics[metrics['model'] == 'relu_mlp']['mean_abs_imag'].isna().all())
        for report in result.reports:
            self.assertLessEqual(report.mae ** 2, report.mse * (1 + 1e-12))
        self.assertTrue(math.isfinite(result.report().mae))

        run = ExperimentRun.objects.get(output_dir=str(out))
        self.assertEqual(run.status, ExperimentRun.COMPLETE)
        self.assertEqual(run.artifacts.count(), len(manifest['files']))
        self.assertEqual(len(run.metrics), 4)

    def test_same_seed_gives_identical_files(self):
        spec = spec_for('exp1', 'generator.n=40', *FAST)
        run_experiment(spec, self.tmp / 'a', record=False)
        run_experiment(spec, self.tmp / 'b', record=False)
        run_experiment(spec.with_train(seed=11), self.tmp / 'c', record=False)
        for name in ('trainlog.csv', 'predictions.csv', 'checkpoint.json'):
            self.assertEqual((self.tmp / 'a' / name).read_bytes(), (self.tmp / 'b' / name).read_bytes())
        self.assertNotEqual((self.tmp / 'a' / 'predictions.csv').read_bytes(),
                            (self.tmp / 'c' / 'predictions.csv').read_bytes())
        self.assertFalse(ExperimentRun.objects.exists())

    def test_checkpoint_evaluation_matches_the_run(self):
        spec = spec_for('exp3-surface', 'generator.n=60', *FAST)
        result = run_experiment(spec, self.tmp / 'run', record=False)
        report = evaluate_checkpoint(spec, self.tmp / 'run' / 'checkpoint.json', 'test', self.tmp / 'eval')
        self.assertAlmostEqual(report.mse, result.report('cauchynet', 'test').mse, places=12)
        evaluated = pd.read_csv(self.tmp / 'eval' / 'evaluation_predictions.csv')
        self.assertEqual(set(evaluated['split']), {'test'})
        self.assertEqual(list(evaluated.columns[:3]), ['split', 'x0', 'x1'])
        self.assertTrue((self.tmp / 'eval' / 'evaluation.csv').exists())

    def test_disk_imputation(self):
        spec = spec_for('exp2-disk', 'generator.n=400', *FAST)
        out = self.tmp / 'disk'
        result = run_experiment(spec, out, command='impute')

        predictions = pd.read_csv(out / 'predictions.csv')
        radius2 = predictions['x0'] ** 2 + predictions['x1'] ** 2
        self.assertTrue((radius2[predictions['split'] == 'test'] <= 0.09).all())
        self.assertTrue((radius2[predictions['split'] != 'test'] > 0.09).all())

        signed = pd.read_csv(out / 'signed_error.csv')
        self.assertEqual(list(signed.columns), ['x0', 'x1', 'y_true', 'y_pred', 'signed_error'])
        self.assertEqual(len(signed), result.imputation['hidden_points'])
        self.assertEqual(result.imputation['masked_zones'], 1)
        self.assertLessEqual(result.imputation['signed_error_min'], result.imputation['signed_error_max'])
        self.assertEqual(result.report('constant_mean', 'test').real_params, 1)
        self.assertEqual(ExperimentRun.objects.get().command, 'impute')

    def test_gap_mask_covers_six_turning_points(self):
        spec = spec_for('exp2-gap', *FAST)
        prepared = build_dataset(spec)
        centers = np.asarray(prepared.mask.centers)
        self.assertEqual(len(centers), 6)
        distance = np.abs(prepared.raw.train.X[:, :1] - centers[None, :])
        self.assertTrue(np.all(distance > 0.15))

        result = run_experiment(spec, self.tmp / 'gap', record=False)
        self.assertEqual(result.imputation['masked_zones'], 6)
        self.assertTrue(math.isfinite(result.imputation['hidden_mae']))
        self.assertTrue(math.isfinite(result.imputation['constant_mean_mae']))

    def test_csv_trend_run(self):
        path = write_series(self.tmp / 'series.csv')
        spec = spec_for('exp4-csv', f'generator.path={path}', *FAST)
        out = self.tmp / 'csv'
        run_experiment(spec, out, record=False)
        files = {entry['name'] for entry in read_manifest(out)['files']}
        self.assertIn('decomposition.csv', files)
        predictions = pd.read_csv(out / 'predictions.csv')
        self.assertEqual(predictions['split'].value_counts().to_dict(), {'train': 18, 'val': 9, 'test': 9})

    def test_divergence_writes_a_partial_manifest(self):
        spec = spec_for('exp1', 'generator.n=40', *FAST)
        out = self.tmp / 'diverged'
        with mock.patch('experiments.runner.train', side_effect=TrainingDiverged(1, TrainLog())):
            with self.assertRaises(TrainingDiverged):
                run_experiment(spec, out)
        manifest = read_manifest(out)
        self.assertEqual(manifest['status'], 'partial')
        self.assertIn('trainlog.csv', [entry['name'] for entry in manifest['files']])
        run = ExperimentRun.objects.get()
        self.assertEqual(run.status, ExperimentRun.PARTIAL)
        self.assertIn('epoch 1', run.error)

    def test_several_seeds(self):
        spec = spec_for('exp1', 'generator.n=40', *FAST)
        run_seeds(spec, [1, 2], self.tmp / 'seeds', record=False)
        seeds = pd.read_csv(self.tmp / 'seeds' / 'seeds.csv')
        self.assertEqual(list(seeds.columns), ['seed', 'model', 'val_mse', 'test_mse', 'test_mae'])
        self.assertEqual(seeds['seed'].tolist(), [1, 1, 2, 2])
        self.assertEqual(read_manifest(self.tmp / 'seeds' / 'seed_2')['seed'], 2)


class RecordsTestCase(TestCase):
    def test_recording_can_be_disabled(self):
        with override_settings(CAUCHYNET=dict(settings.CAUCHYNET, RECORD_RUNS=False)):
            self.assertIsNone(start_run('exp1', 'train', 10, {}, '/tmp/x'))
        self.assertIsNone(finish_run(None, 'complete'))

    def test_artifacts_are_upserted(self):
        run = start_run('exp1', 'train', 10, {'version': 1}, '/tmp/x')
        finish_run(run, 'complete', artifacts=[{'name': 'a.csv', 'sha256': '0' * 64, 'size': 3}])
        finish_run(run, 'complete', artifacts=[{'name': 'a.csv', 'sha256': '1' * 64, 'size': 4}])
        artifact = RunArtifact.objects.get(run=run)
        self.assertEqual((artifact.sha256, artifact.size), ('1' * 64, 4))


class SweepTestCase(SimpleTestCase):
    def setUp(self):
        self.spec = spec_for('exp5-lambda', 'generator.n=40', 'train.epochs=4', 'model.h=8')

    def test_lambda_ablation_rows(self):
        frame = run_lambda_ablation(self.spec, [0.1, 1.0], snapshot_every=2, threads=2)
        self.assertEqual(list(frame.columns), ABLATION_COLUMNS)
        self.assertEqual(frame['lambda'].tolist(), [0.1, 0.1, 1.0, 1.0])
        self.assertEqual(frame['epoch'].tolist(), [2, 4, 2, 4])
        self.assertEqual(set(frame['seed']), {10})
        self.assertTrue(np.isfinite(frame['test_mse']).all())

    def test_single_zero_lambda(self):
        frame = run_lambda_ablation(self.spec, [0.0])
        self.assertEqual(frame['epoch'].tolist(), [1, 2, 3, 4])

    def test_ablation_validation(self):
        with self.assertRaises(SchemaError):
            run_lambda_ablation(self.spec, [])
        with self.assertRaises(SchemaError):
            run_lambda_ablation(self.spec, [-0.1])
        with self.assertRaises(SchemaError):
            run_lambda_ablation(self.spec, [0.1], snapshot_every=0)

    def test_single_cell_grid(self):
        frame = run_sensitivity_grid(self.spec, [8], [40], [0.01], [0.0])
        self.assertEqual(list(frame.columns), GRID_COLUMNS)
        self.assertEqual(len(frame), 1)
        self.assertTrue(math.isfinite(frame['test_mse'][0]))
        self.assertFalse(all_cells_failed(frame))

    def test_failing_cell_becomes_a_note(self):
        frame = run_sensitivity_grid(self.spec, [8], [2], [0.01], [0.0])
        self.assertTrue(math.isnan(frame['test_mse'][0]))
        self.assertIn('ValueError', frame['note'][0])
        self.assertTrue(all_cells_failed(frame))

    def test_grid_validation(self):
        with self.assertRaises(SchemaError):
            run_sensitivity_grid(self.spec, [], [40], [0.01], [0.0])
        with self.assertRaises(SchemaError):
            worker_count(0)
        self.assertEqual(worker_count(None), settings.CAUCHYNET['MAX_THREADS'])

    def test_sweep_tables_use_the_spec_for_fixed_axes(self):
        tables = run_sweep_tables(self.spec, SweepConfig(hidden=(4, 8), sizes=(40,), lrs=(0.01, 0.02), wds=(0.0,)))
        self.assertEqual(tables['grid_capacity']['h'].tolist(), [4, 8])
        self.assertEqual(tables['grid_optimizer']['lr'].tolist(), [0.01, 0.02])
        self.assertEqual(set(tables['grid_optimizer']['h']), {8})
        self.assertEqual(set(tables['grid_optimizer']['n']), {40})

    def test_published_grid_sizes(self):
        def fake_cell(spec, h, n, lr, wd):
            return {'h': h, 'n': n, 'lr': lr, 'wd': wd, 'test_mse': 1.0, 'note': ''}

        with mock.patch('experiments.sweeps._grid_cell', side_effect=fake_cell):
            tables = run_sweep_tables(spec_for('exp5-grid'))
        self.assertEqual(len(tables['grid_capacity']), 24)
        self.assertEqual(len(tables['grid_optimizer']), 9)


class CommandTestCase(TemporaryOutputMixin, TestCase):
    def call(self, *args):
        stdout = StringIO()
        call_command(*args, stdout=stdout)
        return stdout.getvalue()

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as caught:
            self.call(*args)
        self.assertEqual(caught.exception.returncode, code)
        return caught.exception

    def test_train_and_evaluate(self):
        out = self.tmp / 'train'
        sets = ['--set', 'generator.n=40', '--set', 'train.epochs=2', '--set', 'model.h=8']
        output = self.call('train', '--preset', 'exp1', *sets, '--output', str(out))
        self.assertIn('cauchynet test', output)
        self.assertIn('relu_mlp test', output)
        self.assertEqual(read_manifest(out)['status'], 'complete')

        output = self.call('evaluate', str(out / 'checkpoint.json'), '--preset', 'exp1', *sets,
                           '--split', 'val')
        self.assertIn('cauchynet val', output)

    def test_train_several_seeds(self):
        out = self.tmp / 'seeds'
        self.call('train', '--preset', 'exp1', '--set', 'generator.n=40', '--set', 'train.epochs=2',
                  '--set', 'model.h=8', '--seeds', '3,4', '--output', str(out))
        self.assertTrue((out / 'seeds.csv').exists())
        self.assertEqual(ExperimentRun.objects.count(), 2)

    def test_exit_codes(self):
        self.assertExitCode(2, 'train', '--preset', 'exp1', '--set', 'generator.target=sinc')
        self.assertExitCode(2, 'train', '--preset', 'exp1', '--set', 'train.epochs')
        self.assertExitCode(2, 'impute', '--preset', 'exp1')
        self.assertExitCode(4, 'train', '--config', str(self.tmp / 'absent.yaml'))
        with mock.patch('experiments.runner.train', side_effect=TrainingDiverged(1, TrainLog())):
            self.assertExitCode(3, 'train', '--preset', 'exp1', '--set', 'generator.n=40',
                                '--output', str(self.tmp / 'diverged'))
        self.assertEqual(read_manifest(self.tmp / 'diverged')['status'], 'partial')

    def test_impute(self):
        output = self.call('impute', '--preset', 'exp2-disk', '--set', 'generator.n=400',
                           '--set', 'train.epochs=2', '--set', 'model.h=8',
                           '--output', str(self.tmp / 'impute'))
        self.assertIn('1 masked zone(s)', output)
        self.assertIn('constant-mean MAE', output)
        self.assertTrue((self.tmp / 'impute' / 'signed_error.csv').exists())

    def test_ablate_lambda(self):
        out = self.tmp / 'ablation'
        self.call('ablate_lambda', '--preset', 'exp5-lambda', '--set', 'generator.n=40',
                  '--set', 'train.epochs=2', '--set', 'model.h=8', '--lambdas', '0.5,1',
                  '--snapshot-every', '1', '--output', str(out))
        frame = pd.read_csv(out / 'lambda_ablation.csv')
        self.assertEqual(len(frame), 4)
        self.assertEqual(read_manifest(out)['lambdas'], [0.5, 1.0])
        self.assertExitCode(2, 'ablate_lambda', '--preset', 'exp5-lambda', '--lambdas', '',
                            '--output', str(self.tmp / 'empty'))
        self.assertEqual(read_manifest(self.tmp / 'empty')['status'], 'failed')

    def test_sweep(self):
        out = self.tmp / 'sweep'
        self.call('sweep', '--preset', 'exp5-grid', '--set', 'generator.n=40', '--set', 'train.epochs=2',
                  '--set', 'model.h=8', '--hidden', '4', '--sizes', '40', '--lrs', '0.01', '--wds', '0',
                  '--threads', '1', '--output', str(out))
        self.assertEqual(len(pd.read_csv(out / 'grid_capacity.csv')), 1)
        self.assertEqual(len(pd.read_csv(out / 'grid_optimizer.csv')), 1)
        self.assertEqual(read_manifest(out)['status'], 'complete')

    def test_sweep_where_every_cell_fails(self):
        out = self.tmp / 'sweep'
        with mock.patch('experiments.sweeps.train', side_effect=PoleEncountered('pole')):
            self.assertExitCode(3, 'sweep', '--preset', 'exp5-grid', '--set', 'generator.n=40',
                                '--hidden', '4', '--sizes', '40', '--lrs', '0.01', '--wds', '0',
                                '--output', str(out))
        self.assertEqual(read_manifest(out)['status'], 'failed')
        self.assertTrue(pd.read_csv(out / 'grid_capacity.csv')['note'][0].startswith('PoleEncountered'))

    def test_kernel_demo(self):
        out = self.tmp / 'kernel'
        output = self.call('kernel_demo', '--target', 'square', '--nodes', '16,32,64',
                           '--save-expansion', '--output', str(out))
        self.assertIn('sup_error', output)
        table = pd.read_csv(out / 'convergence.csv')
        self.assertEqual(table['nodes'].tolist(), [16, 32, 64])
        self.assertEqual(len(load_expansion(out / 'expansion.json')), 64)
        self.assertExitCode(2, 'kernel_demo', '--a', '0.5', '--b', '0.5', '--output', str(out))

    def test_decompose(self):
        path = write_series(self.tmp / 'series.csv', n=24, column='y')
        out = self.tmp / 'decomposition'
        self.call('decompose', str(path), '--column', 'y', '--period', '4', '--window', '2',
                  '--output', str(out))
        frame = pd.read_csv(out / 'decomposition.csv')
        self.assertEqual(list(frame.columns), ['t', 'series', 'trend', 'seasonal', 'residual'])
        self.assertTrue((out / 'trend_dataset.csv').exists())
        self.assertTrue((out / 'trend_scaler.json').exists())
        self.assertExitCode(2, 'decompose', str(path), '--column', 'missing', '--period', '4',
                            '--output', str(out))

    def test_list_experiments(self):
        output = self.call('list_experiments')
        for name in preset_names():
            self.assertIn(name, output)
        ExperimentRun.objects.create(name='exp1', command='train', status='complete', output_dir='/tmp/r')
        self.assertIn('/tmp/r', self.call('list_experiments', '--runs'))


class ExperimentApiTestCase(APITestCase):
    def setUp(self):
        self.complete = ExperimentRun.objects.create(
            name='exp1', command='train', status='complete', seed=10, metrics=[{'model': 'cauchynet'}])
        RunArtifact.objects.create(run=self.complete, filename='metrics.csv', sha256='a' * 64, size=10)
        RunArtifact.objects.create(run=self.complete, filename='checkpoint.json', sha256='b' * 64, size=20)
        ExperimentRun.objects.create(name='exp2-gap', command='impute', status='failed', error='bad config')

    def test_presets(self):
        response = self.client.get('/api/experiments/presets/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual([preset['name'] for preset in response.data], preset_names())
        self.assertEqual(response.data[0]['document']['version'], 1)

    def test_run_list_and_filters(self):
        response = self.client.get('/api/experiments/runs/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['count'], 2)
        response = self.client.get('/api/experiments/runs/', {'status': 'failed'})
        self.assertEqual([run['name'] for run in response.data['results']], ['exp2-gap'])
        response = self.client.get('/api/experiments/runs/', {'name': 'exp1'})
        self.assertEqual(response.data['results'][0]['artifacts_count'], 2)

    def test_run_detail(self):
        response = self.client.get(f'/api/experiments/runs/{self.complete.pk}/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual([a['filename'] for a in response.data['artifacts']], ['checkpoint.json', 'metrics.csv'])
        self.assertEqual(response.data['metrics'], [{'model': 'cauchynet'}])
        self.assertEqual(self.client.get('/api/experiments/runs/999/').status_code, status.HTTP_404_NOT_FOUND)


@tag('slow')
@skipUnless(os.environ.get('CAUCHYNET_SLOW_TESTS'), 'set CAUCHYNET_SLOW_TESTS=1 for full-length training runs')
class FullLengthTrainingTestCase(TemporaryOutputMixin, SimpleTestCase):
    def test_intro_spike_median_validation_loss(self):
        results = run_seeds(spec_for('intro-spike'), list(range(1, 11)), self.tmp / 'intro', record=False)
        cauchy = np.median([r.report('cauchynet', 'val').mse for r in results])
        relu = np.median([r.report('relu_mlp', 'val').mse for r in results])
        self.assertLess(cauchy, relu)

    def test_intro_spike_training_loss_drops(self):
        result = run_experiment(spec_for('intro-spike'), self.tmp / 'spike', record=False)
        self.assertLess(result.log[-1].train_loss * 10, result.log[0].train_loss)

    def test_exp1_mae(self):
        result = run_experiment(spec_for('exp1'), self.tmp / 'exp1', record=False)
        cauchy, relu = result.report('cauchynet', 'test'), result.report('relu_mlp', 'test')
        self.assertLess(cauchy.mae, relu.mae)
        self.assertLessEqual(cauchy.mae, 3.0)

    def test_gap_filling_beats_the_constant_mean(self):
        result = run_experiment(spec_for('exp2-gap'), self.tmp / 'gap', record=False)
        self.assertEqual(result.imputation['masked_zones'], 6)
        self.assertLess(result.imputation['hidden_mae'], result.imputation['constant_mean_mae'])
