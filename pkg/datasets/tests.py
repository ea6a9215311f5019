import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from networks.exceptions import DegenerateRange, LengthMismatch, NonPositiveValue, ParseError
from networks.linalg import Rng

from .decomposition import seasonal_decompose_multiplicative
from .forecasting import build_trend_dataset, trend_samples
from .io import dataset_frame, load_series_csv, write_dataset_csv
from .scaling import ScalerState, scaler_apply, scaler_fit, scaler_invert
from .serializers import ScalerSerializer
from .splits import (MissingMask, apply_mask, evenly_spaced, make_masked_split, make_split,
                     split_sizes, uniform_box)
from .targets import (TARGETS, evaluate_target, find_turning_points, target_2d_missing_disk,
                      target_2d_surface, target_exp1, target_exp2_gap, target_intro_spike)


TARGET_VALUES = Path(__file__).resolve().parent / 'testdata' / 'target_values.json'


def sorted_rows(X):
    X = np.asarray(X)
    return X[np.lexsort(X.T[::-1])]


class TargetTestCase(SimpleTestCase):
    def test_intro_spike(self):
        self.assertAlmostEqual(float(target_intro_spike(0.5)), math.sin(1.5) + 400, places=10)
        self.assertAlmostEqual(float(target_intro_spike(0.0)), 4 / 0.26, places=10)
        for d in (0.01, 0.2, 0.7):
            self.assertAlmostEqual(
                float(target_intro_spike(0.5 + d) - target_intro_spike(0.5 - d)),
                math.sin(3 * (0.5 + d)) - math.sin(3 * (0.5 - d)), places=9)

    def test_exp1(self):
        self.assertAlmostEqual(float(target_exp1(0.0)), 1 / 0.365 - 40 * math.exp(-0.32), places=12)
        self.assertAlmostEqual(float(target_exp1(0.0)), -26.3063, delta=1e-4)
        self.assertGreater(float(target_exp1(-0.6)), 150)
        self.assertAlmostEqual(float(target_exp1(1e-9)), float(target_exp1(-1e-9)), delta=1e-5)

    def test_exp2_gap(self):
        self.assertAlmostEqual(float(target_exp2_gap(0.0)), 0.9774215, delta=1e-6)
        self.assertAlmostEqual(float(target_exp2_gap(1.0)), 0.0950504, delta=1e-6)

    def test_two_dimensional_targets(self):
        self.assertAlmostEqual(float(target_2d_missing_disk(0, 0)), 3 - 1 / 6, places=12)
        self.assertAlmostEqual(float(target_2d_missing_disk(1, 0)), 1.8, places=12)
        self.assertNotAlmostEqual(float(target_2d_missing_disk(1, 0)), float(target_2d_missing_disk(0, 1)))
        self.assertAlmostEqual(float(target_2d_surface(0, 0)), 0.2, places=12)
        self.assertAlmostEqual(float(target_2d_surface(1, 1)), 4 + 1 / 6, places=12)
        self.assertTrue(np.isfinite(target_2d_surface(-1.5, -1.5)))

    def test_reference_values(self):
        table = json.loads(TARGET_VALUES.read_text())
        self.assertEqual(set(table), set(TARGETS))
        for name, rows in table.items():
            with self.subTest(target=name):
                self.assertEqual(len(rows), 11)
                X = np.array([row['x'] for row in rows])
                expected = np.array([row['y'] for row in rows])
                assert_allclose(evaluate_target(name, X), expected, rtol=1e-13, atol=0)

    def test_registry(self):
        self.assertEqual(set(TARGETS), {'intro_spike', 'exp1', 'exp2_gap', '2d_missing_disk', '2d_surface'})
        values = evaluate_target('2d_surface', [[0.0, 0.0], [1.0, 1.0]])
        assert_allclose(values, [0.2, 4 + 1 / 6])

    def test_turning_points(self):
        points = find_turning_points(np.sin, (0.0, 2 * math.pi))
        assert_allclose(points, [math.pi / 2, 3 * math.pi / 2], atol=1e-6)
        self.assertEqual(len(find_turning_points(target_exp2_gap, (-2.0, 2.0))), 6)
        self.assertEqual(find_turning_points(lambda x: 5.0, (-1.0, 1.0)), [])
        with self.assertRaises(ValueError):
            find_turning_points(np.sin, (0.0, 1.0), grid=50)


class SplitTestCase(SimpleTestCase):
    def test_sizes(self):
        X = evenly_spaced((-1.0, 1.0), 300)
        y = evaluate_target('exp1', X)
        for strategy in ('random', 'interleaved', 'chronological'):
            dataset = make_split(X, y, (0.5, 0.25, 0.25), rng=Rng(10), strategy=strategy)
            self.assertEqual(split_sizes(dataset), {'train': 150, 'val': 75, 'test': 75})

    def test_splits_partition_the_samples(self):
        X = uniform_box([(-1, 1), (-1, 1)], 101, Rng(3))
        y = evaluate_target('2d_surface', X)
        dataset = make_split(X, y, rng=Rng(4))
        joined = np.vstack([split.X for _, split in dataset.splits()])
        assert_array_equal(sorted_rows(joined), sorted_rows(X))
        self.assertEqual(len(np.unique(joined, axis=0)), len(X))

    def test_interleaved_train_is_evenly_spaced(self):
        X = evenly_spaced((-1.0, 1.0), 300)
        dataset = make_split(X, X[:, 0], rng=Rng(1), strategy='interleaved')
        assert_array_equal(dataset.train.X, X[::2])

    def test_split_is_reproducible(self):
        X = evenly_spaced((-1.0, 1.0), 40)
        first = make_split(X, X[:, 0], rng=Rng(7))
        second = make_split(X, X[:, 0], rng=Rng(7))
        assert_array_equal(first.val.X, second.val.X)

    def test_split_errors(self):
        X = evenly_spaced((0.0, 1.0), 10)
        with self.assertRaises(LengthMismatch):
            make_split(X, np.zeros(9), rng=Rng(1))
        with self.assertRaises(ValueError):
            make_split(X, np.zeros(10), (0.5, 0.5, 0.5), rng=Rng(1))
        with self.assertRaises(ValueError):
            make_split(X[:2], np.zeros(2), rng=Rng(1))
        with self.assertRaises(ValueError):
            make_split(X, np.zeros(10), rng=Rng(1), strategy='alphabetical')
        for strategy in ('random', 'interleaved'):
            with self.assertRaisesMessage(ValueError, f'{strategy} split needs an rng'):
                make_split(X, np.zeros(10), strategy=strategy)
        ordered = make_split(X, X[:, 0], strategy='chronological')
        assert_array_equal(ordered.train.X, X[:len(ordered.train)])

    def test_with_targets(self):
        X = evenly_spaced((0.0, 1.0), 8)
        doubled = make_split(X, X[:, 0], rng=Rng(1)).with_targets(lambda y: 2 * y)
        assert_allclose(doubled.train.y, 2 * doubled.train.X[:, 0])


class MaskTestCase(SimpleTestCase):
    def test_disk_mask(self):
        X = uniform_box([(-0.8, 0.8), (-0.8, 0.8)], 3000, Rng(10, 1))
        y = evaluate_target('2d_missing_disk', X)
        mask = MissingMask('disk', center=(0.0, 0.0), radius=0.3)
        dataset = make_masked_split(X, y, mask, Rng(10, 2))
        self.assertTrue(np.all(np.sum(dataset.test.X ** 2, axis=1) <= 0.09))
        for split in (dataset.train, dataset.val):
            self.assertTrue(np.all(np.sum(split.X ** 2, axis=1) > 0.09))
        self.assertEqual(len(dataset.train) + len(dataset.val) + len(dataset.test), 3000)
        self.assertAlmostEqual(len(dataset.train) / (len(dataset.train) + len(dataset.val)), 0.6, delta=0.01)

    def test_interval_mask(self):
        centers = tuple(find_turning_points(target_exp2_gap, (-2.0, 2.0)))
        mask = MissingMask('intervals', centers=centers, half_width=0.15)
        X = evenly_spaced((-2.0, 2.0), 400)
        dataset = make_masked_split(X, evaluate_target('exp2_gap', X), mask, Rng(3), (0.7, 0.3))
        distance = np.abs(dataset.train.X[:, :1] - np.asarray(centers)[None, :])
        self.assertTrue(np.all(distance > 0.15))
        self.assertEqual(dataset.provenance['strategy'], 'masked')

    def test_apply_mask_is_exactly_the_predicate(self):
        X = uniform_box([(-1, 1), (-1, 1)], 500, Rng(5))
        mask = MissingMask('disk', center=(0.2, -0.1), radius=0.5)
        visible, hidden = apply_mask(X, X[:, 0], mask)
        self.assertEqual(len(visible) + len(hidden), 500)
        self.assertTrue(np.all(mask.contains(hidden.X)))
        self.assertFalse(np.any(mask.contains(visible.X)))

    def test_invalid_masks(self):
        with self.assertRaises(ValueError):
            MissingMask('disk', radius=0.0)
        with self.assertRaises(ValueError):
            MissingMask('intervals', centers=(), half_width=0.1)
        with self.assertRaises(ValueError):
            MissingMask('square', radius=1.0)
        with self.assertRaises(ValueError):
            make_masked_split(evenly_spaced((0, 1), 10), np.zeros(10),
                              MissingMask('intervals', centers=(5.0,), half_width=0.1), Rng(1))


class ScalerTestCase(SimpleTestCase):
    def test_examples(self):
        state = scaler_fit([0.0, 10.0], (0.0, 1.0))
        self.assertEqual(float(scaler_apply(state, 5.0)), 0.5)
        state = scaler_fit([2.0, 4.0], (-1.0, 1.0))
        assert_allclose(scaler_apply(state, [2.0, 4.0]), [-1.0, 1.0])

    def test_invert_round_trip(self):
        values = Rng(12).uniform(-50.0, 50.0, size=1000)
        state = scaler_fit(values, (-1.0, 1.0))
        assert_allclose(scaler_invert(state, scaler_apply(state, values)), values, rtol=0, atol=1e-12)

    def test_degenerate(self):
        with self.assertRaises(DegenerateRange):
            scaler_fit([3.0, 3.0])
        with self.assertRaises(DegenerateRange):
            ScalerState(1.0, 2.0, 1.0, 0.0)

    def test_serializer(self):
        serializer = ScalerSerializer(data={'min': 0.0, 'max': 2.0, 'range_lo': -1.0, 'range_hi': 1.0})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save(), ScalerState(0.0, 2.0, -1.0, 1.0))
        serializer = ScalerSerializer(data={'min': 2.0, 'max': 2.0, 'range_lo': 0.0, 'range_hi': 1.0})
        self.assertFalse(serializer.is_valid())
        self.assertIn('max', serializer.errors)


class DecompositionTestCase(SimpleTestCase):
    def test_recovers_pattern_and_constant_trend(self):
        pattern = np.array([0.8, 1.3, 1.1, 0.8])
        series = 5.0 * np.tile(pattern, 6)
        decomposition = seasonal_decompose_multiplicative(series, 4)
        defined = decomposition.defined
        assert_allclose(decomposition.trend[defined], 5.0, rtol=1e-12)
        assert_allclose(decomposition.seasonal[:4], pattern, rtol=1e-9)
        assert_allclose(decomposition.residual[defined], 1.0, rtol=1e-9)

    def test_reconstruction(self):
        t = np.arange(60)
        rng = Rng(8)
        series = (10 + 0.3 * t) * (1 + 0.2 * np.sin(2 * np.pi * t / 12)) * np.exp(rng.normal(0.05, size=60))
        decomposition = seasonal_decompose_multiplicative(series, 12)
        defined = decomposition.defined
        self.assertEqual(int(defined.sum()), 48)
        assert_allclose(decomposition.reconstruct()[defined], series[defined], rtol=1e-9)
        self.assertAlmostEqual(float(decomposition.seasonal[:12].mean()), 1.0, delta=1e-9)

    def test_odd_period(self):
        series = np.exp(Rng(2).normal(0.1, size=35))
        decomposition = seasonal_decompose_multiplicative(series, 7)
        self.assertEqual(int(decomposition.defined.sum()), 35 - 6)
        assert_allclose(decomposition.reconstruct()[decomposition.defined],
                        series[decomposition.defined], rtol=1e-9)

    def test_constant_series(self):
        decomposition = seasonal_decompose_multiplicative(np.full(24, 3.0), 6)
        assert_allclose(decomposition.seasonal, 1.0, rtol=1e-12)
        assert_allclose(decomposition.residual[decomposition.defined], 1.0, rtol=1e-12)

    def test_rejects_bad_series(self):
        series = np.full(24, 2.0)
        series[5] = 0.0
        with self.assertRaises(NonPositiveValue):
            seasonal_decompose_multiplicative(series, 6)
        with self.assertRaises(ValueError):
            seasonal_decompose_multiplicative(np.ones(10), 6)


class CsvTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, text, name='series.csv'):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        return path

    def test_reads_column(self):
        path = self.write('t,y\n0,1.5\n1,2.5\n')
        assert_array_equal(load_series_csv(path, 'y'), [1.5, 2.5])

    def test_missing_column_names_the_available_ones(self):
        path = self.write('t,y\n0,1.5\n')
        with self.assertRaises(ParseError) as caught:
            load_series_csv(path, 'value')
        self.assertIn('t, y', str(caught.exception))

    def test_non_numeric_cell_reports_the_row(self):
        rows = ['t,y'] + [f'{i},{i + 0.5}' for i in range(6)] + ['6,abc', '7,8.5']
        path = self.write('\n'.join(rows) + '\n')
        with self.assertRaises(ParseError) as caught:
            load_series_csv(path, 'y')
        self.assertEqual(caught.exception.row, 7)
        self.assertIn('row 7', str(caught.exception))

    def test_missing_file(self):
        with self.assertRaises(OSError):
            load_series_csv(os.path.join(self.tmp.name, 'absent.csv'), 'y')

    def test_dataset_dump(self):
        X = evenly_spaced((0.0, 1.0), 8)
        dataset = make_split(X, X[:, 0] ** 2, rng=Rng(1))
        path = os.path.join(self.tmp.name, 'dataset.csv')
        write_dataset_csv(dataset, path)
        frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), ['split', 'x0', 'y'])
        self.assertEqual(frame['split'].value_counts().to_dict(), {'train': 4, 'val': 2, 'test': 2})
        self.assertTrue(dataset_frame(dataset, transform=lambda y: y * 0).y.eq(0).all())


class ForecastingTestCase(SimpleTestCase):
    def setUp(self):
        t = np.arange(48)
        self.series = (20 + 0.5 * t) * (1 + 0.1 * np.cos(2 * np.pi * t / 12))

    def test_time_index_dataset(self):
        dataset, scaler, decomposition = build_trend_dataset(self.series, 12)
        self.assertEqual(sum(split_sizes(dataset).values()), 36)
        ys = np.concatenate([split.y for _, split in dataset.splits()])
        self.assertAlmostEqual(ys.min(), -1.0)
        self.assertAlmostEqual(ys.max(), 1.0)
        self.assertLess(dataset.train.X.max(), dataset.val.X.min())
        self.assertLess(dataset.val.X.max(), dataset.test.X.min())
        self.assertEqual((scaler.range_lo, scaler.range_hi), (-1.0, 1.0))
        self.assertEqual(decomposition.period, 12)

    def test_lag_window_dataset(self):
        dataset, _, _ = build_trend_dataset(self.series, 12, window=3)
        self.assertEqual(dataset.m, 3)
        self.assertEqual(sum(split_sizes(dataset).values()), 33)
        self.assertEqual(dataset.provenance['window'], 3)

    def test_trend_samples(self):
        X, y = trend_samples(np.arange(5.0), window=2)
        assert_array_equal(X, [[0, 1], [1, 2], [2, 3]])
        assert_array_equal(y, [2, 3, 4])
        with self.assertRaises(ValueError):
            trend_samples(np.arange(3.0), window=3)
