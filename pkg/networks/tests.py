import json
import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from datasets.scaling import ScalerState
from datasets.splits import Split, SplitDataset

from .activation import (cauchy_activation, cauchy_activation_batch, cauchy_activation_derivative,
                         cauchy_activation_partials, wirtinger_residual)
from .baseline import (MlpModel, init_kaiming_mlp, mlp_backward, mlp_finite_difference,
                       mlp_forward, mlp_forward_batch, mlp_parameter_count)
from .cauchynet import (CauchyNetModel, forward, forward_batch, init_elliptical,
                        init_xavier_complex, parameter_count, predict)
from .exceptions import (DivisionByZero, LengthMismatch, NonFinite, PoleEncountered, SchemaError,
                         TrainingDiverged)
from .grad import (backward, batch_loss, batch_loss_and_gradients, finite_difference_gradients,
                   loss)
from .linalg import (Rng, cinv, cmul, complex_matrix, complex_scalar, complex_vector,
                     normal_complex)
from .optim import AdamState, TrainConfig, adam_step, epoch_order, lr_at, train
from .serializers import checkpoint_document, load_checkpoint, parse_checkpoint, save_checkpoint


def model_away_from_poles(rng, h, m, epsilon=0.0):
    """B with |Im B| >= 0.3 so that x + B never comes near zero for real x."""
    sign = np.where(rng.uniform(0.0, 1.0, size=(h, m)) < 0.5, -1.0, 1.0)
    B = rng.uniform(-1.0, 1.0, size=(h, m)) + 1j * sign * rng.uniform(0.3, 1.0, size=(h, m))
    return CauchyNetModel(B, normal_complex(rng, 1.0, h), epsilon)


def toy_dataset(rng, n=40, m=1):
    X = rng.uniform(-1.0, 1.0, size=(n, m))
    y = np.sin(2 * X[:, 0])
    half = n // 2
    return SplitDataset(
        train=Split(X[:half], y[:half]),
        val=Split(X[half:], y[half:]),
        test=Split(X[:0], y[:0]),
        m=m,
    )


class ComplexLinalgTestCase(SimpleTestCase):
    def test_cmul(self):
        self.assertEqual(cmul(1 + 0j, 3 - 7j), 3 - 7j)
        self.assertEqual(cmul(1j, 1j), -1 + 0j)
        self.assertEqual(cmul(2 + 1j, 3 - 2j), 8 - 1j)

    def test_cinv(self):
        self.assertEqual(cinv(1 + 0j), 1 + 0j)
        self.assertEqual(cinv(1j), -1j)
        self.assertEqual(cinv(2 + 0j), 0.5 + 0j)
        with self.assertRaises(DivisionByZero):
            cinv(0j)

    def test_cinv_far_from_unit_magnitude(self):
        self.assertAlmostEqual(cinv(1e-170).real / 1e170, 1.0, places=14)
        big = cinv(1e200 + 1e200j)
        self.assertAlmostEqual(big.real / 5e-201, 1.0, places=14)
        self.assertAlmostEqual(big.imag / -5e-201, 1.0, places=14)
        small = cinv(3e-300 - 4e-300j)
        self.assertAlmostEqual(small.real / 1.2e299, 1.0, places=14)
        self.assertAlmostEqual(small.imag / 1.6e299, 1.0, places=14)
        with self.assertRaises(NonFinite):
            cinv(1e-320 + 0j)

    def test_inverse_identities_on_random_inputs(self):
        rng = Rng(12)
        magnitudes = 10.0 ** rng.uniform(-6.0, 6.0, size=500)
        phases = rng.uniform(-np.pi, np.pi, size=500)
        for a in magnitudes * np.exp(1j * phases):
            a = complex(a)
            self.assertLess(abs(cinv(cinv(a)) - a), 1e-12 * abs(a))
            self.assertLess(abs(cmul(a, cinv(a)) - 1), 1e-12)

    def test_checked_constructors(self):
        self.assertEqual(complex_scalar(1, -2), 1 - 2j)
        with self.assertRaises(NonFinite):
            complex_scalar(math.nan, 0)
        with self.assertRaises(NonFinite):
            complex_vector([1, math.inf])
        with self.assertRaises(LengthMismatch):
            complex_matrix(2, 2, [1, 2, 3])
        self.assertEqual(complex_matrix(2, 3, range(6)).shape, (2, 3))

    def test_normal_complex_statistics(self):
        self.assertEqual(normal_complex(Rng(1), 0.0), 0j)
        draws = normal_complex(Rng(2), 1.0, size=100_000)
        self.assertLess(abs(draws.mean()), 0.02)
        draws = normal_complex(Rng(3), 0.5, size=100_000)
        self.assertAlmostEqual(draws.real.var(), 0.25, delta=0.01)
        self.assertAlmostEqual(draws.imag.var(), 0.25, delta=0.01)

    def test_rng_is_reproducible_and_keyed(self):
        assert_array_equal(Rng(10).permutation(50), Rng(10).permutation(50))
        assert_array_equal(Rng(10).spawn(3).permutation(50), Rng(10, 3).permutation(50))
        self.assertFalse(np.array_equal(Rng(10).spawn(1).permutation(50), Rng(10).spawn(2).permutation(50)))


class ActivationTestCase(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(cauchy_activation([1 + 0j], 0.0), 1 + 0j)
        self.assertEqual(cauchy_activation([2 + 0j, 0.5 + 0j], 0.0), 1 + 0j)
        self.assertEqual(cauchy_activation([1j], 0.0), -1j)

    def test_pole_and_overflow(self):
        with self.assertRaises(PoleEncountered):
            cauchy_activation([0j], 0.0)
        with self.assertRaises(PoleEncountered):
            cauchy_activation([-1e-3 + 0j], 1e-3)
        with self.assertRaises(NonFinite):
            cauchy_activation([1e-200 + 0j, 1e-200 + 0j], 0.0)

    def test_derivative_examples(self):
        self.assertEqual(cauchy_activation_derivative(1 + 0j), -1 + 0j)
        self.assertEqual(cauchy_activation_derivative(1j), 1 + 0j)
        z, step = 2 + 1j, 1e-6
        numeric = (cauchy_activation([z + step]) - cauchy_activation([z - step])) / (2 * step)
        analytic = cauchy_activation_derivative(z)
        self.assertLess(abs(analytic - numeric) / abs(analytic), 1e-7)

    def test_derivative_identity_on_random_inputs(self):
        rng = Rng(7)
        values = rng.uniform(-3, 3, size=1000) + 1j * rng.uniform(-3, 3, size=1000)
        for z in values:
            expected = -cauchy_activation([z]) ** 2
            self.assertLess(abs(cauchy_activation_derivative(z) - expected), 1e-12 * abs(expected))

    def test_partials_match_finite_differences(self):
        rng = Rng(17)
        step = 1e-6
        for m in (1, 2, 3, 5, 8):
            z = rng.uniform(0.5, 2.0, size=m) * np.exp(1j * rng.uniform(-np.pi, np.pi, size=m))
            partials = cauchy_activation_partials(z, 0.01)
            self.assertEqual(partials.shape, (m,))
            for j in range(m):
                bump = np.zeros(m, dtype=complex)
                bump[j] = step
                numeric = (cauchy_activation(z + bump, 0.01) - cauchy_activation(z - bump, 0.01)) / (2 * step)
                self.assertLess(abs(partials[j] - numeric), 1e-7 * abs(numeric))

    def test_batch_matches_single(self):
        H = np.array([[[1 + 1j, 2 - 1j], [0.5j, 3 + 0j]]])
        batch = cauchy_activation_batch(H, 0.0)
        self.assertEqual(batch.shape, (1, 2))
        self.assertEqual(batch[0, 1], cauchy_activation(H[0, 1], 0.0))

    def test_activation_is_holomorphic(self):
        rng = Rng(13)
        points = rng.uniform(0.5, 2.5, size=25) * np.exp(1j * rng.uniform(-np.pi, np.pi, size=25))
        partner = 1.2 - 0.7j
        for z in points:
            self.assertLess(wirtinger_residual(lambda w: cauchy_activation([w]), z), 1e-8)
            self.assertLess(wirtinger_residual(lambda w: cauchy_activation([w, partner]), z), 1e-8)


class CauchyNetTestCase(SimpleTestCase):
    def test_forward_examples(self):
        fo = forward(CauchyNetModel([[0]], [1], 0.0), [2.0])
        self.assertEqual((fo.y, fo.e), (0.5, 0.0))

        fo = forward(CauchyNetModel([[1j], [-1j]], [0.5, 0.5], 0.0), [1.0])
        self.assertAlmostEqual(fo.y, 0.5, places=15)
        self.assertAlmostEqual(fo.e, 0.0, places=15)

        fo = forward(CauchyNetModel([[0, 0]], [1], 0.0), [2.0, 4.0])
        self.assertEqual((fo.y, fo.e), (0.125, 0.0))
        self.assertEqual(fo.o, complex(fo.y, fo.e))

    def test_conjugate_pairs_give_real_output(self):
        rng = Rng(4)
        half = model_away_from_poles(rng, 5, 2)
        model = CauchyNetModel(np.vstack([half.B, half.B.conj()]), np.concatenate([half.C, half.C.conj()]))
        _, e, _, _ = forward_batch(model, rng.uniform(-1, 1, size=(20, 2)))
        assert_allclose(e, 0.0, atol=1e-12)

    def test_forward_is_deterministic_and_batch_consistent(self):
        model = model_away_from_poles(Rng(5), 6, 2)
        X = Rng(6).uniform(-1, 1, size=(8, 2))
        assert_array_equal(predict(model, X), predict(model, X))
        for row, y in zip(X, predict(model, X)):
            self.assertAlmostEqual(forward(model, row).y, y, places=12)

    def test_overflowing_output_is_rejected(self):
        model = CauchyNetModel([[0.0], [0.0]], [1e308, 1e308], 0.0)
        with self.assertRaises(NonFinite):
            forward_batch(model, [[1.0]])
        with self.assertRaises(NonFinite):
            predict(model, [[1.0], [2.0]])

    def test_initializers_log_their_draw(self):
        with self.assertLogs('networks.cauchynet', level='DEBUG') as logs:
            init_xavier_complex(4, 2, Rng(1))
            init_elliptical(4, 2, Rng(1))
        self.assertEqual(len(logs.records), 2)
        self.assertIn('xavier-complex init h=4 m=2', logs.output[0])
        self.assertIn('elliptical init h=4 m=2', logs.output[1])

    def test_shape_validation(self):
        with self.assertRaises(LengthMismatch):
            CauchyNetModel(np.zeros((3, 2)), np.zeros(2))
        with self.assertRaises(LengthMismatch):
            forward(CauchyNetModel([[0.5]], [1]), [1.0, 2.0])

    def test_xavier_variance(self):
        self.assertAlmostEqual(2.0 / (1 + 128), 0.01550, places=5)
        samples = []
        rng = Rng(11)
        for _ in range(160):
            model = init_xavier_complex(64, 4, rng)
            samples.extend([model.B.real.ravel(), model.B.imag.ravel(), model.C.real, model.C.imag])
        samples = np.concatenate(samples)
        self.assertGreater(samples.size, 100_000)
        self.assertAlmostEqual(samples.var() / (2.0 / 68), 1.0, delta=0.05)

    def test_elliptical_init_places_biases_on_the_ellipse(self):
        model = init_elliptical(16, 2, Rng(3), semi_major=6.0, semi_minor=2.0)
        assert_allclose((model.B.real / 6.0) ** 2 + (model.B.imag / 2.0) ** 2, 1.0, rtol=1e-12)
        self.assertEqual(model.C.shape, (16,))

    def test_parameter_count(self):
        def zeros(h, m):
            return CauchyNetModel(np.zeros((h, m)), np.zeros(h))

        self.assertEqual(tuple(parameter_count(zeros(128, 1))), (256, 512))
        self.assertEqual(tuple(parameter_count(zeros(1, 1))), (2, 4))
        self.assertEqual(tuple(parameter_count(zeros(128, 10))), (1408, 2816))
        model = zeros(7, 3)
        self.assertEqual(parameter_count(model).real_params, 2 * 7 * (3 + 1))


class CheckpointTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'checkpoint.json')

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip_is_bit_exact(self):
        model = model_away_from_poles(Rng(21), 9, 2, epsilon=1e-8)
        scaler = ScalerState(-3.25, 17.0 / 3.0, 0.0, 1.0)
        save_checkpoint(model, scaler, self.path, seed=10)
        loaded, loaded_scaler = load_checkpoint(self.path)
        assert_array_equal(loaded.B, model.B)
        assert_array_equal(loaded.C, model.C)
        self.assertEqual(loaded.epsilon, model.epsilon)
        self.assertEqual(loaded_scaler, scaler)

    def test_document_fields(self):
        document = checkpoint_document(CauchyNetModel([[1 + 2j]], [3 - 4j], 0.0), None, seed=4)
        self.assertEqual(document['version'], 1)
        self.assertEqual(document['model_type'], 'cauchynet')
        self.assertEqual((document['B_re'], document['B_im']), ([[1.0]], [[2.0]]))
        self.assertEqual((document['C_re'], document['C_im']), ([3.0], [-4.0]))

    def test_shape_mismatch_is_rejected(self):
        document = checkpoint_document(CauchyNetModel(np.ones((2, 1)), np.ones(2)), None)
        document['h'] = 3
        with self.assertRaises(SchemaError):
            parse_checkpoint(document)

    def test_missing_epsilon_is_rejected(self):
        document = checkpoint_document(CauchyNetModel(np.ones((2, 1)), np.ones(2)), None)
        del document['epsilon']
        with open(self.path, 'w') as handle:
            json.dump(document, handle)
        with self.assertRaises(SchemaError) as caught:
            load_checkpoint(self.path)
        self.assertIn('epsilon', caught.exception.errors)

    def test_version_mismatch_is_rejected(self):
        document = checkpoint_document(CauchyNetModel(np.ones((1, 1)), np.ones(1)), None)
        document['version'] = 2
        with self.assertRaises(SchemaError):
            parse_checkpoint(document)

    def test_mlp_round_trip(self):
        model = init_kaiming_mlp(5, 2, Rng(8))
        save_checkpoint(model, None, self.path)
        loaded, scaler = load_checkpoint(self.path)
        self.assertIsInstance(loaded, MlpModel)
        self.assertIsNone(scaler)
        for original, restored in zip(model.parameters(), loaded.parameters()):
            assert_array_equal(original, restored)


class GradientTestCase(SimpleTestCase):
    def test_loss_examples(self):
        self.assertAlmostEqual(loss(1.0, 2.0, 0.0, 0.1).total, 1.4)
        self.assertEqual(loss(0.3, 0.0, 0.3, 0.5).total, 0.0)
        self.assertEqual(loss(2.0, 5.0, 0.5, 0.0).total, 2.25)
        with self.assertRaises(ValueError):
            loss(0.0, 0.0, 0.0, -1.0)

    def test_backward_single_reciprocal(self):
        model = CauchyNetModel([[0]], [1], 0.0)
        fo = forward(model, [1.0])
        self.assertEqual((fo.y, fo.e), (1.0, 0.0))
        grads = backward(model, fo, [1.0], 0.0, 0.0)
        self.assertAlmostEqual(grads.dB[0, 0].real, -2.0)
        self.assertAlmostEqual(grads.dB[0, 0].imag, 0.0)
        numeric = finite_difference_gradients(model, [1.0], 0.0, 0.0)
        assert_allclose(grads.dB, numeric.dB, atol=1e-8)

    def test_backward_imaginary_bias_partial(self):
        model = CauchyNetModel([[0]], [1], 0.0)
        fo = forward(model, [1.0])
        grads = backward(model, fo, [1.0], 1.0, 0.5)
        numeric = finite_difference_gradients(model, [1.0], 1.0, 0.5)
        self.assertAlmostEqual(grads.dB[0, 0].imag, numeric.dB[0, 0].imag, delta=1e-8)

    def test_zero_gradient_at_fixed_point(self):
        model = CauchyNetModel([[0.5, -0.25], [1.5, 2.0]], [0.75, -1.25], 0.0)
        x = [0.3, 0.9]
        fo = forward(model, x)
        self.assertEqual(fo.e, 0.0)
        grads = backward(model, fo, x, fo.y, 0.7)
        self.assertEqual(grads.max_abs(), 0.0)

    def test_backward_matches_finite_differences(self):
        rng = Rng(2024)
        for instance in range(100):
            h = (1, 2, 8)[instance % 3]
            m = (1, 2, 3)[(instance // 3) % 3]
            lam = (0.0, 0.1, 1.0)[(instance // 9) % 3]
            model = model_away_from_poles(rng, h, m)
            x = rng.uniform(-1.0, 1.0, size=m)
            y_true = float(rng.normal(1.0))
            analytic = backward(model, forward(model, x), x, y_true, lam)
            numeric = finite_difference_gradients(model, x, y_true, lam)
            for a, n in zip(analytic.as_list(), numeric.as_list()):
                scale = max(1.0, float(np.max(np.abs(n))))
                assert_allclose(a.view(float), n.view(float), rtol=1e-5, atol=1e-7 * scale)

    def test_batch_gradients_are_the_mean_of_sample_gradients(self):
        rng = Rng(99)
        model = model_away_from_poles(rng, 4, 2)
        X = rng.uniform(-1, 1, size=(6, 2))
        y = rng.normal(1.0, size=6)
        value, grads = batch_loss_and_gradients(model, X, y, 0.3)
        per_sample = [backward(model, forward(model, x), x, t, 0.3) for x, t in zip(X, y)]
        mean = sum(per_sample[1:], per_sample[0]) * (1.0 / len(per_sample))
        assert_allclose(grads.dB, mean.dB, rtol=1e-10, atol=1e-12)
        assert_allclose(grads.dC, mean.dC, rtol=1e-10, atol=1e-12)
        self.assertAlmostEqual(value.total, batch_loss(model, X, y, 0.3).total, places=14)
        numeric = finite_difference_gradients(model, X, y, 0.3)
        assert_allclose(grads.dC, numeric.dC, rtol=1e-5, atol=1e-7)

    def test_gradients_are_affine_in_lambda(self):
        rng = Rng(31)
        model = model_away_from_poles(rng, 5, 2)
        X = rng.uniform(-1.0, 1.0, size=(7, 2))
        y = rng.normal(1.0, size=7)
        at_zero = batch_loss_and_gradients(model, X, y, 0.0)[1]
        at_one = batch_loss_and_gradients(model, X, y, 1.0)[1]
        for lam in (0.25, 2.5, 10.0):
            expected = at_zero + (at_one - at_zero) * lam
            actual = batch_loss_and_gradients(model, X, y, lam)[1]
            self.assertLess((actual - expected).max_abs(), 1e-11 * max(1.0, expected.max_abs()))

    def test_degenerate_step_is_rejected(self):
        with self.assertRaises(ValueError):
            finite_difference_gradients(CauchyNetModel([[1j]], [1]), [0.0], 0.0, 0.1, step=0.0)


class _Scalar:
    model_type = 'scalar'

    def __init__(self, value=0.0):
        self.theta = np.array([value])

    def parameters(self):
        return [self.theta]


class _Gradient:
    def __init__(self, value):
        self.value = np.array([value])

    def as_list(self):
        return [self.value]


class OptimTestCase(SimpleTestCase):
    def test_lr_schedule(self):
        config = TrainConfig(lr0=0.01, lr_decay_factor=0.5, lr_decay_every=100)
        self.assertEqual(lr_at(config, 0), 0.01)
        self.assertEqual(lr_at(config, 100), 0.005)
        self.assertEqual(lr_at(config, 250), 0.0025)
        with self.assertRaises(ValueError):
            lr_at(config, -1)

    def test_config_validation(self):
        with self.assertRaises(ValueError):
            TrainConfig(epochs=0)
        with self.assertRaises(ValueError):
            TrainConfig(lr0=0.0)
        with self.assertRaises(ValueError):
            TrainConfig(lr_decay_factor=1.5)

    def test_zero_gradient_is_a_fixed_point(self):
        model = model_away_from_poles(Rng(1), 3, 2)
        before = [p.copy() for p in model.parameters()]
        _, grads = batch_loss_and_gradients(model, np.zeros((1, 2)), [0.0], 0.1)
        adam_step(model, grads * 0.0, AdamState.for_model(model), lr=0.1, weight_decay=0.0)
        for original, current in zip(before, model.parameters()):
            assert_array_equal(original, current)

    def test_first_step_closed_form(self):
        model = _Scalar(1.0)
        state = AdamState.for_model(model)
        adam_step(model, _Gradient(-4.0), state, lr=0.01)
        expected = 1.0 - 0.01 * -4.0 / (4.0 + state.eps_adam)
        assert_allclose(model.theta, [expected], rtol=1e-12)
        self.assertEqual(state.t, 1)

    def test_scalar_convergence(self):
        model = _Scalar(0.0)
        state = AdamState.for_model(model)
        for _ in range(200):
            adam_step(model, _Gradient(2.0 * (model.theta[0] - 3.0)), state, lr=0.05)
        self.assertAlmostEqual(model.theta[0], 3.0, delta=1e-2)

    def test_complex_components_are_separate_coordinates(self):
        model = CauchyNetModel([[1 + 1j]], [1 + 1j])
        state = AdamState.for_model(model)
        grads = batch_loss_and_gradients(model, [[0.5]], [0.0], 0.0)[1]
        grads.dB[...] = 2.0 - 0.5j
        grads.dC[...] = 0.0
        adam_step(model, grads, state, lr=0.1)
        # each component moves by lr on the first step, whatever its gradient scale
        assert_allclose(model.B[0, 0], (1 - 0.1) + (1 + 0.1) * 1j, rtol=1e-7)

    def test_mismatched_gradients_are_rejected(self):
        model = model_away_from_poles(Rng(1), 3, 1)
        with self.assertRaises(LengthMismatch):
            adam_step(model, _Gradient(1.0), AdamState.for_model(model), lr=0.1)

    def test_training_is_deterministic(self):
        dataset = toy_dataset(Rng(5))
        config = TrainConfig(epochs=15, batch_size=8, lr0=0.01, seed=3)
        first = model_away_from_poles(Rng(9), 8, 1)
        second = first.copy()
        log_a = train(first, dataset, config)
        log_b = train(second, dataset, config)
        self.assertTrue(log_a.to_frame(wall_time=False).equals(log_b.to_frame(wall_time=False)))
        assert_array_equal(first.B, second.B)
        assert_array_equal(first.C, second.C)
        self.assertEqual([r.epoch for r in log_a], list(range(1, 16)))

    def test_minibatch_order_has_its_own_stream(self):
        assert_array_equal(epoch_order(10, 3, 40), epoch_order(10, 3, 40))
        self.assertFalse(np.array_equal(epoch_order(10, 3, 40), epoch_order(10, 4, 40)))
        for key in (1, 2, 3, 4):
            self.assertFalse(np.array_equal(epoch_order(10, key, 40), Rng(10, key).permutation(40)))

    def test_imaginary_penalty_shrinks_the_imaginary_part(self):
        dataset = toy_dataset(Rng(5), n=80)
        final = {}
        for lam in (0.0, 5.0):
            model = init_xavier_complex(16, 1, Rng(2))
            log = train(model, dataset, TrainConfig(epochs=60, batch_size=8, lr0=0.01, lam=lam, seed=1))
            self.assertTrue(all(record.val_mean_abs_imag is not None for record in log))
            final[lam] = log[-1].val_mean_abs_imag
        self.assertLess(final[5.0], final[0.0])

    def test_training_reduces_loss(self):
        dataset = toy_dataset(Rng(5), n=80)
        model = init_xavier_complex(16, 1, Rng(2))
        log = train(model, dataset, TrainConfig(epochs=60, batch_size=8, lr0=0.01, seed=1))
        self.assertLess(log[-1].train_loss, log[0].train_loss)

    def test_monitor_sees_every_epoch(self):
        seen = []
        dataset = toy_dataset(Rng(5))
        train(model_away_from_poles(Rng(9), 4, 1), dataset, TrainConfig(epochs=5, seed=1),
              monitor=lambda epoch, model: seen.append(epoch))
        self.assertEqual(seen, [1, 2, 3, 4, 5])

    def test_pole_during_training_reports_the_epoch(self):
        X = np.array([[0.5], [0.25]])
        dataset = SplitDataset(Split(X, np.ones(2)), Split(X[:0], np.ones(0)), Split(X[:0], np.ones(0)), m=1)
        model = CauchyNetModel([[-0.5 + 0j]], [1.0], 0.0)
        with self.assertRaises(TrainingDiverged) as caught:
            train(model, dataset, TrainConfig(epochs=3, seed=1))
        self.assertEqual(caught.exception.epoch, 1)
        self.assertEqual(len(caught.exception.log), 0)

    def test_trainlog_csv_leaves_wall_time_empty(self):
        dataset = toy_dataset(Rng(5))
        log = train(model_away_from_poles(Rng(9), 4, 1), dataset, TrainConfig(epochs=2, seed=1))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'trainlog.csv')
            log.to_csv(path, wall_time=False)
            with open(path) as handle:
                lines = handle.read().splitlines()
        self.assertEqual(lines[0], 'epoch,lr,train_loss,val_loss,wall_ms')
        self.assertTrue(lines[1].endswith(','))
        self.assertEqual(len(lines), 3)


class BaselineTestCase(SimpleTestCase):
    def test_forward_examples(self):
        zeros = MlpModel(np.zeros((3, 2)), np.zeros(3), np.zeros(3), 0.0)
        self.assertEqual(mlp_forward(zeros, [1.5, -2.0]), 0.0)
        unit = MlpModel([[1.0]], [0.0], [1.0], 0.0)
        self.assertEqual(mlp_forward(unit, [-3.0]), 0.0)
        self.assertEqual(mlp_forward(unit, [2.0]), 2.0)

    def test_zero_residual_gives_zero_gradient(self):
        model = init_kaiming_mlp(6, 2, Rng(4))
        x = [0.2, -0.7]
        grads = mlp_backward(model, x, mlp_forward(model, x))
        for g in grads.as_list():
            assert_array_equal(g, np.zeros_like(g))

    def test_inactive_unit_has_zero_row(self):
        model = MlpModel([[1.0], [-1.0]], [0.0, 0.0], [1.0, 1.0], 0.0)
        grads = mlp_backward(model, [2.0], 0.0)
        assert_array_equal(grads.dW1[1], [0.0])
        self.assertNotEqual(grads.dW1[0, 0], 0.0)

    def test_forward_is_piecewise_linear(self):
        model = init_kaiming_mlp(12, 1, Rng(6))
        model.b1[...] = Rng(7).normal(0.5, size=12)
        x = np.linspace(-2.0, 2.0, 4001)
        y = mlp_forward_batch(model, x[:, None])
        second = y[2:] - 2.0 * y[1:-1] + y[:-2]
        kinks = -model.b1 / model.W1[:, 0]
        straddles = np.any(np.abs(x[1:-1, None] - kinks[None, :]) <= 1.01 * (x[1] - x[0]), axis=1)
        self.assertGreater(np.count_nonzero(~straddles), 3900)
        assert_allclose(second[~straddles], 0.0, atol=1e-9)

    def test_backward_matches_finite_differences(self):
        rng = Rng(77)
        for _ in range(100):
            h, m = int(rng.uniform(1, 9)), int(rng.uniform(1, 4))
            model = init_kaiming_mlp(h, m, rng)
            model.b1[...] = rng.normal(0.1, size=h)
            x = rng.uniform(-1.0, 1.0, size=m)
            pre = model.W1 @ x + model.b1
            if np.min(np.abs(pre)) < 1e-3:
                continue
            y_true = float(rng.normal(1.0))
            analytic = mlp_backward(model, x, y_true)
            numeric = mlp_finite_difference(model, x, y_true)
            for a, n in zip(analytic.as_list(), numeric.as_list()):
                assert_allclose(a, n, rtol=1e-5, atol=1e-8)

    def test_parameter_count(self):
        self.assertEqual(mlp_parameter_count(init_kaiming_mlp(128, 1, Rng(1))), 385)
