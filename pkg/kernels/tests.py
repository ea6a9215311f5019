import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from networks.cauchynet import forward_batch
from networks.exceptions import PoleEncountered, SchemaError

from .demos import HOLOMORPHIC_DEMOS, convergence_table
from .quadrature import (BoundaryMesh, KernelExpansion, cauchy_kernel, circle_mesh, ellipse_mesh,
                         evaluate_expansion, expansion_to_model, fit_expansion_least_squares,
                         quadrature_expansion, tensor_mesh)
from .serializers import load_expansion, save_expansion


class CauchyKernelTestCase(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(cauchy_kernel(2 + 0j, 1.0), 1 + 0j)
        self.assertEqual(cauchy_kernel([1j, 2j], [0.0, 0.0]), -0.5 + 0j)
        self.assertEqual(cauchy_kernel(1j, 0.0), -1j)

    def test_pole(self):
        with self.assertRaises(PoleEncountered):
            cauchy_kernel(1 + 0j, 1.0)

    def test_kernel_is_bounded_by_the_distance_to_the_contour(self):
        mesh = ellipse_mesh(2.0, 1.0, 0j, 64)
        grid = np.linspace(-1.0, 1.0, 101)
        bound = 1.0 / np.min(np.abs(mesh.nodes[0][:, None] - grid[None, :]))
        values = [abs(cauchy_kernel(xi, x)) for xi in mesh.nodes[0] for x in grid]
        self.assertLessEqual(max(values), bound * (1 + 1e-12))


class BoundaryMeshTestCase(SimpleTestCase):
    def test_unit_circle(self):
        mesh = ellipse_mesh(1.0, 1.0, 0j, 4)
        assert_allclose(mesh.nodes[0], [1, 1j, -1, -1j], atol=1e-15)
        self.assertEqual(mesh.dim, 1)

    def test_increments_close_the_contour(self):
        for mesh in (ellipse_mesh(6.0, 2.0, 1 - 1j, 37), circle_mesh(3.0, nodes=256)):
            self.assertLess(abs(np.sum(mesh.increments[0])), 1e-12)

    def test_wide_ellipse(self):
        zeta = ellipse_mesh(6.0, 2.0, 0j, 50).nodes[0]
        assert_allclose((zeta.real / 6) ** 2 + (zeta.imag / 2) ** 2, 1.0, atol=1e-12)

    def test_rejects_bad_meshes(self):
        with self.assertRaises(ValueError):
            ellipse_mesh(1.0, 1.0, 0j, 3)
        with self.assertRaises(ValueError):
            ellipse_mesh(0.0, 1.0)
        with self.assertRaises(ValueError):
            BoundaryMesh(nodes=(np.zeros(4),), increments=(np.ones(4),))

    def test_tensor_mesh(self):
        mesh = tensor_mesh(circle_mesh(2.0, nodes=8), circle_mesh(3.0, nodes=16))
        self.assertEqual(mesh.dim, 2)
        self.assertEqual(len(quadrature_expansion(lambda z1, z2: z1 * z2, mesh)), 8 * 16)


class QuadratureTestCase(SimpleTestCase):
    def test_constant_on_unit_circle(self):
        for nodes in (16, 32, 64):
            expansion = quadrature_expansion(HOLOMORPHIC_DEMOS['one'], circle_mesh(1.0, nodes=nodes))
            self.assertLess(abs(evaluate_expansion(expansion, [0.0]) - 1.0), 1e-12)

    def test_square_on_ellipse(self):
        expansion = quadrature_expansion(lambda z: z ** 2, ellipse_mesh(2.0, 1.0, 0j, 128))
        self.assertLess(abs(evaluate_expansion(expansion, [0.5]) - 0.25), 1e-8)

    def test_exponential_on_circle(self):
        expansion = quadrature_expansion(np.exp, circle_mesh(3.0, nodes=256))
        self.assertLess(abs(evaluate_expansion(expansion, [1.0]) - math.e), 1e-8)

    def test_two_dimensional_product(self):
        mesh = tensor_mesh(circle_mesh(2.0, nodes=32), circle_mesh(2.0, nodes=32))
        expansion = quadrature_expansion(lambda z1, z2: z1 * z2, mesh)
        self.assertLess(abs(evaluate_expansion(expansion, [0.3, -0.4]) + 0.12), 1e-10)

    def test_empty_and_single_term(self):
        empty = KernelExpansion(np.zeros((0, 1)), [])
        self.assertEqual(evaluate_expansion(empty, [0.5]), 0j)
        self.assertEqual(evaluate_expansion(KernelExpansion([2 + 0j], [1 + 0j]), [1.0]), 1 + 0j)

    def test_batch_evaluation(self):
        expansion = quadrature_expansion(np.exp, circle_mesh(3.0, nodes=128))
        X = np.linspace(-1, 1, 7).reshape(-1, 1)
        values = evaluate_expansion(expansion, X)
        self.assertEqual(values.shape, (7,))
        assert_allclose(values, np.exp(X[:, 0]), atol=1e-10)

    def test_linear_in_weights(self):
        mesh = ellipse_mesh(2.0, 1.0, 0j, 32)
        first = quadrature_expansion(np.exp, mesh)
        second = quadrature_expansion(lambda z: z ** 3, mesh)
        combined = KernelExpansion(first.points, 2 * first.weights - 3 * second.weights)
        x = np.linspace(-0.9, 0.9, 11).reshape(-1, 1)
        assert_allclose(
            evaluate_expansion(combined, x),
            2 * evaluate_expansion(first, x) - 3 * evaluate_expansion(second, x),
            rtol=1e-12, atol=1e-12,
        )

    def test_expansion_matches_network_forward(self):
        for epsilon in (0.0, 1e-3):
            expansion = quadrature_expansion(lambda z: z ** 2, ellipse_mesh(2.0, 1.0, 0j, 32))
            model = expansion_to_model(expansion, epsilon=epsilon)
            X = np.linspace(-1, 1, 9).reshape(-1, 1)
            _, _, o, _ = forward_batch(model, X)
            assert_allclose(o, evaluate_expansion(expansion, X), rtol=1e-10, atol=1e-12)

        mesh = tensor_mesh(circle_mesh(2.0, nodes=8), circle_mesh(2.0, nodes=8))
        expansion = quadrature_expansion(lambda z1, z2: z1 + z2, mesh)
        model = expansion_to_model(expansion)
        X = np.array([[0.1, 0.2], [-0.5, 0.7]])
        assert_allclose(forward_batch(model, X)[2], evaluate_expansion(expansion, X), rtol=1e-10)


class LeastSquaresTestCase(SimpleTestCase):
    def test_single_sample_interpolates(self):
        expansion = fit_expansion_least_squares([0.5], [3.0], [2.0 + 0j], tau=0.0)
        assert_allclose(expansion.weights, [4.5], rtol=1e-12)

    def test_recovers_a_kernel_in_the_span(self):
        points = circle_mesh(2.0, nodes=32).nodes[0]
        samples = np.linspace(-1, 1, 64)
        expansion = fit_expansion_least_squares(samples, 1.0 / (2.0 - samples), points)
        grid = np.linspace(-0.99, 0.99, 397).reshape(-1, 1)
        error = np.abs(evaluate_expansion(expansion, grid) - 1.0 / (2.0 - grid[:, 0]))
        self.assertLess(error.max(), 5e-5)

    def test_smooth_target(self):
        points = ellipse_mesh(2.0, 1.0, 0j, 64).nodes[0]
        samples = np.linspace(-1, 1, 256)
        expansion = fit_expansion_least_squares(samples, np.sin(3 * samples), points)
        grid = np.linspace(-1, 1, 1001).reshape(-1, 1)
        error = np.abs(evaluate_expansion(expansion, grid) - np.sin(3 * grid[:, 0]))
        self.assertLess(error.max(), 1e-4)

    def test_needs_samples_and_points(self):
        with self.assertRaises(ValueError):
            fit_expansion_least_squares([], [], [2.0])
        with self.assertRaises(ValueError):
            fit_expansion_least_squares([0.1, 0.2], [1.0], [2.0])


class ConvergenceTableTestCase(SimpleTestCase):
    def test_error_shrinks_as_nodes_double(self):
        table = convergence_table('square', a=2.0, b=1.0, node_counts=(16, 32, 64, 128))
        self.assertEqual(list(table.columns), ['nodes', 'sup_error'])
        self.assertEqual(table['nodes'].tolist(), [16, 32, 64, 128])
        errors = table['sup_error'].tolist()
        self.assertGreater(errors[0], errors[1])
        self.assertGreater(errors[1], errors[2])
        self.assertLess(errors[3], 1e-8)

    def test_small_node_count_still_reports(self):
        table = convergence_table('exp', node_counts=(4,))
        self.assertEqual(len(table), 1)
        self.assertTrue(np.isfinite(table['sup_error'][0]))

    def test_rejects_unknown_target_and_outside_interval(self):
        with self.assertRaises(KeyError):
            convergence_table('sinc')
        with self.assertRaises(ValueError):
            convergence_table('square', a=1.0, b=1.0, interval=(-1.0, 1.0))


class ExpansionSerializerTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'expansion.json')

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip(self):
        expansion = quadrature_expansion(np.exp, ellipse_mesh(2.0, 1.0, 0.5j, 16))
        save_expansion(expansion, self.path)
        loaded = load_expansion(self.path)
        np.testing.assert_array_equal(loaded.points, expansion.points)
        np.testing.assert_array_equal(loaded.weights, expansion.weights)

    def test_length_mismatch_is_rejected(self):
        with open(self.path, 'w') as handle:
            handle.write('{"xi_re": [[1.0]], "xi_im": [[0.0]], "theta_re": [1.0, 2.0], "theta_im": [0.0, 0.0]}')
        with self.assertRaises(SchemaError):
            load_expansion(self.path)
