import numpy as np
from django.test import SimpleTestCase
from scipy import constants

from .circuit_params import (
    PhysicalCircuitParams,
    charging_energy,
    couplings_from_frequencies,
    dimensionless_from_circuit,
    josephson_energy,
    reference_circuit,
)
from .hamiltonians import (
    ConstantCoupling,
    ParametricCoupling,
    ThreeQubitParams,
    TwoQubitParams,
    UniformRandomCoupling,
    build_h0,
    build_hint_lab,
    build_hrot,
    build_lab_frame,
    build_rwa_two,
    build_three,
    lab_frame_callback,
    rotating_frame_callback,
)
from .qops import (
    PauliKind,
    basis_index,
    basis_label,
    basis_state,
    check_density_matrix,
    embed,
    excitation_operator,
    hermiticity_error,
    maximally_mixed,
    pauli,
    pure_state,
    qubit_count,
    w_state,
)


def ket(label):
    vec = np.zeros(2 ** len(label), dtype=complex)
    vec[basis_index(label)] = 1.0
    return vec


class PauliCatalogTests(SimpleTestCase):

    def test_z_is_minus_one_on_ground(self):
        np.testing.assert_array_equal(pauli(PauliKind.Z), np.diag([-1, 1]))

    def test_plus_raises_ground_and_kills_excited(self):
        plus = pauli('Plus')
        np.testing.assert_array_equal(plus @ ket('0'), ket('1'))
        np.testing.assert_array_equal(plus @ ket('1'), np.zeros(2))

    def test_commutator_xy(self):
        x, y, z = pauli('X'), pauli('Y'), pauli('Z')
        np.testing.assert_allclose(x @ y - y @ x, 2j * z, atol=1e-15)

    def test_ladder_from_xy(self):
        np.testing.assert_allclose(pauli('Plus'), (pauli('X') + 1j * pauli('Y')) / 2, atol=1e-15)
        np.testing.assert_allclose(pauli('Minus'), (pauli('X') - 1j * pauli('Y')) / 2, atol=1e-15)

    def test_returns_copy(self):
        z = pauli('Z')
        z[0, 0] = 99
        self.assertEqual(pauli('Z')[0, 0], -1)

    def test_unknown_kind(self):
        with self.assertRaises(ValueError):
            pauli('W')


class EmbedTests(SimpleTestCase):

    def test_z_on_each_site(self):
        z = pauli('Z')
        np.testing.assert_array_equal(np.diag(embed(z, 1, 2)).real, [-1, -1, 1, 1])
        np.testing.assert_array_equal(np.diag(embed(z, 2, 2)).real, [-1, 1, -1, 1])

    def test_flip_flop_moves_excitation(self):
        op = embed(pauli('Plus'), 1, 2) @ embed(pauli('Minus'), 2, 2)
        np.testing.assert_array_equal(op @ ket('01'), ket('10'))

    def test_operators_on_different_sites_commute(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        for j, k in [(1, 2), (1, 3), (2, 3)]:
            left = embed(a, j, 3) @ embed(b, k, 3)
            right = embed(b, k, 3) @ embed(a, j, 3)
            self.assertLess(np.max(np.abs(left - right)), 1e-14)

    def test_site_out_of_range(self):
        with self.assertRaises(ValueError):
            embed(pauli('X'), 3, 2)
        with self.assertRaises(ValueError):
            embed(pauli('X'), 0, 2)

    def test_rejects_non_qubit_operator(self):
        with self.assertRaises(ValueError):
            embed(np.eye(4), 1, 2)


class StateTests(SimpleTestCase):

    def test_basis_labels(self):
        self.assertEqual(basis_index('01'), 1)
        self.assertEqual(basis_index((1, 0, 1)), 5)
        self.assertEqual(basis_label(5, 3), '101')
        self.assertEqual(basis_label(0, 2), '00')
        with self.assertRaises(ValueError):
            basis_index('012')
        with self.assertRaises(ValueError):
            basis_label(4, 2)

    def test_basis_state(self):
        np.testing.assert_array_equal(np.diag(basis_state('01')).real, [0, 1, 0, 0])
        rho = basis_state('101')
        self.assertEqual(rho.shape, (8, 8))
        self.assertEqual(rho[5, 5], 1)
        self.assertEqual(np.count_nonzero(rho), 1)
        self.assertAlmostEqual(np.trace(basis_state('11')).real, 1.0)

    def test_w_state(self):
        rho = w_state()
        np.testing.assert_allclose(np.diag(rho).real, [0, 0, 0, 1 / 3, 0, 1 / 3, 1 / 3, 0])
        self.assertAlmostEqual(np.trace(rho @ rho).real, 1.0, places=14)
        self.assertAlmostEqual(rho[3, 5].real, 1 / 3)
        check_density_matrix(rho)
        with self.assertRaises(ValueError):
            w_state(2)

    def test_pure_state_normalizes(self):
        rho = pure_state([0, 1, 1, 0])
        self.assertAlmostEqual(rho[1, 2].real, 0.5)
        self.assertAlmostEqual(np.trace(rho).real, 1.0)

    def test_maximally_mixed(self):
        np.testing.assert_allclose(maximally_mixed(3), np.eye(8) / 8)

    def test_excitation_operator(self):
        np.testing.assert_allclose(np.diag(excitation_operator(2)).real, [0, 1, 1, 2])

    def test_check_density_matrix_reports_failures(self):
        report = check_density_matrix(basis_state('00'))
        self.assertEqual(report['trace_drift'], 0.0)
        with self.assertRaisesMessage(ValueError, 'trace drift'):
            check_density_matrix(2 * basis_state('00'))
        with self.assertRaisesMessage(ValueError, 'min eigenvalue'):
            check_density_matrix(np.diag([1.5, -0.5]).astype(complex))
        with self.assertRaisesMessage(ValueError, 'hermiticity'):
            check_density_matrix(np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex))

    def test_qubit_count(self):
        self.assertEqual(qubit_count(8), 3)
        with self.assertRaises(ValueError):
            qubit_count(6)


class HamiltonianTests(SimpleTestCase):

    def setUp(self):
        self.resonant = TwoQubitParams(1.0, 1.0, ConstantCoupling(1.0))
        self.three = ThreeQubitParams(
            1.0, 0.5, 1.0, ConstantCoupling(1.0), ConstantCoupling(1.0), ConstantCoupling(0.5)
        )

    def test_h0(self):
        np.testing.assert_allclose(np.diag(build_h0([1, 1])).real, [-1, 0, 0, 1])
        self.assertAlmostEqual(build_h0([1, 0.5, 1])[5, 5].real, 0.75)
        single = build_h0([0.3])
        z = pauli('Z')
        np.testing.assert_array_equal(single @ z, z @ single)
        with self.assertRaises(ValueError):
            build_h0([])

    def test_lab_interaction(self):
        np.testing.assert_array_equal(build_hint_lab(0), np.zeros((4, 4)))
        h = build_hint_lab(1.0)
        self.assertLess(hermiticity_error(h), 1e-14)
        self.assertAlmostEqual(np.trace(h).real, 0.0)
        self.assertAlmostEqual(h[0, 0].real, 1.0)

    def test_lab_frame_callback_matches_builder(self):
        params = TwoQubitParams(4.0, 4.5, ParametricCoupling(0.1, 0.3, 0.5))
        h_of_t = lab_frame_callback(params)
        for t in (0.0, 0.7, 3.1):
            np.testing.assert_allclose(h_of_t(t), build_lab_frame(t, params), atol=1e-14)

    def test_hrot_at_zero(self):
        h = build_hrot(0.0, self.resonant)
        for a, b in [('01', '10'), ('00', '11')]:
            self.assertAlmostEqual(h[basis_index(a), basis_index(b)], 1.0)
            self.assertAlmostEqual(h[basis_index(b), basis_index(a)], 1.0)
        self.assertEqual(np.count_nonzero(h), 4)

    def test_hrot_matrix_element_and_hermiticity(self):
        params = TwoQubitParams(1.3, 0.6, ParametricCoupling(0.0, 1.0, 0.7))
        h_of_t = rotating_frame_callback(params)
        for t in np.linspace(0, 5, 11):
            h = h_of_t(t)
            self.assertLess(hermiticity_error(h), 1e-14)
            np.testing.assert_allclose(h, build_hrot(t, params), atol=1e-14)
            expected = params.coupling.value(t) * np.exp(1j * 0.7 * t)
            self.assertAlmostEqual(h[basis_index('10'), basis_index('01')], expected)

    def test_rwa_two(self):
        h = build_rwa_two(self.resonant, 1.0)
        np.testing.assert_allclose(h[1:3, 1:3], [[0, 1], [1, 0]], atol=1e-15)
        n_op = excitation_operator(2)
        self.assertLess(np.max(np.abs(h @ n_op - n_op @ h)), 1e-13)
        np.testing.assert_array_equal(build_rwa_two(self.resonant, 0.0), build_h0([1, 1]))

    def test_three_qubit_two_excitation_block(self):
        h = build_three(self.three, (1.0, 1.0, 0.5))
        idx = [basis_index(label) for label in ('011', '101', '110')]
        np.testing.assert_allclose(
            h[np.ix_(idx, idx)],
            [[0.25, 1, 0.5], [1, 0.75, 1], [0.5, 1, 0.25]],
            atol=1e-14,
        )
        n_op = excitation_operator(3)
        self.assertLess(np.max(np.abs(h @ n_op - n_op @ h)), 1e-13)
        uncoupled = build_three(self.three, (0, 0, 0))
        np.testing.assert_array_equal(uncoupled, np.diag(np.diag(uncoupled)))

    def test_three_rejects_bad_couplings(self):
        with self.assertRaises(ValueError):
            build_three(self.three, (1.0, 1.0))
        with self.assertRaises(ValueError):
            build_three(self.three, (1.0, -1.0, 0.5))

    def test_coupling_models(self):
        self.assertEqual(ConstantCoupling(0.4).value(12.0), 0.4)
        parametric = ParametricCoupling(0.1, 0.5, 2.0)
        self.assertAlmostEqual(parametric.value(np.pi), 0.6)
        self.assertEqual(parametric.resonant_strength(), 0.5)
        self.assertEqual(UniformRandomCoupling(0, 1).realize(0.3), ConstantCoupling(0.3))
        with self.assertRaises(ValueError):
            UniformRandomCoupling(0, 1).value(0.0)
        with self.assertRaises(ValueError):
            UniformRandomCoupling(1, 0)
        with self.assertRaises(ValueError):
            ConstantCoupling(-0.1)
        with self.assertRaises(ValueError):
            ParametricCoupling(0, 1, 0)
        with self.assertRaises(ValueError):
            TwoQubitParams(0.0, 1.0, ConstantCoupling(1))


class CircuitConversionTests(SimpleTestCase):

    def test_coupling_from_capacitances(self):
        g = couplings_from_frequencies([4.0, 4.5], [100.0, 100.0], {(1, 2): 1.0})
        self.assertAlmostEqual(g[(1, 2)], 0.0212132, places=6)

    def test_zero_and_symmetric_coupling(self):
        self.assertEqual(couplings_from_frequencies([4.0, 4.5], [100.0, 100.0], {})[(1, 2)], 0.0)
        forward = couplings_from_frequencies([4.0, 4.5], [90.0, 110.0], {(1, 2): 1.0})
        swapped = couplings_from_frequencies([4.5, 4.0], [110.0, 90.0], {(2, 1): 1.0})
        self.assertAlmostEqual(forward[(1, 2)], swapped[(1, 2)])

    def test_reference_circuit(self):
        circuit = reference_circuit()
        self.assertEqual(circuit.omegas, (4.0, 4.5, 4.0))
        self.assertAlmostEqual(circuit.couplings[(1, 2)], 0.0212132, places=6)
        self.assertAlmostEqual(circuit.couplings[(2, 3)], 0.0212132, places=6)
        self.assertAlmostEqual(circuit.couplings[(1, 3)], 0.0004, places=10)

    def test_energies(self):
        self.assertAlmostEqual(charging_energy(100e-15) * 2 * 100e-15 / constants.e ** 2, 1.0)
        with self.assertRaises(ValueError):
            charging_energy(0.0)
        with self.assertRaises(ValueError):
            josephson_energy(-1e-9)

    def test_dimensionless_from_circuit(self):
        femto = constants.femto
        omega_c = 2 * np.pi * 1e9
        params = PhysicalCircuitParams(
            qubit_capacitances=(100 * femto, 100 * femto),
            coupling_capacitances={(1, 2): 1 * femto},
            josephson_inductances=(10e-9, 12e-9),
            reference_frequency=omega_c,
        )
        circuit = dimensionless_from_circuit(params)
        e_c = charging_energy(100 * femto)
        e_j = josephson_energy(10e-9)
        expected = (np.sqrt(8 * e_c * e_j) - e_c) / (constants.hbar * omega_c)
        self.assertAlmostEqual(circuit.omegas[0], expected, places=9)
        self.assertGreater(circuit.omegas[0], circuit.omegas[1])
        g = circuit.couplings[(1, 2)]
        self.assertAlmostEqual(g, np.sqrt(circuit.omegas[0] * circuit.omegas[1]) / 200, places=12)

    def test_invalid_circuit(self):
        with self.assertRaises(ValueError):
            PhysicalCircuitParams((0.0, 1e-13), {}, (1e-8, 1e-8), 1e9)
        with self.assertRaises(ValueError):
            PhysicalCircuitParams((1e-13, 1e-13), {(1, 3): 1e-15}, (1e-8, 1e-8), 1e9)
