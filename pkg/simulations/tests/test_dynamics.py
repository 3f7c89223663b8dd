from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase

from circuits.hamiltonians import ConstantCoupling, TwoQubitParams, build_rwa_two, build_three, ThreeQubitParams
from circuits.qops import PauliKind, basis_index, basis_state, embed, excitation_operator, pauli

from simulations.catalog import catalog, get_scenario
from simulations.dynamics import (
    IntegratorConfig,
    LindbladSystem,
    NoiseRates,
    Trajectory,
    check_trajectory,
    dissipator,
    integrate,
    lindblad_rhs,
    liouvillian,
    noise_channels,
    propagate_expm,
)
from simulations.exceptions import IntegrationError, InvariantViolation

RESONANT = TwoQubitParams(1.0, 1.0, ConstantCoupling(1.0))


def swap_system(rates=None):
    return LindbladSystem.with_noise(build_rwa_two(RESONANT, 1.0), rates or NoiseRates())


class DissipatorTests(SimpleTestCase):

    def test_lowering_channel_moves_excited_population_down(self):
        minus = pauli(PauliKind.MINUS)
        excited = basis_state('1')
        np.testing.assert_allclose(dissipator(minus, excited), np.diag([1.0, -1.0]))

    def test_dephasing_kills_coherence_at_rate_two(self):
        plus_state = 0.5 * np.ones((2, 2), dtype=complex)
        out = dissipator(pauli(PauliKind.Z), plus_state)
        np.testing.assert_allclose(np.diag(out), [0.0, 0.0])
        self.assertAlmostEqual(out[0, 1].real, -1.0)

    def test_dimension_mismatch(self):
        with self.assertRaises(ValueError):
            dissipator(pauli(PauliKind.Z), np.eye(4))

    def test_rhs_is_traceless_and_hermitian(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        system = swap_system(NoiseRates(0.3, 0.2, 0.1))
        out = lindblad_rhs(0.0, rho, system)
        self.assertAlmostEqual(abs(np.trace(out)), 0.0, places=12)
        np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


class NoiseChannelTests(SimpleTestCase):

    def test_zero_rates_give_no_channels(self):
        self.assertEqual(noise_channels(2, NoiseRates()), [])

    def test_one_channel_per_qubit_and_kind(self):
        channels = noise_channels(3, NoiseRates(0.1, 0.2, 0.3))
        self.assertEqual(len(channels), 9)
        op, rate = channels[0]
        np.testing.assert_array_equal(op, embed(pauli(PauliKind.MINUS), 1, 3))
        self.assertEqual(rate, 0.1)

    def test_per_qubit_rates_need_one_entry_per_qubit(self):
        with self.assertRaises(ValueError):
            noise_channels(2, [NoiseRates(0.1)])

    def test_negative_rate_rejected(self):
        with self.assertRaises(ValueError):
            NoiseRates(gamma_down=-0.1)


class IntegratorConfigTests(SimpleTestCase):

    def test_settings_defaults(self):
        config = IntegratorConfig.from_settings()
        self.assertEqual(config.grid_points, 1001)
        self.assertEqual(config.t_max, 10.0)
        self.assertEqual(config.method, 'DOP853')
        self.assertEqual(config.rel_tol, 1e-10)
        self.assertEqual(config.abs_tol, 1e-10)

    def test_none_overrides_are_ignored(self):
        config = IntegratorConfig.from_settings(t_max=None, grid_points=11)
        self.assertEqual(config.t_max, 10.0)
        np.testing.assert_allclose(config.grid, np.linspace(0, 10, 11))

    def test_invalid_values(self):
        for kwargs in ({'grid_points': 1}, {'t_max': 0.0}, {'rel_tol': 0.0}, {'method': 'Euler'}):
            with self.subTest(kwargs=kwargs), self.assertRaises(ValueError):
                IntegratorConfig(**kwargs)


class IntegrateTests(SimpleTestCase):

    def test_ideal_swap_matches_closed_form(self):
        trajectory = integrate(swap_system(), basis_state('01'))
        t = trajectory.grid
        pops = trajectory.populations()
        np.testing.assert_allclose(pops[:, basis_index('01')], np.cos(t) ** 2, atol=1e-7)
        np.testing.assert_allclose(pops[:, basis_index('10')], np.sin(t) ** 2, atol=1e-7)
        self.assertEqual(trajectory.states.shape, (1001, 4, 4))
        self.assertGreater(trajectory.nfev, 0)

    def test_initial_state_is_first_grid_point(self):
        rho0 = basis_state('01')
        trajectory = integrate(swap_system(), rho0, IntegratorConfig(t_max=1.0, grid_points=5))
        np.testing.assert_array_equal(trajectory.states[0], rho0)
        np.testing.assert_allclose(trajectory.at(1.0), trajectory.states[-1])

    def test_emission_decays_excitation(self):
        rates = NoiseRates(gamma_down=0.5)
        trajectory = integrate(swap_system(rates), basis_state('01'), IntegratorConfig(t_max=4.0, grid_points=41))
        ground = trajectory.populations()[:, basis_index('00')]
        np.testing.assert_allclose(ground, 1 - np.exp(-0.5 * trajectory.grid), atol=1e-7)

    def test_time_dependent_hamiltonian_is_accepted(self):
        h = build_rwa_two(RESONANT, 1.0)
        system = LindbladSystem(lambda t: h)
        self.assertTrue(system.is_time_dependent)
        trajectory = integrate(system, basis_state('01'), IntegratorConfig(t_max=1.0, grid_points=11))
        np.testing.assert_allclose(trajectory.populations()[-1, basis_index('10')], np.sin(1.0) ** 2, atol=1e-7)

    def test_shape_mismatch(self):
        with self.assertRaises(ValueError):
            integrate(swap_system(), basis_state('101'))

    def test_invalid_initial_state(self):
        with self.assertRaises(ValueError):
            integrate(swap_system(), np.diag([0.5, 0.5, 0.5, 0.5]).astype(complex))

    def test_integration_error_names_stop_time(self):
        error = IntegrationError("Required step size is less than spacing between numbers.", 2.5)
        self.assertIn("t=2.5", str(error))
        self.assertEqual(error.t_reached, 2.5)


class CheckTrajectoryTests(SimpleTestCase):

    def trajectory(self, states):
        states = np.asarray(states, dtype=complex)
        return Trajectory(grid=np.arange(len(states), dtype=float), states=states, nfev=0, message='')

    def test_valid_trajectory_report(self):
        report = check_trajectory(self.trajectory([basis_state('01')] * 3), 1e-8, 1e-8, 1e-8)
        self.assertEqual(report['trace_drift'], 0.0)
        self.assertEqual(report['hermiticity'], 0.0)
        self.assertAlmostEqual(report['min_eigenvalue'], 0.0)

    def test_trace_drift_raises(self):
        with self.assertRaises(InvariantViolation) as ctx:
            check_trajectory(self.trajectory([basis_state('01') * 1.001]), 1e-8, 1e-8, 1e-8)
        self.assertIn('trace drift', str(ctx.exception))
        self.assertAlmostEqual(ctx.exception.report['trace_drift'], 1e-3)

    def test_negative_eigenvalue_raises(self):
        rho = np.diag([1.1, -0.1, 0.0, 0.0])
        with self.assertRaises(InvariantViolation):
            check_trajectory(self.trajectory([rho]), 1e-8, 1e-8, 1e-8)

    def test_infinite_tolerances_only_report(self):
        report = check_trajectory(self.trajectory([np.diag([1.1, -0.1, 0, 0])]), np.inf, np.inf, np.inf)
        self.assertAlmostEqual(report['min_eigenvalue'], -0.1)


class LiouvillianTests(SimpleTestCase):

    def test_matches_rhs_on_vectorized_state(self):
        system = swap_system(NoiseRates(0.2, 0.1, 0.3))
        rng = np.random.default_rng(7)
        rho = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        expected = lindblad_rhs(0.0, rho, system)
        vec = liouvillian(system) @ rho.ravel(order='F')
        np.testing.assert_allclose(vec.reshape(4, 4, order='F'), expected, atol=1e-12)

    def test_rejects_time_dependent_system(self):
        with self.assertRaises(ValueError):
            liouvillian(LindbladSystem(lambda t: np.eye(4, dtype=complex)))

    def test_expm_agrees_with_runge_kutta(self):
        system = swap_system(NoiseRates(0.3, 0.1, 0.2))
        config = IntegratorConfig(t_max=5.0, grid_points=51)
        rk = integrate(system, basis_state('01'), config)
        exact = propagate_expm(system, basis_state('01'), config.grid)
        np.testing.assert_allclose(rk.states, exact.states, rtol=0, atol=1e-8)

    def test_expm_three_qubit_exchange(self):
        params = ThreeQubitParams(1.0, 0.5, 1.0, ConstantCoupling(1.0), ConstantCoupling(1.0), ConstantCoupling(0.5))
        system = LindbladSystem(build_three(params, (1.0, 1.0, 0.5)))
        grid = np.linspace(0.0, 3.0, 31)
        pops = propagate_expm(system, basis_state('101'), grid).populations()
        np.testing.assert_allclose(pops[:, basis_index('101')], np.cos(np.sqrt(2) * grid) ** 2, atol=1e-9)
        np.testing.assert_allclose(pops[:, basis_index('011')], 0.5 * np.sin(np.sqrt(2) * grid) ** 2, atol=1e-9)

    def test_amplitude_damping_closed_form(self):
        system = LindbladSystem(np.zeros((2, 2), dtype=complex), [(pauli(PauliKind.MINUS), 1.0)])
        grid = np.linspace(0.0, 5.0, 26)
        trajectory = propagate_expm(system, basis_state('1'), grid)
        np.testing.assert_allclose(trajectory.populations()[:, 1], np.exp(-grid), atol=1e-10)
        np.testing.assert_array_equal(trajectory.states[0], basis_state('1'))

    def test_zero_generator_keeps_initial_state(self):
        rho0 = basis_state('01')
        trajectory = integrate(LindbladSystem(np.zeros((4, 4), dtype=complex)), rho0,
                               IntegratorConfig(t_max=2.0, grid_points=11))
        for state in trajectory.states:
            np.testing.assert_allclose(state, rho0, atol=1e-14)


def fixed_draws(spec):
    """Every random parameter at the middle of its range"""
    return {name: bounds.mean for name, bounds in spec.random_spec().ranges.items()}


class CatalogAccuracyTests(SimpleTestCase):
    """Default integrator settings on the preset systems"""

    def test_runge_kutta_matches_expm_on_every_preset(self):
        for name, spec in catalog().items():
            with self.subTest(name=name):
                system = spec.system_for(fixed_draws(spec))
                rk = integrate(system, spec.initial_state(), spec.integrator)
                exact = propagate_expm(system, spec.initial_state(), rk.grid[::10])
                self.assertLessEqual(float(np.max(np.abs(rk.states[::10] - exact.states))), 1e-8)

    def test_halving_tolerances_barely_moves_populations(self):
        for name in ('fig2a', 'fig4a'):
            with self.subTest(name=name):
                spec = get_scenario(name)
                system = spec.system_for({})
                config = spec.integrator
                halved = replace(config, rel_tol=config.rel_tol / 2, abs_tol=config.abs_tol / 2)
                coarse = integrate(system, spec.initial_state(), config).populations()
                fine = integrate(system, spec.initial_state(), halved).populations()
                self.assertLessEqual(float(np.max(np.abs(coarse - fine))), 1e-7)

    def test_noiseless_presets_conserve_excitations(self):
        for name in ('fig2a', 'fig4a'):
            with self.subTest(name=name):
                spec = get_scenario(name)
                trajectory = integrate(spec.system_for({}), spec.initial_state(), spec.integrator)
                numbers = np.real(np.einsum('ij,tji->t', excitation_operator(spec.qubits), trajectory.states))
                self.assertLessEqual(float(np.max(np.abs(numbers - numbers[0]))), 1e-10)
