import math
import unittest

import numpy as np
from numpy.testing import assert_allclose

from pymessenger.analysis import TrajectoryAnalysis
from pymessenger.mass_geometry import MassSystem, PhaseState, cluster_aggregates, relative_pair, to_com_frame
from pymessenger.nbody import (ConservationError, IntegratorParams, Scenario, StepFailureError, energy, forces,
                               integrate, integrate_from, reverse_momenta, reversibility_error)
from pymessenger.partitions import ParameterError
from pymessenger.potential import PotentialSpec, SingularityError


def circular_binary(integrator=None, t=0.0):
    """ Two unit masses on a circular orbit of separation 1; relative speed sqrt(2), period 2 pi / sqrt(2)."""
    sys = MassSystem([1.0, 1.0], 2)
    w = math.sqrt(2.0) / 2.0
    state = PhaseState([[-0.5, 0.0], [0.5, 0.0]], [[0.0, -w], [0.0, w]], t)
    return Scenario(sys, PotentialSpec.gravity(sys.masses), state, integrator)


class EnergyTest(unittest.TestCase):

    def test_free_energy_is_kinetic(self):
        sys = MassSystem([1.0, 2.0], 2)
        scenario = Scenario(sys, PotentialSpec.free(2), PhaseState([[0, 0], [1, 0]], [[1, 0], [-1, 0]]))
        self.assertAlmostEqual(energy(scenario, scenario.initial), 0.5 + 0.25)

    def test_gravity_pair(self):
        sys = MassSystem([2.0, 3.0], 3)
        state = PhaseState([[0, 0, 0], [0, 4, 0]], np.zeros((2, 3)))
        scenario = Scenario(sys, PotentialSpec.gravity(sys.masses), state, com_frame=False)
        self.assertAlmostEqual(energy(scenario, state), -6.0 / 4.0)
        f = forces(scenario, state)
        # attraction along the separation, magnitude m1 m2 / r**2
        assert_allclose(f[0], [0.0, 6.0 / 16.0, 0.0], atol=1e-15)
        assert_allclose(f[0] + f[1], 0.0, atol=1e-15)

    def test_singular_start(self):
        sys = MassSystem([1.0, 1.0], 2)
        with self.assertRaises(SingularityError):
            Scenario(sys, PotentialSpec.gravity(sys.masses), PhaseState([[1, 1], [1, 1]], [[0, 0], [0, 0]]))


class ComFrameTest(unittest.TestCase):

    def test_constraints(self):
        rng = np.random.default_rng(0)
        sys = MassSystem([1.0, 2.0, 3.0], 2)
        state = PhaseState(rng.normal(size=(3, 2)), rng.normal(size=(3, 2)))
        com = to_com_frame(sys, state)
        _, q_n, p_n = cluster_aggregates(sys, com, [1, 2, 3])
        assert_allclose(q_n, 0.0, atol=1e-13)
        assert_allclose(p_n, 0.0, atol=1e-13)
        again = to_com_frame(sys, com)
        assert_allclose(again.q, com.q, atol=1e-15)
        a, b = relative_pair(sys, state, [1], [2, 3]), relative_pair(sys, com, [1], [2, 3])
        self.assertAlmostEqual(a.K, b.K, places=12)
        assert_allclose(a.L, b.L, atol=1e-12)


class IntegrateTest(unittest.TestCase):

    def test_free_flight(self):
        sys = MassSystem([1.0, 2.0, 1.0], 2)
        v = np.array([[1.0, 0.5], [-0.25, 0.0], [-0.5, -0.5]])
        q0 = np.array([[0.0, 0.0], [3.0, 1.0], [-2.0, 4.0]])
        scenario = Scenario(sys, PotentialSpec.free(3), PhaseState.from_velocities(sys, q0, v, 1.0),
                            IntegratorParams(t_end=6.0))
        traj = integrate(scenario)
        self.assertEqual(traj.stop_reason, 't_end')
        self.assertAlmostEqual(traj.t[-1], 6.0)
        start = scenario.initial
        expected = start.q + 5.0 * start.velocities(sys)
        assert_allclose(traj.q[-1], expected, atol=1e-9)

    def test_circular_orbit_period(self):
        period = 2.0 * math.pi / math.sqrt(2.0)
        scenario = circular_binary(IntegratorParams(t_end=period))
        traj = integrate(scenario)
        self.assertEqual(traj.stop_reason, 't_end')
        assert_allclose(traj.q[-1], scenario.initial.q, atol=1e-6)
        radii = np.linalg.norm(traj.q[:, 0] - traj.q[:, 1], axis=1)
        assert_allclose(radii, 1.0, rtol=1e-6)
        self.assertIsNotNone(traj.L)
        self.assertEqual(traj.metadata['energy'], energy(scenario, scenario.initial))

    def test_energy_drift_small(self):
        # a thousand dynamical times 1/sqrt(2), about 160 periods
        scenario = circular_binary(IntegratorParams(t_end=1000.0 / math.sqrt(2.0)))
        traj = integrate(scenario)
        self.assertEqual(traj.stop_reason, 't_end')
        H0 = traj.H[0]
        self.assertLess(np.max(np.abs(traj.H - H0)) / abs(H0), 1e-8)
        drift = TrajectoryAnalysis(traj, scenario).drift()
        for column in ('H', 'p_N', 'L'):
            self.assertLess(float(np.max(drift[column])), 1e-8, column)

    def test_reversibility(self):
        scenario = circular_binary(IntegratorParams(t_end=1.0))
        self.assertLess(reversibility_error(scenario, 2.0), 1e-8)
        flipped = reverse_momenta(scenario.initial)
        assert_allclose(flipped.p, -scenario.initial.p)

    def test_integrate_from(self):
        scenario = circular_binary(IntegratorParams(t_end=1.0))
        traj = integrate_from(scenario, scenario.initial, 0.5)
        self.assertAlmostEqual(traj.t[-1], 0.5)

    def test_head_on_fall_stops_near_singularity(self):
        sys = MassSystem([1.0, 1.0], 2)
        params = IntegratorParams(t_end=10.0, encounter_floor=1e-3, drift_tol=1e-4)
        scenario = Scenario(sys, PotentialSpec.gravity(sys.masses),
                            PhaseState([[-1.0, 0.0], [1.0, 0.0]], np.zeros((2, 2))), params)
        traj = integrate(scenario)
        self.assertEqual(traj.stop_reason, 'near_singularity')
        self.assertLess(np.linalg.norm(traj.q[-1, 0] - traj.q[-1, 1]), 1e-3)

    def test_max_steps(self):
        traj = integrate(circular_binary(IntegratorParams(t_end=100.0, max_steps=5)))
        self.assertEqual(traj.stop_reason, 'max_steps')
        self.assertEqual(len(traj), 6)

    def test_step_failure(self):
        scenario = circular_binary(IntegratorParams(t_end=10.0, min_step=0.5))
        with self.assertRaises(StepFailureError) as ctx:
            integrate(scenario)
        self.assertEqual(ctx.exception.t, 0.0)
        self.assertEqual(ctx.exception.state.q.shape, (2, 2))

    def test_conservation_violation(self):
        scenario = circular_binary(IntegratorParams(method='RK45', rtol=1e-3, atol=1e-3, t_end=10.0,
                                                    drift_tol=1e-15))
        with self.assertRaises(ConservationError) as ctx:
            integrate(scenario)
        self.assertIn(ctx.exception.quantity, ('H', 'p_N', 'L'))

    def test_invalid_params(self):
        with self.assertRaises(ParameterError):
            IntegratorParams(method='Euler')
        with self.assertRaises(ParameterError):
            integrate(circular_binary(IntegratorParams(t_end=1.0), t=2.0))


if __name__ == "__main__":
    unittest.main()
