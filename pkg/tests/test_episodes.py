import unittest

import numpy as np

from pymessenger.episodes import (detect_episodes, episodes_from_timeline, messenger_kinetic_ratio,
                                  messenger_tuple_between, nontrivial_cluster_diagnostics)
from pymessenger.graf import ClusterTimeline
from pymessenger.mass_geometry import MassSystem, PhaseState
from pymessenger.nbody import Scenario
from pymessenger.partitions import MessengerTuple, ParameterError, Partition, messenger_tuples
from pymessenger.poincare import PoincareSurfaceSpec
from pymessenger.potential import PotentialSpec
from pymessenger.trajectory import Trajectory


def P(*blocks):
    return Partition(blocks)


class TimelineTest(unittest.TestCase):

    def test_planted_episode(self):
        timeline = ClusterTimeline([(1.0, 2.0, P([1, 2], [3, 4])), (2.0, 3.0, P([1], [2], [3, 4])),
                                    (3.0, 5.0, P([1], [2, 3, 4]))], [])
        episodes = episodes_from_timeline(timeline)
        self.assertEqual(len(episodes), 1)
        ep = episodes[0]
        self.assertEqual(ep.tuple, MessengerTuple([1], [2], [3, 4]))
        self.assertEqual(ep.messenger, (2,))
        self.assertEqual(ep.nontrivial, (3, 4))
        self.assertEqual((ep.t_start, ep.t_end), (2.0, 3.0))
        self.assertIn(ep.tuple, messenger_tuples(4))
        self.assertEqual(ep.to_record()['tuple'], [[1], [2], [3, 4]])

    def test_two_episodes(self):
        timeline = ClusterTimeline([(1.0, 2.0, P([1, 2], [3, 4])), (2.0, 3.0, P([1], [2], [3, 4])),
                                    (3.0, 4.0, P([1], [2, 3, 4])), (4.0, 5.0, P([1], [2], [3, 4])),
                                    (5.0, 6.0, P([1, 3, 4], [2]))], [])
        tuples = [ep.tuple for ep in episodes_from_timeline(timeline)]
        self.assertEqual(tuples, [MessengerTuple([1], [2], [3, 4]), MessengerTuple([2], [3, 4], [1])])
        self.assertEqual([ep.k for ep in episodes_from_timeline(timeline)], [1, 2])

    def test_comparable_flanks_are_not_episodes(self):
        same = ClusterTimeline([(1.0, 2.0, P([1, 2], [3, 4])), (2.0, 3.0, P([1], [2], [3, 4])),
                                (3.0, 5.0, P([1, 2], [3, 4]))], [])
        self.assertEqual(episodes_from_timeline(same), [])
        self.assertIsNone(messenger_tuple_between(P([1, 2], [3, 4]), P([1], [2], [3, 4]), P([1, 2, 3, 4])))
        self.assertIsNone(messenger_tuple_between(P([1, 2], [3, 4]), P([1, 2], [3], [4]), P([1], [2, 3, 4])))

    def test_all_reference_tuples_recoverable(self):
        for mt in messenger_tuples(4):
            found = messenger_tuple_between(mt.before(), mt.partition(), mt.after())
            self.assertEqual(found, mt)


class DiagnosticsTest(unittest.TestCase):

    def setUp(self):
        self.sys = MassSystem([1.0, 1.0, 1.0], 2)
        # particles 2 and 3 form a bound pair, particle 1 is far away
        self.state = PhaseState([[10.0, 0.0], [-0.5, 0.0], [0.5, 0.0]], [[1.0, 0.0], [0.0, 0.5], [0.0, -0.5]])
        self.scenario = Scenario(self.sys, PotentialSpec.gravity(self.sys.masses), self.state, com_frame=False)

    def test_bound_binary(self):
        nc = nontrivial_cluster_diagnostics(self.scenario, self.state, P([1], [2, 3]))
        self.assertEqual(nc.block, (2, 3))
        # K_int = 0.25, V_int = -1
        self.assertAlmostEqual(nc.H_int, -0.75)
        self.assertAlmostEqual(nc.size, 1.0)
        self.assertAlmostEqual(nc.size_bound, 1.0 / 0.75)
        self.assertLessEqual(nc.size, nc.size_bound)
        self.assertIsNotNone(nc.L_int)

    def test_unbound_pair_has_no_bound(self):
        fast = PhaseState(self.state.q, [[1.0, 0.0], [0.0, 5.0], [0.0, -5.0]])
        nc = nontrivial_cluster_diagnostics(self.scenario, fast, P([1], [2, 3]))
        self.assertGreater(nc.H_int, 0.0)
        self.assertIsNone(nc.size_bound)

    def test_no_nontrivial_block(self):
        with self.assertRaises(ParameterError):
            nontrivial_cluster_diagnostics(self.scenario, self.state, P([1], [2], [3]))

    def test_messenger_kinetic_ratio(self):
        ratio, constant = messenger_kinetic_ratio(self.scenario, self.state, P([1], [2, 3]), (1,))
        self.assertAlmostEqual(ratio, 1.0)
        self.assertAlmostEqual(constant, 1.0 / 7.0)


class DetectTest(unittest.TestCase):

    def setUp(self):
        self.sys = MassSystem([1.0, 1.0, 1.0, 1.0], 2)
        self.q0 = np.array([[-5.0, 0.0], [0.0, -3.0], [5.0, 0.0], [5.0, 1.0]])
        self.v = np.array([[-1.0, 0.0], [0.0, 2.0], [1.0, 0.0], [1.0, 0.0]])
        self.traj = Trajectory.from_functions(self.sys, np.linspace(1.0, 5.0, 41),
                                              lambda s: self.q0 + self.v * s, lambda s: self.v)
        self.scenario = Scenario(self.sys, PotentialSpec.gravity(self.sys.masses),
                                 PhaseState(self.q0 + self.v, self.v), com_frame=False)
        self.timeline = ClusterTimeline([(1.0, 2.0, P([1, 2], [3, 4])), (2.0, 3.0, P([1], [2], [3, 4])),
                                         (3.0, 5.0, P([1], [2, 3, 4]))], [])

    def test_diagnostics_on_straight_lines(self):
        episodes = detect_episodes(self.scenario, self.traj, timeline=self.timeline)
        self.assertEqual(len(episodes), 1)
        diag = episodes[0].diagnostics
        self.assertEqual(diag['nontrivial']['block'], [3, 4])
        self.assertLess(diag['messenger_line_deviation'], 1e-9)
        self.assertLess(diag['pair_C1']['direction_variation'], 1e-9)
        self.assertLess(diag['pair_C3']['direction_variation'], 1e-9)
        self.assertEqual(len(diag['pair_C1']['K']), 2)
        self.assertGreater(diag['J_ext_mid'], 0.0)

    def test_crossings_attached(self):
        episodes = detect_episodes(self.scenario, self.traj, timeline=self.timeline,
                                   spec_factory=lambda mt: PoincareSurfaceSpec(2, 10.0, mt), diagnostics=False)
        self.assertEqual(episodes[0].diagnostics, {})
        self.assertIsInstance(episodes[0].crossings, list)
        for c in episodes[0].crossings:
            self.assertTrue(2.0 <= c['t'] <= 3.0)


if __name__ == "__main__":
    unittest.main()
