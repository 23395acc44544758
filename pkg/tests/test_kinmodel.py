import json
import unittest

import numpy as np
from numpy.testing import assert_allclose

from pymessenger import utils
from pymessenger.kinmodel import (KinConfig, KinState, ModelTrace, ModelViolationError, advance_to_collision,
                                  aimed_momenta, due_pair, event_from_record, next_collision,
                                  observables, parallel_kinetic_energy, random_config, resolve_collision, run,
                                  run_batch)
from pymessenger.partitions import ParameterError
from pymessenger.policies import (CollisionPolicy, FixedGapPolicy, PolicyRejectionError, Proposal,
                                  RandomMassExchangePolicy)


def line_config(**kwargs):
    return KinConfig([1.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [0.5, -1.5, 1.0], 1.0, 1.0, **kwargs)


class OutOfBoundsPolicy(CollisionPolicy):

    kind = 'out-of-bounds'

    def propose(self, state, pair, bounds, rng):
        return Proposal(1.0, (bounds[1] * 2.0, -bounds[1]))


class KinConfigTest(unittest.TestCase):

    def test_valid(self):
        cfg = line_config(collisions=4)
        self.assertEqual(cfg.dimension, 1)
        self.assertEqual(cfg.total_mass, 3.0)
        state = cfg.initial_state()
        self.assertEqual(state.k, 1)
        self.assertEqual(state.pair, (1, 2))
        self.assertEqual(KinConfig.from_dict(cfg.to_dict()).to_dict(), cfg.to_dict())

    def test_invalid(self):
        with self.assertRaises(ParameterError):
            KinConfig([1.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [0.5, -1.5, 1.5], 1.0, 1.0)
        with self.assertRaises(ParameterError):
            KinConfig([1.0, 1.0, 1.0], [0.0, -1.0, 1.0], [0.5, -1.5, 1.0], 1.0, 1.0)
        with self.assertRaises(ParameterError):
            KinConfig([1.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [-0.5, 1.5, -1.0], 1.0, 1.0)
        with self.assertRaises(ParameterError):
            KinConfig([1.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [0.5, -1.5, 1.0], 1.5, 2.0)
        with self.assertRaises(ParameterError):
            line_config(collisions=0)


class CollisionTest(unittest.TestCase):

    def setUp(self):
        self.cfg = line_config(collisions=3)
        self.rng = np.random.default_rng(0)

    def test_due_pairs(self):
        self.assertEqual([due_pair(k) for k in range(1, 5)], [(1, 2), (2, 3), (1, 2), (2, 3)])

    def test_next_collision_linear(self):
        state = KinState(0.0, [[-1.0], [0.0], [5.0]], [[1.0], [0.0], [0.0]], [1.0, 1.0, 1.0])
        t, pair = next_collision(state)
        self.assertAlmostEqual(t, 1.0)
        self.assertEqual(pair, (1, 2))

    def test_no_collision_ahead(self):
        parallel = KinState(0.0, [[-1.0], [0.0], [5.0]], [[1.0], [1.0], [-2.0]], [1.0, 1.0, 1.0])
        with self.assertRaises(ModelViolationError):
            next_collision(parallel)
        separating = KinState(0.0, [[-1.0], [0.0], [5.0]], [[-1.0], [1.0], [0.0]], [1.0, 1.0, 1.0])
        with self.assertRaises(ModelViolationError):
            next_collision(separating)
        skew = KinState(0.0, [[-1.0, 0.0], [0.0, 1.0], [5.0, 0.0]], [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                        [1.0, 1.0, 1.0])
        with self.assertRaises(ModelViolationError):
            next_collision(skew)

    def test_first_collision_matches_hand_computation(self):
        at = advance_to_collision(self.cfg.initial_state())
        self.assertAlmostEqual(at.t, 0.5)
        assert_allclose(at.q.ravel(), [-0.75, -0.75, 1.5])
        post, event = resolve_collision(at, FixedGapPolicy(1.0), (1.0, 1.0), self.rng)
        # p2 = m2 ((q3 - q2) / dt + v3) = 2.25 + 1.0, p1 = (0.5 - 1.5) - p2
        assert_allclose(post.p.ravel(), [-4.25, 3.25, 1.0])
        self.assertEqual(post.k, 2)
        self.assertEqual(event.pair, (1, 2))
        self.assertAlmostEqual(event.observables_post.K_par, (4.25 ** 2 + 1.0) / 6.0)

        at2 = advance_to_collision(post)
        self.assertAlmostEqual(at2.t, 1.5)
        assert_allclose(at2.q.ravel(), [-5.0, 2.5, 2.5])
        post2, event2 = resolve_collision(at2, FixedGapPolicy(1.0), (1.0, 1.0), self.rng)
        assert_allclose(post2.p.ravel(), [-4.25, -11.75, 16.0])
        self.assertAlmostEqual(event2.observables_post.K_par, (4.25 ** 2 + 16.0 ** 2) / 6.0)

    def test_conservation_at_collision(self):
        cfg = random_config(np.random.default_rng(3), dimension=2)
        at = advance_to_collision(cfg.initial_state())
        post, event = resolve_collision(at, RandomMassExchangePolicy(), cfg.mass_bounds, self.rng)
        i, j = event.pair
        assert_allclose(post.p[i - 1] + post.p[j - 1], at.p[i - 1] + at.p[j - 1], atol=1e-13)
        self.assertAlmostEqual(post.m[i - 1] + post.m[j - 1], at.m[i - 1] + at.m[j - 1], places=13)
        self.assertAlmostEqual(post.angular_momentum(), at.angular_momentum(), places=12)
        self.assertTrue(np.all(post.m >= cfg.m_min) and np.all(post.m <= cfg.m_max))

    def test_planted_intercept(self):
        cfg = random_config(np.random.default_rng(8), dimension=2)
        at = advance_to_collision(cfg.initial_state())
        post, event = resolve_collision(at, FixedGapPolicy(0.7), cfg.mass_bounds, self.rng)
        t_next, pair = next_collision(post)
        self.assertAlmostEqual(t_next, at.t + 0.7, places=10)
        self.assertEqual(pair, (2, 3))

    def test_not_at_collision(self):
        with self.assertRaises(ModelViolationError):
            resolve_collision(self.cfg.initial_state(), FixedGapPolicy(), (1.0, 1.0), self.rng)
        with self.assertRaises(ParameterError):
            parallel_kinetic_energy(self.cfg.initial_state())
        self.assertIsNone(observables(self.cfg.initial_state()).K_par)

    def test_policy_rejection(self):
        at = advance_to_collision(self.cfg.initial_state())
        with self.assertRaises(PolicyRejectionError):
            resolve_collision(at, OutOfBoundsPolicy(max_retries=2), (1.0, 1.0), self.rng)

    def test_sign_violation_is_logged(self):
        # particle 3 heads for the barycenter, so no aimed state satisfies the sign conditions
        at = KinState(0.5, [[-0.75], [-0.75], [1.5]], [[0.5], [-1.5], [-1.0]], [1.0, 1.0, 1.0], 1, True)
        with self.assertLogs('pymessenger.kinmodel', level='WARNING') as logs:
            with self.assertRaises(PolicyRejectionError):
                resolve_collision(at, FixedGapPolicy(1.0, max_retries=1), (1.0, 1.0), self.rng)
        self.assertEqual(len(logs.output), 2)
        self.assertIn('sign conditions fail', logs.output[0])

    def test_aimed_momenta_keep_pair_sum(self):
        at = advance_to_collision(self.cfg.initial_state())
        m_new, p_new = aimed_momenta(at, 2.0, (1.0, 1.0))
        self.assertAlmostEqual(p_new[0, 0] + p_new[1, 0], -1.0)
        assert_allclose(m_new, [1.0, 1.0, 1.0])


class RunTest(unittest.TestCase):

    def test_alternating_pairs(self):
        trace = run(line_config(collisions=8), FixedGapPolicy(1.0))
        self.assertEqual(len(trace), 8)
        self.assertEqual([e.pair for e in trace.events], [(1, 2), (2, 3)] * 4)
        self.assertEqual([e.k for e in trace.events], list(range(1, 9)))
        self.assertEqual(trace.final_state.k, 9)

    def test_deterministic(self):
        cfg = random_config(np.random.default_rng(5), dimension=2, collisions=12, seed=5)
        a = run(cfg, RandomMassExchangePolicy())
        b = run(cfg, RandomMassExchangePolicy())
        self.assertEqual(utils.canonical_json(a.records()), utils.canonical_json(b.records()))

    def test_invariants_along_run(self):
        cfg = random_config(np.random.default_rng(9), dimension=2, collisions=20, seed=9)
        trace = run(cfg, RandomMassExchangePolicy())
        L0 = cfg.initial_state().angular_momentum()
        for e in trace.events:
            scale = max(1.0, float(np.sum(np.linalg.norm(e.q, axis=1) * np.linalg.norm(e.p_post, axis=1))))
            self.assertAlmostEqual(sum(e.observables_post.L_i), L0, delta=1e-10 * scale)
            self.assertAlmostEqual(float(np.sum(e.masses_post)), cfg.total_mass, places=12)
            assert_allclose(np.sum(e.p_post, axis=0), 0.0, atol=1e-9 * max(1.0, np.abs(e.p_post).max()))

    def test_record_round_trip(self):
        trace = run(line_config(collisions=4), FixedGapPolicy(1.0))
        back = ModelTrace.from_records([json.loads(utils.canonical_json(r)) for r in trace.records()])
        self.assertEqual(len(back), 4)
        for a, b in zip(trace.events, back.events):
            self.assertAlmostEqual(a.observables_post.K, b.observables_post.K)
        self.assertEqual(back.mass_bounds, (1.0, 1.0))
        with self.assertRaises(KeyError):
            event_from_record({'k': 1})

    def test_random_config_valid(self):
        rng = np.random.default_rng(1)
        for dimension in (1, 2):
            for _ in range(20):
                cfg = random_config(rng, dimension=dimension)
                self.assertEqual(cfg.dimension, dimension)
                self.assertTrue(np.all(cfg.masses >= 1.0) and np.all(cfg.masses <= 2.0))

    def test_batch_independent_seeds(self):
        traces = run_batch(3, 11, RandomMassExchangePolicy(), dimension=1, collisions=6)
        self.assertEqual(len(traces), 3)
        firsts = set(float(t.config.masses[0]) for t in traces)
        self.assertEqual(len(firsts), 3)
        again = run_batch(3, 11, RandomMassExchangePolicy(), dimension=1, collisions=6)
        self.assertEqual(utils.canonical_json(traces[2].records()), utils.canonical_json(again[2].records()))


if __name__ == "__main__":
    unittest.main()
