import contextlib
import datetime
import io
import json
import os
import shutil
import tempfile
import unittest

import numpy as np
import pandas as pd

from pymessenger import cli, utils
from pymessenger.mass_geometry import MassSystem
from pymessenger.trajectory import Trajectory, write_trajectory

SCENARIO = {
    "system": {"masses": [1.0, 1.0, 1.0], "d": 2},
    "initial": {"t": 1.0, "q": [[-2.0, 0.0], [0.0, 1.0], [3.0, 0.0]], "v": [[0.0, -0.3], [0.2, 0.1], [0.1, 0.2]]},
    "integrator": {"t_end": 2.0},
}


def run_quietly(argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
        code = cli.main(argv)
    return code, out.getvalue()


class CliTest(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def path(self, *names):
        return os.path.join(self.tmp, *names)

    def write_config(self, name, doc):
        with open(self.path(name), 'w') as handle:
            json.dump(doc, handle)
        return self.path(name)

    def free_trajectory(self, n=3):
        sys = MassSystem([1.0] * n, 2)
        q0 = np.array([[-1.0, 0.0], [0.0, 2.0], [1.0, -1.0]])[:n]
        v = np.array([[-1.0, 0.0], [0.0, 1.0], [1.0, -0.5]])[:n]
        traj = Trajectory.from_functions(sys, np.linspace(1.0, 20.0, 96), lambda s: q0 + v * s, lambda s: v)
        return write_trajectory(traj, self.path('free{}.trajectory.jsonl'.format(n)))

    def test_kin_run_and_verify(self):
        code, _ = run_quietly(['-q', 'kin', 'run', '--seed', '7', '--k', '10', '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_OK)
        trace = self.path('kin_trace_seed7.jsonl')
        self.assertEqual(len(utils.read_jsonl(trace)), 10)
        code, text = run_quietly(['-q', 'kin', 'verify', trace, '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertIn('alignment', text)
        self.assertTrue(os.path.exists(self.path('kin_trace_seed7.report.json')))
        series = pd.read_csv(self.path('kin_trace_seed7.series.csv'))
        self.assertEqual(list(series.columns), ['k', 't', 'J', 'J_prime', 'K', 'K_par', 'arc_length'])
        manifests = cli.read_manifests(self.path(cli.MANIFEST_NAME))
        self.assertEqual([m.command for m in manifests], ['kin run', 'kin verify'])
        self.assertEqual(manifests[0].seeds, [7])
        self.assertIsNone(manifests[1].config_digest)
        self.assertTrue(manifests[1].summary['passed'])
        started = datetime.datetime.fromisoformat(manifests[0].wall_clock['started'])
        self.assertEqual(started.utcoffset(), datetime.timedelta(0))

    def test_kin_run_deterministic(self):
        for name in ('a', 'b'):
            os.mkdir(self.path(name))
            run_quietly(['-q', 'kin', 'run', '--seed', '3', '--k', '8', '--out', self.path(name)])
        with open(self.path('a', 'kin_trace_seed3.jsonl')) as a, open(self.path('b', 'kin_trace_seed3.jsonl')) as b:
            self.assertEqual(a.read(), b.read())

    def test_verify_failures(self):
        config = self.write_config('plane.json', {"kinmodel": {"dimension": 2}})
        run_quietly(['-q', 'kin', 'run', config, '--seed', '21', '--k', '20', '--out', self.tmp])
        records = utils.read_jsonl(self.path('kin_trace_seed21.jsonl'))
        p = np.asarray(records[4]['p_post'], dtype=float)
        delta = 1e-3 * np.linalg.norm(p) * np.array([p[0, 1], -p[0, 0]]) / np.linalg.norm(p[0])
        p[0] += delta
        p[2] -= delta
        records[4]['p_post'] = p.tolist()
        tampered = self.path('tampered.jsonl')
        utils.write_jsonl(tampered, records)
        code, _ = run_quietly(['-q', 'kin', 'verify', tampered, '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_VERIFICATION)

        short = self.path('short.jsonl')
        utils.write_jsonl(short, records[:3])
        code, _ = run_quietly(['-q', 'kin', 'verify', short, '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_INPUT)

    def test_input_errors(self):
        code, _ = run_quietly(['-q', 'nbody', 'run', self.path('missing.json'), '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_INPUT)
        bad = self.write_config('bad.json', {"graf": {"delta": 0.1, "unknown": 1}})
        code, _ = run_quietly(['-q', 'kin', 'run', bad, '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_INPUT)
        code, _ = run_quietly(['kin', 'run', '--k', 'many'])
        self.assertEqual(code, cli.EXIT_INPUT)
        code, _ = run_quietly([])
        self.assertEqual(code, cli.EXIT_INPUT)

    def test_nbody_run_then_analyze(self):
        config = self.write_config('three.json', SCENARIO)
        code, _ = run_quietly(['-q', 'nbody', 'run', config, '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_OK)
        trajectory = self.path('three.trajectory.jsonl')
        drift = pd.read_csv(self.path('three.drift.csv'))
        self.assertEqual(list(drift.columns), ['t', 'h_step', 'H', 'p_N', 'L'])
        self.assertLess(drift['H'].max(), 1e-6)

        code, text = run_quietly(['-q', 'analyze', 'graf', trajectory, '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_OK)
        with open(self.path('three.graf.json')) as handle:
            report = json.load(handle)
        self.assertEqual(report['params']['delta'], 0.1)
        self.assertAlmostEqual(report['intervals'][0]['t_start'], 1.0)
        self.assertTrue(os.path.exists(self.path('three.timeline.csv')))

        code, _ = run_quietly(['-q', 'analyze', 'episodes', trajectory, '--m', '2', '--L', '10', '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_OK)
        with open(self.path('three.episodes.json')) as handle:
            self.assertIsInstance(json.load(handle), list)

    def test_analyze_free_flight(self):
        trajectory = self.free_trajectory()
        code, _ = run_quietly(['-q', 'analyze', 'vonzeipel', trajectory, '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_OK)
        frame = pd.read_csv(self.path('free3.vonzeipel.csv'))
        self.assertEqual(list(frame.columns), ['t', 'j', 'j_ext', 'j_delta', 'dj_ext_dt', 'dj_ext_dt_fd', 'rank'])
        self.assertEqual(len(frame), 96)

        code, text = run_quietly(['-q', 'analyze', 'poincare', trajectory, '--m', '2', '--L', '10',
                                  '--tuple', '[[1],[2],[3]]', '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(json.loads(text)['m'], 2)
        with open(self.path('free3.poincare_m2.json')) as handle:
            self.assertEqual(list(json.load(handle)['crossings']), ['[[1],[2],[3]]'])

        code, _ = run_quietly(['-q', 'analyze', 'graf', trajectory, '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_OK)
        with open(self.path('free3.graf.json')) as handle:
            self.assertEqual(json.load(handle)['final'], [[1], [2], [3]])

    def test_analyze_planted_pass(self):
        # C1 rests at (2, 0); the messenger crosses x = 2 - 1/4 at t = 1 with momentum 5
        sys = MassSystem([1.0, 1.0, 1.0], 2)
        v = np.array([[0.0, 0.0], [5.0, 0.0], [-5.0, 0.0]])
        traj = Trajectory.from_functions(
            sys, [0.9, 0.95, 1.02, 1.04],
            lambda s: np.array([[2.0, 0.0], [1.75 + 5.0 * (s - 1.0), 0.0], [-3.75 - 5.0 * (s - 1.0), 0.0]]),
            lambda s: v)
        path = write_trajectory(traj, self.path('pass.trajectory.jsonl'))
        code, text = run_quietly(['-q', 'analyze', 'poincare', path, '--m', '4', '--L', '10',
                                  '--tuple', '[[1],[2],[3]]', '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(json.loads(text)['crossings'], 1)

    def test_analysis_precondition(self):
        trajectory = self.free_trajectory(n=2)
        code, _ = run_quietly(['-q', 'analyze', 'poincare', trajectory, '--m', '2', '--L', '1', '--out', self.tmp])
        self.assertEqual(code, cli.EXIT_RUNTIME)

    def test_partitions(self):
        code, text = run_quietly(['partitions', 'list', '4'])
        self.assertEqual(code, cli.EXIT_OK)
        lines = text.splitlines()
        self.assertEqual(len(lines), 15)
        self.assertEqual(lines[0].split('\t'), ['1', '1234', '[[1,2,3,4]]'])
        code, text = run_quietly(['partitions', 'tuples', '4'])
        self.assertEqual(len(text.splitlines()), 36)
        self.assertEqual(json.loads(text.splitlines()[0]), [[1, 2], [3], [4]])


class ManifestTest(unittest.TestCase):

    def test_record_round_trip(self):
        manifest = cli.RunManifest('kin run', 'abc', [1], ['x.jsonl'], '0.1.0', {'elapsed': 0.5}, {'passed': True})
        self.assertEqual(cli.RunManifest.from_record(json.loads(utils.canonical_json(manifest.to_record()))),
                         manifest)
        record = manifest.to_record()
        del record['summary']
        with self.assertRaises(KeyError):
            cli.RunManifest.from_record(record)

    def test_append_only(self):
        tmp = tempfile.mkdtemp()
        try:
            path = os.path.join(tmp, cli.MANIFEST_NAME)
            cli.append_manifest(path, cli.RunManifest('kin run', version='0.1.0'))
            cli.append_manifest(path, cli.RunManifest('kin verify', version='0.1.0'))
            self.assertEqual([m.command for m in cli.read_manifests(path)], ['kin run', 'kin verify'])
        finally:
            shutil.rmtree(tmp)


if __name__ == "__main__":
    unittest.main()
