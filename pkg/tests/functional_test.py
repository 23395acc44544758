import json
import logging
import os
import shutil
import tempfile
import unittest

import numpy as np
import pandas as pd

from pymessenger import analysis, config, kinmodel, nbody, plotdata, proposition, utils
from pymessenger.partitions import Partition
from pymessenger.trajectory import read_trajectory, write_trajectory

FOUR_BODY = {
    "system": {"masses": [1.0, 1.0, 1.0, 1.0], "d": 2},
    "initial": {"t": 1.0,
                "q": [[-20.0, 0.0], [20.0, 5.0], [-0.025, 0.0], [0.025, 0.0]],
                "v": [[-1.0, 0.0], [1.0, 0.2], [0.0, -3.1622776601683795], [0.0, 3.1622776601683795]]},
    "integrator": {"t_end": 6.0, "encounter_factor": 1.0},
    "poincare": {"m": 2, "L": 10.0},
}


class MessengerAnalysis(unittest.TestCase):

    def setUp(self):
        logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)-12s %(levelname)-8s %(message)s")
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_integrate_store_and_analyze_a_four_body_run(self):

        # the analyst writes a configuration: a tight binary (3, 4) and two bodies leaving it behind
        cfg = config.parse_config(json.dumps(FOUR_BODY))
        scenario = config.to_scenario(cfg, name="four")

        # they integrate it and keep the trajectory on disk
        trajectory = nbody.integrate(scenario)
        self.assertEqual(trajectory.stop_reason, "t_end")
        path = write_trajectory(trajectory, os.path.join(self.tmp, "four.trajectory.jsonl"))

        # a later session reloads it; masses, samples and the potential survive the round trip
        stored = read_trajectory(path)
        self.assertEqual(len(stored), len(trajectory))
        np.testing.assert_allclose(stored.q[-1], trajectory.q[-1])
        tool = analysis.TrajectoryAnalysis(stored)
        self.assertEqual(tool.scenario.potential.coupling[2, 3], -1.0)

        # energy, momentum and angular momentum stayed put
        drift = tool.drift()
        self.assertLess(float(np.max(drift["H"])), 1e-6)
        self.assertLess(float(np.max(drift["L"])), 1e-6)

        # the binary (separation 0.05, circular) is tight enough to count as one cluster from the start
        timeline = tool.get_timeline()
        self.assertAlmostEqual(timeline.intervals[0][0], 1.0)
        self.assertAlmostEqual(timeline.intervals[-1][1], 6.0)
        final = timeline.final()
        self.assertEqual(final.n, 4)
        self.assertEqual(final.block_of(3), final.block_of(4))
        report = tool.graf_report()
        self.assertEqual(report["final"], final.to_list())

        # the von Zeipel series is aligned with the samples and goes to a CSV for plotting
        series = tool.von_zeipel()
        self.assertEqual(len(series.t), len(stored))
        csv = plotdata.write_csv(plotdata.von_zeipel_frame(series), os.path.join(self.tmp, "four.vonzeipel.csv"))
        self.assertEqual(len(pd.read_csv(csv)), len(stored))

        # episodes and surface crossings come out as plain records
        episodes = tool.get_episodes(cfg.poincare.m, cfg.poincare.L)
        for ep in episodes:
            self.assertEqual(ep.during.rank, 3)
            json.loads(utils.canonical_json(ep.to_record()))
        crossings = tool.get_crossings(cfg.poincare.m, cfg.poincare.L)
        self.assertEqual(len(crossings), 36)
        self.assertEqual(Partition.parse(next(iter(crossings))).rank, 3)

    def test_simulate_and_verify_the_kinematical_model(self):

        # the analyst draws a planar configuration from a seed and runs twenty-four collisions
        cfg = config.parse_config('{"kinmodel": {"dimension": 2, "collisions": 24}}')
        kin_cfg = config.to_kin_config(cfg, seed=11)
        trace = kinmodel.run(kin_cfg, config.to_policy(cfg))
        self.assertEqual(len(trace), 24)

        # they store the trace and verify it from the file
        path = os.path.join(self.tmp, "kin_trace_seed11.jsonl")
        utils.write_jsonl(path, trace.records())
        report = proposition.verify_proposition(kinmodel.ModelTrace.from_records(utils.read_jsonl(path)))
        self.assertTrue(report.passed, report.failed_clauses())

        # the moment of inertia grows at least geometrically and the series is ready to plot
        self.assertTrue(report.clauses["moment_of_inertia"].passed)
        frame = plotdata.model_series_frame(report)
        self.assertEqual(len(frame), 24)
        self.assertEqual(list(frame["k"]), list(range(1, 25)))

        # a second run with the same seed reproduces the trace exactly
        again = kinmodel.run(config.to_kin_config(cfg, seed=11), config.to_policy(cfg))
        self.assertEqual(utils.canonical_json(trace.records()), utils.canonical_json(again.records()))


if __name__ == "__main__":
    unittest.main()
