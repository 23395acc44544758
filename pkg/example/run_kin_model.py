#  This is the pymessenger package
import numpy as np

import pymessenger

#  OPTIONAL: only if you want to have the logger information printed
import logging
logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)-12s %(levelname)-8s %(message)s")

# Draw a planar configuration from a seed and simulate thirty collisions with random mass exchange
config = pymessenger.random_config(np.random.default_rng(7), dimension=2, collisions=30, seed=7)
trace = pymessenger.run(config, pymessenger.RandomMassExchangePolicy(dt_min=0.1, dt_max=10.0))

# Check the trace against the growth and alignment statements
report = pymessenger.verify_proposition(trace)
for name, clause in report.clauses.items():
    print('{:<18} {} (margin {:.3g})'.format(name, 'pass' if clause.passed else 'FAIL', clause.margin))

# Store the trace and the collision-indexed series for plotting
pymessenger.utils.write_jsonl("kin_trace_seed7.jsonl", trace.records())
pymessenger.write_csv(pymessenger.model_series_frame(report), "kin_trace_seed7.series.csv")
