#  Monte-Carlo check of the kinematical model: independent seeded runs, each verified
import argparse
import json
import logging

import pymessenger

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument('--runs', type=int, default=1000)
parser.add_argument('--master-seed', dest='master_seed', type=int, default=0)
parser.add_argument('--k', type=int, default=20, help='collisions per run')
parser.add_argument('--dimension', type=int, choices=[1, 2], default=2)
args = parser.parse_args()

logging.basicConfig(level=logging.WARNING, format="%(asctime)s %(name)-12s %(levelname)-8s %(message)s")

traces = pymessenger.run_batch(args.runs, args.master_seed, pymessenger.RandomMassExchangePolicy(),
                               dimension=args.dimension, collisions=args.k)
summary = pymessenger.summarize_batch(pymessenger.verify_proposition(t) for t in traces)
print(json.dumps(summary, indent=2, sort_keys=True))
