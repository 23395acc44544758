#  This is the pymessenger package
import pymessenger
from pymessenger import config

#  OPTIONAL: only if you want to have the logger information printed
import logging
logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)-12s %(levelname)-8s %(message)s")

# Build the scenario of a configuration file and integrate it
cfg = config.load_config("scenario_four_body.json")
scenario = config.to_scenario(cfg, name="scenario_four_body")
trajectory = pymessenger.integrate(scenario)
pymessenger.write_trajectory(trajectory, "scenario_four_body.trajectory.jsonl")

# Cluster timeline, von Zeipel series and messenger episodes share one analysis object
tool = pymessenger.TrajectoryAnalysis(trajectory, scenario)
for t_start, t_end, partition in tool.get_timeline().intervals:
    print('[{:8.3f}, {:8.3f}]  {}'.format(t_start, t_end, partition))

for episode in tool.get_episodes(cfg.poincare.m, cfg.poincare.L):
    print(episode, 'messenger', list(episode.messenger), 'crossings', len(episode.crossings))

pymessenger.write_csv(pymessenger.von_zeipel_frame(tool.von_zeipel()), "scenario_four_body.vonzeipel.csv")
