from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from builtins import object
from future import standard_library
standard_library.install_aliases()
import logging

import numpy as np

from . import graf
from . import episodes as ep
from . import poincare as pc
from .graf import GrafParams
from .mass_geometry import PhaseState
from .nbody import Scenario
from .partitions import MessengerTuple, ParameterError, messenger_tuples
from .potential import PotentialSpec
from .trajectory import Trajectory

logger = logging.getLogger(__name__)


def scenario_from_trajectory(trajectory, graf_params=None, poincare=None):
    """
    Scenario rebuilt from a stored trajectory: masses from the header, potential from its metadata (free flight when
    absent) and the first sample as initial state.
    """
    sys = trajectory.sys
    pot = trajectory.metadata.get('potential')
    if pot is None:
        potential = PotentialSpec.free(sys.n)
    else:
        potential = PotentialSpec(pot['alpha'], pot['coupling'], sys.n)
    first = trajectory.state(0)
    return Scenario(sys, potential, PhaseState(first.q, first.p, first.t), graf=graf_params, poincare=poincare,
                    com_frame=False)


class TrajectoryAnalysis(object):
    """
    TrajectoryAnalysis gathers the analysis passes of one sampled trajectory: cluster function, von Zeipel series,
    messenger episodes and Poincare crossings. The cluster timeline is computed once and shared by the passes.

    Attributes:
        | scenario (:obj:`pymessenger.nbody.Scenario`): masses, potential and Graf parameters.
        | trajectory (:obj:`pymessenger.trajectory.Trajectory`): the sampled path.
    """

    def __init__(self, trajectory, scenario=None, graf_params=None):
        if not isinstance(trajectory, Trajectory):
            raise TypeError("expect obj of '{}', got {}".format(Trajectory.__name__, type(trajectory).__name__))
        self.trajectory = trajectory
        self.scenario = scenario or scenario_from_trajectory(trajectory, graf_params)
        if graf_params is not None:
            self.scenario.graf = graf_params
        self._timeline = None

    @property
    def graf_params(self):
        return self.scenario.graf

    def get_timeline(self):
        if self._timeline is None:
            self._timeline = graf.cluster_function(self.scenario.sys, self.trajectory, self.graf_params)
        return self._timeline

    def graf_report(self):
        """ Timeline intervals, change points, final partition and the asymptotic-velocity partition."""
        timeline = self.get_timeline()
        return {'params': self.graf_params.to_dict(),
                'intervals': timeline.interval_records(),
                'change_points': timeline.change_point_records(),
                'final': timeline.final().to_list(),
                'asymptotic_partition': graf.asymptotic_partition(self.trajectory).to_list()}

    def von_zeipel(self):
        return graf.von_zeipel_series(self.scenario.sys, self.trajectory, self.graf_params)

    def get_episodes(self, m=None, L=None, diagnostics=True):
        """ Messenger episodes; with m and L the crossings of each episode's surface are attached."""
        factory = None
        if m is not None and L is not None:
            def factory(mt):
                return pc.PoincareSurfaceSpec(m, L, mt, energy=self.trajectory.metadata.get('energy'))
        return ep.detect_episodes(self.scenario, self.trajectory, self.get_timeline(), factory, diagnostics)

    def get_crossings(self, m, L, messenger_tuple=None):
        """
        Crossings of the m-th surface for one tuple, or for every tuple of the particle set.

        Returns:
            :obj:`dict` mapping the tuple's JSON text to its list of crossing records.
        """
        n = self.scenario.sys.n
        if messenger_tuple is not None:
            if not isinstance(messenger_tuple, MessengerTuple):
                messenger_tuple = MessengerTuple(*messenger_tuple)
            tuples = [messenger_tuple]
        elif n >= 3:
            tuples = messenger_tuples(n)
        else:
            raise ParameterError("Poincare surfaces need at least three particles, got {}".format(n))
        result = {}
        for mt in tuples:
            spec = pc.PoincareSurfaceSpec(m, L, mt, energy=self.trajectory.metadata.get('energy'))
            crossings = pc.count_crossings(self.scenario, self.trajectory, spec)
            result[str(mt.to_list()).replace(' ', '')] = [pc.crossing_record(c) for c in crossings]
        return result

    def drift(self):
        """ Relative drift of H, p_N and L per sample; None columns where the quantity was not recorded."""
        traj = self.trajectory
        out = {'t': traj.t.copy(), 'h_step': traj.h_step.copy()}
        if traj.H is not None:
            out['H'] = np.abs(traj.H - traj.H[0]) / max(abs(traj.H[0]), 1e-300)
        if traj.p_N is not None:
            scale = max(float(np.sum(np.linalg.norm(traj.p[0], axis=1))), 1e-300)
            out['p_N'] = np.max(np.abs(traj.p_N - traj.p_N[0]), axis=1) / scale
        if traj.L is not None:
            scale = max(float(np.sum(np.linalg.norm(traj.q[0], axis=1) * np.linalg.norm(traj.p[0], axis=1))), 1e-300)
            out['L'] = np.max(np.abs(traj.L - traj.L[0]), axis=1) / scale
        return out


def default_graf_params(delta=None, epsilon=None):
    kwargs = {}
    if delta is not None:
        kwargs['delta'] = delta
    if epsilon is not None:
        kwargs['epsilon'] = epsilon
    return GrafParams(**kwargs)
