from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from builtins import range
from builtins import object
from future import standard_library
standard_library.install_aliases()
import collections
import logging

import numpy as np
from scipy.integrate import trapezoid

from . import partitions as part
from .partitions import MessengerTuple, ParameterError
from .mass_geometry import (bivector_norm, cluster_aggregates, relative_pair, split_H, split_K, split_L,
                            split_configuration, wedge)
from .graf import cluster_function
from .poincare import count_crossings, crossing_record

logger = logging.getLogger(__name__)

MESSENGER_KINETIC_FACTOR = 7.0

NontrivialCluster = collections.namedtuple('NontrivialCluster', ['block', 'H_int', 'L_int', 'size', 'size_bound'])


class EpisodeRecord(object):
    """
    One messenger episode: on [t_start, t_end] the cluster function equals the three-cluster partition {C1, C2, C3},
    the interval before it {C1 u C2, C3} and the interval after it {C1, C2 u C3}.

    Attributes:
        | k (:obj:`int`): 1-based episode index along the trajectory.
        | t_start, t_end (:obj:`float`): change points bounding the three-cluster interval.
        | before, during, after (:obj:`pymessenger.partitions.Partition`): the partitions around and on it.
        | tuple (:obj:`pymessenger.partitions.MessengerTuple`): (C1, C2, C3); C2 is the messenger.
        | nontrivial (:obj:`tuple` or None): the block of size >= 2 of the three-cluster partition, if unique.
        | diagnostics (:obj:`dict`): energy, angular momentum and variation diagnostics.
        | crossings (:obj:`list`): Poincare crossings inside the interval.
    """

    def __init__(self, k, t_start, t_end, before, during, after, messenger_tuple, nontrivial=None):
        self.k = k
        self.t_start = t_start
        self.t_end = t_end
        self.before = before
        self.during = during
        self.after = after
        self.tuple = messenger_tuple
        self.nontrivial = nontrivial
        self.diagnostics = {}
        self.crossings = []

    @property
    def messenger(self):
        return self.tuple.c2

    def to_record(self):
        return {'k': self.k, 't_start': self.t_start, 't_end': self.t_end, 'before': self.before.to_list(),
                'during': self.during.to_list(), 'after': self.after.to_list(), 'tuple': self.tuple.to_list(),
                'messenger': list(self.messenger),
                'nontrivial': None if self.nontrivial is None else list(self.nontrivial),
                'diagnostics': self.diagnostics, 'crossings': self.crossings}

    def __repr__(self):
        return "EpisodeRecord(k={}, [{:.6g}, {:.6g}], {})".format(self.k, self.t_start, self.t_end, self.tuple)


def _merged_block(coarse, fine):
    # block of the rank-2 partition made of two blocks of the rank-3 partition
    merged = [b for b in coarse.blocks if b not in fine.blocks]
    return merged[0] if len(merged) == 1 else None


def messenger_tuple_between(before, during, after):
    """
    Ordered tuple (C1, C2, C3) with before = {C1 u C2, C3}, during = {C1, C2, C3} and after = {C1, C2 u C3}, or
    None if the three partitions do not have this shape.
    """
    if not (before.rank == 2 and during.rank == 3 and after.rank == 2):
        return None
    if part.comparable(before, after):
        return None
    if not (part.is_refinement(during, before) and part.is_refinement(during, after)):
        return None
    b_merged, a_merged = _merged_block(before, during), _merged_block(after, during)
    if b_merged is None or a_merged is None:
        return None
    c2 = tuple(sorted(set(b_merged) & set(a_merged)))
    if c2 not in during.blocks:
        return None
    c1 = tuple(sorted(set(b_merged) - set(c2)))
    c3 = tuple(sorted(set(a_merged) - set(c2)))
    candidate = MessengerTuple(c1, c2, c3)
    if candidate.before() != before or candidate.after() != after:
        return None
    return candidate


def episodes_from_timeline(timeline):
    """
    Messenger episodes of a cluster timeline: every rank-3 interval flanked by rank-2 intervals whose partitions
    are not comparable. A timeline without this pattern gives an empty list.

    Returns:
        :obj:`list` of :obj:`EpisodeRecord` without diagnostics.
    """
    episodes = []
    intervals = timeline.intervals
    for i in range(1, len(intervals) - 1):
        before, (t_start, t_end, during), after = intervals[i - 1][2], intervals[i], intervals[i + 1][2]
        mt = messenger_tuple_between(before, during, after)
        if mt is None:
            continue
        nontrivial = during.nontrivial_blocks()
        episodes.append(EpisodeRecord(len(episodes) + 1, t_start, t_end, before, during, after, mt,
                                      nontrivial[0] if len(nontrivial) == 1 else None))
    return episodes


def nontrivial_cluster_diagnostics(scenario, state, partition):
    """
    Internal energy and angular momentum of the nontrivial cluster D of a messenger phase. When H_int(D) < 0 the
    largest pair distance inside D is compared with (I / |H_int(D)|)**(1/alpha), I and alpha taken as the largest
    coupling modulus and exponent inside D.

    Returns:
        :obj:`NontrivialCluster` (block, H_int, L_int, size, size_bound); L_int is None for d = 1 and size_bound
        None when H_int >= 0.

    Raises:
        ParameterError: if the partition has no or several blocks of size >= 2.
    """
    sys, pot = scenario.sys, scenario.potential
    blocks = partition.nontrivial_blocks()
    if len(blocks) != 1:
        raise ParameterError("partition {} must have exactly one nontrivial block, has {}".format(
            partition, len(blocks)))
    block = blocks[0]
    b_idx = partition.blocks.index(block)
    _, h_int = split_H(sys, state, partition, pot)
    L_int = split_L(sys, state, partition)[1][b_idx].tolist() if sys.d >= 2 else None
    idx = [i - 1 for i in block]
    q = state.q[idx]
    size = max(float(np.linalg.norm(q[a] - q[b])) for a in range(len(idx)) for b in range(a + 1, len(idx)))
    H = h_int[b_idx]
    bound = None
    if H < 0.0:
        sub = np.ix_(idx, idx)
        off = ~np.eye(len(idx), dtype=bool)
        coupling = float(np.max(np.abs(pot.coupling[sub][off])))
        alpha = float(np.max(pot.alpha[sub][off]))
        bound = (coupling / abs(H)) ** (1.0 / alpha)
    return NontrivialCluster(block, H, L_int, size, bound)


def messenger_kinetic_ratio(scenario, state, partition, messenger):
    """
    Ratio of the messenger's external kinetic energy |p_C2|^2 / 2 m_C2 to the external kinetic energy of the
    partition, with the reference constant m_min / (7 m_max).

    Returns:
        :obj:`tuple` (ratio, constant).
    """
    sys = scenario.sys
    m2, _, p2 = cluster_aggregates(sys, state, messenger)
    k_ext, _ = split_K(sys, state, partition)
    constant = sys.m_min / (MESSENGER_KINETIC_FACTOR * sys.m_max)
    ratio = float(np.dot(p2, p2)) / (2.0 * m2) / k_ext if k_ext > 0.0 else np.nan
    if ratio < constant:
        logger.warning('Messenger {} carries {:.3g} of the external kinetic energy, below {:.3g}.'.format(
            list(messenger), ratio, constant))
    return ratio, constant


def _relative_path(sys, trajectory, times, c, d):
    states = [trajectory.state_at(s) for s in times]
    return np.array([cluster_aggregates(sys, s, c)[1] - cluster_aggregates(sys, s, d)[1] for s in states])


def direction_variation(sys, trajectory, c, d, t_start, t_end, samples=65):
    """
    Total turning of the relative position q = q_C - q_D on [t_start, t_end], the integral of
    |q' ^ q''| / |q'|^2 by the trapezoid rule on an even grid. Zero for d = 1.
    """
    if sys.d < 2:
        return 0.0
    times = np.linspace(t_start, t_end, samples)
    q = _relative_path(sys, trajectory, times, c, d)
    dq = np.gradient(q, times, axis=0)
    ddq = np.gradient(dq, times, axis=0)
    integrand = np.array([bivector_norm(wedge(a, b)) / max(float(np.dot(a, a)), 1e-300) for a, b in zip(dq, ddq)])
    return float(trapezoid(integrand, times))


def line_deviation(sys, trajectory, block, t_start, t_end, samples=65):
    """ Largest distance of q_C(t) from the line through q_C(s2) along p_C(s2), s2 the interval midpoint."""
    s2 = 0.5 * (t_start + t_end)
    _, q_mid, p_mid = cluster_aggregates(sys, trajectory.state_at(s2), block)
    norm = float(np.linalg.norm(p_mid))
    deviation = 0.0
    for s in np.linspace(t_start, t_end, samples):
        x = cluster_aggregates(sys, trajectory.state_at(s), block)[1] - q_mid
        if norm > 0.0:
            x = x - np.dot(x, p_mid / norm) * p_mid / norm
        deviation = max(deviation, float(np.linalg.norm(x)))
    return deviation


def cluster_angular_momentum_maxima(sys, trajectory, partition, t_start, t_end):
    """ Largest |L_ext| and largest |L_int(C)| over the samples inside [t_start, t_end]; (None, None) for d = 1."""
    if sys.d < 2:
        return None, None
    inside = [i for i in range(len(trajectory)) if t_start <= trajectory.t[i] <= t_end]
    states = [trajectory.state(i) for i in inside] or [trajectory.state_at(0.5 * (t_start + t_end))]
    l_ext, l_int = 0.0, 0.0
    for s in states:
        e, per_block = split_L(sys, s, partition)
        l_ext = max(l_ext, bivector_norm(e))
        l_int = max([l_int] + [bivector_norm(x) for x in per_block])
    return l_ext, l_int


def episode_diagnostics(scenario, trajectory, episode, samples=65):
    """ Diagnostics of one episode, evaluated at its ends s1, s3 and its midpoint s2."""
    sys, pot = scenario.sys, scenario.potential
    s1, s3 = episode.t_start, episode.t_end
    s2 = 0.5 * (s1 + s3)
    mid = trajectory.state_at(s2)
    c1, c2, c3 = episode.tuple.as_tuple()
    diag = {}
    if episode.nontrivial is not None:
        nc = nontrivial_cluster_diagnostics(scenario, mid, episode.during)
        diag['nontrivial'] = {'block': list(nc.block), 'H_int': nc.H_int, 'L_int': nc.L_int, 'size': nc.size,
                              'size_bound': nc.size_bound,
                              'bound_holds': None if nc.size_bound is None else nc.size <= nc.size_bound}
    ratio, constant = messenger_kinetic_ratio(scenario, mid, episode.during, c2)
    diag['messenger_kinetic_ratio'] = ratio
    diag['messenger_kinetic_constant'] = constant
    for label, other in (('C1', c1), ('C3', c3)):
        start = relative_pair(sys, trajectory.state_at(s1), c2, other, pot)
        end = relative_pair(sys, trajectory.state_at(s3), c2, other, pot)
        diag['pair_' + label] = {
            'K': [start.K, end.K], 'H': [start.H, end.H], 'J': [start.J, end.J],
            'L_variation': None if start.L is None else bivector_norm(np.asarray(start.L) - np.asarray(end.L)),
            'direction_variation': direction_variation(sys, trajectory, c2, other, s1, s3, samples)}
    diag['messenger_line_deviation'] = line_deviation(sys, trajectory, c2, s1, s3, samples)
    l_ext, l_int = cluster_angular_momentum_maxima(sys, trajectory, episode.during, s1, s3)
    diag['L_ext_max'] = l_ext
    diag['L_int_max'] = l_int
    q_ext, _ = split_configuration(sys, mid.q, episode.during)
    diag['J_ext_mid'] = 0.5 * float(np.sum(sys.masses[:, None] * q_ext * q_ext))
    return diag


def detect_episodes(scenario, trajectory, timeline=None, spec_factory=None, diagnostics=True):
    """
    Extract the messenger episodes of a trajectory and attach their diagnostics.

    Args:
        | scenario (:obj:`pymessenger.nbody.Scenario`): the run description (masses, potential, Graf parameters).
        | trajectory (:obj:`pymessenger.trajectory.Trajectory`): sampled path with t > 0.
        | timeline (:obj:`pymessenger.graf.ClusterTimeline`, optional): precomputed cluster function.
        | spec_factory (:obj:`callable`, optional): maps a :obj:`MessengerTuple` to a
          :obj:`pymessenger.poincare.PoincareSurfaceSpec`; crossings inside each episode are then attached.
        | diagnostics (:obj:`bool`): compute per-episode diagnostics.

    Returns:
        :obj:`list` of :obj:`EpisodeRecord`.
    """
    if timeline is None:
        timeline = cluster_function(scenario.sys, trajectory, scenario.graf)
    episodes = episodes_from_timeline(timeline)
    crossings_by_tuple = {}
    for ep in episodes:
        if diagnostics:
            ep.diagnostics = episode_diagnostics(scenario, trajectory, ep)
        if spec_factory is not None:
            if ep.tuple not in crossings_by_tuple:
                spec = spec_factory(ep.tuple)
                crossings_by_tuple[ep.tuple] = [crossing_record(c)
                                                for c in count_crossings(scenario, trajectory, spec)]
            ep.crossings = [c for c in crossings_by_tuple[ep.tuple] if ep.t_start <= c['t'] <= ep.t_end]
    logger.info('{} messenger episodes in {} cluster intervals.'.format(len(episodes), len(timeline)))
    return episodes
