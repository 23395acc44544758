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

from . import partitions as part
from .partitions import ParameterError
from .mass_geometry import moment_of_inertia, split_configuration, mass_inner

logger = logging.getLogger(__name__)

TIE_BREAKS = ('rank_then_canonical',)


class GrafParams(object):
    """
    Parameters of the Graf partition.

    Attributes:
        | delta (:obj:`float`): weight base in (0, 1]; a partition with k blocks gets the bonus delta**k.
        | epsilon (:obj:`float`): long-range exponent in (0, 1); configurations are scaled by t**(1 - epsilon/2).
        | tie_break (:obj:`str`): rule among equal maximizers; only 'rank_then_canonical' (largest rank first, then
          enumeration order).
        | time_tol (:obj:`float`): relative time tolerance of change-point bisection.
    """

    def __init__(self, delta=0.1, epsilon=0.5, tie_break='rank_then_canonical', time_tol=1e-9):
        if not 0.0 < delta <= 1.0:
            raise ParameterError("delta must lie in (0, 1], got {}".format(delta))
        if not 0.0 < epsilon < 1.0:
            raise ParameterError("epsilon must lie in (0, 1), got {}".format(epsilon))
        if tie_break not in TIE_BREAKS:
            raise ParameterError("unknown tie-break rule {}".format(tie_break))
        if not 0.0 < time_tol < 1.0:
            raise ParameterError("time tolerance must lie in (0, 1), got {}".format(time_tol))
        self.delta = float(delta)
        self.epsilon = float(epsilon)
        self.tie_break = tie_break
        self.time_tol = float(time_tol)

    def scale_exponent(self):
        return 1.0 - self.epsilon / 2.0

    def to_dict(self):
        return {'delta': self.delta, 'epsilon': self.epsilon, 'tie_break': self.tie_break, 'time_tol': self.time_tol}


ChangePoint = collections.namedtuple('ChangePoint', ['t', 'before', 'after', 'comparable'])
VonZeipelSeries = collections.namedtuple('VonZeipelSeries', ['t', 'j', 'j_ext', 'j_delta', 'dj_ext_dt',
                                                             'dj_ext_dt_fd', 'rank'])


class ClusterTimeline(object):
    """
    Piecewise constant cluster function t -> A(t) of one trajectory.

    Attributes:
        | intervals (:obj:`list`): contiguous (t_start, t_end, :obj:`pymessenger.partitions.Partition`) triples.
        | change_points (:obj:`list`): :obj:`ChangePoint` (t, before, after, comparable) between intervals.
    """

    def __init__(self, intervals, change_points):
        self.intervals = list(intervals)
        self.change_points = list(change_points)

    def partition_at(self, t):
        for t_start, t_end, partition in self.intervals:
            if t_start <= t <= t_end:
                return partition
        raise KeyError('Time {} is not covered by the timeline.'.format(t))

    def final(self):
        return self.intervals[-1][2]

    def ranks(self):
        return [c.rank for _, _, c in self.intervals]

    def interval_records(self):
        return [{'t_start': a, 't_end': b, 'partition': c.to_list()} for a, b, c in self.intervals]

    def change_point_records(self):
        return [{'t': cp.t, 'before': cp.before.to_list(), 'after': cp.after.to_list(), 'comparable': cp.comparable}
                for cp in self.change_points]

    def __len__(self):
        return len(self.intervals)


_lattice_cache = {}


def _lattice(n):
    if n not in _lattice_cache:
        _lattice_cache[n] = part.enumerate_partitions(n)
    return _lattice_cache[n]


def split_moment_of_inertia(sys, q, partition):
    """ (J_ext, J_int) with J_ext = J(q_ext), J_int = J(q_int); their sum is J(q)."""
    q_ext, q_int = split_configuration(sys, q, partition)
    return moment_of_inertia(sys, q_ext), moment_of_inertia(sys, q_int)


def graf_candidates(sys, q, params):
    """ List of (J_ext(C) + delta**|C|, C) over the whole partition lattice, in enumeration order."""
    lattice = _lattice(sys.n)
    q = sys.shape(q)
    return [(moment_of_inertia(sys, split_configuration(sys, q, c)[0]) + params.delta ** c.rank, c)
            for c in lattice]


def graf_value(sys, q, params):
    """
    Convex max-function J^(delta)(q) = max over partitions C of J_ext(C)(q) + delta**|C|.

    Returns:
        :obj:`float`.
    """
    return max(v for v, _ in graf_candidates(sys, q, params))


def _select(candidates):
    best = max(v for v, _ in candidates)
    ties = [(c.rank, c) for v, c in candidates if v == best]
    top_rank = max(r for r, _ in ties)
    # candidates are in enumeration order, so the first tie of top rank is the canonical one
    return best, next(c for r, c in ties if r == top_rank)


def graf_region(sys, q, params):
    """
    Partition C whose Graf region contains q, i.e. a maximizer of J_ext(C)(q) + delta**|C|. Equal maximizers are
    resolved by the largest rank, then by enumeration order.

    Returns:
        :obj:`pymessenger.partitions.Partition`.
    """
    return _select(graf_candidates(sys, q, params))[1]


def graf_region_value(sys, q, params):
    return _select(graf_candidates(sys, q, params))


def scaled_configuration(q, t, params):
    return np.asarray(q) / t ** params.scale_exponent()


def _check_times(trajectory):
    if trajectory.t[0] <= 0.0:
        raise ParameterError("cluster analysis needs sample times t > 0, first sample at {}".format(trajectory.t[0]))


def cluster_function(sys, trajectory, params=None, max_switches=64):
    """
    Cluster function A(t) = graf_region(q(t) / t**(1 - epsilon/2)) along a sampled trajectory. Between samples whose
    regions differ, every switch is located by bisection on the interpolated path to the relative time tolerance of
    params; several switches inside one sample interval are found one after another.

    Args:
        | sys (:obj:`pymessenger.mass_geometry.MassSystem`): masses.
        | trajectory (:obj:`pymessenger.trajectory.Trajectory`): sampled path with strictly increasing t > 0.
        | params (:obj:`GrafParams`, optional): defaults to GrafParams().
        | max_switches (:obj:`int`): bound on switches searched inside one sample interval.

    Returns:
        :obj:`ClusterTimeline`.

    Raises:
        ParameterError: if a sample time is not positive.
    """
    params = params or GrafParams()
    _check_times(trajectory)

    def region(s):
        return graf_region(sys, scaled_configuration(trajectory.positions_at(s), s, params), params)

    times = trajectory.t
    regions = [graf_region(sys, scaled_configuration(trajectory.q[i], times[i], params), params)
               for i in range(len(times))]

    intervals = []
    change_points = []
    start, current = times[0], regions[0]
    for i in range(1, len(times)):
        a, target = times[i - 1], regions[i]
        switches = 0
        while current != target:
            lo, hi = a, times[i]
            after = target
            while hi - lo > params.time_tol * hi:
                mid = 0.5 * (lo + hi)
                r_mid = region(mid)
                if r_mid == current:
                    lo = mid
                else:
                    hi, after = mid, r_mid
            t_switch = 0.5 * (lo + hi)
            intervals.append((start, t_switch, current))
            change_points.append(ChangePoint(t_switch, current, after, part.comparable(current, after)))
            start, current, a = t_switch, after, hi
            switches += 1
            if switches >= max_switches:
                logger.warning('More than {} region switches between t={} and t={}; skipping ahead.'.format(
                    max_switches, times[i - 1], times[i]))
                change_points.append(ChangePoint(times[i], current, target, part.comparable(current, target)))
                intervals.append((start, times[i], current))
                start, current = times[i], target
    intervals.append((start, times[-1], current))
    logger.debug('Cluster function: {} intervals, {} change points.'.format(len(intervals), len(change_points)))
    return ClusterTimeline(intervals, change_points)


def von_zeipel_series(sys, trajectory, params=None):
    """
    Von Zeipel diagnostics along a trajectory with Q(t) = q(t)/t:

        | j(t) = J(Q(t));
        | j_ext(t) = J(Q_ext(t)), external part for the partition A(t);
        | j_delta(t) = j_ext(t) + delta**|A(t)| * t**(-epsilon);
        | dj_ext_dt = (1/2t) <Q_ext, dq_ext/dt - Q_ext>_M with dq_ext/dt from centered finite differences;
        | dj_ext_dt_fd = centered finite differences of j_ext itself, for comparison.

    Returns:
        :obj:`VonZeipelSeries` of arrays aligned with trajectory.t.

    Raises:
        ParameterError: if a sample time is not positive.
    """
    params = params or GrafParams()
    _check_times(trajectory)
    t = trajectory.t
    n_samples = len(t)
    dq = np.gradient(trajectory.q, t, axis=0) if n_samples > 1 else np.zeros_like(trajectory.q)

    j = np.empty(n_samples)
    j_ext = np.empty(n_samples)
    j_delta = np.empty(n_samples)
    dj = np.empty(n_samples)
    rank = np.empty(n_samples, dtype=int)
    for i in range(n_samples):
        q = trajectory.q[i]
        a_t = graf_region(sys, scaled_configuration(q, t[i], params), params)
        Q_ext, _ = split_configuration(sys, q / t[i], a_t)
        dq_ext, _ = split_configuration(sys, dq[i], a_t)
        j[i] = moment_of_inertia(sys, q / t[i])
        j_ext[i] = moment_of_inertia(sys, Q_ext)
        j_delta[i] = j_ext[i] + params.delta ** a_t.rank * t[i] ** (-params.epsilon)
        dj[i] = mass_inner(sys, Q_ext, dq_ext - Q_ext) / (2.0 * t[i])
        rank[i] = a_t.rank
    dj_fd = np.gradient(j_ext, t) if n_samples > 1 else np.zeros(n_samples)
    return VonZeipelSeries(t.copy(), j, j_ext, j_delta, dj, dj_fd, rank)


def asymptotic_velocity_estimate(trajectory):
    """ Cesaro quotient q(t)/t at the last sample, shape (n, d)."""
    t_end = trajectory.t[-1]
    if t_end <= 0.0:
        raise ParameterError("asymptotic velocity needs a final time > 0")
    return trajectory.q[-1] / t_end


def asymptotic_partition(trajectory, tol=1e-3):
    """ Particles whose estimated asymptotic velocities agree within tol are placed in one block."""
    v = asymptotic_velocity_estimate(trajectory)
    n = trajectory.sys.n
    result = part.finest(n)
    for i in range(n):
        for k in range(i + 1, n):
            if np.linalg.norm(v[i] - v[k]) <= tol:
                pair = [[i + 1, k + 1]] + [[x] for x in range(1, n + 1) if x not in (i + 1, k + 1)]
                result = part.join(result, part.Partition(pair))
    return result
