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
from scipy.optimize import brentq

from .mass_geometry import cluster_aggregates
from .partitions import MessengerTuple, ParameterError

logger = logging.getLogger(__name__)

HYPERPLANE_TOL = 1e-9

# p(N) < 0 iff dg/dt > 0, i.e. the messenger's projection on the direction of C1 grows
NORMAL_CONVENTION = 'N = -M^-1 grad g / |M^-1 grad g|; p(N) < 0 iff d/dt <q_C2 - q_C1, q_C1/|q_C1|> > 0'

PoincareWitness = collections.namedtuple('PoincareWitness', [
    'member', 'conditions', 'p_C2_norm', 'q_C1_norm', 'g', 'p_of_N', 'L_bounds'])
Crossing = collections.namedtuple('Crossing', ['t', 'g_dot', 'transversal', 'witness'])


class PoincareSurfaceSpec(object):
    """
    Poincare surface of a messenger tuple: the messenger C2 crosses, moving away from C1, the hyperplane at distance
    1/m from q_C1 with momentum at least m and angular-momentum type products bounded by L.

    Attributes:
        | m (:obj:`int`): surface index, m >= 2.
        | L (:obj:`float`): positive bound of the three perpendicular products.
        | tuple (:obj:`pymessenger.partitions.MessengerTuple`): (C1, C2, C3).
        | energy (:obj:`float` or None): energy of the level set the surface lives in, for bookkeeping.
    """

    def __init__(self, m, L, messenger_tuple, energy=None):
        if int(m) != m or m < 2:
            raise ParameterError("surface index m must be an integer >= 2, got {}".format(m))
        if not L > 0.0:
            raise ParameterError("angular-momentum bound must be positive, got {}".format(L))
        if not isinstance(messenger_tuple, MessengerTuple):
            messenger_tuple = MessengerTuple(*messenger_tuple)
        self.m = int(m)
        self.L = float(L)
        self.tuple = messenger_tuple
        self.energy = energy

    def to_dict(self):
        return {'m': self.m, 'L': self.L, 'tuple': self.tuple.to_list(), 'energy': self.energy,
                'normal_convention': NORMAL_CONVENTION}


def perpendicular(x, axis):
    """ x minus its projection on axis."""
    return x - (np.dot(x, axis) / np.dot(axis, axis)) * axis


def _aggregates(spec, sys, state):
    _, q1, p1 = cluster_aggregates(sys, state, spec.tuple.c1)
    m2, q2, p2 = cluster_aggregates(sys, state, spec.tuple.c2)
    m1 = sys.cluster_mass(spec.tuple.c1)
    return (m1, q1, p1), (m2, q2, p2)


def hyperplane_function(spec, sys, state):
    """ g = <q_C2 - q_C1, q_C1/|q_C1|> + 1/m; zero on the surface hyperplane, nan when q_C1 = 0."""
    (_, q1, _), (_, q2, _) = _aggregates(spec, sys, state)
    n1 = float(np.linalg.norm(q1))
    if n1 == 0.0:
        return np.nan
    return float(np.dot(q2 - q1, q1 / n1)) + 1.0 / spec.m


def hyperplane_rate(spec, sys, state):
    """ dg/dt = <v_C2 - v_C1, q1_hat> + <q_C2 - q_C1, d q1_hat/dt>."""
    (m1, q1, p1), (m2, q2, p2) = _aggregates(spec, sys, state)
    n1 = float(np.linalg.norm(q1))
    if n1 == 0.0:
        return np.nan
    u = q1 / n1
    v1, v2 = p1 / m1, p2 / m2
    du = perpendicular(v1, q1) / n1
    return float(np.dot(v2 - v1, u) + np.dot(q2 - q1, du))


def poincare_membership(spec, sys, state, hyperplane_tol=None):
    """
    Test a phase point against the six conditions of the surface:

        | momentum: |p_C2| >= m;
        | distance: |q_C1| >= 1;
        | hyperplane: |g| <= hyperplane_tol, by default 1e-9 * max(1, |q_C1|);
        | outgoing: p(N(q)) < 0 with the normal convention NORMAL_CONVENTION;
        | three bounds |q_C2_perp| |p_C2|, |p_C2_perp| |q_C2|, |p_C1_perp| |q_C2| <= L, perpendicular to q_C1.

    Args:
        | spec (:obj:`PoincareSurfaceSpec`): the surface.
        | sys (:obj:`pymessenger.mass_geometry.MassSystem`): masses.
        | state (:obj:`pymessenger.mass_geometry.PhaseState`): phase point in the center-of-mass frame.
        | hyperplane_tol (:obj:`float`, optional): override of the hyperplane tolerance.

    Returns:
        :obj:`PoincareWitness` with the overall result, the per-condition booleans and the measured values.
    """
    (m1, q1, p1), (m2, q2, p2) = _aggregates(spec, sys, state)
    n1 = float(np.linalg.norm(q1))
    p2_norm = float(np.linalg.norm(p2))
    conditions = collections.OrderedDict()
    conditions['momentum'] = p2_norm >= spec.m
    conditions['distance'] = n1 >= 1.0
    if n1 == 0.0:
        g = p_of_N = np.nan
        bounds = (np.nan, np.nan, np.nan)
        conditions['hyperplane'] = False
        conditions['outgoing'] = False
    else:
        g = hyperplane_function(spec, sys, state)
        tol = HYPERPLANE_TOL * max(1.0, n1) if hyperplane_tol is None else hyperplane_tol
        conditions['hyperplane'] = abs(g) <= tol
        p_of_N = -hyperplane_rate(spec, sys, state)
        conditions['outgoing'] = p_of_N < 0.0
        q2_norm = float(np.linalg.norm(q2))
        bounds = (float(np.linalg.norm(perpendicular(q2, q1))) * p2_norm,
                  float(np.linalg.norm(perpendicular(p2, q1))) * q2_norm,
                  float(np.linalg.norm(perpendicular(p1, q1))) * q2_norm)
    for name, value in zip(('bound_q_C2', 'bound_p_C2', 'bound_p_C1'), bounds):
        conditions[name] = bool(value <= spec.L)
    return PoincareWitness(all(conditions.values()), conditions, p2_norm, n1, g, p_of_N, bounds)


def count_crossings(scenario, trajectory, spec, time_tol=1e-12, transversality_tol=1e-12):
    """
    Crossings of the surface along a trajectory. Sign changes of g between samples are refined with Brent's method
    on the interpolated path, and a crossing is reported when the refined point is a member of the surface.

    Returns:
        :obj:`list` of :obj:`Crossing` (t, dg/dt, transversal flag, :obj:`PoincareWitness`).
    """
    sys = scenario.sys

    def g_at(t):
        return hyperplane_function(spec, sys, trajectory.state_at(t))

    g = np.array([hyperplane_function(spec, sys, s) for s in trajectory.states()])
    crossings = []
    for i in range(len(g) - 1):
        a, b = g[i], g[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)) or a == 0.0 or a * b > 0.0:
            continue
        t_a, t_b = trajectory.t[i], trajectory.t[i + 1]
        t_root = t_b if b == 0.0 else brentq(g_at, t_a, t_b, xtol=time_tol * max(1.0, abs(t_b)))
        state = trajectory.state_at(t_root)
        g_dot = hyperplane_rate(spec, sys, state)
        n1 = float(np.linalg.norm(cluster_aggregates(sys, state, spec.tuple.c1)[1]))
        # root refinement leaves |g| of order |dg/dt| * xtol
        tol = max(HYPERPLANE_TOL * max(1.0, n1), 2.0 * abs(g_dot) * time_tol * max(1.0, abs(t_b)))
        witness = poincare_membership(spec, sys, state, hyperplane_tol=tol)
        if witness.member:
            crossings.append(Crossing(t_root, g_dot, abs(g_dot) > transversality_tol, witness))
            logger.debug('Surface m={} crossed at t={:.9g}, dg/dt={:.3g}.'.format(spec.m, t_root, g_dot))
    logger.info('{} crossings of the m={} surface for tuple {}.'.format(len(crossings), spec.m, spec.tuple))
    return crossings


def crossing_record(crossing):
    w = crossing.witness
    return {'t': crossing.t, 'g_dot': crossing.g_dot, 'transversal': crossing.transversal,
            'p_C2_norm': w.p_C2_norm, 'q_C1_norm': w.q_C1_norm, 'g': w.g, 'p_of_N': w.p_of_N,
            'L_bounds': list(w.L_bounds), 'conditions': dict(w.conditions)}
