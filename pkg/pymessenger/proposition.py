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
import math

import numpy as np

from . import arcs
from .kinmodel import KinState, observables, sign_conditions
from .partitions import ParameterError

logger = logging.getLogger(__name__)

MIN_COLLISIONS = 6
L_TOL = 1e-12
FORMULA_TOL = 1e-10
RATIO_TOL = 1e-12
ARC_TOL = 1e-9
CONVERGED_ARC = 1e-3

ClauseResult = collections.namedtuple('ClauseResult', ['name', 'passed', 'margin', 'checks'])


def lambda_mu(m_min, m_max):
    """ Growth rates lambda = (1 + m_min/m_max)**(1/2) of J and mu = 1 + (m_min/m_max)**2 of K."""
    if not 0.0 < m_min <= m_max:
        raise ParameterError("need 0 < m_min <= m_max, got [{}, {}]".format(m_min, m_max))
    r = m_min / m_max
    return math.sqrt(1.0 + r), 1.0 + r * r


class VerificationReport(object):
    """
    Outcome of checking a model trace against the growth and alignment statements.

    Attributes:
        | clauses (:obj:`collections.OrderedDict`): clause name -> :obj:`ClauseResult`.
        | lam, mu (:obj:`float`): growth rates for the trace's mass bounds.
        | series (:obj:`dict`): per-collision series (k, t, J, J_prime, K, K_par, arc_length).
        | converged (:obj:`bool`): True if the last alignment arc is shorter than 1e-3 rad.
        | collisions (:obj:`int`): number of events checked.
    """

    def __init__(self, clauses, lam, mu, series, converged, collisions):
        self.clauses = clauses
        self.lam = lam
        self.mu = mu
        self.series = series
        self.converged = converged
        self.collisions = collisions

    @property
    def passed(self):
        return all(c.passed for c in self.clauses.values())

    def failed_clauses(self):
        return [name for name, c in self.clauses.items() if not c.passed]

    def to_dict(self):
        return {'passed': self.passed, 'collisions': self.collisions, 'lambda': self.lam, 'mu': self.mu,
                'converged': self.converged,
                'clauses': collections.OrderedDict(
                    (name, {'passed': c.passed, 'margin': c.margin, 'checks': dict(c.checks)})
                    for name, c in self.clauses.items()),
                'series': self.series}


def _states(event):
    pre = KinState(event.t, event.q, event.p_pre, event.masses_pre, event.k, True)
    post = KinState(event.t, event.q, event.p_post, event.masses_post, event.k, True)
    return pre, post


def _clause(name, checks, margin):
    return ClauseResult(name, all(checks.values()), float(margin), checks)


def _state_scale(s):
    return max(1.0, float(np.sum(np.linalg.norm(s.q, axis=1) * np.linalg.norm(s.p, axis=1))))


def _angular_momentum_clause(pre, post, obs_post):
    # L is compared across each collision and each free flight, relative to the states involved
    worst = 0.0
    for a, b in zip(pre, post):
        worst = max(worst, abs(a.angular_momentum() - b.angular_momentum()) / max(_state_scale(a), _state_scale(b)))
    flight = 0.0
    for a, b in zip(post[:-1], pre[1:]):
        flight = max(flight, abs(a.angular_momentum() - b.angular_momentum()) / max(_state_scale(a), _state_scale(b)))
    bound_slack = np.inf
    formula_err = 0.0
    for s, o in zip(post, obs_post):
        scale = _state_scale(s)
        L = sum(o.L_i)
        M = float(np.sum(s.m))
        bound_slack = min(bound_slack, (abs(L) - max(abs(x) for x in o.L_i)) / scale)
        expected = [(M - s.m[0]) / M * L, -s.m[1] / M * L, (M - s.m[2]) / M * L]
        formula_err = max(formula_err, max(abs(a - b) for a, b in zip(o.L_i, expected)) / scale)
    checks = collections.OrderedDict([
        ('constant', worst <= L_TOL and flight <= FORMULA_TOL),
        ('particle_bound', bound_slack >= -L_TOL),
        ('three_formulas', formula_err <= FORMULA_TOL),
    ])
    if abs(post[0].angular_momentum()) <= L_TOL * _state_scale(post[0]):
        # zero angular momentum: all motion lines pass through the barycenter
        checks['lines_coincide'] = all(max(abs(x) for x in o.L_i) <= FORMULA_TOL * _state_scale(s)
                                       for s, o in zip(post, obs_post))
    margin = min(L_TOL - worst, FORMULA_TOL - flight, bound_slack + L_TOL, FORMULA_TOL - formula_err)
    return _clause('angular_momentum', checks, margin)


def moment_growth_bound(J, k_index, lam):
    """
    Geometric lower bound J(t_k) >= lam**k J0 with J0 fixed by the first two collisions,
    J0 = min(J(t_1)/lam, J(t_2)/lam**2).

    Args:
        | J (:obj:`list`): moments of inertia at the collisions.
        | k_index (:obj:`list`): collision indices of the entries of J.
        | lam (:obj:`float`): growth rate.

    Returns:
        :obj:`tuple` (J0, passed, margin) where margin is the smallest relative excess of J over the bound.
    """
    J = np.asarray(J, dtype=float)
    k_index = np.asarray(k_index, dtype=float)
    if len(J) < 3:
        raise ParameterError("growth bound needs at least three collisions, got {}".format(len(J)))
    floor = J / lam ** k_index
    J0 = float(np.min(floor[:2]))
    if not J0 > 0.0:
        return J0, False, -1.0
    margin = float(np.min(floor[2:] / J0)) - 1.0
    return J0, margin >= -RATIO_TOL, margin


def _moment_of_inertia_clause(events, obs_pre, obs_post, lam):
    cont_err = 0.0
    for a, b in zip(obs_pre, obs_post):
        cont_err = max(cont_err, abs(a.J_prime - b.J_prime) / max(1.0, abs(a.J_prime)))
    rec_err = 0.0
    for k in range(len(events) - 1):
        dt = events[k + 1].t - events[k].t
        predicted = obs_post[k].J_prime + 2.0 * dt * obs_post[k].K
        rec_err = max(rec_err, abs(obs_post[k + 1].J_prime - predicted) / max(1.0, abs(predicted)))
    J = np.array([o.J for o in obs_post])
    J0, bounded, growth_margin = moment_growth_bound(J, [e.k for e in events], lam)
    two_step = (J[2:] / J[:-2]).tolist()
    checks = collections.OrderedDict([
        ('continuous_derivative', cont_err <= FORMULA_TOL),
        ('derivative_recursion', rec_err <= FORMULA_TOL),
        ('derivative_positive', all(o.J_prime > 0.0 for o in obs_post)),
        ('increasing', bool(np.all(np.diff(J) > 0.0))),
        ('exponential_lower_bound', bounded),
    ])
    clause = _clause('moment_of_inertia', checks,
                     min(FORMULA_TOL - cont_err, FORMULA_TOL - rec_err, growth_margin + RATIO_TOL))
    return clause, J0, two_step


def _sign_clause(post):
    worst = np.inf
    speeds_ok = True
    for s in post:
        a, b, c = sign_conditions(s.q, s.p)
        scale = _state_scale(s)
        worst = min(worst, a / scale, -b / scale, c / scale)
        speeds_ok = speeds_ok and bool(np.all(np.linalg.norm(s.p, axis=1) > 0.0))
    checks = collections.OrderedDict([('signs', worst > 0.0), ('nonzero_speeds', speeds_ok)])
    return _clause('sign_conditions', checks, worst)


def _kinetic_energy_clause(obs_post, mu):
    k_par = np.array([o.K_par for o in obs_post])
    K = np.array([o.K for o in obs_post])
    ratios = k_par[1:] / k_par[:-1]
    k_index = np.arange(1, len(K) + 1, dtype=float)
    K0 = k_par[0] / mu
    checks = collections.OrderedDict([
        ('one_step_growth', bool(np.all(ratios >= mu * (1.0 - RATIO_TOL)))),
        ('exponential_lower_bound', bool(np.all(K >= mu ** k_index * K0 * (1.0 - RATIO_TOL)))),
        ('parallel_below_total', bool(np.all(k_par < K))),
    ])
    return _clause('kinetic_energy', checks, float(np.min(ratios)) / mu - 1.0), ratios.tolist()


def alignment_arc(event, obs=None):
    """
    Arc S_k of the unit circle spanned at t_k+ by -v1_hat, v2_hat, v3_hat (k odd) or -v3_hat, v2_hat, v1_hat
    (k even). Only meaningful for dimension <= 2.
    """
    if obs is None:
        obs = event.observables_post
    if any(v is None for v in obs.v_hat):
        raise ParameterError("collision {} leaves a particle at rest".format(event.k))
    a1, a2, a3 = [arcs.direction_angle(v) for v in obs.v_hat]
    if event.k % 2 == 1:
        return arcs.union_through(arcs.opposite(a1), a2, a3)
    return arcs.union_through(arcs.opposite(a3), a2, a1)


def _alignment_clause(events, obs_post):
    try:
        segments = [alignment_arc(e, o) for e, o in zip(events, obs_post)]
    except ParameterError as err:
        checks = collections.OrderedDict([('directions_defined', False)])
        logger.warning('Alignment check skipped: {}'.format(err))
        return _clause('alignment', checks, -1.0), [], False

    lengths = [s.length for s in segments]
    nested = all(arcs.contains(segments[k], segments[k + 2], ARC_TOL) for k in range(len(segments) - 2))
    shrinking = all(lengths[k + 2] <= lengths[k] + ARC_TOL for k in range(len(segments) - 2))

    # last odd collision and the even one right after it
    k_o = max(k for k in range(len(events) - 1) if events[k].k % 2 == 1)
    k_e = k_o + 1
    w_o = [np.asarray(v) for v in obs_post[k_o].v_hat]
    w_e = [np.asarray(v) for v in obs_post[k_e].v_hat]
    l_o, l_e = lengths[k_o], lengths[k_e]
    both = math.cos(min(l_o + l_e, math.pi))
    pattern = collections.OrderedDict([
        ('messenger_reverses', float(np.dot(w_o[1], w_e[1])) <= -both + ARC_TOL),
        ('outer_1_follows_messenger', float(np.dot(w_o[0], w_e[1])) >= math.cos(l_e) - ARC_TOL),
        ('outer_3_follows_messenger', float(np.dot(w_o[2], w_o[1])) >= math.cos(l_o) - ARC_TOL),
        ('outer_particles_opposite', float(np.dot(w_o[0], w_o[2])) <= -both + ARC_TOL),
    ])
    checks = collections.OrderedDict([('nested', nested), ('shrinking', shrinking)])
    checks['sign_pattern'] = all(pattern.values())
    converged = lengths[-1] < CONVERGED_ARC
    margin = -max([0.0] + [lengths[k + 2] - lengths[k] for k in range(len(segments) - 2)])
    return _clause('alignment', checks, margin), lengths, converged


def verify_proposition(trace):
    """
    Check a kinematical-model trace against the five statements on its collisions, recomputing every observable from
    the recorded positions, masses and momenta:

        | angular_momentum: L constant, |L_i| <= |L| and L_1, L_2, L_3 = (M - m_1)/M L, -m_2/M L, (M - m_3)/M L
          at every t_k+;
        | moment_of_inertia: J' continuous at collisions, J'(t_k+1 +) = J'(t_k+) + 2 (t_k+1 - t_k) K(t_k+),
          J increasing with J(t_k) >= lambda**k J0, J0 fixed by the first two collisions;
        | sign_conditions: <p_1, q_1> > 0, <p_2, q_2> < 0, <p_3, q_3> > 0 at every t_k+;
        | kinetic_energy: K_par(t_k+1 +) >= mu K_par(t_k+) at every step, hence K(t_k+) >= mu**k K0;
        | alignment: S_k+2 inside S_k, arc lengths non-increasing, and the limiting sign pattern of the velocity
          directions.

    Args:
        trace (:obj:`pymessenger.kinmodel.ModelTrace`): trace with at least six collisions.

    Returns:
        :obj:`VerificationReport`.

    Raises:
        ParameterError: if the trace is too short.
    """
    events = trace.events
    if len(events) < MIN_COLLISIONS:
        raise ParameterError("verification needs at least {} collisions, trace has {}".format(
            MIN_COLLISIONS, len(events)))
    m_min, m_max = trace.mass_bounds
    lam, mu = lambda_mu(m_min, m_max)
    pairs = [_states(e) for e in events]
    pre = [a for a, _ in pairs]
    post = [b for _, b in pairs]
    obs_pre = [observables(s) for s in pre]
    obs_post = [observables(s) for s in post]

    clauses = collections.OrderedDict()
    clauses['angular_momentum'] = _angular_momentum_clause(pre, post, obs_post)
    clauses['moment_of_inertia'], J0, two_step = _moment_of_inertia_clause(events, obs_pre, obs_post, lam)
    clauses['sign_conditions'] = _sign_clause(post)
    clauses['kinetic_energy'], ratios = _kinetic_energy_clause(obs_post, mu)
    clauses['alignment'], lengths, converged = _alignment_clause(events, obs_post)

    series = {
        'k': [e.k for e in events],
        't': [e.t for e in events],
        'J': [o.J for o in obs_post],
        'J_prime': [o.J_prime for o in obs_post],
        'K': [o.K for o in obs_post],
        'K_par': [o.K_par for o in obs_post],
        'K_par_ratio': ratios,
        'J_two_step_ratio': two_step,
        'arc_length': lengths,
        'J0': J0,
        'K0': obs_post[0].K_par / mu,
    }
    report = VerificationReport(clauses, lam, mu, series, converged, len(events))
    if report.passed:
        logger.info('Trace of {} collisions satisfies all clauses (final arc {:.3g}).'.format(
            len(events), lengths[-1] if lengths else float('nan')))
    else:
        logger.info('Trace of {} collisions fails: {}.'.format(len(events), ', '.join(report.failed_clauses())))
    return report


def summarize_batch(reports):
    """
    Aggregate the reports of a Monte-Carlo batch.

    Returns:
        :obj:`dict` with run count, number of fully passing runs, passes per clause and the fraction of runs whose
        alignment arc converged.
    """
    reports = list(reports)
    if not reports:
        raise ParameterError("cannot summarize an empty batch")
    per_clause = collections.OrderedDict()
    for r in reports:
        for name, c in r.clauses.items():
            per_clause[name] = per_clause.get(name, 0) + int(c.passed)
    converged = sum(int(r.converged) for r in reports)
    return {'runs': len(reports), 'passed': sum(int(r.passed) for r in reports), 'clauses': per_clause,
            'converged': converged, 'convergence_rate': converged / len(reports)}
