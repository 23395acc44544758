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

from .partitions import ParameterError
from .policies import PolicyRejectionError

logger = logging.getLogger(__name__)

COINCIDENCE_TOL = 1e-10
MASS_TOL = 1e-12


class ModelViolationError(RuntimeError):
    pass


KinObservables = collections.namedtuple('KinObservables', ['J', 'J_prime', 'K', 'K_par', 'L_i', 'v_hat'])


def due_pair(k):
    """ Pair colliding at collision index k: (1, 2) for odd k, (2, 3) for even k."""
    return (1, 2) if k % 2 == 1 else (2, 3)


def aim_target(k):
    """ Particle the messenger (particle 2) is sent to after collision k."""
    return 3 if k % 2 == 1 else 1


def planar_angular_momentum(q, p):
    """ Per-particle angular momenta q_i ^ p_i as scalars; zero on a line."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape[1] == 1:
        return np.zeros(len(q))
    return q[:, 0] * p[:, 1] - q[:, 1] * p[:, 0]


class KinConfig(object):
    """
    Initial data of a kinematical-model run: three particles on a line (dimension 1) or in a plane (dimension 2), in
    the center-of-mass frame, before their first collision.

    Attributes:
        | dimension (:obj:`int`): 1 or 2.
        | m_min, m_max (:obj:`float`): mass bounds, 0 < m_min <= m_max.
        | masses (:obj:`numpy.ndarray`): three initial masses inside the bounds.
        | q (:obj:`numpy.ndarray`): (3, dimension) initial positions; on a line q_1 <= q_2 <= q_3.
        | v (:obj:`numpy.ndarray`): (3, dimension) initial velocities.
        | seed (:obj:`int`): seed of the run's generator.
        | collisions (:obj:`int`): number K of collisions to simulate.
        | total_mass (:obj:`float`): sum of the masses.
    """

    def __init__(self, masses, q, v, m_min, m_max, seed=0, collisions=20, dimension=None, total_mass=None):
        self.masses = np.asarray(masses, dtype=float).ravel()
        q = np.asarray(q, dtype=float)
        v = np.asarray(v, dtype=float)
        if dimension is None:
            dimension = 1 if q.ndim == 1 else q.shape[1]
        self.dimension = int(dimension)
        if self.dimension not in (1, 2):
            raise ParameterError("the kinematical model runs in dimension 1 or 2, got {}".format(dimension))
        if len(self.masses) != 3:
            raise ParameterError("the kinematical model has three particles, got {} masses".format(len(self.masses)))
        self.q = q.reshape(3, self.dimension)
        self.v = v.reshape(3, self.dimension)
        self.m_min = float(m_min)
        self.m_max = float(m_max)
        self.seed = int(seed)
        self.collisions = int(collisions)
        self.total_mass = float(np.sum(self.masses))
        if total_mass is not None and abs(total_mass - self.total_mass) > MASS_TOL * self.total_mass:
            raise ParameterError("masses sum to {}, not to total_mass {}".format(self.total_mass, total_mass))
        self.validate()

    def validate(self):
        if not 0.0 < self.m_min <= self.m_max:
            raise ParameterError("need 0 < m_min <= m_max, got [{}, {}]".format(self.m_min, self.m_max))
        if np.any(self.masses < self.m_min) or np.any(self.masses > self.m_max):
            raise ParameterError("masses {} outside [{}, {}]".format(self.masses.tolist(), self.m_min, self.m_max))
        if self.collisions < 1:
            raise ParameterError("number of collisions must be >= 1, got {}".format(self.collisions))
        p = self.masses[:, None] * self.v
        scale = max(1.0, float(np.sum(np.abs(p))), float(np.sum(self.masses[:, None] * np.abs(self.q))))
        if np.any(np.abs(np.sum(p, axis=0)) > 1e-12 * scale):
            raise ParameterError("initial total momentum {} is not zero".format(np.sum(p, axis=0).tolist()))
        if np.any(np.abs(np.sum(self.masses[:, None] * self.q, axis=0)) > 1e-12 * scale):
            raise ParameterError("initial barycenter is not at the origin")
        if self.dimension == 1 and not (self.q[0, 0] <= self.q[1, 0] <= self.q[2, 0]):
            raise ParameterError("positions on a line must satisfy q_1 <= q_2 <= q_3, got {}".format(
                self.q.ravel().tolist()))
        j_prime = float(np.sum(self.q * p))
        if not j_prime > 0.0:
            raise ParameterError("initial derivative of the moment of inertia must be positive, got {}".format(
                j_prime))

    def initial_state(self):
        return KinState(0.0, self.q, self.masses[:, None] * self.v, self.masses, k=1)

    @property
    def mass_bounds(self):
        return self.m_min, self.m_max

    def to_dict(self):
        return {'dimension': self.dimension, 'm_min': self.m_min, 'm_max': self.m_max,
                'masses': self.masses.tolist(), 'q': self.q.tolist(), 'v': self.v.tolist(),
                'seed': self.seed, 'collisions': self.collisions}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        return cls(d.pop('masses'), d.pop('q'), d.pop('v'), d.pop('m_min'), d.pop('m_max'), **d)


class KinState(object):
    """
    State of the three particles. k is the index of the next collision due; at a collision instant (at_collision)
    it is the index of the collision taking place.

    Attributes:
        | t (:obj:`float`): time.
        | q, p (:obj:`numpy.ndarray`): (3, d) positions and momenta.
        | m (:obj:`numpy.ndarray`): current masses.
        | k (:obj:`int`): collision index.
        | at_collision (:obj:`bool`): True when the due pair coincides at t.
    """

    def __init__(self, t, q, p, m, k=1, at_collision=False):
        self.t = float(t)
        self.q = np.array(q, dtype=float)
        self.p = np.array(p, dtype=float)
        self.m = np.array(m, dtype=float)
        self.k = int(k)
        self.at_collision = bool(at_collision)

    @property
    def v(self):
        return self.p / self.m[:, None]

    @property
    def pair(self):
        return due_pair(self.k)

    def advanced(self, t):
        """ Straight-line motion to time t with masses and momenta unchanged."""
        return KinState(t, self.q + (t - self.t) * self.v, self.p, self.m, self.k, False)

    def total_momentum(self):
        return np.sum(self.p, axis=0)

    def angular_momentum(self):
        return float(np.sum(planar_angular_momentum(self.q, self.p)))


CollisionEvent = collections.namedtuple('CollisionEvent', [
    'k', 't', 'pair', 'q', 'masses_pre', 'masses_post', 'p_pre', 'p_post', 'dt_next', 'retries',
    'observables_pre', 'observables_post', 'm_min', 'm_max'])


def _observables_record(obs):
    rec = obs._asdict()
    rec['L_i'] = list(obs.L_i)
    rec['v_hat'] = [None if x is None else list(x) for x in obs.v_hat]
    return rec


def event_record(event):
    """ JSON-compatible dictionary of one collision event."""
    rec = event._asdict()
    for key in ('q', 'masses_pre', 'masses_post', 'p_pre', 'p_post'):
        rec[key] = np.asarray(rec[key]).tolist()
    rec['pair'] = list(event.pair)
    rec['observables_pre'] = _observables_record(event.observables_pre)
    rec['observables_post'] = _observables_record(event.observables_post)
    return rec


def event_from_record(rec):
    """
    Rebuild a CollisionEvent from its dictionary form. Observables are recomputed from the raw state, so records
    edited by hand are judged on their positions, masses and momenta.

    Raises:
        KeyError: if a required field is missing.
    """
    q = np.asarray(rec['q'], dtype=float)
    if q.ndim == 1:
        q = q.reshape(3, -1)
    p_pre = np.asarray(rec['p_pre'], dtype=float).reshape(q.shape)
    p_post = np.asarray(rec['p_post'], dtype=float).reshape(q.shape)
    m_pre = np.asarray(rec['masses_pre'], dtype=float)
    m_post = np.asarray(rec['masses_post'], dtype=float)
    k = int(rec['k'])
    t = float(rec['t'])
    pre = KinState(t, q, p_pre, m_pre, k, True)
    post = KinState(t, q, p_post, m_post, k, True)
    return CollisionEvent(k, t, tuple(rec['pair']), q, m_pre, m_post, p_pre, p_post, float(rec['dt_next']),
                          int(rec.get('retries', 0)), observables(pre), observables(post),
                          float(rec['m_min']), float(rec['m_max']))


class ModelTrace(object):
    """
    Result of a kinematical-model run.

    Attributes:
        | config (:obj:`KinConfig` or None): the run's initial data (None for traces read back from file).
        | events (:obj:`list`): :obj:`CollisionEvent` in collision order.
        | final_state (:obj:`KinState`): state just after the last collision.
        | policy (:obj:`dict`): dictionary form of the policy used.
    """

    def __init__(self, events, final_state=None, config=None, policy=None):
        self.events = list(events)
        self.config = config
        self.policy = dict(policy or {})
        if final_state is None and self.events:
            last = self.events[-1]
            final_state = KinState(last.t, last.q, last.p_post, last.masses_post, last.k + 1, False)
        self.final_state = final_state

    def __len__(self):
        return len(self.events)

    @property
    def dimension(self):
        return self.events[0].q.shape[1]

    @property
    def mass_bounds(self):
        return self.events[0].m_min, self.events[0].m_max

    def records(self):
        return [event_record(e) for e in self.events]

    @classmethod
    def from_records(cls, records):
        return cls([event_from_record(r) for r in records])


def observables(state):
    """
    Observables of a model state: J = 1/2 sum m_i |q_i|^2, J' = sum <q_i, p_i>, K = sum |p_i|^2 / 2 m_i, the
    angular momenta L_i = q_i ^ p_i, unit velocities v_hat (None for a particle at rest), and at collision
    instants K_par = (<p_1, q1_hat>^2 + <p_3, q3_hat>^2) / 2M (None otherwise).

    Returns:
        :obj:`KinObservables`.
    """
    q, p, m = state.q, state.p, state.m
    J = 0.5 * float(np.sum(m[:, None] * q * q))
    J_prime = float(np.sum(q * p))
    K = float(np.sum(np.sum(p * p, axis=1) / (2.0 * m)))
    L_i = planar_angular_momentum(q, p).tolist()
    v_hat = []
    for i in range(3):
        speed = float(np.linalg.norm(p[i]))
        v_hat.append(None if speed == 0.0 else (p[i] / speed).tolist())
    K_par = parallel_kinetic_energy(state) if state.at_collision else None
    return KinObservables(J, J_prime, K, K_par, L_i, v_hat)


def parallel_kinetic_energy(state):
    """
    K_par at a collision instant, where all three particles lie on one line through the barycenter.

    Raises:
        ParameterError: if the state is not a collision instant or particle 1 or 3 sits at the origin.
    """
    if not state.at_collision:
        raise ParameterError("K_par is defined at collision instants only (t={})".format(state.t))
    total = 0.0
    for i in (0, 2):
        norm = float(np.linalg.norm(state.q[i]))
        if norm == 0.0:
            raise ParameterError("particle {} is at the barycenter; its direction is undefined".format(i + 1))
        total += float(np.dot(state.p[i], state.q[i] / norm)) ** 2
    return total / (2.0 * float(np.sum(state.m)))


def next_collision(state):
    """
    Time and pair of the next collision of a state moving on straight lines. The due pair's relative motion
    r(t) = r0 + (t - t0) w must pass exactly through zero at a later time.

    Returns:
        :obj:`tuple` (t_next, pair).

    Raises:
        ModelViolationError: if the pair never coincides in the future.
    """
    i, j = state.pair
    r0 = state.q[i - 1] - state.q[j - 1]
    w = state.v[i - 1] - state.v[j - 1]
    ww = float(np.dot(w, w))
    if ww == 0.0:
        raise ModelViolationError("pair {} moves in parallel at t={}; no collision ahead".format((i, j), state.t))
    tau = -float(np.dot(r0, w)) / ww
    residual = float(np.linalg.norm(r0 + tau * w))
    if not tau > 0.0:
        raise ModelViolationError("pair {} separates at t={} (closest approach at dt={})".format((i, j), state.t, tau))
    if residual > COINCIDENCE_TOL * max(float(np.linalg.norm(r0)), 1e-300):
        raise ModelViolationError("pair {} misses by {} at t={}".format((i, j), residual, state.t + tau))
    return state.t + tau, (i, j)


def advance_to_collision(state):
    """ Move to the next collision instant; the colliding pair is placed at its common barycenter."""
    t_next, (i, j) = next_collision(state)
    moved = state.advanced(t_next)
    mi, mj = moved.m[i - 1], moved.m[j - 1]
    meet = (mi * moved.q[i - 1] + mj * moved.q[j - 1]) / (mi + mj)
    moved.q[i - 1] = meet
    moved.q[j - 1] = meet
    moved.at_collision = True
    return moved


def sign_conditions(q, p):
    """ <p_1, q_1> > 0, <p_2, q_2> < 0, <p_3, q_3> > 0 as a tuple of the three scalar products."""
    return tuple(float(np.dot(p[i], q[i])) for i in range(3))


def _signs_hold(q, p):
    a, b, c = sign_conditions(q, p)
    return a > 0.0 and b < 0.0 and c > 0.0


def aimed_momenta(state, dt, masses):
    """
    Post-collision momenta for collision state.k: the messenger (particle 2) gets
    p_2 = m_2 ((q_target - q_2) / dt + v_target), the partner keeps the rest of the pair momentum.
    """
    k = state.k
    i, j = due_pair(k)
    target = aim_target(k)
    m_new = state.m.copy()
    m_new[i - 1], m_new[j - 1] = masses
    p_new = state.p.copy()
    pair_momentum = state.p[i - 1] + state.p[j - 1]
    v_target = state.p[target - 1] / state.m[target - 1]
    p2 = m_new[1] * ((state.q[target - 1] - state.q[1]) / dt + v_target)
    partner = i if j == 2 else j
    p_new[1] = p2
    p_new[partner - 1] = pair_momentum - p2
    return m_new, p_new


def _check_proposal(proposal, state, bounds):
    m_min, m_max = bounds
    i, j = state.pair
    dt = proposal.dt
    if not (np.isfinite(dt) and dt > 0.0):
        return "gap {} is not positive".format(dt)
    m_i, m_j = proposal.masses
    total = state.m[i - 1] + state.m[j - 1]
    if abs(m_i + m_j - total) > MASS_TOL * total:
        return "pair mass {} differs from {}".format(m_i + m_j, total)
    for m in (m_i, total - m_i):
        if m < m_min * (1.0 - MASS_TOL) or m > m_max * (1.0 + MASS_TOL):
            return "mass {} outside [{}, {}]".format(m, m_min, m_max)
    return None


def resolve_collision(state, policy, bounds, rng):
    """
    Apply the collision rule at a collision instant: ask the policy for the next gap and the pair's new masses,
    aim the messenger at its next partner, and conserve pair mass and pair momentum. A proposal violating the mass
    bounds, or producing a state that breaks the sign conditions, is rejected and the policy re-queried.

    Args:
        | state (:obj:`KinState`): state at the collision instant with pre-collision momenta.
        | policy (:obj:`pymessenger.policies.CollisionPolicy`): proposal source.
        | bounds (:obj:`tuple`): (m_min, m_max).
        | rng (:obj:`numpy.random.Generator`): generator passed to the policy.

    Returns:
        :obj:`tuple` (post-collision :obj:`KinState`, :obj:`CollisionEvent`).

    Raises:
        ModelViolationError: if the due pair does not coincide at state.t.
        PolicyRejectionError: if the policy keeps failing after max_retries re-queries.
    """
    i, j = state.pair
    gap = float(np.linalg.norm(state.q[i - 1] - state.q[j - 1]))
    scale = max(1.0, float(np.linalg.norm(state.q[i - 1])))
    if gap > COINCIDENCE_TOL * scale:
        raise ModelViolationError("pair {} is {} apart at t={}, not colliding".format((i, j), gap, state.t))

    reason = None
    for attempt in range(policy.max_retries + 1):
        proposal = policy.propose(state, (i, j), bounds, rng)
        reason = _check_proposal(proposal, state, bounds)
        if reason is None:
            m_i = float(proposal.masses[0])
            masses = (m_i, state.m[i - 1] + state.m[j - 1] - m_i)
            m_new, p_new = aimed_momenta(state, float(proposal.dt), masses)
            if _signs_hold(state.q, p_new):
                post = KinState(state.t, state.q, p_new, m_new, state.k, True)
                event = CollisionEvent(state.k, state.t, (i, j), state.q.copy(), state.m.copy(), m_new.copy(),
                                       state.p.copy(), p_new.copy(), float(proposal.dt), attempt,
                                       observables(state), observables(post), bounds[0], bounds[1])
                post.k = state.k + 1
                post.at_collision = False
                return post, event
            reason = "sign conditions fail for the aimed state, <p_i, q_i> = {}".format(
                [round(x, 12) for x in sign_conditions(state.q, p_new)])
        logger.warning('Collision {} at t={}: proposal rejected ({}); re-querying policy.'.format(
            state.k, state.t, reason))
    raise PolicyRejectionError("policy {} rejected {} times at collision {}: {}".format(
        policy, policy.max_retries + 1, state.k, reason))


def run(config, policy, rng=None):
    """
    Simulate config.collisions collisions. Motion between collisions is affine in t; every collision is resolved by
    resolve_collision. The trace is a deterministic function of (config, policy, seed).

    Args:
        | config (:obj:`KinConfig`): initial data.
        | policy (:obj:`pymessenger.policies.CollisionPolicy`): collision policy.
        | rng (:obj:`numpy.random.Generator`, optional): defaults to numpy.random.default_rng(config.seed).

    Returns:
        :obj:`ModelTrace`.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    state = config.initial_state()
    events = []
    logger.info('Kinematical run: {} collisions, dimension {}, policy {}.'.format(
        config.collisions, config.dimension, policy.kind))
    for _ in range(config.collisions):
        at = advance_to_collision(state)
        state, event = resolve_collision(at, policy, config.mass_bounds, rng)
        events.append(event)
        logger.debug('Collision {} of pair {} at t={:.6g}, next gap {:.6g}.'.format(
            event.k, event.pair, event.t, event.dt_next))
    return ModelTrace(events, state, config, policy.to_dict())


def random_config(rng, dimension=1, m_min=1.0, m_max=2.0, collisions=20, seed=0, max_attempts=1000):
    """
    Draw a valid initial configuration: masses uniform in [m_min, m_max], a planted first collision of particles
    1 and 2 at positions on a line through the barycenter, random momenta with zero sum, and a start time before
    that collision chosen so that the moment of inertia is increasing.

    Raises:
        ParameterError: if no valid configuration is found within max_attempts draws.
    """
    for _ in range(max_attempts):
        m = rng.uniform(m_min, m_max, size=3)
        if dimension == 1:
            u = np.array([1.0])
        else:
            phi = rng.uniform(0.0, 2.0 * np.pi)
            u = np.array([np.cos(phi), np.sin(phi)])
        s = rng.uniform(0.5, 2.0)
        x = -m[2] * s / (m[0] + m[1])
        q_c = np.array([x * u, x * u, s * u])
        v = rng.normal(size=(3, dimension))
        v[2] = -(m[0] * v[0] + m[1] * v[1]) / m[2]
        p = m[:, None] * v
        j_prime_c = float(np.sum(q_c * p))
        kin = float(np.sum(np.sum(p * p, axis=1) / (2.0 * m)))
        if not j_prime_c > 0.0 or np.allclose(v[0], v[1]):
            continue
        tau = rng.uniform(0.1, 0.9) * j_prime_c / (2.0 * kin)
        q0 = q_c - tau * v
        if dimension == 1 and not (q0[0, 0] <= q0[1, 0] <= q0[2, 0] and v[0, 0] > v[1, 0]):
            continue
        # remove rounding from the barycenter
        q0 -= np.sum(m[:, None] * q0, axis=0) / np.sum(m)
        v -= np.sum(m[:, None] * v, axis=0) / np.sum(m)
        try:
            return KinConfig(m, q0, v, m_min, m_max, seed=seed, collisions=collisions, dimension=dimension)
        except ParameterError:
            continue
    raise ParameterError("no valid initial configuration found in {} attempts".format(max_attempts))


def run_batch(runs, master_seed, policy, dimension=1, m_min=1.0, m_max=2.0, collisions=20):
    """
    Independent Monte-Carlo runs. Run r draws its initial configuration and all policy randomness from
    numpy.random.default_rng(SeedSequence([master_seed, r])).

    Returns:
        :obj:`list` of :obj:`ModelTrace`.
    """
    traces = []
    for r in range(runs):
        rng = np.random.default_rng(np.random.SeedSequence([master_seed, r]))
        config = random_config(rng, dimension, m_min, m_max, collisions, seed=master_seed)
        traces.append(run(config, policy, rng))
    logger.info('Batch of {} kinematical runs finished (master seed {}).'.format(runs, master_seed))
    return traces
