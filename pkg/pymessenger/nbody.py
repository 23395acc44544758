from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from builtins import range
from builtins import object
from future import standard_library
standard_library.install_aliases()
import logging

import numpy as np
from scipy.integrate import DOP853, RK45

from .graf import GrafParams
from .mass_geometry import MassSystem, PhaseState, kinetic_energy, wedge, to_com_frame
from .partitions import ParameterError
from .potential import PotentialSpec, SingularityError
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

SOLVERS = {'DOP853': DOP853, 'RK45': RK45}


class StepFailureError(RuntimeError):
    """ The integrator could not meet its tolerance; carries the last accepted state and time."""

    def __init__(self, message, state, t):
        super(StepFailureError, self).__init__(message)
        self.state = state
        self.t = t


class ConservationError(RuntimeError):
    """ A monitored conserved quantity drifted beyond the configured tolerance."""

    def __init__(self, quantity, drift, t):
        super(ConservationError, self).__init__("{} drifted by {:.3e} (relative) at t={}".format(quantity, drift, t))
        self.quantity = quantity
        self.drift = drift
        self.t = t


class IntegratorParams(object):
    """
    Settings of the adaptive one-step integrator.

    Attributes:
        | method (:obj:`str`): 'DOP853' or 'RK45' embedded Runge-Kutta pair.
        | rtol, atol (:obj:`float`): local error tolerances.
        | t_end (:obj:`float`): final time.
        | min_step (:obj:`float`): smallest accepted step before a step failure is raised.
        | max_step (:obj:`float`): global step cap.
        | max_steps (:obj:`int`): bound on accepted steps.
        | encounter_factor (:obj:`float`): c in the close-encounter cap c * r**(1 + alpha/2) / v_rel.
        | encounter_floor (:obj:`float`): pair distance below which the run stops as a near singularity.
        | drift_tol (:obj:`float`): relative drift of H, p_N and L that aborts the run.
    """

    def __init__(self, method='DOP853', rtol=1e-10, atol=1e-12, t_end=10.0, min_step=1e-12, max_step=np.inf,
                 max_steps=100000, encounter_factor=0.05, encounter_floor=1e-6, drift_tol=1e-6):
        if method not in SOLVERS:
            raise ParameterError("unknown integrator {}; available: {}".format(method, sorted(SOLVERS)))
        if not (rtol > 0.0 and atol > 0.0):
            raise ParameterError("tolerances must be positive, got rtol={} atol={}".format(rtol, atol))
        if not 0.0 < min_step < max_step:
            raise ParameterError("need 0 < min_step < max_step, got {} and {}".format(min_step, max_step))
        if int(max_steps) < 1 or encounter_factor <= 0.0 or encounter_floor < 0.0 or drift_tol <= 0.0:
            raise ParameterError("invalid integrator limits")
        self.method = method
        self.rtol = float(rtol)
        self.atol = float(atol)
        self.t_end = float(t_end)
        self.min_step = float(min_step)
        self.max_step = float(max_step)
        self.max_steps = int(max_steps)
        self.encounter_factor = float(encounter_factor)
        self.encounter_floor = float(encounter_floor)
        self.drift_tol = float(drift_tol)

    def replace(self, **kwargs):
        d = self.to_dict()
        d.update(kwargs)
        return IntegratorParams(**d)

    def to_dict(self):
        return {'method': self.method, 'rtol': self.rtol, 'atol': self.atol, 't_end': self.t_end,
                'min_step': self.min_step, 'max_step': self.max_step, 'max_steps': self.max_steps,
                'encounter_factor': self.encounter_factor, 'encounter_floor': self.encounter_floor,
                'drift_tol': self.drift_tol}


class Scenario(object):
    """
    Complete description of an N-body run.

    Attributes:
        | sys (:obj:`pymessenger.mass_geometry.MassSystem`): masses and dimension.
        | potential (:obj:`pymessenger.potential.PotentialSpec`): pair potentials.
        | initial (:obj:`pymessenger.mass_geometry.PhaseState`): initial phase point, shifted to the
          center-of-mass frame when com_frame is set.
        | integrator (:obj:`IntegratorParams`): integrator settings.
        | graf (:obj:`pymessenger.graf.GrafParams`): cluster-function parameters for the analysis passes.
        | poincare (:obj:`dict`): default surface parameters {'m': ..., 'L': ...} for crossing detection.
        | com_frame (:obj:`bool`): whether the initial state was reduced to the center-of-mass frame.
    """

    def __init__(self, sys, potential, initial, integrator=None, graf=None, poincare=None, com_frame=True,
                 name=None):
        if not isinstance(sys, MassSystem):
            raise TypeError("expect obj of '{}', got {}".format(MassSystem.__name__, type(sys).__name__))
        if not isinstance(potential, PotentialSpec):
            raise TypeError("expect obj of '{}', got {}".format(PotentialSpec.__name__, type(potential).__name__))
        if potential.n != sys.n:
            raise ParameterError("potential for {} particles used with {} particles".format(potential.n, sys.n))
        initial = PhaseState(sys.shape(initial.q), sys.shape(initial.p), initial.t)
        if com_frame:
            initial = to_com_frame(sys, initial)
        self.sys = sys
        self.potential = potential
        self.initial = initial
        self.integrator = integrator or IntegratorParams()
        self.graf = graf or GrafParams()
        self.poincare = dict(poincare or {})
        self.com_frame = bool(com_frame)
        self.name = name
        potential.min_pair_distance(initial.q)

    def with_initial(self, state, t_end):
        """ Copy of the scenario starting from another phase point, without a further frame shift."""
        return Scenario(self.sys, self.potential, state, self.integrator.replace(t_end=t_end), self.graf,
                        self.poincare, com_frame=False, name=self.name)

    def to_dict(self):
        return {'name': self.name, 'masses': self.sys.masses.tolist(), 'd': self.sys.d,
                'potential': self.potential.to_dict(), 'initial': {'t': self.initial.t, 'q': self.initial.q.tolist(),
                                                                   'p': self.initial.p.tolist()},
                'integrator': self.integrator.to_dict(), 'graf': self.graf.to_dict(), 'poincare': self.poincare,
                'com_frame': self.com_frame}


def energy(scenario, state):
    """
    Total energy H = sum |p_i|^2 / 2 m_i + sum_{i<j} V_ij(q_i - q_j).

    Raises:
        SingularityError: if two particles coincide.
    """
    return kinetic_energy(scenario.sys, state.p) + scenario.potential.energy(state.q)


def forces(scenario, state):
    """ Forces -dV/dq_i as an (n, d) array."""
    return -scenario.potential.gradient(state.q)


def total_momentum(state):
    return np.sum(state.p, axis=0)


def angular_momentum_components(sys, state):
    if sys.d < 2:
        return None
    return wedge(state.q, state.p)


def reverse_momenta(state):
    """ Time reversal (p, q) -> (-p, q)."""
    return PhaseState(state.q, -state.p, state.t)


def _rhs(sys, potential):
    half = sys.n * sys.d
    inv_m = np.repeat(1.0 / sys.masses, sys.d)

    def f(t, y):
        q = y[:half].reshape(sys.n, sys.d)
        dp = -potential.gradient(q).ravel()
        return np.concatenate([y[half:] * inv_m, dp])
    return f


def encounter_step_cap(scenario, q, v):
    """
    Step cap c * r**(1 + alpha/2) / v_rel for the closest interacting pair, or inf when no interacting pair closes in.
    """
    sys, pot = scenario.sys, scenario.potential
    diff = q[:, None, :] - q[None, :, :]
    dist = np.sqrt(np.sum(diff ** 2, axis=2))
    np.fill_diagonal(dist, np.inf)
    dist[pot.coupling == 0.0] = np.inf
    if not np.any(np.isfinite(dist)):
        return np.inf
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    v_rel = float(np.linalg.norm(v[i] - v[j]))
    if v_rel == 0.0:
        return np.inf
    return scenario.integrator.encounter_factor * dist[i, j] ** (1.0 + pot.alpha[i, j] / 2.0) / v_rel


class _DriftMonitor(object):

    def __init__(self, scenario, state, tol):
        self.scenario = scenario
        self.tol = tol
        self.H0 = energy(scenario, state)
        self.h_scale = max(abs(self.H0), kinetic_energy(scenario.sys, state.p)
                           + abs(scenario.potential.energy(state.q)), 1e-300)
        self.P0 = total_momentum(state)
        self.p_scale = max(float(np.sum(np.linalg.norm(state.p, axis=1))), 1e-300)
        self.L0 = angular_momentum_components(scenario.sys, state)
        self.l_scale = max(float(np.sum(np.linalg.norm(state.q, axis=1) * np.linalg.norm(state.p, axis=1))), 1e-300)
        self.warned = False

    def check(self, state):
        H = energy(self.scenario, state)
        P = total_momentum(state)
        L = angular_momentum_components(self.scenario.sys, state)
        drifts = [('H', abs(H - self.H0) / self.h_scale),
                  ('p_N', float(np.max(np.abs(P - self.P0))) / self.p_scale)]
        if L is not None:
            drifts.append(('L', float(np.max(np.abs(L - self.L0))) / self.l_scale))
        for quantity, drift in drifts:
            if drift > self.tol:
                raise ConservationError(quantity, drift, state.t)
            if drift > 0.5 * self.tol and not self.warned:
                logger.warning('{} drift {:.3e} at t={} approaches the tolerance {:.1e}.'.format(
                    quantity, drift, state.t, self.tol))
                self.warned = True
        return H, P, L


def integrate(scenario):
    """
    Integrate Hamilton's equations from scenario.initial to integrator.t_end with an adaptive embedded Runge-Kutta
    pair. Each step is additionally capped by the close-encounter time scale of the nearest interacting pair. H, p_N
    and L are checked after every accepted step.

    Returns:
        :obj:`pymessenger.trajectory.Trajectory` with one sample per accepted step and stop_reason 't_end',
        'max_steps' or 'near_singularity'.

    Raises:
        StepFailureError: if the solver fails or the step falls below min_step.
        ConservationError: if a monitored quantity drifts beyond drift_tol.
        SingularityError: if the initial state is collision-singular.
    """
    sys, pot, params = scenario.sys, scenario.potential, scenario.integrator
    start = scenario.initial
    if params.t_end <= start.t:
        raise ParameterError("t_end {} must exceed the start time {}".format(params.t_end, start.t))
    monitor = _DriftMonitor(scenario, start, params.drift_tol)
    y0 = start.to_vector()
    half = sys.n * sys.d

    def cap(y):
        q = y[:half].reshape(sys.n, sys.d)
        v = y[half:].reshape(sys.n, sys.d) / sys.masses[:, None]
        return min(params.max_step, encounter_step_cap(scenario, q, v))

    solver = SOLVERS[params.method](_rhs(sys, pot), start.t, y0, params.t_end, max_step=cap(y0),
                                    rtol=params.rtol, atol=params.atol)
    H0, P0, L0 = monitor.check(start)
    t_s, q_s, p_s, h_s, H_s, P_s, L_s = [start.t], [start.q], [start.p], [0.0], [H0], [P0], [L0]
    logger.info('Integrating {} bodies in d={} with {} to t={}.'.format(sys.n, sys.d, params.method, params.t_end))

    stop_reason = 'max_steps'
    for step in range(params.max_steps):
        solver.max_step = cap(solver.y)
        t_prev = solver.t
        message = solver.step()
        if solver.status == 'failed':
            raise StepFailureError("integrator failed at t={}: {}".format(t_prev, message),
                                   PhaseState.from_vector(sys, solver.y, solver.t), t_prev)
        h = solver.t - t_prev
        state = PhaseState.from_vector(sys, solver.y, solver.t)
        if h < params.min_step and solver.status != 'finished':
            raise StepFailureError("step size {} below min_step {} at t={}".format(h, params.min_step, t_prev),
                                   state, t_prev)
        try:
            H, P, L = monitor.check(state)
        except SingularityError:
            stop_reason = 'near_singularity'
            break
        t_s.append(state.t)
        q_s.append(state.q)
        p_s.append(state.p)
        h_s.append(h)
        H_s.append(H)
        P_s.append(P)
        L_s.append(L)
        logger.debug('Step {} accepted: t={:.6g}, h={:.3g}.'.format(step + 1, state.t, h))
        if pot.min_pair_distance(state.q) < params.encounter_floor:
            stop_reason = 'near_singularity'
            break
        if solver.status == 'finished':
            stop_reason = 't_end'
            break

    logger.info('Integration stopped ({}) at t={} after {} steps.'.format(stop_reason, t_s[-1], len(t_s) - 1))
    metadata = {'potential': pot.to_dict(), 'integrator': params.to_dict(), 'energy': H0,
                'com_frame': scenario.com_frame}
    return Trajectory(sys, t_s, q_s, p_s, h_step=h_s, H=H_s, L=None if L0 is None else L_s, p_N=P_s,
                      stop_reason=stop_reason, metadata=metadata)


def integrate_from(scenario, state, duration):
    """ Integrate the scenario's equations from an arbitrary phase point for the given duration."""
    return integrate(scenario.with_initial(state, state.t + duration))


def reversibility_error(scenario, duration):
    """
    Round-trip check of time reversibility: integrate forward for duration, flip the momenta, integrate for the same
    duration and flip again. Returns the largest deviation from the start, relative to the start's position and
    momentum scales.
    """
    start = scenario.initial
    forward = integrate_from(scenario, start, duration)
    end = forward.state(len(forward) - 1)
    elapsed = end.t - start.t
    back = integrate_from(scenario, PhaseState(end.q, -end.p, start.t), elapsed)
    final = reverse_momenta(back.state(len(back) - 1))
    q_scale = max(1.0, float(np.max(np.abs(start.q))))
    p_scale = max(1.0, float(np.max(np.abs(start.p))))
    return max(float(np.max(np.abs(final.q - start.q))) / q_scale,
               float(np.max(np.abs(final.p - start.p))) / p_scale)
