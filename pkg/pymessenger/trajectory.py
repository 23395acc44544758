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
from scipy.interpolate import CubicHermiteSpline

from .mass_geometry import MassSystem, PhaseState
from .partitions import ParameterError
from . import utils

logger = logging.getLogger(__name__)

STOP_REASONS = ('t_end', 'max_steps', 'near_singularity', 'synthetic')


class Trajectory(object):
    """
    Sampled solution of the equations of motion. Samples are the accepted integrator steps; between samples the path
    is the cubic Hermite interpolant of positions and velocities, which is exact for free flight.

    Attributes:
        | sys (:obj:`pymessenger.mass_geometry.MassSystem`): masses and dimension.
        | t (:obj:`numpy.ndarray`): strictly increasing sample times, shape (N,).
        | q (:obj:`numpy.ndarray`): positions, shape (N, n, d).
        | p (:obj:`numpy.ndarray`): momenta, shape (N, n, d).
        | h_step (:obj:`numpy.ndarray`): size of the step that produced each sample (0 for the first).
        | H, L, p_N: monitored conserved quantities per sample (None when not recorded).
        | stop_reason (:obj:`str`): why the run ended.
        | metadata (:obj:`dict`): free-form run information (potential, normal-field convention, ...).
    """

    def __init__(self, sys, t, q, p, h_step=None, H=None, L=None, p_N=None, stop_reason='synthetic', metadata=None):
        if not isinstance(sys, MassSystem):
            raise TypeError("expect obj of '{}', got {}".format(MassSystem.__name__, type(sys).__name__))
        self.sys = sys
        self.t = np.asarray(t, dtype=float)
        n_samples = len(self.t)
        self.q = np.asarray(q, dtype=float).reshape(n_samples, sys.n, sys.d)
        self.p = np.asarray(p, dtype=float).reshape(n_samples, sys.n, sys.d)
        if n_samples < 1:
            raise ParameterError("a trajectory needs at least one sample")
        if np.any(np.diff(self.t) <= 0.0):
            raise ParameterError("trajectory sample times must be strictly increasing")
        self.h_step = np.zeros(n_samples) if h_step is None else np.asarray(h_step, dtype=float)
        self.H = None if H is None else np.asarray(H, dtype=float)
        self.L = None if L is None else np.asarray(L, dtype=float)
        self.p_N = None if p_N is None else np.asarray(p_N, dtype=float)
        if stop_reason not in STOP_REASONS:
            raise ParameterError("unknown stop reason {}".format(stop_reason))
        self.stop_reason = stop_reason
        self.metadata = dict(metadata or {})
        self._spline = None
        self._dspline = None

    @classmethod
    def from_functions(cls, sys, times, position, velocity, **kwargs):
        """ Sample a prescribed path; position(t) and velocity(t) return (n, d) arrays."""
        times = np.asarray(times, dtype=float)
        q = np.array([sys.shape(position(s)) for s in times])
        v = np.array([sys.shape(velocity(s)) for s in times])
        return cls(sys, times, q, v * sys.masses[None, :, None], **kwargs)

    def __len__(self):
        return len(self.t)

    @property
    def velocities(self):
        return self.p / self.sys.masses[None, :, None]

    def state(self, i):
        return PhaseState(self.q[i], self.p[i], self.t[i])

    def states(self):
        for i in range(len(self.t)):
            yield self.state(i)

    def _interpolant(self):
        if self._spline is None:
            if len(self.t) < 2:
                raise ParameterError("interpolation needs at least two samples")
            n_samples = len(self.t)
            self._spline = CubicHermiteSpline(self.t, self.q.reshape(n_samples, -1),
                                              self.velocities.reshape(n_samples, -1), axis=0)
        return self._spline

    def positions_at(self, t):
        """ Interpolated positions, shape (n, d) for a scalar t."""
        self._check_inside(t)
        return self._interpolant()(t).reshape(np.shape(t) + (self.sys.n, self.sys.d))

    def velocities_at(self, t):
        self._check_inside(t)
        if self._dspline is None:
            self._dspline = self._interpolant().derivative()
        return self._dspline(t).reshape(np.shape(t) + (self.sys.n, self.sys.d))

    def state_at(self, t):
        return PhaseState(self.positions_at(t), self.sys.masses[:, None] * self.velocities_at(t), t)

    def _check_inside(self, t):
        lo, hi = self.t[0], self.t[-1]
        if np.any(np.asarray(t) < lo) or np.any(np.asarray(t) > hi):
            raise ParameterError("time {} lies outside the trajectory [{}, {}]".format(t, lo, hi))

    def resampled(self, factor):
        """ Trajectory with factor-1 interpolated samples inserted into every step."""
        factor = int(factor)
        if factor < 1:
            raise ParameterError("resampling factor must be >= 1")
        pieces = [np.linspace(a, b, factor, endpoint=False) for a, b in zip(self.t[:-1], self.t[1:])]
        times = np.concatenate(pieces + [self.t[-1:]])
        q = np.array([self.positions_at(s) for s in times])
        v = np.array([self.velocities_at(s) for s in times])
        return Trajectory(self.sys, times, q, v * self.sys.masses[None, :, None], stop_reason=self.stop_reason,
                          metadata=self.metadata)

    def records(self):
        header = {'kind': 'header', 'masses': self.sys.masses, 'd': self.sys.d, 'stop_reason': self.stop_reason,
                  'metadata': self.metadata}
        yield header
        for i in range(len(self.t)):
            rec = {'t': self.t[i], 'q': self.q[i].ravel(), 'p': self.p[i].ravel(), 'h_step': self.h_step[i]}
            if self.H is not None:
                rec['H'] = self.H[i]
            if self.L is not None:
                rec['L'] = self.L[i]
            if self.p_N is not None:
                rec['p_N'] = self.p_N[i]
            yield rec


def write_trajectory(trajectory, path):
    """ Write a trajectory as JSON-lines: one header record, then one record per accepted step."""
    count = utils.write_jsonl(path, trajectory.records())
    logger.info('Trajectory written to {}: {} samples.'.format(path, count - 1))
    return path


def read_trajectory(path):
    """
    Read a JSON-lines trajectory written by write_trajectory.

    Raises:
        ValueError: if the header is missing or a record lacks required fields.
    """
    records = utils.read_jsonl(path)
    if not records or records[0].get('kind') != 'header':
        raise ValueError("{}: trajectory file must start with a header record".format(path))
    header, steps = records[0], records[1:]
    sys = MassSystem(header['masses'], header['d'])
    try:
        t = [r['t'] for r in steps]
        q = [r['q'] for r in steps]
        p = [r['p'] for r in steps]
    except KeyError as err:
        raise ValueError("{}: step record without field {}".format(path, err))
    h_step = [r.get('h_step', 0.0) for r in steps]

    def optional(key):
        if steps and all(key in r for r in steps):
            return [r[key] for r in steps]
        return None

    return Trajectory(sys, t, q, p, h_step=h_step, H=optional('H'), L=optional('L'), p_N=optional('p_N'),
                      stop_reason=header.get('stop_reason', 'synthetic'), metadata=header.get('metadata'))
