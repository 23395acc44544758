from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from builtins import object
from future import standard_library
standard_library.install_aliases()
import abc
import collections
import logging
import math

import six

from .partitions import ParameterError

logger = logging.getLogger(__name__)

Proposal = collections.namedtuple('Proposal', ['dt', 'masses'])


class PolicyRejectionError(RuntimeError):
    pass


@six.add_metaclass(abc.ABCMeta)
class CollisionPolicy(object):
    """
    CollisionPolicy is an abstract class closing the nondeterminism of the kinematical model. At each collision it
    proposes the gap until the next collision and the post-collision masses of the colliding pair; the model then
    aims the messenger so that the next collision happens exactly after that gap.

    Attributes:
        | kind (:obj:`str`): identifier used in configs and traces.
        | max_retries (:obj:`int`): number of re-queries allowed after a rejected proposal.
    """

    kind = None

    def __init__(self, max_retries=10):
        if int(max_retries) < 0:
            raise ParameterError("max_retries must be >= 0, got {}".format(max_retries))
        self.max_retries = int(max_retries)

    @abc.abstractmethod
    def propose(self, state, pair, bounds, rng):
        """
        Args:
            | state (:obj:`pymessenger.kinmodel.KinState`): state at the collision instant, pre-collision momenta.
            | pair (:obj:`tuple`): 1-based labels of the colliding particles.
            | bounds (:obj:`tuple`): (m_min, m_max).
            | rng (:obj:`numpy.random.Generator`): the run's generator.

        Returns:
            :obj:`Proposal` (dt, (m_i, m_j)) with masses in pair order.
        """
        pass

    def parameters(self):
        return {}

    def to_dict(self):
        d = {'kind': self.kind, 'max_retries': self.max_retries}
        d.update(self.parameters())
        return d

    def __repr__(self):
        return "{}({})".format(type(self).__name__, self.parameters())


def _pair_masses(state, pair):
    i, j = pair
    return float(state.m[i - 1]), float(state.m[j - 1])


class FixedGapPolicy(CollisionPolicy):
    """ Constant gap between collisions, masses unchanged."""

    kind = 'fixed-gap'

    def __init__(self, dt=1.0, max_retries=10):
        super(FixedGapPolicy, self).__init__(max_retries)
        if not dt > 0.0:
            raise ParameterError("gap must be positive, got {}".format(dt))
        self.dt = float(dt)

    def propose(self, state, pair, bounds, rng):
        return Proposal(self.dt, _pair_masses(state, pair))

    def parameters(self):
        return {'dt': self.dt}


class RandomGapPolicy(CollisionPolicy):
    """ Gap drawn log-uniform in [dt_min, dt_max], masses unchanged."""

    kind = 'random-gap'

    def __init__(self, dt_min=0.1, dt_max=10.0, max_retries=10):
        super(RandomGapPolicy, self).__init__(max_retries)
        if not 0.0 < dt_min <= dt_max:
            raise ParameterError("need 0 < dt_min <= dt_max, got [{}, {}]".format(dt_min, dt_max))
        self.dt_min = float(dt_min)
        self.dt_max = float(dt_max)

    def draw_gap(self, rng):
        return math.exp(rng.uniform(math.log(self.dt_min), math.log(self.dt_max)))

    def propose(self, state, pair, bounds, rng):
        return Proposal(self.draw_gap(rng), _pair_masses(state, pair))

    def parameters(self):
        return {'dt_min': self.dt_min, 'dt_max': self.dt_max}


class RandomMassExchangePolicy(RandomGapPolicy):
    """
    Log-uniform gap, and the pair's total mass is split anew: the first mass is uniform on the interval keeping both
    masses inside [m_min, m_max].
    """

    kind = 'random-mass-exchange'

    def propose(self, state, pair, bounds, rng):
        m_min, m_max = bounds
        total = sum(_pair_masses(state, pair))
        lo, hi = max(m_min, total - m_max), min(m_max, total - m_min)
        m_i = rng.uniform(lo, hi) if hi > lo else lo
        return Proposal(self.draw_gap(rng), (m_i, total - m_i))


_POLICIES = dict((cls.kind, cls) for cls in (FixedGapPolicy, RandomGapPolicy, RandomMassExchangePolicy))


def policy_from_dict(spec):
    """
    Build a policy from its dictionary form, e.g. {"kind": "random-gap", "dt_min": 0.1, "dt_max": 10}.

    Raises:
        ParameterError: for an unknown kind or invalid parameters.
    """
    spec = dict(spec)
    kind = spec.pop('kind', None)
    if kind not in _POLICIES:
        raise ParameterError("unknown collision policy {}; available: {}".format(kind, sorted(_POLICIES)))
    try:
        return _POLICIES[kind](**spec)
    except TypeError as err:
        raise ParameterError("invalid parameters for policy {}: {}".format(kind, err))
