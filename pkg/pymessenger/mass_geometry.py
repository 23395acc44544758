from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from builtins import range
from builtins import object
from future import standard_library
standard_library.install_aliases()
import collections
import itertools
import logging

import numpy as np

from .partitions import Partition, ParameterError

logger = logging.getLogger(__name__)


class MassSystem(object):
    """
    MassSystem holds the particle masses and the spatial dimension, and so defines the mass metric
    <a, b>_M = sum_i m_i <a_i, b_i> on configuration space.

    Attributes:
        | masses (:obj:`numpy.ndarray`): positive masses, one per particle.
        | d (:obj:`int`): spatial dimension.
        | n (:obj:`int`): number of particles.
    """

    def __init__(self, masses, d):
        self.masses = np.asarray(masses, dtype=float).ravel()
        self.masses.setflags(write=False)
        self.d = int(d)
        self.n = len(self.masses)
        if self.n < 1:
            raise ParameterError("a mass system needs at least one particle")
        if self.d < 1:
            raise ParameterError("spatial dimension must be >= 1, got {}".format(d))
        if not np.all(np.isfinite(self.masses)) or np.any(self.masses <= 0.0):
            raise ParameterError("masses must be finite and positive, got {}".format(self.masses.tolist()))

    @property
    def total_mass(self):
        return float(np.sum(self.masses))

    @property
    def m_min(self):
        return float(np.min(self.masses))

    @property
    def m_max(self):
        return float(np.max(self.masses))

    def cluster_mass(self, block):
        return float(np.sum(self.masses[_indices(block, self.n)]))

    def reduced_mass(self, c, d):
        mc, md = self.cluster_mass(c), self.cluster_mass(d)
        return mc * md / (mc + md)

    def shape(self, x):
        """ Reshape a configuration or momentum vector (length n*d) to (n, d)."""
        arr = np.asarray(x, dtype=float)
        if arr.size != self.n * self.d:
            raise ParameterError("expected a vector of length {} (n={}, d={}), got {}".format(
                self.n * self.d, self.n, self.d, arr.size))
        return arr.reshape(self.n, self.d)

    def __repr__(self):
        return "MassSystem(masses={}, d={})".format(self.masses.tolist(), self.d)


class PhaseState(object):
    """
    Point (p, q) of phase space at time t. Positions and momenta are stored as (n, d) arrays.

    Attributes:
        | q (:obj:`numpy.ndarray`): positions.
        | p (:obj:`numpy.ndarray`): momenta.
        | t (:obj:`float`): time.
    """

    def __init__(self, q, p, t=0.0):
        self.q = np.array(q, dtype=float)
        self.p = np.array(p, dtype=float)
        if self.q.ndim == 1:
            self.q = self.q.reshape(-1, 1)
            self.p = self.p.reshape(-1, 1)
        if self.q.shape != self.p.shape:
            raise ParameterError("positions {} and momenta {} differ in shape".format(self.q.shape, self.p.shape))
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p))):
            raise ParameterError("phase state has non-finite entries")
        self.t = float(t)

    @classmethod
    def from_velocities(cls, sys, q, v, t=0.0):
        v = sys.shape(v)
        return cls(sys.shape(q), sys.masses[:, None] * v, t)

    def velocities(self, sys):
        return self.p / sys.masses[:, None]

    def copy(self):
        return PhaseState(self.q.copy(), self.p.copy(), self.t)

    def to_vector(self):
        return np.concatenate([self.q.ravel(), self.p.ravel()])

    @classmethod
    def from_vector(cls, sys, y, t=0.0):
        half = sys.n * sys.d
        return cls(np.reshape(y[:half], (sys.n, sys.d)), np.reshape(y[half:], (sys.n, sys.d)), t)

    def __repr__(self):
        return "PhaseState(t={}, q={}, p={})".format(self.t, self.q.tolist(), self.p.tolist())


SplitReport = collections.namedtuple('SplitReport', ['partition', 'L_ext', 'L_int', 'K_ext', 'K_int',
                                                     'V_ext', 'V_int', 'H_int'])
RelativePair = collections.namedtuple('RelativePair', ['L', 'K', 'V', 'H', 'J'])


def _indices(block, n):
    idx = [int(i) - 1 for i in block]
    if not idx:
        raise ParameterError("cluster must be a nonempty index set")
    if min(idx) < 0 or max(idx) >= n or len(set(idx)) != len(idx):
        raise ParameterError("invalid cluster {} for {} particles".format(list(block), n))
    return idx


def _check_partition(sys, partition):
    if not isinstance(partition, Partition):
        raise TypeError("expect obj of '{}', got {}".format(Partition.__name__, type(partition).__name__))
    if partition.n != sys.n:
        raise ParameterError("partition of {} labels used with {} particles".format(partition.n, sys.n))


def mass_inner(sys, a, b):
    """ Mass-metric inner product <a, M b>."""
    a, b = sys.shape(a), sys.shape(b)
    return float(np.sum(sys.masses[:, None] * a * b))


def cluster_aggregates(sys, state, block):
    """
    Cluster mass, barycenter and momentum of one cluster.

    Args:
        | sys (:obj:`MassSystem`): masses.
        | state (:obj:`PhaseState`): phase point.
        | block (:obj:`iterable`): 1-based particle labels of the cluster.

    Returns:
        :obj:`tuple` (m_C, q_C, p_C).

    Raises:
        ParameterError: if the cluster is empty or contains invalid labels.
    """
    idx = _indices(block, sys.n)
    m = sys.masses[idx]
    m_c = float(np.sum(m))
    q_c = np.sum(m[:, None] * state.q[idx], axis=0) / m_c
    p_c = np.sum(state.p[idx], axis=0)
    return m_c, q_c, p_c


def _block_sums(partition, x):
    sums = np.zeros((partition.rank,) + x.shape[1:])
    np.add.at(sums, partition.labels, x)
    return sums


def split_configuration(sys, q, partition):
    """
    M-orthogonal split q = q_ext + q_int, where (q_ext)_i is the barycenter of the block of particle i.

    Returns:
        :obj:`tuple` of two (n, d) arrays.
    """
    _check_partition(sys, partition)
    q = sys.shape(q)
    lab = partition.labels
    m_blocks = _block_sums(partition, sys.masses)
    barycenters = _block_sums(partition, sys.masses[:, None] * q) / m_blocks[:, None]
    q_ext = barycenters[lab]
    return q_ext, q - q_ext


def split_momenta(sys, p, partition):
    """ (p_ext)_i = (m_i / m_[i]) p_[i]; internal part is the complement."""
    _check_partition(sys, partition)
    p = sys.shape(p)
    lab = partition.labels
    m_blocks = _block_sums(partition, sys.masses)
    p_blocks = _block_sums(partition, p)
    p_ext = (sys.masses / m_blocks[lab])[:, None] * p_blocks[lab]
    return p_ext, p - p_ext


def split_phase(sys, state, partition):
    """
    Cluster coordinates of a phase point: external part (barycenters, scaled block momenta) and internal part.
    The split preserves the canonical two-form: omega(u, w) = omega(ext u, ext w) + omega(int u, int w).

    Returns:
        :obj:`tuple` of two :obj:`PhaseState`.
    """
    q_ext, q_int = split_configuration(sys, state.q, partition)
    p_ext, p_int = split_momenta(sys, state.p, partition)
    return PhaseState(q_ext, p_ext, state.t), PhaseState(q_int, p_int, state.t)


def symplectic_form(u, w):
    """ Canonical two-form omega(u, w) = sum_i <q_u,i, p_w,i> - <p_u,i, q_w,i>."""
    return float(np.sum(u.q * w.p) - np.sum(u.p * w.q))


def wedge(a, b):
    """
    Bivector components a_k b_l - a_l b_k for k < l, summed over leading axes when a and b are (n, d) arrays.

    Raises:
        ParameterError: if d < 2.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    d = a.shape[-1]
    if d < 2:
        raise ParameterError("angular momentum needs dimension >= 2, got d={}".format(d))
    pairs = list(itertools.combinations(range(d), 2))
    return np.array([np.sum(a[..., k] * b[..., l] - a[..., l] * b[..., k]) for k, l in pairs])


def bivector_norm(x):
    return float(np.linalg.norm(x))


def angular_momentum(state):
    return wedge(state.q, state.p)


def kinetic_energy(sys, p):
    p = sys.shape(p)
    return float(np.sum(np.sum(p * p, axis=1) / (2.0 * sys.masses)))


def moment_of_inertia(sys, q):
    """ J(q) = 1/2 sum_i m_i |q_i|^2."""
    return 0.5 * mass_inner(sys, q, q)


def split_L(sys, state, partition):
    """
    Split of the total angular momentum into the external part sum_C q_C ^ p_C and one internal part per block.

    Returns:
        :obj:`tuple` (L_ext, list of L_int per block in canonical block order).

    Raises:
        ParameterError: if d = 1.
    """
    if sys.d < 2:
        raise ParameterError("angular momentum needs dimension >= 2, got d={}".format(sys.d))
    q_ext, q_int = split_configuration(sys, state.q, partition)
    p_ext, p_int = split_momenta(sys, state.p, partition)
    lab = partition.labels
    L_int = [wedge(q_int[lab == b], p_int[lab == b]) for b in range(partition.rank)]
    return wedge(q_ext, p_ext), L_int


def split_K(sys, state, partition):
    """ External kinetic energy sum_C |p_C|^2 / 2 m_C and the internal kinetic energy of each block."""
    _, p_int = split_momenta(sys, state.p, partition)
    m_blocks = _block_sums(partition, sys.masses)
    p_blocks = _block_sums(partition, sys.shape(state.p))
    k_ext = float(np.sum(np.sum(p_blocks ** 2, axis=1) / (2.0 * m_blocks)))
    per_particle = np.sum(p_int ** 2, axis=1) / (2.0 * sys.masses)
    return k_ext, _block_sums(partition, per_particle).tolist()


def split_V(sys, q, partition, potential):
    """
    Intra-block potential V_int(C) = sum of V_ij over pairs inside C, and V_ext = V - sum_C V_int(C).

    Raises:
        SingularityError: if two particles coincide.
    """
    _check_partition(sys, partition)
    pair = np.triu(potential.pair_energies(sys.shape(q)), 1)
    lab = partition.labels
    same = lab[:, None] == lab[None, :]
    v_int = []
    for b in range(partition.rank):
        mask = same & (lab[:, None] == b)
        v_int.append(float(np.sum(pair[mask])))
    return float(np.sum(pair)) - sum(v_int), v_int


def split_H(sys, state, partition, potential):
    """ H_ext = K_ext + V_ext and H_int(C) = K_int(C) + V_int(C)."""
    k_ext, k_int = split_K(sys, state, partition)
    v_ext, v_int = split_V(sys, state.q, partition, potential)
    return k_ext + v_ext, [k + v for k, v in zip(k_int, v_int)]


def split_report(sys, state, partition, potential=None):
    """ All splits of one phase point in one record; L entries are None when d = 1, V/H when no potential."""
    if sys.d >= 2:
        L_ext, L_int = split_L(sys, state, partition)
        L_ext, L_int = L_ext.tolist(), [x.tolist() for x in L_int]
    else:
        L_ext, L_int = None, None
    k_ext, k_int = split_K(sys, state, partition)
    if potential is not None:
        v_ext, v_int = split_V(sys, state.q, partition, potential)
        h_int = [k + v for k, v in zip(k_int, v_int)]
    else:
        v_ext, v_int, h_int = None, None, None
    return SplitReport(partition, L_ext, L_int, k_ext, k_int, v_ext, v_int, h_int)


def split_report_record(report):
    """ Flat JSON-compatible record keyed by the canonical partition string."""
    record = report._asdict()
    record['partition'] = report.partition.to_list()
    return {report.partition.to_json(): record}


def relative_pair(sys, state, c, d, potential=None):
    """
    Relative quantities of two disjoint clusters C and D:
    L = 1/2 (q_C - q_D) ^ p_CD with the relative momentum p_CD = m_CD (v_C - v_D), K = 1/2 m_CD |v_C - v_D|^2,
    V = sum_{i in C, j in D} V_ij, H = K + V and
    J = 1/2 (m_C |q_C|^2 + m_D |q_D|^2). L is None for d = 1; V and H are None without a potential.

    Raises:
        ParameterError: if C and D overlap or are empty.
    """
    ic, id_ = _indices(c, sys.n), _indices(d, sys.n)
    if set(ic) & set(id_):
        raise ParameterError("clusters {} and {} overlap".format(list(c), list(d)))
    m_c, q_c, p_c = cluster_aggregates(sys, state, c)
    m_d, q_d, p_d = cluster_aggregates(sys, state, d)
    mu = m_c * m_d / (m_c + m_d)
    dv = p_c / m_c - p_d / m_d
    L = 0.5 * wedge(q_c - q_d, mu * dv) if sys.d >= 2 else None
    K = 0.5 * mu * float(np.dot(dv, dv))
    V = H = None
    if potential is not None:
        pair = potential.pair_energies(state.q)
        V = float(np.sum(pair[np.ix_(ic, id_)]))
        H = K + V
    J = 0.5 * (m_c * float(np.dot(q_c, q_c)) + m_d * float(np.dot(q_d, q_d)))
    return RelativePair(L, K, V, H, J)


def reduced_pair_angular_momentum(sys, state, c, d):
    """
    Relative angular momentum in reduced-mass form m_CD (q_C - q_D) ^ (v_C - v_D). In the center-of-mass frame of
    C u D it equals (m_D / m_CD) q_D ^ p_D, the form used when one of the clusters is a bound pair.
    """
    m_c, q_c, p_c = cluster_aggregates(sys, state, c)
    m_d, q_d, p_d = cluster_aggregates(sys, state, d)
    mu = m_c * m_d / (m_c + m_d)
    return mu * wedge(q_c - q_d, p_c / m_c - p_d / m_d)


def to_com_frame(sys, state):
    """
    Shift to the center-of-mass frame: total momentum 0 and mass-weighted mean position 0. Relative coordinates are
    unchanged.
    """
    m = sys.masses[:, None]
    q_n = np.sum(m * state.q, axis=0) / sys.total_mass
    p_n = np.sum(state.p, axis=0)
    return PhaseState(state.q - q_n, state.p - m * p_n / sys.total_mass, state.t)
