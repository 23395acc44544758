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

from .partitions import ParameterError

logger = logging.getLogger(__name__)


class SingularityError(ArithmeticError):
    pass


def _pair_matrix(value, n, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full((n, n), float(arr))
    if arr.shape != (n, n):
        raise ParameterError("{} must be a scalar or a {}x{} matrix, got shape {}".format(name, n, n, arr.shape))
    if not np.allclose(arr, arr.T, rtol=0.0, atol=0.0):
        raise ParameterError("{} must be symmetric in (i, j)".format(name))
    arr = arr.copy()
    np.fill_diagonal(arr, 0.0)
    return arr


class PotentialSpec(object):
    """
    Homogeneous central pair potentials V_ij(q) = I_ij * |q|^(-alpha_ij). A negative coupling is attractive; gravity
    with G = 1 is I_ij = -m_i * m_j with alpha_ij = 1.

    Attributes:
        | n (:obj:`int`): number of particles.
        | alpha (:obj:`numpy.ndarray`): symmetric n x n matrix of exponents, each in (0, 2).
        | coupling (:obj:`numpy.ndarray`): symmetric n x n matrix of couplings I_ij.
    """

    def __init__(self, alpha, coupling, n):
        self.n = int(n)
        self.alpha = _pair_matrix(alpha, self.n, "alpha")
        self.coupling = _pair_matrix(coupling, self.n, "coupling")

        off = ~np.eye(self.n, dtype=bool)
        if not np.all(np.isfinite(self.coupling)):
            raise ParameterError("couplings must be finite")
        if np.any((self.alpha[off] <= 0.0) | (self.alpha[off] >= 2.0)):
            raise ParameterError("pair exponents must lie in (0, 2), got {}".format(self.alpha[off].tolist()))

    @classmethod
    def gravity(cls, masses):
        m = np.asarray(masses, dtype=float)
        return cls(1.0, -np.outer(m, m), len(m))

    @classmethod
    def homogeneous(cls, alpha, coupling, n):
        return cls(alpha, coupling, n)

    @classmethod
    def free(cls, n):
        return cls(1.0, 0.0, n)

    def is_admissible(self):
        off = ~np.eye(self.n, dtype=bool)
        return bool(np.all((self.alpha[off] > 0.0) & (self.alpha[off] < 2.0)) and np.all(np.isfinite(self.coupling)))

    def admissibility_constant(self):
        """ Constant I bounding |d^beta V_ij(q)| <= I |q|^(-alpha_ij - |beta|) for |beta| <= 2."""
        a = self.alpha
        factor = np.maximum(np.maximum(1.0, a), a * (a + 2.0))
        return float(np.max(np.abs(self.coupling) * factor))

    def _differences(self, q):
        q = np.asarray(q, dtype=float).reshape(self.n, -1)
        diff = q[:, None, :] - q[None, :, :]
        dist = np.sqrt(np.einsum('ijk,ijk->ij', diff, diff))
        np.fill_diagonal(dist, np.inf)
        if np.any(dist == 0.0):
            i, j = np.argwhere(dist == 0.0)[0]
            raise SingularityError("particles {} and {} coincide".format(i + 1, j + 1))
        return diff, dist

    def pair_energies(self, q):
        """ Symmetric n x n matrix of pair energies V_ij (zero diagonal)."""
        _, dist = self._differences(q)
        return self.coupling * dist ** (-self.alpha)

    def energy(self, q):
        return float(np.sum(np.triu(self.pair_energies(q), 1)))

    def gradient(self, q):
        """ dV/dq as an (n, d) array; the force on particle i is minus its row."""
        diff, dist = self._differences(q)
        coeff = -self.alpha * self.coupling * dist ** (-self.alpha - 2.0)
        return np.einsum('ij,ijk->ik', coeff, diff)

    def pair_hessian(self, i, j, r):
        """ Hessian of V_ij at the relative position r = q_i - q_j (0-based i, j)."""
        r = np.asarray(r, dtype=float)
        norm = np.linalg.norm(r)
        if norm == 0.0:
            raise SingularityError("zero separation for pair ({}, {})".format(i + 1, j + 1))
        a, c = self.alpha[i, j], self.coupling[i, j]
        return -a * c * (norm ** (-a - 2.0) * np.eye(len(r)) - (a + 2.0) * norm ** (-a - 4.0) * np.outer(r, r))

    def min_pair_distance(self, q):
        _, dist = self._differences(q)
        return float(np.min(dist))

    def max_alpha(self):
        if self.n < 2:
            return 0.0
        return float(np.max(self.alpha[~np.eye(self.n, dtype=bool)]))

    def to_dict(self):
        return {'alpha': self.alpha.tolist(), 'coupling': self.coupling.tolist()}
