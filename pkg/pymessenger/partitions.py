from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from builtins import range
from builtins import object
from future import standard_library
standard_library.install_aliases()
import itertools
import json
import logging

import numpy as np

logger = logging.getLogger(__name__)

MAX_GROUND_SET = 12


class ParameterError(ValueError):
    pass


def _check_ground_set(n):
    if int(n) != n or not 1 <= n <= MAX_GROUND_SET:
        raise ParameterError("ground set size must be an integer in [1, {}], got {}".format(MAX_GROUND_SET, n))
    return int(n)


class Partition(object):
    """
    Partition is an immutable set partition (cluster decomposition) of the particle labels {1..n}. Blocks are kept in
    canonical order: elements ascending inside a block, blocks sorted by their least element. Two partitions are equal
    iff their canonical blocks are equal, so partitions can be used as dictionary keys.

    Attributes:
        | n (:obj:`int`): size of the ground set.
        | blocks (:obj:`tuple`): canonical tuple of blocks, each a sorted :obj:`tuple` of 1-based labels.
    """

    __slots__ = ('n', 'blocks', '_labels')

    def __init__(self, blocks, n=None):

        canonical = sorted(tuple(sorted(int(i) for i in b)) for b in blocks)
        if any(len(b) == 0 for b in canonical):
            raise ParameterError("partition blocks must be nonempty: {}".format(blocks))

        flat = [i for b in canonical for i in b]
        if n is None:
            n = len(flat)
        n = _check_ground_set(n)
        if sorted(flat) != list(range(1, n + 1)):
            raise ParameterError("blocks {} do not partition {{1..{}}}".format(blocks, n))

        object.__setattr__(self, 'n', n)
        object.__setattr__(self, 'blocks', tuple(canonical))
        object.__setattr__(self, '_labels', None)

    def __setattr__(self, key, value):
        raise AttributeError("Partition is immutable")

    @classmethod
    def from_labels(cls, labels):
        """ Build a partition from a sequence assigning a block label to each particle (particle i+1 has labels[i])."""
        groups = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i + 1)
        return cls(groups.values(), n=len(labels))

    @classmethod
    def parse(cls, text):
        """ Parse the serialized form, e.g. "[[1,2],[3],[4]]"."""
        try:
            blocks = json.loads(text)
        except ValueError:
            raise ParameterError("cannot parse partition: {}".format(text))
        return cls(blocks)

    @property
    def rank(self):
        return len(self.blocks)

    @property
    def labels(self):
        """ :obj:`numpy.ndarray` of block indices (position in self.blocks) per 0-based particle."""
        if self._labels is None:
            lab = np.empty(self.n, dtype=int)
            for b_idx, b in enumerate(self.blocks):
                lab[[i - 1 for i in b]] = b_idx
            lab.setflags(write=False)
            object.__setattr__(self, '_labels', lab)
        return self._labels

    def block_of(self, i):
        """ Return the block containing particle label i (1-based)."""
        for b in self.blocks:
            if i in b:
                return b
        raise KeyError('Label {} is not in the ground set {{1..{}}}.'.format(i, self.n))

    def nontrivial_blocks(self):
        return [b for b in self.blocks if len(b) >= 2]

    def restricted_growth_string(self):
        return tuple(int(x) for x in self.labels)

    def sort_key(self):
        """ Canonical total order, the order in which enumerate_partitions produces partitions."""
        return self.restricted_growth_string()

    def to_list(self):
        return [list(b) for b in self.blocks]

    def to_json(self):
        return json.dumps(self.to_list(), separators=(',', ':'))

    def __eq__(self, other):
        return isinstance(other, Partition) and self.n == other.n and self.blocks == other.blocks

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.n, self.blocks))

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __repr__(self):
        return "Partition({})".format(self.to_json())

    def __str__(self):
        return "|".join("".join(str(i) for i in b) if self.n < 10 else ",".join(str(i) for i in b)
                        for b in self.blocks)


class MessengerTuple(object):
    """
    Ordered triple (C1, C2, C3) of blocks whose underlying set is a rank-3 partition. C2 is the messenger slot: during
    an episode the partition changes from {C1 u C2, C3} to {C1, C2 u C3}.

    Attributes:
        | c1, c2, c3 (:obj:`tuple`): sorted 1-based labels of each cluster.
    """

    __slots__ = ('c1', 'c2', 'c3')

    def __init__(self, c1, c2, c3):
        object.__setattr__(self, 'c1', tuple(sorted(c1)))
        object.__setattr__(self, 'c2', tuple(sorted(c2)))
        object.__setattr__(self, 'c3', tuple(sorted(c3)))
        self.partition()

    def __setattr__(self, key, value):
        raise AttributeError("MessengerTuple is immutable")

    def partition(self):
        return Partition([self.c1, self.c2, self.c3])

    def before(self):
        return Partition([self.c1 + self.c2, self.c3])

    def after(self):
        return Partition([self.c1, self.c2 + self.c3])

    def as_tuple(self):
        return self.c1, self.c2, self.c3

    def to_list(self):
        return [list(self.c1), list(self.c2), list(self.c3)]

    def __eq__(self, other):
        return isinstance(other, MessengerTuple) and self.as_tuple() == other.as_tuple()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return "MessengerTuple({}, {}, {})".format(list(self.c1), list(self.c2), list(self.c3))


def _restricted_growth_strings(n):
    # lexicographic order; a[0] = 0 and a[i] <= max(a[:i]) + 1
    a = [0] * n
    maxima = [0] * n
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] == maxima[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        maxima[i] = max(maxima[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            maxima[j] = maxima[i]


def enumerate_partitions(n):
    """
    Enumerate every set partition of {1..n} exactly once, in restricted-growth-string order (so the coarsest
    partition comes first and the finest last).

    Args:
        | n (:obj:`int`): size of the ground set, 1 <= n <= 12.

    Returns:
        :obj:`list` of :obj:`Partition`.

    Raises:
        ParameterError: if n is out of range.
    """
    n = _check_ground_set(n)
    return [Partition.from_labels(rgs) for rgs in _restricted_growth_strings(n)]


def bell_number(n):
    """ Bell number B(n) from the Bell triangle."""
    if n < 0:
        raise ParameterError("Bell numbers are defined for n >= 0, got {}".format(n))
    row = [1]
    for _ in range(n):
        new_row = [row[-1]]
        for x in row:
            new_row.append(new_row[-1] + x)
        row = new_row
    return row[0]


def finest(n):
    return Partition([[i] for i in range(1, _check_ground_set(n) + 1)])


def coarsest(n):
    return Partition([list(range(1, _check_ground_set(n) + 1))])


def partitions_of_rank(n, k):
    return [c for c in enumerate_partitions(n) if c.rank == k]


def _check_same_ground_set(a, b):
    for x in (a, b):
        if not isinstance(x, Partition):
            raise TypeError("expect obj of '{}', got {}".format(Partition.__name__, type(x).__name__))
    if a.n != b.n:
        raise ParameterError("partitions act on different ground sets: {} vs {}".format(a.n, b.n))


def join(a, b):
    """
    Finest partition coarser than both a and b: connected components of the union of both block relations.

    Raises:
        ParameterError: if a and b partition different ground sets.
    """
    _check_same_ground_set(a, b)
    parent = list(range(a.n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in (a, b):
        for block in part.blocks:
            root = find(block[0])
            for i in block[1:]:
                r = find(i)
                if r != root:
                    parent[r] = root

    return Partition.from_labels([find(i) for i in range(1, a.n + 1)])


def is_refinement(a, b):
    """ True iff every block of a lies inside a block of b (a is finer than or equal to b)."""
    _check_same_ground_set(a, b)
    lab_b = b.labels
    return all(len(set(lab_b[i - 1] for i in block)) == 1 for block in a.blocks)


def comparable(a, b):
    return is_refinement(a, b) or is_refinement(b, a)


def messenger_tuples(n=4):
    """
    All ordered triples (C1, C2, C3) whose blocks form a rank-3 partition of {1..n}. Partitions appear in enumeration
    order, each followed by the permutations of its blocks in lexicographic order. For n = 4 there are 6 * 3! = 36.

    Returns:
        :obj:`list` of :obj:`MessengerTuple`.
    """
    n = _check_ground_set(n)
    if n < 3:
        raise ParameterError("messenger tuples need at least 3 particles, got {}".format(n))
    if n != 4:
        logger.debug('Messenger tuples requested for n={} (only n=4 is the reference setting).'.format(n))
    tuples = []
    for part in partitions_of_rank(n, 3):
        for c1, c2, c3 in itertools.permutations(part.blocks):
            tuples.append(MessengerTuple(c1, c2, c3))
    return tuples
