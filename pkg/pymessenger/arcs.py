from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from future import standard_library
standard_library.install_aliases()
import collections
import math

import numpy as np

from .partitions import ParameterError

TWO_PI = 2.0 * math.pi

# closed arc of the unit circle, counter-clockwise from start
Arc = collections.namedtuple('Arc', ['start', 'length'])


def wrap(x):
    """ Angle reduced to (-pi, pi]."""
    y = math.fmod(x + math.pi, TWO_PI)
    if y <= 0.0:
        y += TWO_PI
    return y - math.pi


def direction_angle(v):
    """ Angle of a nonzero vector in dimension 1 (0 or pi) or 2."""
    v = np.asarray(v, dtype=float).ravel()
    if not np.any(v):
        raise ParameterError("direction of a zero vector is undefined")
    if v.size == 1:
        return 0.0 if v[0] > 0.0 else math.pi
    if v.size == 2:
        return math.atan2(v[1], v[0])
    raise ParameterError("directions are defined for d = 1 or 2, got d={}".format(v.size))


def opposite(angle):
    return wrap(angle + math.pi)


def seg(a, b):
    """ Shorter closed arc between the directions a and b."""
    d = wrap(b - a)
    if d >= 0.0:
        return Arc(wrap(a), d)
    return Arc(wrap(b), -d)


def union_through(x, mid, y):
    """ Union of seg(x, mid) and seg(mid, y); both contain mid, so the union is one arc."""
    ox, oy = wrap(x - mid), wrap(y - mid)
    lo, hi = min(0.0, ox, oy), max(0.0, ox, oy)
    return Arc(wrap(mid + lo), hi - lo)


def contains(outer, inner, tol=1e-9):
    """ True iff arc inner lies inside arc outer, up to tol radians at both ends."""
    if outer.length >= TWO_PI - tol:
        return True
    offset = math.fmod(inner.start - outer.start + tol, TWO_PI)
    if offset < 0.0:
        offset += TWO_PI
    offset -= tol
    return offset + inner.length <= outer.length + tol


def contains_angle(arc, angle, tol=1e-9):
    return contains(arc, Arc(angle, 0.0), tol)
