from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from __future__ import absolute_import
from future import standard_library
standard_library.install_aliases()
from .partitions import *
from .potential import *
from .mass_geometry import *
from .arcs import *
from .graf import *
from .trajectory import *
from .policies import *
from .kinmodel import *
from .proposition import *
from .nbody import *
from .poincare import *
from .episodes import *
from .analysis import *
from .plotdata import *
from .config import *
from .utils import *

__version__ = "0.1.0"
