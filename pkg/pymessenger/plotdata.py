from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from future import standard_library
standard_library.install_aliases()
import logging

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def write_csv(frame, path):
    """ Write a frame as CSV with a header row and no index column."""
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info('Plot data written to {} ({} rows).'.format(path, len(frame)))
    return path


def von_zeipel_frame(series):
    return pd.DataFrame({'t': series.t, 'j': series.j, 'j_ext': series.j_ext, 'j_delta': series.j_delta,
                         'dj_ext_dt': series.dj_ext_dt, 'dj_ext_dt_fd': series.dj_ext_dt_fd, 'rank': series.rank},
                        columns=['t', 'j', 'j_ext', 'j_delta', 'dj_ext_dt', 'dj_ext_dt_fd', 'rank'])


def model_series_frame(report):
    """ Collision-indexed series of a verification report (k, t_k, J, K, K_par, arc length)."""
    s = report.series
    n = len(s['k'])
    arc = list(s['arc_length']) + [float('nan')] * (n - len(s['arc_length']))
    return pd.DataFrame({'k': s['k'], 't': s['t'], 'J': s['J'], 'J_prime': s['J_prime'], 'K': s['K'],
                         'K_par': s['K_par'], 'arc_length': arc},
                        columns=['k', 't', 'J', 'J_prime', 'K', 'K_par', 'arc_length'])


def drift_frame(drift):
    columns = [c for c in ('t', 'h_step', 'H', 'p_N', 'L') if c in drift]
    return pd.DataFrame(dict((c, drift[c]) for c in columns), columns=columns)


def timeline_frame(timeline):
    """ Step function of the cluster rank: one row at the start and one at the end of every interval."""
    rows = []
    for t_start, t_end, partition in timeline.intervals:
        rows.append((t_start, partition.rank, str(partition)))
        rows.append((t_end, partition.rank, str(partition)))
    return pd.DataFrame(rows, columns=['t', 'rank', 'partition'])
