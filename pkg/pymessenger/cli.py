from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from builtins import open
from builtins import object
from future import standard_library
standard_library.install_aliases()
import argparse
import datetime
import json
import logging
import os
import sys as _sys
import time

import numpy as np

from . import analysis
from . import config as cfgmod
from . import kinmodel
from . import nbody
from . import partitions as part
from . import plotdata
from . import proposition
from . import utils
from .policies import PolicyRejectionError
from .potential import SingularityError
from .trajectory import read_trajectory, write_trajectory

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RUNTIME = 3
EXIT_VERIFICATION = 4

LOG_FORMAT = "%(asctime)s %(name)-12s %(levelname)-8s %(message)s"
MANIFEST_NAME = "manifest.jsonl"

RUNTIME_ERRORS = (kinmodel.ModelViolationError, PolicyRejectionError, SingularityError, nbody.StepFailureError,
                  nbody.ConservationError)
INPUT_ERRORS = (cfgmod.ConfigError, part.ParameterError, OSError, ValueError, KeyError)


class PreconditionError(RuntimeError):
    """ An analysis pass cannot run on the given trajectory."""
    pass


class RunManifest(object):
    """
    Record of one command invocation, appended as one JSON line to the manifest of the output directory.

    Attributes:
        | command (:obj:`str`): the subcommand, e.g. 'kin run'.
        | config_digest (:obj:`str` or None): sha256 of the canonical configuration.
        | seeds (:obj:`list`): seeds used.
        | artifacts (:obj:`list`): paths of the files written.
        | version (:obj:`str`): package version.
        | wall_clock (:obj:`dict`): start timestamp (UTC, ISO 8601) and elapsed seconds.
        | summary (:obj:`dict`): pass/fail summary of the command.
    """

    FIELDS = ('command', 'config_digest', 'seeds', 'artifacts', 'version', 'wall_clock', 'summary')

    def __init__(self, command, config_digest=None, seeds=None, artifacts=None, version=None, wall_clock=None,
                 summary=None):
        self.command = command
        self.config_digest = config_digest
        self.seeds = list(seeds or [])
        self.artifacts = list(artifacts or [])
        self.version = version or _version()
        self.wall_clock = dict(wall_clock or {})
        self.summary = dict(summary or {})

    def to_record(self):
        return dict((f, getattr(self, f)) for f in self.FIELDS)

    @classmethod
    def from_record(cls, rec):
        missing = [f for f in cls.FIELDS if f not in rec]
        if missing:
            raise KeyError("manifest record without field(s) {}".format(", ".join(missing)))
        return cls(**dict((f, rec[f]) for f in cls.FIELDS))

    def __eq__(self, other):
        return isinstance(other, RunManifest) and self.to_record() == other.to_record()

    def __ne__(self, other):
        return not self == other


def append_manifest(path, manifest):
    """ Append one manifest record; existing lines are never rewritten."""
    with open(path, 'a', encoding='utf-8') as handle:
        handle.write(utils.canonical_json(manifest.to_record()))
        handle.write('\n')
    return path


def read_manifests(path):
    return [RunManifest.from_record(r) for r in utils.read_jsonl(path)]


def _version():
    from . import __version__
    return __version__


class _Clock(object):

    def __init__(self):
        self.started = datetime.datetime.now(datetime.timezone.utc).isoformat()
        self._t0 = time.time()

    def stop(self):
        return {'started': self.started, 'elapsed': round(time.time() - self._t0, 6)}


def _out_dir(args):
    out = args.out or utils.default_output_dir()
    if not os.path.isdir(out):
        os.makedirs(out)
    return out


def _stem(path):
    name = os.path.basename(path)
    for suffix in ('.jsonl', '.json'):
        if name.endswith(suffix):
            return name[:-len(suffix)]
    return name


def _load(args):
    if getattr(args, 'config', None):
        return cfgmod.load_config(args.config)
    return cfgmod.RunConfig()


def _finish(args, out, command, cfg, seeds, artifacts, clock, summary):
    manifest = RunManifest(command, cfgmod.config_digest(cfg) if cfg is not None else None, seeds, artifacts,
                           wall_clock=clock.stop(), summary=summary)
    append_manifest(os.path.join(out, MANIFEST_NAME), manifest)
    return manifest


# kinematical model

def cmd_kin_run(args):
    clock = _Clock()
    cfg = _load(args)
    if args.m_min is not None:
        cfg.kinmodel.m_min = args.m_min
    if args.m_max is not None:
        cfg.kinmodel.m_max = args.m_max
    if args.policy is not None:
        cfg.kinmodel.policy = json.loads(args.policy)
    kin_cfg = cfgmod.to_kin_config(cfg, seed=args.seed, collisions=args.k)
    policy = cfgmod.to_policy(cfg)
    trace = kinmodel.run(kin_cfg, policy)
    out = _out_dir(args)
    path = os.path.join(out, 'kin_trace_seed{}.jsonl'.format(kin_cfg.seed))
    utils.write_jsonl(path, trace.records())
    _finish(args, out, 'kin run', cfg, [kin_cfg.seed], [path], clock, {'collisions': len(trace)})
    print('{} collisions written to {}'.format(len(trace), path))
    return EXIT_OK


def cmd_kin_verify(args):
    clock = _Clock()
    trace = kinmodel.ModelTrace.from_records(utils.read_jsonl(args.trace))
    report = proposition.verify_proposition(trace)
    out = _out_dir(args)
    stem = _stem(args.trace)
    report_path = os.path.join(out, stem + '.report.json')
    utils.write_json(report_path, report.to_dict())
    csv_path = plotdata.write_csv(plotdata.model_series_frame(report), os.path.join(out, stem + '.series.csv'))
    summary = {'passed': report.passed, 'failed': report.failed_clauses(), 'converged': report.converged}
    _finish(args, out, 'kin verify', None, [], [report_path, csv_path], clock, summary)
    for name, clause in report.clauses.items():
        print('{:<18} {} (margin {:.3g})'.format(name, 'pass' if clause.passed else 'FAIL', clause.margin))
    return EXIT_OK if report.passed else EXIT_VERIFICATION


def cmd_kin_batch(args):
    clock = _Clock()
    cfg = _load(args)
    k = cfg.kinmodel
    traces = kinmodel.run_batch(args.runs, args.master_seed, cfgmod.to_policy(cfg), k.dimension, k.m_min, k.m_max,
                                args.k or k.collisions)
    reports = [proposition.verify_proposition(t) for t in traces]
    summary = proposition.summarize_batch(reports)
    out = _out_dir(args)
    path = os.path.join(out, 'kin_batch_seed{}.json'.format(args.master_seed))
    utils.write_json(path, {'summary': summary, 'runs': [r.to_dict() for r in reports]})
    _finish(args, out, 'kin batch', cfg, [args.master_seed], [path], clock, summary)
    print('{passed}/{runs} runs pass, alignment converged in {converged}'.format(**summary))
    return EXIT_OK if summary['passed'] == summary['runs'] else EXIT_VERIFICATION


# N-body

def cmd_nbody_run(args):
    clock = _Clock()
    cfg = cfgmod.load_config(args.config)
    if args.t_end is not None:
        cfg.integrator.t_end = args.t_end
    stem = _stem(args.config)
    scenario = cfgmod.to_scenario(cfg, name=stem)
    trajectory = nbody.integrate(scenario)
    out = _out_dir(args)
    path = write_trajectory(trajectory, os.path.join(out, stem + '.trajectory.jsonl'))
    drift = analysis.TrajectoryAnalysis(trajectory, scenario).drift()
    csv_path = plotdata.write_csv(plotdata.drift_frame(drift), os.path.join(out, stem + '.drift.csv'))
    summary = {'stop_reason': trajectory.stop_reason, 'samples': len(trajectory),
               'max_energy_drift': float(np.max(drift['H'])) if 'H' in drift else None}
    _finish(args, out, 'nbody run', cfg, [], [path, csv_path], clock, summary)
    print('{} samples to t={:.6g} ({}), written to {}'.format(len(trajectory), trajectory.t[-1],
                                                             trajectory.stop_reason, path))
    return EXIT_OK


# analysis of stored trajectories

def _analysis(args, cfg):
    trajectory = read_trajectory(args.trajectory)
    delta = args.delta if args.delta is not None else (cfg.graf.delta if cfg else None)
    epsilon = args.epsilon if args.epsilon is not None else (cfg.graf.epsilon if cfg else None)
    return analysis.TrajectoryAnalysis(trajectory, graf_params=analysis.default_graf_params(delta, epsilon))


def cmd_analyze(args):
    clock = _Clock()
    cfg = cfgmod.load_config(args.config) if args.config else None
    tool = _analysis(args, cfg)
    out = _out_dir(args)
    stem = _stem(args.trajectory)
    if stem.endswith('.trajectory'):
        stem = stem[:-len('.trajectory')]
    m = args.m if args.m is not None else (cfg.poincare.m if cfg else 4)
    L = args.L if args.L is not None else (cfg.poincare.L if cfg else 10.0)
    try:
        artifacts, summary = ANALYSES[args.analysis](tool, args, cfg, out, stem, m, L)
    except part.ParameterError as err:
        raise PreconditionError("{} analysis of {}: {}".format(args.analysis, args.trajectory, err))
    _finish(args, out, 'analyze ' + args.analysis, cfg, [], artifacts, clock, summary)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _analyze_graf(tool, args, cfg, out, stem, m, L):
    report = tool.graf_report()
    path = os.path.join(out, stem + '.graf.json')
    utils.write_json(path, report)
    csv_path = plotdata.write_csv(plotdata.timeline_frame(tool.get_timeline()), os.path.join(out, stem + '.timeline.csv'))
    return [path, csv_path], {'final': str(tool.get_timeline().final()),
                              'change_points': len(report['change_points'])}


def _analyze_vonzeipel(tool, args, cfg, out, stem, m, L):
    series = tool.von_zeipel()
    path = plotdata.write_csv(plotdata.von_zeipel_frame(series), os.path.join(out, stem + '.vonzeipel.csv'))
    return [path], {'t_final': float(series.t[-1]), 'j_final': float(series.j[-1])}


def _analyze_episodes(tool, args, cfg, out, stem, m, L):
    found = tool.get_episodes(m, L)
    path = os.path.join(out, stem + '.episodes.json')
    utils.write_json(path, [e.to_record() for e in found])
    return [path], {'episodes': len(found), 'crossings': sum(len(e.crossings or []) for e in found)}


def _analyze_poincare(tool, args, cfg, out, stem, m, L):
    if args.tuple is not None:
        mt = part.MessengerTuple(*json.loads(args.tuple))
    else:
        mt = cfgmod.default_tuple(cfg) if cfg else None
    crossings = tool.get_crossings(m, L, mt)
    path = os.path.join(out, stem + '.poincare_m{}.json'.format(m))
    utils.write_json(path, {'m': m, 'L': L, 'crossings': crossings})
    return [path], {'m': m, 'L': L, 'crossings': sum(len(c) for c in crossings.values())}


ANALYSES = {'graf': _analyze_graf, 'vonzeipel': _analyze_vonzeipel, 'episodes': _analyze_episodes,
            'poincare': _analyze_poincare}


# partitions

def cmd_partitions(args):
    if args.listing == 'list':
        for p in part.enumerate_partitions(args.n):
            print('{}\t{}\t{}'.format(p.rank, utils.previsualize_partition(p), p.to_json()))
    else:
        for mt in part.messenger_tuples(args.n):
            print(json.dumps(mt.to_list(), separators=(',', ':')))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog='pymessenger',
                                     description='Cluster analysis and kinematical messenger model of N-body motion.')
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    parser.add_argument('-q', '--quiet', action='store_true', help='warnings only')
    sub = parser.add_subparsers(dest='group')

    def with_out(p):
        p.add_argument('--out', help='output directory (default ${} or the current directory)'.format(
            utils.OUTPUT_DIR_ENV))
        return p

    kin = sub.add_parser('kin', help='kinematical messenger model').add_subparsers(dest='action')
    p = with_out(kin.add_parser('run', help='simulate one run'))
    p.add_argument('config', nargs='?', help='JSON configuration (defaults apply without one)')
    p.add_argument('--seed', type=int)
    p.add_argument('--k', type=int, help='number of collisions')
    p.add_argument('--m-min', dest='m_min', type=float)
    p.add_argument('--m-max', dest='m_max', type=float)
    p.add_argument('--policy', help='policy as JSON, e.g. {"kind": "fixed-gap", "dt": 1.0}')
    p.set_defaults(func=cmd_kin_run)
    p = with_out(kin.add_parser('verify', help='check a trace against the growth and alignment statements'))
    p.add_argument('trace')
    p.set_defaults(func=cmd_kin_verify)
    p = with_out(kin.add_parser('batch', help='seeded Monte-Carlo runs, each verified'))
    p.add_argument('config', nargs='?')
    p.add_argument('--runs', type=int, default=1000)
    p.add_argument('--master-seed', dest='master_seed', type=int, default=0)
    p.add_argument('--k', type=int)
    p.set_defaults(func=cmd_kin_batch)

    nb = sub.add_parser('nbody', help='N-body integration').add_subparsers(dest='action')
    p = with_out(nb.add_parser('run', help='integrate a configured scenario'))
    p.add_argument('config')
    p.add_argument('--t-end', dest='t_end', type=float)
    p.set_defaults(func=cmd_nbody_run)

    p = with_out(sub.add_parser('analyze', help='analysis of a stored trajectory'))
    p.add_argument('analysis', choices=sorted(ANALYSES))
    p.add_argument('trajectory')
    p.add_argument('--config', help='configuration supplying graf and poincare defaults')
    p.add_argument('--delta', type=float)
    p.add_argument('--epsilon', type=float)
    p.add_argument('--m', type=int)
    p.add_argument('--L', type=float)
    p.add_argument('--tuple', help='messenger tuple as JSON, e.g. [[1],[2],[3]]')
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser('partitions', help='partition enumeration')
    p.add_argument('listing', choices=['list', 'tuples'])
    p.add_argument('n', type=int)
    p.set_defaults(func=cmd_partitions)
    return parser


def main(argv=None):
    """
    Entry point of the pymessenger command.

    Returns:
        :obj:`int` exit code: 0 success, 2 input error, 3 runtime or model error, 4 verification failure.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if not exc.code else EXIT_INPUT
    level = logging.DEBUG if args.verbose else (logging.WARNING if args.quiet else logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT)
    if not hasattr(args, 'func'):
        parser.print_usage(_sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except RUNTIME_ERRORS + (PreconditionError,) as err:
        logger.error(str(err))
        print('error: {}'.format(err), file=_sys.stderr)
        return EXIT_RUNTIME
    except INPUT_ERRORS as err:
        logger.error(str(err))
        print('error: {}'.format(err), file=_sys.stderr)
        return EXIT_INPUT
