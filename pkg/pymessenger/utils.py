from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from builtins import open
from future import standard_library
standard_library.install_aliases()
import hashlib
import json
import os

import numpy as np

from . import partitions as part

OUTPUT_DIR_ENV = "PYMESSENGER_OUTPUT_DIR"


def _to_builtin(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, (part.Partition, part.MessengerTuple)):
        return obj.to_list()
    raise TypeError("Object of type {} is not JSON serializable".format(type(obj).__name__))


def canonical_json(obj):
    """ Deterministic JSON text: sorted keys, compact separators, numpy values converted."""
    return json.dumps(obj, sort_keys=True, separators=(',', ':'), default=_to_builtin)


def digest(obj):
    """ sha256 hex digest of the canonical JSON text of obj."""
    return hashlib.sha256(canonical_json(obj).encode('utf-8')).hexdigest()


def write_jsonl(path, records):
    """
    Write one JSON object per line.

    Args:
        | path (:obj:`str`): output file, overwritten.
        | records (:obj:`iterable`): JSON-compatible dictionaries (numpy values allowed).

    Returns:
        :obj:`int` number of lines written.
    """
    count = 0
    with open(path, 'w', encoding='utf-8') as handle:
        for rec in records:
            handle.write(canonical_json(rec))
            handle.write('\n')
            count += 1
    return count


def read_jsonl(path):
    """
    Read a JSON-lines file. Blank lines are skipped.

    Raises:
        ValueError: if a line is not a JSON object, with the line number in the message.
    """
    records = []
    with open(path, 'r', encoding='utf-8') as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except ValueError as err:
                raise ValueError("{}:{}: malformed JSON record ({})".format(path, lineno, err))
            if not isinstance(rec, dict):
                raise ValueError("{}:{}: expected a JSON object".format(path, lineno))
            records.append(rec)
    return records


def write_json(path, obj):
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(json.dumps(obj, sort_keys=True, indent=2, default=_to_builtin))
        handle.write('\n')


def default_output_dir():
    return os.environ.get(OUTPUT_DIR_ENV, os.getcwd())


def previsualize_partition(partition):
    """
    Short text form of a partition, blocks separated by '|', e.g. '12|3|4'.

    Args:
        | partition (:obj:`pymessenger.partitions.Partition` or :obj:`str`): a partition or its serialized form.
    """
    if not isinstance(partition, part.Partition):
        partition = part.Partition.parse(partition)
    return str(partition)
