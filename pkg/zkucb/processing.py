""" A collection of functions for opening and writing zkUCB configs and artifacts. """

import json
import logging
import os
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from zkucb.utils import ConfigError, FormatError
from zkucb.fixedpoint import LcgParams
from zkucb.bandit import EnvConfig, Trace
from zkucb.r1cs import ConstraintSystem, WitnessAssignment
from zkucb.proof import Statement

logger = logging.getLogger(__name__)


def read_config_file(path):
    """
    Read a TOML or JSON config file into a dictionary; the format is chosen by
    the file extension.
    """
    ext = os.path.splitext(path)[1].lower()
    if ext == '.toml':
        with open(path, 'rb') as f:
            try:
                return tomllib.load(f)
            except (tomllib.TOMLDecodeError, UnicodeDecodeError) as e:
                raise ConfigError("Malformed TOML in {"+path+"}: "+str(e)) from e
    elif ext == '.json':
        with open(path, 'rb') as f:
            try:
                d = json.load(f)
            except (json.JSONDecodeError, UnicodeDecodeError) as e:
                raise ConfigError("Malformed JSON in {"+path+"}: "+str(e)) from e
        if not isinstance(d, dict):
            raise ConfigError("JSON config {"+path+"} must hold an object.")
        return d
    raise ConfigError("Config file {"+path+"} must end in .toml or .json.")


def envconfig_from_dict(d):
    """
    Build an EnvConfig from a flat config dictionary: means, T (or steps),
    seed, q, window, index_mode, tie_break, uniform_bound, newton_iters and an
    optional [lcg] table with a and c. A dictionary written by EnvConfig.to_dict
    is accepted as well.
    """
    if 'quant' in d and 'arms' in d:
        return EnvConfig.from_dict(d)
    known = {'means', 'T', 'steps', 'seed', 'q', 'window', 'index_mode', 'tie_break',
             'uniform_bound', 'newton_iters', 'lcg'}
    unknown = sorted(set(d)-known)
    if unknown:
        raise ConfigError("Unknown config keys {"+", ".join(unknown)+"}.")
    if 'means' not in d:
        raise ConfigError("Config needs a list of arm means {means}.")
    kwargs = {k: d[k] for k in ('q', 'window', 'index_mode', 'tie_break', 'uniform_bound',
                                'newton_iters') if k in d}
    try:
        if 'lcg' in d:
            kwargs['lcg'] = LcgParams(**d['lcg'])
        return EnvConfig.build(means=d['means'], T=d.get('T', d.get('steps', 200)),
                               seed=d.get('seed', 0), **kwargs)
    except TypeError as e:
        raise ConfigError("Malformed episode config: "+str(e)) from e


def open_envconfig(path):
    return envconfig_from_dict(read_config_file(path))


def open_experimentconfig(path):
    from zkucb.calculations import ExperimentConfig
    return ExperimentConfig.from_dict(read_config_file(path))


### ARTIFACTS ###
def _ensure_dir(path):
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)


def write_text(text, path):
    """Write [text] to [path] and return the number of bytes written."""
    _ensure_dir(path)
    data = text.encode('ascii')
    with open(path, 'wb') as f:
        f.write(data)
    return len(data)


def read_text(path):
    with open(path, 'rb') as f:
        data = f.read()
    try:
        return data.decode('ascii')
    except UnicodeDecodeError as e:
        raise FormatError("Artifact {"+path+"} is not ASCII JSON: "+str(e)) from e


def write_trace(trace, path):
    return write_text(trace.to_json(), path)


def open_trace(path):
    return Trace.from_json(read_text(path))


def write_r1cs(cs, path):
    """Stream the canonical R1CS JSON to [path]; returns its size in bytes."""
    _ensure_dir(path)
    size = 0
    logger.info("Writing R1CS to %s...", path)
    start = time.time()
    with open(path, 'wb') as f:
        for chunk in cs.iter_json():
            data = chunk.encode('ascii')
            f.write(data)
            size += len(data)
    logger.info("...R1CS written. Elapsed time: %s seconds.", round(time.time()-start))
    return size


def open_r1cs(path):
    cs = ConstraintSystem.from_json(read_text(path))
    return cs.validate()


def write_witness(w, path):
    return write_text(w.to_json(), path)


def open_witness(path):
    return WitnessAssignment.from_json(read_text(path))


def write_statement(stmt, path):
    return write_text(stmt.to_json(), path)


def open_statement(path):
    return Statement.from_json(read_text(path))


def file_size(path):
    if not os.path.exists(path):
        raise FormatError("No artifact at {"+path+"}.")
    return os.path.getsize(path)
