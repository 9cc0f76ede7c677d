"""
Collection of miscellaneous utility functions: errors, canonical JSON, hashing and timing.
"""

import hashlib
import json
import logging
import statistics
import time

logger = logging.getLogger(__name__)


class ZkucbError(Exception):
    """Base class for every error raised by zkucb."""


class DomainError(ZkucbError, ValueError):
    """An argument lies outside the domain of a fixed-point routine."""


class ConfigError(ZkucbError, ValueError):
    """A configuration is invalid."""


class CompileError(ZkucbError):
    """A circuit cannot be compiled for the given configuration."""


class SynthesisError(ZkucbError):
    """A witness cannot be synthesized, or an honest witness is unsatisfying."""


class ProvingError(ZkucbError):
    """The prover refused the (statement, witness) pair."""


class BackendUnavailableError(ZkucbError):
    """The requested proof backend cannot run in this environment."""


class BackendMismatchError(ZkucbError):
    """Key, proof and statement do not belong to the same backend or circuit."""


class FormatError(ZkucbError):
    """An artifact file is malformed."""


def canonical_json(obj):
    """
    Serialize [obj] with no whitespace and keys in insertion order. Integers are
    written in decimal; callers decide the field order.
    """
    return json.dumps(obj, separators=(',', ':'), ensure_ascii=True)


def sha256_hex(chunks):
    h = hashlib.sha256()
    for chunk in chunks:
        if isinstance(chunk, str):
            chunk = chunk.encode('ascii')
        h.update(chunk)
    return h.hexdigest()


def timed(func, *args, **kwargs):
    """Call [func] once and return (result, elapsed milliseconds)."""
    start = time.perf_counter()
    out = func(*args, **kwargs)
    return out, (time.perf_counter()-start)*1000.0


def median_ms(func, repeats=3, *args, **kwargs):
    """
    Call [func] [repeats] times and return (last result, median elapsed milliseconds).
    """
    times = []
    out = None
    for _ in range(repeats):
        out, ms = timed(func, *args, **kwargs)
        times.append(ms)
    return out, statistics.median(times)


def is_power_of_two(n):
    return isinstance(n, int) and n > 0 and (n & (n-1)) == 0


def require_int(value, name):
    """Raise ConfigError unless [value] is an int (bools excluded)."""
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name+" {"+str(value)+"} must be an integer, not "+type(value).__name__+".")
    return value
