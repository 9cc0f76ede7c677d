"""
Deterministic integer replacements for the non-field-friendly operations of UCB1:
pseudo-randomness, logarithm, square root and division.
"""

import bisect
import json
import logging
from dataclasses import dataclass
from decimal import ROUND_CEILING, Decimal, localcontext

from zkucb.version import sysconfig
from zkucb.utils import DomainError, ConfigError

logger = logging.getLogger(__name__)

LCG_MODULUS = 2**32


@dataclass(frozen=True)
class LcgParams:
    a: int = sysconfig['lcg_a']
    c: int = sysconfig['lcg_c']
    m: int = LCG_MODULUS

    def __post_init__(self):
        if self.m != LCG_MODULUS:
            raise ConfigError("LCG modulus {"+str(self.m)+"} must be 2**32.")
        if not (0 < self.a < self.m):
            raise ConfigError("LCG multiplier {"+str(self.a)+"} must lie in (0, 2**32).")
        if not (0 <= self.c < self.m):
            raise ConfigError("LCG increment {"+str(self.c)+"} must lie in [0, 2**32).")


def lcg_next(state, params=LcgParams()):
    """Return (a*state + c) mod 2**32."""
    if not (0 <= state < LCG_MODULUS):
        raise DomainError("LCG state {"+str(state)+"} must lie in [0, 2**32).")
    return (params.a*state + params.c) % params.m


def lcg_stream(state, params=LcgParams(), n=1):
    """Return the first [n] successor states of [state]."""
    out = []
    for _ in range(n):
        state = lcg_next(state, params)
        out.append(state)
    return out


def lcg_sample(state, u, params=LcgParams()):
    """
    Draw one value in [1, 2u-1] (the open range (0, 2u), mean u) and return it
    together with the advanced state.
    """
    if u < 1:
        raise DomainError("Sampling bound {"+str(u)+"} must be at least 1.")
    nxt = lcg_next(state, params)
    return nxt % (2*u-1) + 1, nxt


@dataclass(frozen=True)
class LnTable:
    """
    Threshold table t_k = ceil(e**k), k = 0..L+1, where L = floor(ln n_max).
    floor_ln(n) is the largest k with t_k <= n. The extra entry t_{L+1} > n_max
    closes the last interval, which the circuit gadget needs.
    """
    thresholds: tuple
    n_max: int

    def __post_init__(self):
        t = self.thresholds
        if len(t) < 2 or t[0] != 1:
            raise ConfigError("ln table must start at threshold 1 and hold at least two entries.")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ConfigError("ln table thresholds must be strictly increasing.")
        if t[-1] <= self.n_max or t[-2] > self.n_max:
            raise ConfigError("ln table does not cover [1, {"+str(self.n_max)+"}] exactly.")

    @classmethod
    def build(cls, n_max=sysconfig['ln_nmax']):
        if n_max < 1:
            raise ConfigError("ln table bound {"+str(n_max)+"} must be at least 1.")
        thresholds = []
        with localcontext() as ctx:
            ctx.prec = 80
            k = 0
            while True:
                tk = int(Decimal(k).exp().to_integral_value(rounding=ROUND_CEILING))
                thresholds.append(tk)
                if tk > n_max:
                    break
                k += 1
        return cls(tuple(thresholds), n_max)

    @property
    def L(self):
        return len(self.thresholds)-2

    def to_json(self):
        return json.dumps(list(self.thresholds))

    @classmethod
    def from_json(cls, text, n_max=None):
        thresholds = tuple(int(t) for t in json.loads(text))
        if n_max is None:
            n_max = thresholds[-1]-1
        return cls(thresholds, n_max)


_default_table = None


def default_ln_table():
    global _default_table
    if _default_table is None:
        _default_table = LnTable.build(sysconfig['ln_nmax'])
    return _default_table


def floor_ln(n, table=None):
    """Return floor(ln n) for 1 <= n <= table.n_max by threshold lookup."""
    if table is None:
        table = default_ln_table()
    if not (1 <= n <= table.n_max):
        raise DomainError("ln argument {"+str(n)+"} outside [1, "+str(table.n_max)+"].")
    return bisect.bisect_right(table.thresholds, n)-1


def isqrt_newton(x, iters=sysconfig['newton_iters'], initial='pow2'):
    """
    Integer Newton iteration y <- (y + x//y)//2 run for exactly [iters] steps,
    returning the smaller of the last two iterates. The default start
    2**ceil(bitlen(x)/2) is never below sqrt(x), so the iterates decrease
    monotonically onto floor(sqrt(x)) and then at most alternate with
    floor(sqrt(x))+1. initial='x' starts from x itself, which only converges
    within 20 steps for x below roughly 2**28.
    """
    if x < 0:
        raise DomainError("Square root argument {"+str(x)+"} must be nonnegative.")
    if iters < 1:
        raise DomainError("Newton iteration count {"+str(iters)+"} must be positive.")
    if x <= 1:
        return x
    if initial == 'pow2':
        y = 1 << ((x.bit_length()+1)//2)
    elif initial == 'x':
        y = x
    else:
        raise DomainError("Unknown Newton start {"+str(initial)+"}.")
    prev = y
    for _ in range(iters):
        prev, y = y, (y + x//y)//2
    return min(prev, y)


def floor_div(x, y):
    """Return (quotient, remainder) with x = quotient*y + remainder, 0 <= remainder < y."""
    if y < 1:
        raise DomainError("Divisor {"+str(y)+"} must be positive.")
    if x < 0:
        raise DomainError("Dividend {"+str(x)+"} must be nonnegative.")
    return divmod(x, y)
