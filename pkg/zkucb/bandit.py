"""
The floating-point UCB1 baseline and the deterministic quantized zkUCB engine.

run_episode produces a Trace holding every intermediate value of an episode; the
same Trace is the reward record for experiments and the witness source for the
circuit.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from zkucb.version import sysconfig
from zkucb.utils import ConfigError, DomainError, canonical_json, FormatError, require_int
from zkucb.fixedpoint import (LcgParams, LCG_MODULUS, lcg_next, lcg_sample,
                              floor_ln, isqrt_newton, default_ln_table)

logger = logging.getLogger(__name__)

INDEX_MODES = ('literal', 'scaled')
TIE_BREAKS = ('lowest_index', 'lcg')
UCB_BONUSES = ('alg', 'auer')


@dataclass(frozen=True)
class QuantConfig:
    q: int = 2**8
    window: int = sysconfig['window']
    newton_iters: int = sysconfig['newton_iters']
    index_mode: str = 'literal'

    def __post_init__(self):
        for name in ('q', 'window', 'newton_iters'):
            require_int(getattr(self, name), name)
        if self.q < 1:
            raise ConfigError("Scaling factor q {"+str(self.q)+"} must be a positive integer.")
        if self.window < 1:
            raise ConfigError("Sampling window {"+str(self.window)+"} must be at least 1.")
        if self.newton_iters < 1:
            raise ConfigError("Newton iterations {"+str(self.newton_iters)+"} must be at least 1.")
        if self.index_mode not in INDEX_MODES:
            raise ConfigError("Index mode {"+str(self.index_mode)+"} not one of "+str(INDEX_MODES)+".")


@dataclass(frozen=True)
class ArmSpec:
    mu: Fraction
    u: int

    def __post_init__(self):
        if not (0 < self.mu < 2):
            raise ConfigError("Arm mean {"+str(self.mu)+"} must lie in (0, 2).")
        require_int(self.u, 'u')
        if self.u < 1:
            raise ConfigError("Arm bound u {"+str(self.u)+"} must be at least 1; increase q.")
        if self.u > LCG_MODULUS:
            raise ConfigError("Arm bound u {"+str(self.u)+"} exceeds 2**32; decrease q.")

    @classmethod
    def from_mean(cls, mu, q, uniform_bound=False):
        """
        Derive the LCG bound u = floor(q*mu) for an arm, or u = q for every arm
        when [uniform_bound] is set.
        """
        try:
            mu = Fraction(str(mu)) if isinstance(mu, float) else Fraction(mu)
        except (ValueError, TypeError) as e:
            raise ConfigError("Arm mean {"+str(mu)+"} is not a number.") from e
        u = q if uniform_bound else (q*mu.numerator)//mu.denominator
        return cls(mu, u)


@dataclass(frozen=True)
class EnvConfig:
    T: int
    seed: int
    arms: tuple
    quant: QuantConfig = QuantConfig()
    tie_break: str = 'lcg'
    uniform_bound: bool = False
    lcg: LcgParams = LcgParams()

    def __post_init__(self):
        require_int(self.T, 'T')
        require_int(self.seed, 'seed')
        if len(self.arms) < 1:
            raise ConfigError("At least one arm is required.")
        if self.T < self.K:
            raise ConfigError("Horizon T {"+str(self.T)+"} is shorter than the arm count K {"
                              +str(self.K)+"}; initialization plays each arm once.")
        if self.T > sysconfig['ln_nmax']:
            raise ConfigError("Horizon T {"+str(self.T)+"} exceeds the ln table bound "
                              +str(sysconfig['ln_nmax'])+".")
        if not (0 <= self.seed < LCG_MODULUS):
            raise ConfigError("Seed {"+str(self.seed)+"} must lie in [0, 2**32).")
        if self.tie_break not in TIE_BREAKS:
            raise ConfigError("Tie break {"+str(self.tie_break)+"} not one of "+str(TIE_BREAKS)+".")

    @property
    def K(self):
        return len(self.arms)

    @classmethod
    def build(cls, means, T, seed, q=2**8, window=sysconfig['window'], index_mode='literal',
              tie_break='lcg', uniform_bound=False, newton_iters=sysconfig['newton_iters'],
              lcg=None):
        quant = QuantConfig(q=q, window=window, newton_iters=newton_iters, index_mode=index_mode)
        arms = tuple(ArmSpec.from_mean(mu, q, uniform_bound) for mu in means)
        return cls(T=T, seed=seed, arms=arms, quant=quant, tie_break=tie_break,
                   uniform_bound=uniform_bound, lcg=lcg if lcg is not None else LcgParams())

    def with_(self, **changes):
        """Return a copy with [changes] applied; arm bounds are re-derived when q changes."""
        d = dict(means=[a.mu for a in self.arms], T=self.T, seed=self.seed, q=self.quant.q,
                 window=self.quant.window, index_mode=self.quant.index_mode,
                 tie_break=self.tie_break, uniform_bound=self.uniform_bound,
                 newton_iters=self.quant.newton_iters, lcg=self.lcg)
        d.update(changes)
        return EnvConfig.build(**d)

    def to_dict(self):
        return {'K': self.K,
                'T': self.T,
                'seed': self.seed,
                'arms': [{'mu': str(a.mu), 'u': a.u} for a in self.arms],
                'quant': {'q': self.quant.q,
                          'window': self.quant.window,
                          'newton_iters': self.quant.newton_iters,
                          'index_mode': self.quant.index_mode},
                'tie_break': self.tie_break,
                'uniform_bound': self.uniform_bound,
                'lcg': {'a': self.lcg.a, 'c': self.lcg.c, 'm': self.lcg.m}}

    @classmethod
    def from_dict(cls, d):
        try:
            quant = QuantConfig(**d['quant'])
            arms = tuple(ArmSpec(Fraction(a['mu']), int(a['u'])) for a in d['arms'])
            cfg = cls(T=int(d['T']), seed=int(d['seed']), arms=arms, quant=quant,
                      tie_break=d['tie_break'], uniform_bound=bool(d['uniform_bound']),
                      lcg=LcgParams(**d['lcg']))
        except (KeyError, TypeError) as e:
            raise FormatError("Malformed config record: missing or invalid {"+str(e)+"}.") from e
        if 'K' in d and int(d['K']) != cfg.K:
            raise FormatError("Config K {"+str(d['K'])+"} disagrees with "+str(cfg.K)+" arms.")
        return cfg


@dataclass
class StepRecord:
    t: int
    n_pre: list
    S_pre: list
    samples: list
    reward: list
    ln_val: int
    index: list
    chosen: int
    received: int

    def to_dict(self):
        return {'t': self.t, 'n_pre': self.n_pre, 'S_pre': self.S_pre,
                'samples': self.samples, 'reward': self.reward, 'ln_val': self.ln_val,
                'index': self.index, 'chosen': self.chosen, 'received': self.received}


@dataclass
class Trace:
    config: EnvConfig
    steps: list = field(default_factory=list)
    y_total: int = 0

    @property
    def chosen(self):
        return [s.chosen for s in self.steps]

    @property
    def received(self):
        return [s.received for s in self.steps]

    def to_json(self):
        return canonical_json({'config': self.config.to_dict(),
                               'steps': [s.to_dict() for s in self.steps],
                               'y_total': self.y_total})

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
            steps = [StepRecord(**s) for s in d['steps']]
            return cls(EnvConfig.from_dict(d['config']), steps, int(d['y_total']))
        except (ValueError, KeyError, TypeError) as e:
            raise FormatError("Malformed trace JSON: {"+str(e)+"}.") from e


@dataclass
class FloatTrace:
    """Outcome of a floating-point UCB1 episode: arm choices and real rewards per step."""
    config: EnvConfig
    chosen: np.ndarray
    reward: np.ndarray


def _draw_samples(state, arm, quant, params):
    samples = []
    for _ in range(quant.window):
        s, state = lcg_sample(state, arm.u, params)
        samples.append(s)
    return samples, state


def sample_reward(state, arm, cfg, params=LcgParams()):
    """
    Average [cfg.window] LCG draws on [1, 2u-1] with floor division. Returns the
    quantized reward and the advanced state.
    """
    if arm.u < 1:
        raise ConfigError("Arm bound u {"+str(arm.u)+"} must be at least 1.")
    samples, state = _draw_samples(state, arm, cfg, params)
    return sum(samples)//cfg.window, state


def ucb1_index(mean, n, n_j, bonus='alg'):
    """
    Floating-point UCB1 value. bonus='alg' is mean + 2*sqrt(ln n / n_j);
    bonus='auer' is mean + sqrt(2 ln n / n_j). Works elementwise on arrays.
    """
    if np.any(np.asarray(n_j) < 1):
        raise DomainError("Pull count n_j must be at least 1; unplayed arms belong to initialization.")
    if bonus == 'alg':
        return mean + 2*np.sqrt(np.log(n)/n_j)
    elif bonus == 'auer':
        return mean + np.sqrt(2*np.log(n)/n_j)
    raise ConfigError("UCB bonus {"+str(bonus)+"} not one of "+str(UCB_BONUSES)+".")


def index_from_ln(S_j, n_j, ln_n, cfg):
    """zkUCB index given floor(ln n) directly."""
    mean = S_j//n_j
    if cfg.index_mode == 'literal':
        return mean + 2*cfg.q*isqrt_newton(ln_n//n_j, cfg.newton_iters)
    return mean + 2*isqrt_newton((cfg.q*cfg.q*ln_n)//n_j, cfg.newton_iters)


def zkucb_index(S_j, n_j, n, cfg, table=None):
    """
    Integer zkUCB index. literal: S_j//n_j + 2q*isqrt(floor(ln n)//n_j);
    scaled: S_j//n_j + 2*isqrt(q*q*floor(ln n)//n_j).
    """
    if not (1 <= n_j <= n):
        raise DomainError("Counts must satisfy 1 <= n_j {"+str(n_j)+"} <= n {"+str(n)+"}.")
    return index_from_ln(S_j, n_j, floor_ln(n, table), cfg)


def select_arm(indices, tie_break='lowest_index', state=0, params=LcgParams()):
    """
    Return (arm, state) for an argmax of [indices]. 'lowest_index' takes the
    smallest maximizing arm and leaves the state alone; 'lcg' draws once among
    the tied arms, and only when there is more than one.
    """
    if len(indices) == 0:
        raise DomainError("Cannot select from an empty index list.")
    best = max(indices)
    tied = [j for j, v in enumerate(indices) if v == best]
    if tie_break == 'lowest_index' or len(tied) == 1:
        return tied[0], state
    if tie_break != 'lcg':
        raise ConfigError("Tie break {"+str(tie_break)+"} not one of "+str(TIE_BREAKS)+".")
    state = lcg_next(state, params)
    return tied[state % len(tied)], state


def run_episode(cfg):
    """
    Play one zkUCB episode. Every step draws window samples for all K arms in
    arm order, so the LCG consumption per step does not depend on the choice.
    Steps 1..K play arms 0..K-1; later steps pick the index argmax.
    """
    table = default_ln_table()
    K = cfg.K
    n = [0]*K
    S = [0]*K
    state = cfg.seed
    trace = Trace(cfg)
    for t in range(1, cfg.T+1):
        samples = []
        rewards = []
        for arm in cfg.arms:
            draws, state = _draw_samples(state, arm, cfg.quant, cfg.lcg)
            samples.append(draws)
            rewards.append(sum(draws)//cfg.quant.window)
        if t <= K:
            chosen, ln_val, index = t-1, 0, []
        else:
            ln_val = floor_ln(t-1, table)
            index = [index_from_ln(S[j], n[j], ln_val, cfg.quant) for j in range(K)]
            chosen, state = select_arm(index, cfg.tie_break, state, cfg.lcg)
        received = rewards[chosen]
        trace.steps.append(StepRecord(t=t, n_pre=list(n), S_pre=list(S), samples=samples,
                                      reward=rewards, ln_val=ln_val, index=index,
                                      chosen=chosen, received=received))
        n[chosen] += 1
        S[chosen] += received
        trace.y_total += received
    logger.debug("Episode finished: T=%d, y_total=%d.", cfg.T, trace.y_total)
    return trace


def run_episode_float(cfg, bonus='alg'):
    """
    Floating-point UCB1 on the same arms: each reward is the mean of window
    uniform draws on (0, 2*mu) from a generator seeded with cfg.seed. Ties go
    to the lowest arm.
    """
    rng = np.random.default_rng(cfg.seed)
    K = cfg.K
    mu = np.array([float(a.mu) for a in cfg.arms])
    n = np.zeros(K)
    S = np.zeros(K)
    chosen = np.zeros(cfg.T, dtype=int)
    reward = np.zeros(cfg.T)
    for i in range(cfg.T):
        draws = rng.uniform(0.0, 2*mu[:, None], size=(K, cfg.quant.window)).mean(axis=1)
        if i < K:
            j = i
        else:
            j = int(np.argmax(ucb1_index(S/n, i, n, bonus)))
        chosen[i] = j
        reward[i] = draws[j]
        n[j] += 1
        S[j] += draws[j]
    return FloatTrace(cfg, chosen, reward)


def dequantize(reward, q):
    """Return reward/q as a real number."""
    if np.any(np.asarray(q) < 1):
        raise DomainError("Scaling factor {"+str(q)+"} must be at least 1.")
    return reward/q
