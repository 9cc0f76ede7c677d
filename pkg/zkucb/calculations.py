"""
Collection of calculations for the zkUCB experiments: reward curves of float
UCB1 against zkUCB (Setting I) and circuit and proof costs against the number
of steps (Setting II).
"""

import logging
import os
import platform
import tempfile
import time
from dataclasses import dataclass, field, asdict, replace

import numpy as np
import pandas as pd
import xarray as xr
import dask
from dask.diagnostics import ProgressBar

from zkucb.version import sysconfig
from zkucb.utils import ConfigError, BackendUnavailableError, median_ms, require_int
from zkucb.fixedpoint import LCG_MODULUS
from zkucb.bandit import (EnvConfig, run_episode, run_episode_float, dequantize,
                          INDEX_MODES, TIE_BREAKS, UCB_BONUSES)
from zkucb.circuit import compile_trace_shape, synthesize_witness, statement_from_trace
from zkucb.proof import BACKENDS, get_backend, setup, prove, verify, write_key, write_proof
from zkucb.processing import write_witness

logger = logging.getLogger(__name__)

SETTINGS = ('I', 'II')
SETTING1_COLUMNS = ['algo', 'q', 'step', 'mean_reward', 'stderr']
SETTING2_COLUMNS = ['q', 'steps', 'constraints', 'num_vars', 'setup_ms', 'compile_ms', 'witness_ms',
                    'prove_ms', 'verify_ms', 'pk_bytes', 'vk_bytes', 'witness_bytes', 'proof_bytes']
FINAL_STEPS = 50


@dataclass(frozen=True)
class ExperimentConfig:
    setting: str = 'I'
    means: tuple = (0.9, 1.0, 1.1)
    T: int = 200
    steps: tuple = tuple(range(20, 201, 10))
    iterations: int = 100
    q_levels: tuple = (2**4, 2**8, 2**16)
    base_seed: int = 0
    window: int = sysconfig['window']
    index_modes: tuple = ('literal',)
    tie_break: str = 'lcg'
    ucb_bonus: str = 'alg'
    uniform_bound: bool = False
    backend: str = 'transparent'
    repeats: int = 3
    prove: bool = True
    scheduler: str = 'threads'

    def __post_init__(self):
        # lists from TOML/JSON become tuples so the config stays hashable
        for name in ('means', 'steps', 'q_levels', 'index_modes'):
            value = getattr(self, name)
            if isinstance(value, str):
                value = (value,)
            object.__setattr__(self, name, tuple(value))
        for name in ('T', 'iterations', 'base_seed', 'window', 'repeats'):
            require_int(getattr(self, name), name)
        for t in self.steps:
            require_int(t, 'steps')
        if self.setting not in SETTINGS:
            raise ConfigError("Setting {"+str(self.setting)+"} not one of "+str(SETTINGS)+".")
        if self.iterations < 1:
            raise ConfigError("Iteration count {"+str(self.iterations)+"} must be at least 1.")
        if self.repeats < 1:
            raise ConfigError("Timing repeats {"+str(self.repeats)+"} must be at least 1.")
        if not self.q_levels or any(not isinstance(q, int) or q < 1 for q in self.q_levels):
            raise ConfigError("Quantization levels {"+str(self.q_levels)+"} must be positive integers.")
        if any(m not in INDEX_MODES for m in self.index_modes):
            raise ConfigError("Index modes {"+str(self.index_modes)+"} must be among "+str(INDEX_MODES)+".")
        if self.tie_break not in TIE_BREAKS:
            raise ConfigError("Tie break {"+str(self.tie_break)+"} not one of "+str(TIE_BREAKS)+".")
        if self.ucb_bonus not in UCB_BONUSES:
            raise ConfigError("UCB bonus {"+str(self.ucb_bonus)+"} not one of "+str(UCB_BONUSES)+".")
        if self.backend not in BACKENDS:
            raise ConfigError("Backend {"+str(self.backend)+"} not one of "+str(BACKENDS)+".")
        if not (0 <= self.base_seed and self.base_seed+self.iterations <= LCG_MODULUS):
            raise ConfigError("Seeds base_seed+i must stay in [0, 2**32); base_seed is {"
                              +str(self.base_seed)+"}.")
        K = len(self.means)
        if self.T < K or any(t < K for t in self.steps):
            raise ConfigError("Every horizon must be at least the arm count {"+str(K)+"}.")

    @property
    def K(self):
        return len(self.means)

    @property
    def seeds(self):
        """Iteration seeds: base_seed + i."""
        return [self.base_seed+i for i in range(self.iterations)]

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d):
        unknown = sorted(set(d)-set(cls.__dataclass_fields__))
        if unknown:
            raise ConfigError("Unknown experiment config keys {"+", ".join(unknown)+"}.")
        try:
            return cls(**d)
        except TypeError as e:
            raise ConfigError("Malformed experiment config: "+str(e)) from e

    def envconfig(self, T, seed, q, index_mode='literal', tie_break=None):
        return EnvConfig.build(means=self.means, T=T, seed=seed, q=q, window=self.window,
                               index_mode=index_mode, tie_break=tie_break or self.tie_break,
                               uniform_bound=self.uniform_bound)


@dataclass
class RunMetrics:
    """One Setting II cell. Phases the backend could not run stay NaN."""
    q: int
    steps: int
    constraints: int = 0
    num_vars: int = 0
    setup_ms: float = np.nan
    compile_ms: float = np.nan
    witness_ms: float = np.nan
    prove_ms: float = np.nan
    verify_ms: float = np.nan
    pk_bytes: float = np.nan
    vk_bytes: float = np.nan
    witness_bytes: float = np.nan
    proof_bytes: float = np.nan
    verified: bool = field(default=None, compare=False)

    def to_dict(self):
        return {k: getattr(self, k) for k in SETTING2_COLUMNS}


def log_machine():
    logger.info("Machine: %s; processor: %s; Python %s.", platform.platform(),
                platform.processor() or 'unknown', platform.python_version())


### STATISTICS ###
def calc_reward_statistics(rewards, dim='iteration'):
    """
    Mean and standard error of [rewards] over [dim]. With a single iteration the
    standard error is zero.
    """
    n = rewards.sizes[dim]
    mean = rewards.mean(dim)
    if n < 2:
        return mean, xr.zeros_like(mean)
    stderr = rewards.std(dim, ddof=1)/np.sqrt(n)
    return mean, stderr


def calc_linear_fit(x, y):
    """Least-squares line through (x, y); returns (slope, intercept, r2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        raise ConfigError("A linear fit needs at least two points, got {"+str(len(x))+"}.")
    slope, intercept = np.polyfit(x, y, 1)
    residual = y-(slope*x+intercept)
    ss_tot = np.sum((y-y.mean())**2)
    r2 = 1.0 if ss_tot == 0 else 1.0-np.sum(residual**2)/ss_tot
    return float(slope), float(intercept), float(r2)


def calc_regret(trace):
    """
    Cumulative pseudo-regret sum_t (mu* - mu_{a_t}) of a Trace or FloatTrace,
    in units of the true means.
    """
    mu = np.array([float(a.mu) for a in trace.config.arms])
    chosen = np.asarray(trace.chosen, dtype=int)
    return np.cumsum(mu.max()-mu[chosen])


def calc_moving_average(da, window=20, dim='step'):
    return da.rolling({dim: window}).mean()


### SETTING I ###
def _variants(cfg):
    """(algo, q, index_mode) triples; the float baseline has no q."""
    out = [('ucb1', None, None)]
    for mode in cfg.index_modes:
        algo = 'zkucb' if mode == 'literal' else 'zkucb-'+mode
        out += [(algo, q, mode) for q in cfg.q_levels]
    return out


def _setting1_iteration(cfg, seed, q, index_mode):
    """Dequantized per-step rewards and final regret of one episode."""
    if q is None:
        env = cfg.envconfig(cfg.T, seed, cfg.q_levels[0])
        trace = run_episode_float(env, cfg.ucb_bonus)
        reward = trace.reward
    else:
        env = cfg.envconfig(cfg.T, seed, q, index_mode)
        trace = run_episode(env)
        reward = dequantize(np.asarray(trace.received, dtype=float), q)
    return reward, calc_regret(trace)[-1]


def run_setting1(cfg):
    """
    Run float UCB1 and zkUCB at every q level for cfg.iterations seeds. Returns a
    Dataset over (variant, iteration, step) with the per-step mean reward and
    standard error over iterations, and final regret per iteration.
    """
    if cfg.setting != 'I':
        raise ConfigError("run_setting1 needs setting I, got {"+str(cfg.setting)+"}.")
    log_machine()
    variants = _variants(cfg)
    logger.info("Running setting I: %d variants x %d iterations x %d steps...",
                len(variants), cfg.iterations, cfg.T)
    start = time.time()
    tasks = [dask.delayed(_setting1_iteration)(cfg, seed, q, mode)
             for _, q, mode in variants for seed in cfg.seeds]
    with ProgressBar():
        results = dask.compute(*tasks, scheduler=cfg.scheduler)
    # results come back in task order, i.e. variant-major then seed order
    reward = np.array([r[0] for r in results]).reshape(len(variants), cfg.iterations, cfg.T)
    regret = np.array([r[1] for r in results]).reshape(len(variants), cfg.iterations)
    coords = {'variant': np.arange(len(variants)),
              'algo': ('variant', [v[0] for v in variants]),
              'q': ('variant', [v[1] if v[1] is not None else 0 for v in variants]),
              'iteration': np.arange(cfg.iterations),
              'seed': ('iteration', cfg.seeds),
              'step': np.arange(1, cfg.T+1)}
    ds = xr.Dataset({'reward': (('variant', 'iteration', 'step'), reward),
                     'regret': (('variant', 'iteration'), regret)}, coords=coords)
    ds['mean_reward'], ds['stderr'] = calc_reward_statistics(ds['reward'])
    final = ds['reward'].isel(step=slice(-min(FINAL_STEPS, cfg.T), None)).mean('step')
    ds['final_mean'], ds['final_stderr'] = calc_reward_statistics(final)
    ds['final_regret'], _ = calc_reward_statistics(ds['regret'])
    ds.attrs.update({'setting': 'I', 'seed_rule': 'base_seed + iteration', 'base_seed': cfg.base_seed,
                     'tie_break': cfg.tie_break, 'ucb_bonus': cfg.ucb_bonus})
    logger.info("...setting I done. Elapsed time: %s seconds.", round(time.time()-start))
    for v in range(len(variants)):
        logger.info("%s q=%s: final-%d mean reward %.4f +/- %.4f, mean regret %.2f.",
                    variants[v][0], variants[v][1] or '-', min(FINAL_STEPS, cfg.T),
                    float(ds['final_mean'][v]), float(ds['final_stderr'][v]), float(ds['final_regret'][v]))
    return ds


def setting1_table(ds):
    """Flatten a setting I Dataset into rows (algo, q, step, mean_reward, stderr)."""
    df = xr.Dataset({'mean_reward': ds['mean_reward'], 'stderr': ds['stderr']}).to_dataframe().reset_index()
    df['q'] = df['q'].astype('Int64').mask(df['algo'] == 'ucb1')
    return df[SETTING1_COLUMNS]


### SETTING II ###
def measure_cell(cfg, T, q, backend=None, workdir=None):
    """
    Compile, synthesize and, if the backend runs here, set up, prove and verify
    a single (T, q) cell. Sizes are measured from files written to [workdir].
    """
    env = cfg.envconfig(T, cfg.base_seed, q, cfg.index_modes[0], tie_break='lowest_index')
    m = RunMetrics(q=q, steps=T)
    cs, m.compile_ms = median_ms(compile_trace_shape, cfg.repeats, env)
    m.constraints, m.num_vars = cs.num_constraints, cs.num_vars
    trace = run_episode(env)
    w, m.witness_ms = median_ms(synthesize_witness, cfg.repeats, cs, trace, True)
    tag = 'T'+str(T)+'.q'+str(q)
    m.witness_bytes = write_witness(w, os.path.join(workdir, tag+'.wtns.json'))
    if backend is None or not cfg.prove:
        return m
    (pk, vk), m.setup_ms = median_ms(setup, cfg.repeats, cs, backend)
    stmt = statement_from_trace(trace)
    proof, m.prove_ms = median_ms(prove, cfg.repeats, pk, cs, stmt, w, backend)
    m.verified, m.verify_ms = median_ms(verify, cfg.repeats, vk, stmt, proof, backend)
    m.pk_bytes = write_key(pk, os.path.join(workdir, tag+'.pk'))
    m.vk_bytes = write_key(vk, os.path.join(workdir, tag+'.vk'))
    m.proof_bytes = write_proof(proof, os.path.join(workdir, tag+'.proof'))
    if not m.verified:
        logger.warning("Honest proof for T=%d, q=%d did not verify.", T, q)
    return m


def run_setting2(cfg):
    """
    Measure every (q, T) cell. Returns a Dataset over (q, steps) holding the
    RunMetrics columns. Without a usable backend the setup, prove and verify
    columns and the key and proof sizes stay NaN.
    """
    if cfg.setting != 'II':
        raise ConfigError("run_setting2 needs setting II, got {"+str(cfg.setting)+"}.")
    log_machine()
    try:
        backend = get_backend(cfg.backend)
    except BackendUnavailableError as e:
        logger.warning("%s Prove and verify columns will be empty.", e)
        backend = None
    logger.info("Running setting II: %d q levels x %d horizons, backend %s...",
                len(cfg.q_levels), len(cfg.steps), cfg.backend if backend else 'none')
    start = time.time()
    rows = []
    with tempfile.TemporaryDirectory() as workdir:
        for q in cfg.q_levels:
            for T in cfg.steps:
                m = measure_cell(cfg, T, q, backend, workdir)
                logger.debug("T=%d q=%d: %d constraints, verify %.1f ms.", T, q, m.constraints, m.verify_ms)
                rows.append(m.to_dict())
    df = pd.DataFrame(rows, columns=SETTING2_COLUMNS)
    ds = df.set_index(['q', 'steps']).to_xarray()
    ds.attrs.update({'setting': 'II', 'backend': cfg.backend if backend else 'none',
                     'seed': cfg.base_seed, 'tie_break': 'lowest_index', 'repeats': cfg.repeats})
    logger.info("...setting II done. Elapsed time: %s seconds.", round(time.time()-start))
    for q in cfg.q_levels:
        if len(cfg.steps) > 1:
            slope, _, r2 = calc_linear_fit(cfg.steps, ds['constraints'].sel(q=q).values)
            logger.info("q=%d: %.1f constraints per step (R2 %.6f).", q, slope, r2)
        sizes = ds['proof_bytes'].sel(q=q).dropna('steps').values
        if sizes.size and np.unique(sizes).size == 1:
            logger.info("q=%d: proof size constant at %d bytes; witness size grows with the steps.",
                        q, int(sizes[0]))
    return ds


def setting2_table(ds):
    df = ds.to_dataframe().reset_index()
    return df[SETTING2_COLUMNS]
