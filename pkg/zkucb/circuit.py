"""
Compile a zkUCB episode of fixed shape (K, T, q, window) into a rank-1
constraint system and synthesize its witness from a Trace.

Public inputs are the chosen arms a_1..a_T followed by y_total; the seed, the
arm bounds, every sample, reward and index stay private. The same circuit
program runs for compilation (shape mode) and synthesis (witness mode).
"""

import logging
import time

from zkucb.version import sysconfig
from zkucb.utils import CompileError, SynthesisError, is_power_of_two
from zkucb.fixedpoint import default_ln_table
from zkucb.r1cs import ConstraintBuilder, LinearCombination, first_unsatisfied
from zkucb.proof import Statement
from zkucb.gadgets import (range_check, floor_div_gadget, isqrt_gadget, floor_ln_gadget,
                           lcg_sample_gadget, one_hot_gadget, argmax_gadget, select_gadget)

logger = logging.getLogger(__name__)


def circuit_shape(cfg, W=sysconfig['bitwidth']):
    """Everything about [cfg] that the constraint system depends on."""
    return {'K': cfg.K,
            'T': cfg.T,
            'q': cfg.quant.q,
            'window': cfg.quant.window,
            'index_mode': cfg.quant.index_mode,
            'bitwidth': W,
            'lcgwidth': sysconfig['lcgwidth'],
            'lcg_a': cfg.lcg.a,
            'lcg_c': cfg.lcg.c,
            'ln_nmax': default_ln_table().n_max}


def _check_compilable(cfg):
    if cfg.tie_break != 'lowest_index':
        raise CompileError("Tie break {"+cfg.tie_break+"} has no circuit encoding; "
                           "compile with tie_break='lowest_index'.")
    if not is_power_of_two(cfg.quant.q):
        raise CompileError("Scaling factor q {"+str(cfg.quant.q)+"} must be a power of two.")
    if cfg.T < cfg.K:
        raise CompileError("Horizon T {"+str(cfg.T)+"} shorter than arm count K {"+str(cfg.K)+"}.")


def _zkucb_program(cb, cfg, W, trace=None):
    """
    Emit the zkUCB circuit into [cb]. With a trace, every value the trace records
    (choices, samples, rewards, ln values, indices, counts, sums) is used as the
    witness value of its variable; everything else is derived.
    """
    K, T = cfg.K, cfg.T
    q, window = cfg.quant.q, cfg.quant.window
    LW = sysconfig['lcgwidth']
    table = default_ln_table()
    steps = trace.steps if trace is not None else None
    wcfg = trace.config if trace is not None else cfg

    def rec(t):
        return steps[t-1] if steps is not None else None

    chosen_vars = [cb.alloc_public('a_'+str(t), (lambda t=t: rec(t).chosen)) for t in range(1, T+1)]
    y_total = cb.alloc_public('y_total', lambda: trace.y_total)

    s = cb.alloc(lambda: wcfg.seed, name='seed')
    range_check(cb, s, LW)
    d = []
    for j in range(K):
        u = cb.alloc(lambda j=j: wcfg.arms[j].u, name='u_'+str(j))
        range_check(cb, u - 1, LW)
        d.append(u*2 - 1)

    n = [LinearCombination() for _ in range(K)]
    S = [LinearCombination() for _ in range(K)]
    for t in range(1, T+1):
        st = rec(t)
        nxt = rec(t+1) if t < T else None
        rewards = []
        for j in range(K):
            total = LinearCombination()
            for w in range(window):
                sample, s = lcg_sample_gadget(cb, s, d[j], wcfg.lcg, LW,
                                              sample=st.samples[j][w] if st is not None else None)
                total = total + sample
            reward, _ = floor_div_gadget(cb, total, window, W,
                                         quot=st.reward[j] if st is not None else None)
            cb.layout['step'+str(t)+'.reward_'+str(j)] = reward.index
            rewards.append(reward)

        if t <= K:
            c = t-1
            cb.enforce(chosen_vars[t-1], cb.one, c)
            n[c] = n[c] + 1
            S[c] = S[c] + rewards[c]
            continue

        l_var = floor_ln_gadget(cb, sum(n, LinearCombination()), table, W,
                                ln_val=st.ln_val if st is not None else None)
        indices = []
        for j in range(K):
            mean, _ = floor_div_gadget(cb, S[j], n[j], W)
            if cfg.quant.index_mode == 'literal':
                g, _ = floor_div_gadget(cb, l_var, n[j], W)
                bonus = 2*q
            else:
                g, _ = floor_div_gadget(cb, l_var*(q*q), n[j], W)
                bonus = 2
            root = isqrt_gadget(cb, g, W, cfg.quant.newton_iters)
            idx = cb.alloc((lambda j=j: st.index[j]) if st is not None
                           else (lambda mean=mean, root=root, bonus=bonus:
                                 cb.value(mean) + bonus*cb.value(root)))
            cb.enforce(mean + root*bonus, cb.one, idx)
            cb.layout['step'+str(t)+'.index_'+str(j)] = idx.index
            indices.append(idx)

        sel = one_hot_gadget(cb, K, st.chosen if st is not None else None)
        argmax_gadget(cb, indices, sel, W)
        cb.enforce(sum((s_j*j for j, s_j in enumerate(sel)), LinearCombination()), cb.one, chosen_vars[t-1])
        prods, _ = select_gadget(cb, sel, rewards)

        for j in range(K):
            n_new = cb.alloc((lambda j=j: nxt.n_pre[j]) if nxt is not None
                             else (lambda j=j: cb.value(n[j] + sel[j])))
            cb.enforce(n[j] + sel[j], cb.one, n_new)
            S_new = cb.alloc((lambda j=j: nxt.S_pre[j]) if nxt is not None
                             else (lambda j=j: cb.value(S[j] + prods[j])))
            cb.enforce(S[j] + prods[j], cb.one, S_new)
            n[j], S[j] = n_new, S_new

    cb.enforce(sum(S, LinearCombination()), cb.one, y_total)


def compile_trace_shape(cfg, W=sysconfig['bitwidth']):
    """Compile the constraint system for the shape of [cfg]."""
    _check_compilable(cfg)
    logger.info("Compiling circuit (K=%d, T=%d, q=%d, window=%d)...", cfg.K, cfg.T, cfg.quant.q, cfg.quant.window)
    start = time.time()
    cb = ConstraintBuilder(witness=False)
    _zkucb_program(cb, cfg, W)
    cs = cb.system(circuit_shape(cfg, W))
    cs.validate()
    logger.info("...circuit compiled: %d constraints, %d variables. Elapsed time: %s seconds.",
                cs.num_constraints, cs.num_vars, round(time.time()-start))
    return cs


def _check_trace_shape(cs, trace):
    if not trace.steps:
        raise SynthesisError("Trace holds no steps; the system expects "+str(cs.shape.get('T'))+".")
    if trace.config.tie_break != 'lowest_index':
        raise SynthesisError("Trace was produced with tie break {"+trace.config.tie_break
                             +"}; only lowest_index traces have a circuit witness.")
    if len(trace.steps) != trace.config.T:
        raise SynthesisError("Trace holds "+str(len(trace.steps))+" steps but its config says T={"
                             +str(trace.config.T)+"}.")
    expected = circuit_shape(trace.config, cs.shape.get('bitwidth', sysconfig['bitwidth']))
    if cs.shape and cs.shape != expected:
        mismatched = sorted(k for k in expected if cs.shape.get(k) != expected[k])
        raise SynthesisError("Trace shape does not match the constraint system in {"+", ".join(mismatched)+"}.")


def synthesize_witness(cs, trace, check=False):
    """
    Fill every variable of [cs] from [trace]. With check=True an unsatisfying
    result raises SynthesisError; honest traces from run_episode never do.
    """
    _check_trace_shape(cs, trace)
    W = cs.shape.get('bitwidth', sysconfig['bitwidth'])
    logger.info("Synthesizing witness...")
    start = time.time()
    cb = ConstraintBuilder(witness=True)
    _zkucb_program(cb, trace.config, W, trace)
    if cb.num_vars != cs.num_vars or cb.num_constraints != cs.num_constraints:
        raise SynthesisError("Synthesized "+str(cb.num_vars)+" variables / "+str(cb.num_constraints)
                             +" constraints, system has {"+str(cs.num_vars)+"} / {"+str(cs.num_constraints)+"}.")
    w = cb.assignment()
    if check:
        k = first_unsatisfied(cs, w)
        if k is not None:
            raise SynthesisError("Witness violates constraint {"+str(k)+"}: the trace is not an honest "
                                 "run_episode output, or the circuit compiler is broken.")
    logger.info("...witness synthesized. Elapsed time: %s seconds.", round(time.time()-start))
    return w


def statement_values(trace):
    """Public input values in layout order: a_1..a_T, y_total."""
    return list(trace.chosen)+[trace.y_total]


def statement_from_trace(trace):
    return Statement.from_values(statement_values(trace))


def count_constraints(cfg, W=sysconfig['bitwidth']):
    """Return (num_constraints, num_vars) for the shape of [cfg] without storing the system."""
    _check_compilable(cfg)
    cb = ConstraintBuilder(witness=False, record=False)
    _zkucb_program(cb, cfg, W)
    return cb.num_constraints, cb.num_vars
