"""
Reusable sub-circuits: range checks, comparisons, floor division, square root,
floor logarithm, LCG steps and argmax selection.

Every gadget takes the ConstraintBuilder first. Hints are only evaluated when
the builder is synthesizing a witness; a hint may be overridden by a value taken
from a trace so that a tampered trace surfaces as an unsatisfied constraint.
"""

import logging

from zkucb.version import sysconfig
from zkucb.fixedpoint import LCG_MODULUS, LcgParams, isqrt_newton
from zkucb.r1cs import LinearCombination, P

logger = logging.getLogger(__name__)


def _pick(override, default):
    return (lambda: override) if override is not None else default


def bits_decompose(cb, x, W=sysconfig['bitwidth']):
    """
    Allocate W boolean variables b_i with x = sum b_i 2**i. A value of x that
    does not fit in W bits is truncated here and fails the recomposition.
    """
    x = LinearCombination.of(x)
    xv = cb.value(x) if cb.witness else 0
    if cb.witness and xv >> W:
        logger.debug("Value does not fit in %d bits; the range check will fail.", W)
    bits = [cb.alloc((xv >> i) & 1) for i in range(W)]
    for b in bits:
        cb.enforce(b, cb.one - b, 0)
    cb.enforce(sum((b*(1 << i) for i, b in enumerate(bits)), LinearCombination()), cb.one, x)
    return bits


range_check = bits_decompose


def assert_lt(cb, x, y, W=sysconfig['bitwidth']):
    """Satisfiable iff x < y for x, y < 2**W."""
    bits_decompose(cb, LinearCombination.of(y) - x - 1, W)


def assert_lte(cb, x, y, W=sysconfig['bitwidth']):
    """Satisfiable iff x <= y for x, y < 2**W."""
    bits_decompose(cb, LinearCombination.of(y) - x, W)


def floor_div_gadget(cb, x, y, W=sysconfig['bitwidth'], quot=None, rem=None):
    """
    Return (quot, rem) with x = quot*y + rem, 0 <= rem < y and quot < 2**W. The
    divisor may be a constant or a private linear combination below 2**W.
    """
    x = LinearCombination.of(x)
    y_lc = LinearCombination.of(y)

    def divmod_hint():
        yv = cb.value(y_lc)
        xv = cb.value(x)
        return divmod(xv, yv) if yv else (0, xv)

    q_var = cb.alloc(_pick(quot, lambda: divmod_hint()[0]))
    if rem is None:
        r_var = cb.alloc(lambda: divmod_hint()[1])
    else:
        r_var = cb.alloc(rem)
    if y_lc.is_constant():
        cb.enforce(q_var*y_lc.constant_value() + r_var, cb.one, x)
    else:
        cb.enforce(q_var, y_lc, x - r_var)
    # rem needs its own range check: y - rem - 1 alone also admits rem = r - y mod P
    range_check(cb, r_var, W)
    assert_lt(cb, r_var, y_lc, W)
    range_check(cb, q_var, W)
    return q_var, r_var


def isqrt_gadget(cb, v, W=sysconfig['bitwidth'], iters=sysconfig['newton_iters'], root=None):
    """
    Return b with b*b <= v < (b+1)*(b+1). The witness value comes from
    isqrt_newton; the circuit only checks the square bounds.
    """
    v = LinearCombination.of(v)
    b = cb.alloc(_pick(root, lambda: isqrt_newton(cb.value(v), iters)))
    range_check(cb, b, W//2)
    bb = cb.alloc(lambda: cb.value(b)*cb.value(b))
    cb.enforce(b, b, bb)
    assert_lte(cb, bb, v, W)
    # (b+1)**2 = b*b + 2b + 1
    assert_lt(cb, v, bb + 2*b + 1, W)
    return b


def one_hot_gadget(cb, size, choice=None):
    """Allocate [size] booleans summing to one; [choice] is the hot position."""
    sel = [cb.alloc(lambda k=k: 1 if choice == k else 0) for k in range(size)]
    for s in sel:
        cb.enforce(s, cb.one - s, 0)
    cb.enforce(sum(sel, LinearCombination()), cb.one, cb.one)
    return sel


def floor_ln_gadget(cb, n, table, W=sysconfig['bitwidth'], ln_val=None):
    """
    Return l = floor(ln n) checked through a one-hot selector over the
    threshold table: t_l <= n < t_{l+1}.
    """
    n = LinearCombination.of(n)
    t = table.thresholds

    def hint():
        nv = cb.value(n)
        return max(k for k in range(table.L+1) if t[k] <= nv) if nv >= 1 else 0

    lv = None
    if cb.witness:
        lv = ln_val if ln_val is not None else hint()
    sel = one_hot_gadget(cb, table.L+1, lv)
    l_var = cb.alloc(lv)
    cb.enforce(sum((s*k for k, s in enumerate(sel)), LinearCombination()), cb.one, l_var)
    lower = sum((s*t[k] for k, s in enumerate(sel)), LinearCombination())
    upper = sum((s*t[k+1] for k, s in enumerate(sel)), LinearCombination())
    assert_lte(cb, lower, n, W)
    assert_lt(cb, n, upper, W)
    return l_var


def lcg_step_gadget(cb, s, params=LcgParams(), W=sysconfig['lcgwidth']):
    """
    Return s' with a*s + c = s' + k*2**32, s' < 2**32 and k < 2**32.
    """
    s = LinearCombination.of(s)

    def step():
        return divmod(params.a*cb.value(s) + params.c, LCG_MODULUS)

    s_next = cb.alloc(lambda: step()[1])
    k = cb.alloc(lambda: step()[0])
    cb.enforce(s*params.a + params.c - k*LCG_MODULUS, cb.one, s_next)
    range_check(cb, s_next, W)
    range_check(cb, k, W)
    return s_next


def lcg_sample_gadget(cb, s, d, params=LcgParams(), W=sysconfig['lcgwidth'], sample=None,
                      div_W=sysconfig['bitwidth']):
    """
    One LCG draw mapped onto [1, d]: s' = F(s), sample = (s' mod d) + 1.
    Returns (sample, s'); sample is a linear combination. The state is checked
    at [W] bits; the residue slack d - r - 1 needs [div_W] bits since d may exceed 2**32.
    """
    s_next = lcg_step_gadget(cb, s, params, W)
    rem = None
    quot = None
    if cb.witness and sample is not None:
        rem = (sample-1) % P
        dv = cb.value(LinearCombination.of(d))
        quot = (cb.value(s_next)-(sample-1))//dv if dv else 0
    _, r = floor_div_gadget(cb, s_next, d, div_W, quot=quot, rem=rem)
    return r + 1, s_next


def argmax_gadget(cb, indices, sel, W=sysconfig['bitwidth']):
    """
    Constrain one-hot [sel] to a lowest-index argmax of [indices]: with
    idx_sel = sum sel_j*index_j and lower_j = sum_{i>j} sel_i, require
    idx_sel >= index_j + lower_j for all j. Returns idx_sel.
    """
    prods = []
    for s, idx in zip(sel, indices):
        p = cb.alloc(lambda s=s, idx=idx: cb.value(s)*cb.value(idx))
        cb.enforce(s, idx, p)
        prods.append(p)
    idx_sel = sum(prods, LinearCombination())
    for j, idx in enumerate(indices):
        lower = sum(sel[j+1:], LinearCombination())
        assert_lte(cb, LinearCombination.of(idx) + lower, idx_sel, W)
    return idx_sel


def select_gadget(cb, sel, values):
    """Return sum sel_j*values_j as a list of product variables and their sum."""
    prods = []
    for s, v in zip(sel, values):
        p = cb.alloc(lambda s=s, v=v: cb.value(s)*cb.value(v))
        cb.enforce(s, v, p)
        prods.append(p)
    return prods, sum(prods, LinearCombination())
