import numpy as np
import pytest

from zkucb.version import sysconfig
from zkucb.bandit import EnvConfig, run_episode
from zkucb.r1cs import ConstraintBuilder
from zkucb.circuit import compile_trace_shape, synthesize_witness


def small_config(T=6, seed=7, q=16, window=2, index_mode='literal', tie_break='lowest_index', **kwargs):
    return EnvConfig.build(means=[0.9, 1.0, 1.1], T=T, seed=seed, q=q, window=window,
                           index_mode=index_mode, tie_break=tie_break, **kwargs)


def run_program(program):
    """
    Run a gadget program in shape mode and in witness mode. Returns the system,
    the assignment, the witness builder and whatever the witness run returned.
    """
    shape = ConstraintBuilder()
    program(shape)
    cs = shape.system()
    wb = ConstraintBuilder(witness=True)
    out = program(wb)
    return cs, wb.assignment(), wb, out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope='session')
def small_cfg():
    return small_config()


@pytest.fixture(scope='session')
def small_trace(small_cfg):
    return run_episode(small_cfg)


@pytest.fixture(scope='session')
def small_cs(small_cfg):
    return compile_trace_shape(small_cfg)


@pytest.fixture(scope='session')
def small_witness(small_cs, small_trace):
    return synthesize_witness(small_cs, small_trace, check=True)


@pytest.fixture
def output_root(tmp_path, monkeypatch):
    """Point every sysconfig artifact root at a temporary directory."""
    roots = {'tracepathroot': 'trace', 'r1cspathroot': 'r1cs', 'witnesspathroot': 'witness',
             'keypathroot': 'keys', 'proofpathroot': 'proof', 'benchpathroot': 'bench',
             'plotpathroot': 'plots'}
    for name, sub in roots.items():
        monkeypatch.setitem(sysconfig, name, str(tmp_path/sub))
    monkeypatch.setitem(sysconfig, 'outputroot', str(tmp_path))
    return tmp_path
