#!/usr/bin/env python
# Python file to simulate, compile and prove a handful of zkUCB episodes
import logging

import zkucb

logging.basicConfig(level=logging.INFO)

means = [0.9, 1.0, 1.1] # Expected rewards of the three arms
seeds = [0, 1, 2]
steps = 20

# Keys depend only on the circuit shape (K, T, q, window, index mode), so with save=True
# the first episode writes them and the later seeds open them from the keys/ directory.
# Proving needs tie_break='lowest_index'; the lcg tie break has no circuit.

# The transparent backend only exercises the pipeline. For real proofs install py_ecc
# and pass backend='groth16'; expect minutes per episode at this size.

for seed in seeds:
    cfg = zkucb.EnvConfig.build(means=means, T=steps, seed=seed, q=2**8, tie_break='lowest_index')
    obj = zkucb.zkucbObj(cfg, backend='transparent').run(save=True)
    print(seed, obj.trace.chosen, obj.trace.y_total, obj.verified)
