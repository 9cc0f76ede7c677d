""" Module for the zkucbObj class """
import logging
import os
import time

from zkucb.utils import ZkucbError, SynthesisError
from zkucb.bandit import run_episode
from zkucb.circuit import compile_trace_shape, synthesize_witness, statement_from_trace
from zkucb.proof import setup, prove, verify, read_key, write_key, read_proof, write_proof
from zkucb.processing import (open_trace, write_trace, open_r1cs, write_r1cs, open_witness,
                              write_witness, write_statement)
from zkucb.organization import (get_tracepath, get_r1cspath, get_witnesspath, get_statementpath,
                                get_keypath, get_proofpath)

logger = logging.getLogger(__name__)


class zkucbObj:
    """
    One zkUCB episode carried through the proof pipeline:

        zkucbObj(cfg).simulate().compile().witness().setup().prove().verify()

    Each stage opens its artifact from the sysconfig directories when present and
    computes it otherwise; save=True writes what was computed, write=True
    recomputes and overwrites.
    """

    def __init__(self, cfg, backend='transparent'):
        self.cfg = cfg
        self.backend = backend
        self.verified = None

    def _present(self, path, write):
        return os.path.exists(path) and not write

    def simulate(self, save=False, write=False):
        path = get_tracepath(self.cfg)
        if self._present(path, write):
            trace = open_trace(path)
            if trace.config != self.cfg:
                raise SynthesisError("Trace at {"+path+"} was produced by another config.")
            logger.info("Trace present... opening... trace opened.")
        else:
            logger.info("Simulating episode...")
            start = time.time()
            trace = run_episode(self.cfg)
            logger.info("...episode simulated. Elapsed time: %s seconds.", round(time.time()-start))
            if save or write:
                write_trace(trace, get_tracepath(self.cfg, makedirs=True))
        self.trace = trace
        self.tracepath = path
        return self

    def compile(self, save=False, write=False):
        path = get_r1cspath(self.cfg)
        if self._present(path, write):
            logger.info("Constraint system present... opening...")
            cs = open_r1cs(path)
            logger.info("...constraint system opened.")
        else:
            cs = compile_trace_shape(self.cfg)
            if save or write:
                write_r1cs(cs, get_r1cspath(self.cfg, makedirs=True))
        self.cs = cs
        self.r1cspath = path
        return self

    def witness(self, save=False, write=False):
        if not hasattr(self, 'trace') or not hasattr(self, 'cs'):
            raise ZkucbError("Synthesizing a witness requires that simulate() and compile() have run.")
        path = get_witnesspath(self.cfg)
        if self._present(path, write):
            w = open_witness(path)
            logger.info("Witness present... opening... witness opened.")
        else:
            w = synthesize_witness(self.cs, self.trace, check=True)
            if save or write:
                write_witness(w, get_witnesspath(self.cfg, makedirs=True))
        self.w = w
        self.stmt = statement_from_trace(self.trace)
        if save or write:
            write_statement(self.stmt, get_statementpath(self.cfg, makedirs=True))
        return self

    def setup(self, save=False, write=False):
        if not hasattr(self, 'cs'):
            raise ZkucbError("Setup requires that compile() has run.")
        pkpath = get_keypath(self.cfg, self.backend, 'pk')
        vkpath = get_keypath(self.cfg, self.backend, 'vk')
        if self._present(pkpath, write) and os.path.exists(vkpath):
            pk, vk = read_key(pkpath), read_key(vkpath)
            logger.info("Keys present... opening... keys opened.")
            if pk.shape_hash != self.cs.shape_hash():
                logger.warning("Stored keys belong to another circuit; running setup again.")
                return self.setup(save=save, write=True)
        else:
            logger.info("Running setup (%s)...", self.backend)
            start = time.time()
            pk, vk = setup(self.cs, self.backend)
            logger.info("...setup done. Elapsed time: %s seconds.", round(time.time()-start))
            if save or write:
                write_key(pk, get_keypath(self.cfg, self.backend, 'pk', makedirs=True))
                write_key(vk, get_keypath(self.cfg, self.backend, 'vk', makedirs=True))
        self.pk, self.vk = pk, vk
        return self

    def prove(self, save=False, write=False):
        if not all(hasattr(self, a) for a in ('pk', 'w', 'stmt')):
            raise ZkucbError("Proving requires that witness() and setup() have run.")
        path = get_proofpath(self.cfg, self.backend)
        if self._present(path, write):
            proof = read_proof(path)
            logger.info("Proof present... opening... proof opened.")
        else:
            logger.info("Generating proof...")
            start = time.time()
            proof = prove(self.pk, self.cs, self.stmt, self.w, self.backend)
            logger.info("...proof generated. Elapsed time: %s seconds.", round(time.time()-start))
            if save or write:
                write_proof(proof, get_proofpath(self.cfg, self.backend, makedirs=True))
        self.proof = proof
        return self

    def verify(self):
        if not all(hasattr(self, a) for a in ('vk', 'stmt', 'proof')):
            raise ZkucbError("Verification requires that setup() and prove() have run.")
        self.verified = verify(self.vk, self.stmt, self.proof, self.backend)
        logger.info("Verification %s.", 'succeeded' if self.verified else 'failed')
        return self

    def run(self, save=False):
        """Every stage in order."""
        return (self.simulate(save=save).compile(save=save).witness(save=save)
                .setup(save=save).prove(save=save).verify())
