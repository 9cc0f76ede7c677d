"""
Setup / Prove / Verify over compiled constraint systems.

Two backends implement the same contract. The transparent backend checks
satisfiability directly and binds statements to a per-setup nonce, which makes
the whole pipeline testable without pairing cryptography. The Groth16 backend
(zkucb.groth16, needs py_ecc) produces real ALT_BN128 proofs.

Key and proof files start with a 16-byte header (magic "ZKUCB\\0", 8-byte
backend id, 2-byte version) followed by a kind byte, the 32-byte shape hash,
the public input count and the backend-native encoding. A JSON sidecar next to
each file records sizes and metadata.
"""

import datetime
import hashlib
import hmac
import json
import logging
import os
import secrets
import struct
from dataclasses import dataclass, field

from zkucb.utils import (ProvingError, BackendUnavailableError, BackendMismatchError,
                         FormatError, ConfigError)
from zkucb.r1cs import P, first_unsatisfied

logger = logging.getLogger(__name__)

MAGIC = b'ZKUCB\x00'
FORMAT_VERSION = 1
HEADER = struct.Struct('>6s8sH')
PREFIX = struct.Struct('>B32sI')

KIND_PROVING_KEY = 0
KIND_VERIFYING_KEY = 1
KIND_PROOF = 2
KIND_NAMES = {KIND_PROVING_KEY: 'proving_key', KIND_VERIFYING_KEY: 'verifying_key', KIND_PROOF: 'proof'}


@dataclass(frozen=True)
class Statement:
    """Public inputs in layout order: a_1..a_T, y_total."""
    values: tuple

    def __post_init__(self):
        if any(not (0 <= v < P) for v in self.values):
            raise FormatError("Statement values must be field elements.")

    def __len__(self):
        return len(self.values)

    @classmethod
    def from_values(cls, values):
        return cls(tuple(int(v) % P for v in values))

    @classmethod
    def from_assignment(cls, cs, w):
        return cls(tuple(w.public_inputs(cs.num_public)))

    def to_json(self):
        return '['+','.join('"'+str(v)+'"' for v in self.values)+']'

    @classmethod
    def from_json(cls, text):
        try:
            return cls(tuple(int(v) for v in json.loads(text)))
        except (ValueError, TypeError) as e:
            raise FormatError("Malformed statement JSON: {"+str(e)+"}.") from e

    def encode(self):
        return b''.join(v.to_bytes(32, 'big') for v in self.values)


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec='seconds')


@dataclass(frozen=True)
class ProverKey:
    backend: str
    shape_hash: str
    num_public: int
    blob: bytes
    created: str = field(default='', compare=False)

    kind = KIND_PROVING_KEY


@dataclass(frozen=True)
class VerifierKey:
    backend: str
    shape_hash: str
    num_public: int
    blob: bytes
    created: str = field(default='', compare=False)

    kind = KIND_VERIFYING_KEY


@dataclass(frozen=True)
class ProofBlob:
    backend: str
    shape_hash: str
    num_public: int
    blob: bytes
    created: str = field(default='', compare=False)

    kind = KIND_PROOF

    @property
    def byte_length(self):
        return len(self.blob)


class TransparentBackend:
    """
    Satisfiability backend. Setup draws a nonce shared by both keys; a proof is
    SHA-256 over (nonce, shape hash, statement) and is only issued for a
    satisfying witness. Not zero-knowledge or sound against a key holder; it
    exists to exercise the pipeline.
    """
    name = 'transparent'
    code = b'TRNSPRNT'

    @staticmethod
    def available():
        return True

    def setup(self, cs):
        nonce = secrets.token_bytes(32)
        return nonce, nonce

    def _digest(self, nonce, shape_hash, stmt):
        return hashlib.sha256(b'zkucb-transparent' + nonce + bytes.fromhex(shape_hash) + stmt.encode()).digest()

    def prove(self, pk, cs, stmt, w):
        k = first_unsatisfied(cs, w)
        if k is not None:
            raise ProvingError("Witness violates constraint {"+str(k)+"}; refusing to prove.")
        return self._digest(pk.blob, pk.shape_hash, stmt)

    def verify(self, vk, stmt, proof):
        return hmac.compare_digest(self._digest(vk.blob, vk.shape_hash, stmt), proof.blob)


BACKENDS = ('transparent', 'groth16')


def get_backend(backend):
    """Return a backend instance for a name, or pass an instance through."""
    if not isinstance(backend, str):
        return backend
    if backend == 'transparent':
        return TransparentBackend()
    if backend == 'groth16':
        from zkucb.groth16 import Groth16Backend
        if not Groth16Backend.available():
            raise BackendUnavailableError("The groth16 backend needs the py_ecc package; "
                                          "install zkucb[groth16].")
        return Groth16Backend()
    raise ConfigError("Unknown backend {"+backend+"}; choose one of "+str(BACKENDS)+".")


def setup(cs, backend='transparent'):
    """Return (ProverKey, VerifierKey) bound to the shape hash of [cs]."""
    backend = get_backend(backend)
    shape_hash = cs.shape_hash()
    pk_blob, vk_blob = backend.setup(cs)
    created = _now()
    return (ProverKey(backend.name, shape_hash, cs.num_public, pk_blob, created),
            VerifierKey(backend.name, shape_hash, cs.num_public, vk_blob, created))


def prove(pk, cs, stmt, w, backend='transparent'):
    """Return a ProofBlob for [stmt]; the witness must satisfy [cs] with public prefix [stmt]."""
    backend = get_backend(backend)
    if pk.backend != backend.name:
        raise BackendMismatchError("Proving key is for backend {"+pk.backend+"}, not "+backend.name+".")
    if pk.shape_hash != cs.shape_hash():
        raise BackendMismatchError("Proving key belongs to another circuit {"+pk.shape_hash[:16]+"...}.")
    if len(stmt) != cs.num_public:
        raise ProvingError("Statement holds {"+str(len(stmt))+"} values; the circuit has "
                           +str(cs.num_public)+" public inputs.")
    if list(stmt.values) != list(w.public_inputs(cs.num_public)):
        raise ProvingError("Statement does not match the public prefix of the witness.")
    blob = backend.prove(pk, cs, stmt, w)
    return ProofBlob(backend.name, pk.shape_hash, cs.num_public, blob, _now())


def verify(vk, stmt, proof, backend='transparent'):
    """
    True iff [proof] attests a satisfying witness with public prefix [stmt] for
    the circuit [vk] was made for. Mismatched backends, circuits or statement
    lengths raise BackendMismatchError instead of returning False.
    """
    backend = get_backend(backend)
    if vk.backend != backend.name or proof.backend != backend.name:
        raise BackendMismatchError("Backends disagree: key {"+vk.backend+"}, proof {"+proof.backend
                                   +"}, verifier "+backend.name+".")
    if vk.shape_hash != proof.shape_hash:
        raise BackendMismatchError("Proof was made for another circuit than the verifying key.")
    if len(stmt) != vk.num_public:
        raise BackendMismatchError("Statement holds {"+str(len(stmt))+"} values; the key expects "
                                   +str(vk.num_public)+".")
    return bool(backend.verify(vk, stmt, proof))


### FILES ###
def _backend_code(name):
    if name == 'transparent':
        return TransparentBackend.code
    if name == 'groth16':
        return b'GROTH16\x00'
    raise FormatError("Unknown backend {"+name+"}.")


def _backend_name(code):
    for name in BACKENDS:
        if _backend_code(name) == code:
            return name
    raise FormatError("Unknown backend id {"+code.hex()+"}.")


def encode_artifact(obj):
    return (HEADER.pack(MAGIC, _backend_code(obj.backend), FORMAT_VERSION)
            + PREFIX.pack(obj.kind, bytes.fromhex(obj.shape_hash), obj.num_public)
            + obj.blob)


def decode_artifact(data, created=''):
    if len(data) < HEADER.size + PREFIX.size:
        raise FormatError("Artifact of {"+str(len(data))+"} bytes is shorter than its header.")
    magic, code, version = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError("Bad magic {"+magic.hex()+"}; not a zkucb artifact.")
    if version != FORMAT_VERSION:
        raise FormatError("Unsupported artifact version {"+str(version)+"}.")
    kind, shape_hash, num_public = PREFIX.unpack_from(data, HEADER.size)
    cls = {KIND_PROVING_KEY: ProverKey, KIND_VERIFYING_KEY: VerifierKey, KIND_PROOF: ProofBlob}.get(kind)
    if cls is None:
        raise FormatError("Unknown artifact kind {"+str(kind)+"}.")
    return cls(_backend_name(code), shape_hash.hex(), num_public,
               bytes(data[HEADER.size+PREFIX.size:]), created)


def write_artifact(obj, path):
    """Write a key or proof with its metadata sidecar; returns the file size in bytes."""
    data = encode_artifact(obj)
    with open(path, 'wb') as f:
        f.write(data)
    meta = {'kind': KIND_NAMES[obj.kind],
            'backend': obj.backend,
            'shape_hash': obj.shape_hash,
            'num_public': obj.num_public,
            'bytes': len(data),
            'native_bytes': len(obj.blob),
            'created': obj.created}
    with open(path+'.json', 'w') as f:
        json.dump(meta, f, indent=1)
    return len(data)


def read_artifact(path, kind=None):
    with open(path, 'rb') as f:
        data = f.read()
    created = ''
    if os.path.exists(path+'.json'):
        with open(path+'.json', 'rb') as f:
            try:
                created = str(json.load(f).get('created', ''))
            except (ValueError, AttributeError) as e:
                raise FormatError("Malformed metadata sidecar {"+path+".json}: "+str(e)) from e
    obj = decode_artifact(data, created)
    if kind is not None and obj.kind != kind:
        raise FormatError("File {"+path+"} holds a "+KIND_NAMES[obj.kind]+", expected "+KIND_NAMES[kind]+".")
    return obj


def write_key(key, path):
    return write_artifact(key, path)


def read_key(path):
    obj = read_artifact(path)
    if obj.kind == KIND_PROOF:
        raise FormatError("File {"+path+"} holds a proof, not a key.")
    return obj


def write_proof(proof, path):
    return write_artifact(proof, path)


def read_proof(path):
    return read_artifact(path, KIND_PROOF)
