"""
Rank-1 constraint systems over the ALT_BN128 scalar field.

A constraint (A, B, C) holds for an assignment z when <A,z>*<B,z> = <C,z> mod p.
Variable 0 is the constant 1 and the public inputs follow it contiguously.
The ConstraintBuilder runs a circuit program either in shape mode, recording
constraints, or in witness mode, recording values only; the same program text
therefore yields both the system and its assignment.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from zkucb.utils import CompileError, SynthesisError, FormatError, sha256_hex

logger = logging.getLogger(__name__)

# ALT_BN128 (BN254) scalar field order
FIELD_MODULUS = 21888242871839275222246405745257275088548364400416034343698204186575808495617
P = FIELD_MODULUS

ONE_INDEX = 0


def felt(x):
    """Reduce an integer into [0, p)."""
    return x % P


def signed(v):
    """Interpret a field element as a signed integer in (-p/2, p/2]."""
    return v-P if v > P//2 else v


class LinearCombination:
    """Sparse map from variable index to a nonzero field coefficient."""
    __slots__ = ('terms',)

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}

    @classmethod
    def constant(cls, c):
        c = felt(c)
        return cls({ONE_INDEX: c} if c else {})

    @staticmethod
    def of(x):
        if isinstance(x, LinearCombination):
            return x
        if isinstance(x, int):
            return LinearCombination.constant(x)
        raise TypeError("Cannot build a linear combination from {"+type(x).__name__+"}.")

    def is_constant(self):
        return all(i == ONE_INDEX for i in self.terms)

    def constant_value(self):
        return self.terms.get(ONE_INDEX, 0)

    def _combine(self, other, sign):
        other = LinearCombination.of(other)
        terms = dict(self.terms)
        for i, c in other.terms.items():
            v = (terms.get(i, 0) + sign*c) % P
            if v:
                terms[i] = v
            else:
                terms.pop(i, None)
        return LinearCombination(terms)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return LinearCombination.of(other)._combine(self, -1)

    def __neg__(self):
        return LinearCombination({i: (-c) % P for i, c in self.terms.items()})

    def __mul__(self, k):
        if not isinstance(k, int):
            raise TypeError("Linear combinations scale by integer constants only; use a gadget to multiply variables.")
        k = felt(k)
        if k == 0:
            return LinearCombination()
        return LinearCombination({i: (c*k) % P for i, c in self.terms.items()})

    __rmul__ = __mul__

    def items(self):
        return tuple(sorted(self.terms.items()))

    def __repr__(self):
        return "LC("+" + ".join(str(signed(c))+"*v"+str(i) for i, c in self.items())+")"


class Variable(LinearCombination):
    """A single allocated variable. kind is 'one', 'public' or 'private'."""
    __slots__ = ('index', 'kind')

    def __init__(self, index, kind='private'):
        super().__init__({index: 1})
        self.index = index
        self.kind = kind

    def __repr__(self):
        return "Variable("+str(self.index)+", "+self.kind+")"


class Constraint(NamedTuple):
    a: tuple
    b: tuple
    c: tuple


def dot(lc_items, values):
    acc = 0
    for i, coeff in lc_items:
        acc += coeff*values[i]
    return acc % P


@dataclass
class ConstraintSystem:
    num_vars: int
    num_public: int
    constraints: list
    layout: dict
    shape: dict = field(default_factory=dict)
    field_modulus: int = FIELD_MODULUS
    _hash: str = field(default=None, repr=False, compare=False)

    @property
    def num_constraints(self):
        return len(self.constraints)

    def iter_json(self):
        """Yield the canonical R1CS JSON text in pieces."""
        def lc(items):
            return '['+','.join('['+str(i)+',"'+str(c)+'"]' for i, c in items)+']'
        yield '{"field_modulus":"'+str(self.field_modulus)+'"'
        yield ',"num_vars":'+str(self.num_vars)
        yield ',"num_public":'+str(self.num_public)
        yield ',"constraints":['
        for k, con in enumerate(self.constraints):
            yield (',' if k else '')+'{"a":'+lc(con.a)+',"b":'+lc(con.b)+',"c":'+lc(con.c)+'}'
        yield '],"layout":'+json.dumps(self.layout, separators=(',', ':'))
        yield ',"shape":'+json.dumps(self.shape, separators=(',', ':'), sort_keys=True)+'}'

    def to_json(self):
        return ''.join(self.iter_json())

    def shape_hash(self):
        """SHA-256 hex digest of the canonical R1CS JSON, cached after the first call."""
        if self._hash is None:
            self._hash = sha256_hex(self.iter_json())
        return self._hash

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
            if int(d['field_modulus']) != FIELD_MODULUS:
                raise FormatError("Field modulus {"+str(d['field_modulus'])+"} is not the ALT_BN128 scalar field.")
            constraints = [Constraint(*(tuple((int(i), int(c)) for i, c in con[k]) for k in 'abc'))
                           for con in d['constraints']]
            return cls(num_vars=int(d['num_vars']), num_public=int(d['num_public']),
                       constraints=constraints, layout={k: int(v) for k, v in d['layout'].items()},
                       shape=d.get('shape', {}))
        except (ValueError, KeyError, TypeError) as e:
            raise FormatError("Malformed R1CS JSON: {"+str(e)+"}.") from e

    def validate(self):
        """Check that every referenced variable exists and the layout covers the public inputs."""
        for k, con in enumerate(self.constraints):
            for part in con:
                for i, _ in part:
                    if not (0 <= i < self.num_vars):
                        raise CompileError("Constraint {"+str(k)+"} references variable "+str(i)
                                           +" beyond num_vars "+str(self.num_vars)+".")
        public = set(range(1, self.num_public+1))
        if not public <= set(self.layout.values()):
            raise CompileError("Layout does not name every public input.")
        return self


@dataclass
class WitnessAssignment:
    values: list

    def __len__(self):
        return len(self.values)

    def public_inputs(self, num_public):
        return self.values[1:num_public+1]

    def to_json(self):
        return '['+','.join('"'+str(v)+'"' for v in self.values)+']'

    @classmethod
    def from_json(cls, text):
        try:
            values = [int(v) for v in json.loads(text)]
        except (ValueError, TypeError) as e:
            raise FormatError("Malformed witness JSON: {"+str(e)+"}.") from e
        if any(not (0 <= v < P) for v in values):
            raise FormatError("Witness holds values outside the field.")
        return cls(values)


def first_unsatisfied(cs, w):
    """Return the index of the first violated constraint, or None."""
    if len(w.values) != cs.num_vars:
        raise SynthesisError("Assignment length {"+str(len(w.values))+"} does not match num_vars "
                             +str(cs.num_vars)+".")
    values = w.values
    if values[ONE_INDEX] != 1:
        return -1
    for k, (a, b, c) in enumerate(cs.constraints):
        if (dot(a, values)*dot(b, values) - dot(c, values)) % P:
            return k
    return None


def is_satisfied(cs, w):
    """True iff every constraint of [cs] holds under [w]."""
    return first_unsatisfied(cs, w) is None


class ConstraintBuilder:
    """
    Allocates variables and records constraints. With witness=True every
    allocation evaluates its hint and constraints are only counted; with
    record=False nothing is stored and only the sizes are tracked.
    """

    def __init__(self, witness=False, record=True):
        self.witness = witness
        self.record = record and not witness
        self.num_vars = 1
        self.num_public = 0
        self.num_constraints = 0
        self.constraints = []
        self.values = [1] if witness else None
        self.layout = {}
        self._private_started = False
        self.one = LinearCombination.constant(1)

    def _new(self, kind, hint, name):
        index = self.num_vars
        self.num_vars += 1
        if self.witness:
            v = hint() if callable(hint) else hint
            if v is None:
                raise SynthesisError("No witness value for variable {"+str(name or index)+"}.")
            self.values.append(felt(v))
        if name is not None:
            self.layout[name] = index
        return Variable(index, kind)

    def alloc_public(self, name, hint=None):
        if self._private_started:
            raise CompileError("Public input {"+name+"} allocated after private variables.")
        self.num_public += 1
        return self._new('public', hint, name)

    def alloc(self, hint=None, name=None):
        self._private_started = True
        return self._new('private', hint, name)

    def enforce(self, a, b, c):
        self.num_constraints += 1
        if self.record:
            self.constraints.append(Constraint(LinearCombination.of(a).items(),
                                               LinearCombination.of(b).items(),
                                               LinearCombination.of(c).items()))

    def value(self, x):
        """Field value of [x] under the values assigned so far (witness mode only)."""
        if isinstance(x, int):
            return felt(x)
        values = self.values
        return sum(c*values[i] for i, c in x.terms.items()) % P

    def system(self, shape=None):
        return ConstraintSystem(num_vars=self.num_vars, num_public=self.num_public,
                                constraints=self.constraints, layout=dict(self.layout),
                                shape=dict(shape or {}))

    def assignment(self):
        return WitnessAssignment(list(self.values))
