"""
Groth16 over ALT_BN128, built on py_ecc's optimized curve arithmetic.

The R1CS rows are interpolated over a radix-2 subgroup of the scalar field. Each
public input (and the constant 1) gets an extra row x_i * 0 = 0 so that the
public polynomials stay linearly independent. The prover divides by the
vanishing polynomial on a coset, as in the usual NTT-based provers.

Pure-Python pairing arithmetic is slow: this backend suits small circuits and
the constant-size-proof checks, not full-horizon zkUCB episodes.
"""

import logging
import secrets
import struct
import time

from zkucb.utils import FormatError, ProvingError
from zkucb.r1cs import P, dot, first_unsatisfied

logger = logging.getLogger(__name__)

try:
    from py_ecc.optimized_bn128 import (G1, G2, Z1, Z2, FQ, FQ2, FQ12, add, multiply, neg,
                                        normalize, is_inf, is_on_curve, b, b2, curve_order,
                                        field_modulus, pairing, final_exponentiate)
    _HAVE_PY_ECC = True
except ImportError:
    _HAVE_PY_ECC = False

# multiplicative generator of the scalar field; also the coset shift
GENERATOR = 5
TWO_ADICITY = 28

G1_BYTES = 64
G2_BYTES = 128
COUNTS = struct.Struct('>III')


def _inv(x):
    return pow(x, P-2, P)


def root_of_unity(n):
    if n & (n-1) or n > 1 << TWO_ADICITY:
        raise ValueError("Domain size {"+str(n)+"} must be a power of two up to 2**28.")
    w = pow(GENERATOR, (P-1)//n, P)
    if n > 1 and pow(w, n//2, P) == 1:
        raise ValueError("Root of unity for domain {"+str(n)+"} is not primitive.")
    return w


def ntt(values, omega):
    """In-place iterative radix-2 transform; returns a new list."""
    n = len(values)
    a = list(values)
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            a[i], a[j] = a[j], a[i]
    length = 2
    while length <= n:
        wl = pow(omega, n//length, P)
        half = length//2
        for start in range(0, n, length):
            w = 1
            for k in range(start, start+half):
                u = a[k]
                v = a[k+half]*w % P
                a[k] = (u+v) % P
                a[k+half] = (u-v) % P
                w = w*wl % P
        length <<= 1
    return a


def intt(values, omega):
    n = len(values)
    n_inv = _inv(n)
    return [v*n_inv % P for v in ntt(values, _inv(omega))]


def _rows(cs):
    """Constraint rows plus one x_i * 0 = 0 row for the constant and each public input."""
    rows = list(cs.constraints)
    for i in range(cs.num_public+1):
        rows.append((((i, 1),), (), ()))
    return rows


def _domain(m):
    n = 1
    while n < m:
        n <<= 1
    return max(n, 2)


### POINT ENCODING ###
def _int(c):
    return c.n if hasattr(c, 'n') else int(c)


def encode_g1(pt):
    if is_inf(pt):
        return bytes(G1_BYTES)
    x, y = normalize(pt)
    return _int(x).to_bytes(32, 'big') + _int(y).to_bytes(32, 'big')


def _coords(data):
    c = [int.from_bytes(data[k:k+32], 'big') for k in range(0, len(data), 32)]
    if any(v >= field_modulus for v in c):
        raise ValueError("Point coordinate not reduced modulo the base field.")
    return c


def decode_g1(data):
    if data == bytes(G1_BYTES):
        return Z1
    c = _coords(data)
    pt = (FQ(c[0]), FQ(c[1]), FQ.one())
    if not is_on_curve(pt, b):
        raise ValueError("G1 point not on curve.")
    return pt


def encode_g2(pt):
    if is_inf(pt):
        return bytes(G2_BYTES)
    x, y = normalize(pt)
    return b''.join(_int(c).to_bytes(32, 'big') for c in tuple(x.coeffs)+tuple(y.coeffs))


def decode_g2(data, subgroup=True):
    if data == bytes(G2_BYTES):
        return Z2
    c = _coords(data)
    pt = (FQ2([c[0], c[1]]), FQ2([c[2], c[3]]), FQ2.one())
    if not is_on_curve(pt, b2):
        raise ValueError("G2 point not on curve.")
    # G2 has a cofactor; G1 has none
    if subgroup and not is_inf(multiply(pt, curve_order)):
        raise ValueError("G2 point not in the prime-order subgroup.")
    return pt


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n):
        chunk = self.data[self.pos:self.pos+n]
        if len(chunk) != n:
            raise FormatError("Groth16 blob truncated at byte {"+str(self.pos)+"}.")
        self.pos += n
        return chunk

    def _point(self, decode, size, **kwargs):
        at = self.pos
        try:
            return decode(self.take(size), **kwargs)
        except ValueError as e:
            raise FormatError("Bad curve point at byte {"+str(at)+"}: "+str(e)) from e

    def g1(self, count=None):
        if count is None:
            return self._point(decode_g1, G1_BYTES)
        return [self._point(decode_g1, G1_BYTES) for _ in range(count)]

    def g2(self, count=None, subgroup=True):
        if count is None:
            return self._point(decode_g2, G2_BYTES, subgroup=subgroup)
        return [self._point(decode_g2, G2_BYTES, subgroup=subgroup) for _ in range(count)]


def _msm(points, scalars, zero):
    acc = zero
    for pt, s in zip(points, scalars):
        s %= curve_order
        if s:
            acc = add(acc, multiply(pt, s))
    return acc


class Groth16Backend:
    name = 'groth16'
    code = b'GROTH16\x00'

    @staticmethod
    def available():
        return _HAVE_PY_ECC

    def setup(self, cs):
        logger.info("Running Groth16 setup...")
        start = time.time()
        rows = _rows(cs)
        n = _domain(len(rows))
        omega = root_of_unity(n)
        tau, alpha, beta, gamma, delta = (secrets.randbelow(P-1)+1 for _ in range(5))

        # Lagrange basis at tau: L_k(tau) = w^k/n * (tau^n - 1)/(tau - w^k)
        z_tau = (pow(tau, n, P)-1) % P
        n_inv = _inv(n)
        lag = []
        wk = 1
        for _ in range(n):
            lag.append(wk*n_inv % P * z_tau % P * _inv((tau-wk) % P) % P)
            wk = wk*omega % P

        At = [0]*cs.num_vars
        Bt = [0]*cs.num_vars
        Ct = [0]*cs.num_vars
        for k, (ra, rb, rc) in enumerate(rows):
            lk = lag[k]
            for i, coeff in ra:
                At[i] = (At[i]+coeff*lk) % P
            for i, coeff in rb:
                Bt[i] = (Bt[i]+coeff*lk) % P
            for i, coeff in rc:
                Ct[i] = (Ct[i]+coeff*lk) % P

        gamma_inv, delta_inv = _inv(gamma), _inv(delta)
        npub = cs.num_public+1
        lin = [(beta*At[i]+alpha*Bt[i]+Ct[i]) % P for i in range(cs.num_vars)]
        ic = [multiply(G1, x*gamma_inv % P) for x in lin[:npub]]
        kq = [multiply(G1, x*delta_inv % P) for x in lin[npub:]]
        a1 = [multiply(G1, x) for x in At]
        b1 = [multiply(G1, x) for x in Bt]
        b2_ = [multiply(G2, x) for x in Bt]
        hq = []
        tk = z_tau*delta_inv % P
        for _ in range(n-1):
            hq.append(multiply(G1, tk))
            tk = tk*tau % P
        alpha1, beta1, delta1 = multiply(G1, alpha), multiply(G1, beta), multiply(G1, delta)
        beta2, gamma2, delta2 = multiply(G2, beta), multiply(G2, gamma), multiply(G2, delta)

        pk = (COUNTS.pack(n, cs.num_vars, cs.num_public)
              + encode_g1(alpha1) + encode_g1(beta1) + encode_g1(delta1)
              + encode_g2(beta2) + encode_g2(delta2)
              + b''.join(encode_g1(p) for p in a1)
              + b''.join(encode_g1(p) for p in b1)
              + b''.join(encode_g2(p) for p in b2_)
              + b''.join(encode_g1(p) for p in kq)
              + b''.join(encode_g1(p) for p in hq))
        vk = (COUNTS.pack(n, cs.num_vars, cs.num_public)
              + encode_g1(alpha1) + encode_g2(beta2) + encode_g2(gamma2) + encode_g2(delta2)
              + b''.join(encode_g1(p) for p in ic))
        logger.info("...Groth16 setup done. Elapsed time: %s seconds.", round(time.time()-start))
        return pk, vk

    def _quotient(self, cs, values, n):
        """Coefficients of H = (A*B - C)/Z for the assignment [values]."""
        rows = _rows(cs)
        omega = root_of_unity(n)
        ev = [[0]*n, [0]*n, [0]*n]
        for k, row in enumerate(rows):
            for part in range(3):
                ev[part][k] = dot(row[part], values)
        coeffs = [intt(e, omega) for e in ev]
        # evaluate on the coset GENERATOR * <omega>
        shifted = []
        for cf in coeffs:
            g = 1
            out = []
            for c in cf:
                out.append(c*g % P)
                g = g*GENERATOR % P
            shifted.append(ntt(out, omega))
        z_inv = _inv((pow(GENERATOR, n, P)-1) % P)
        h_coset = [(a*b_-c)*z_inv % P for a, b_, c in zip(*shifted)]
        h = intt(h_coset, omega)
        g_inv = _inv(GENERATOR)
        g = 1
        for k in range(n):
            h[k] = h[k]*g % P
            g = g*g_inv % P
        if any(h[n-1:]):
            raise ValueError("Quotient degree too high; the witness does not satisfy the system.")
        return h[:n-1]

    def prove(self, pk, cs, stmt, w):
        logger.info("Generating Groth16 proof...")
        start = time.time()
        r = _Reader(pk.blob)
        n, num_vars, num_public = COUNTS.unpack(r.take(COUNTS.size))
        if num_vars != cs.num_vars or num_public != cs.num_public:
            raise ProvingError("Proving key shape does not match the constraint system.")
        alpha1, beta1, delta1 = r.g1(), r.g1(), r.g1()
        # the prover trusts its own key; subgroup checks guard the verifier
        beta2, delta2 = r.g2(subgroup=False), r.g2(subgroup=False)
        a1 = r.g1(num_vars)
        b1 = r.g1(num_vars)
        b2_ = r.g2(num_vars, subgroup=False)
        kq = r.g1(num_vars-num_public-1)
        hq = r.g1(n-1)

        k = first_unsatisfied(cs, w)
        if k is not None:
            raise ProvingError("Witness violates constraint {"+str(k)+"}; refusing to prove.")
        z = w.values
        try:
            h = self._quotient(cs, z, n)
        except ValueError as e:
            raise ProvingError(str(e)) from e
        rr, ss = secrets.randbelow(P), secrets.randbelow(P)
        A = add(add(alpha1, _msm(a1, z, Z1)), multiply(delta1, rr))
        B2 = add(add(beta2, _msm(b2_, z, Z2)), multiply(delta2, ss))
        B1 = add(add(beta1, _msm(b1, z, Z1)), multiply(delta1, ss))
        C = add(_msm(kq, z[num_public+1:], Z1), _msm(hq, h, Z1))
        C = add(C, add(multiply(A, ss), multiply(B1, rr)))
        C = add(C, neg(multiply(delta1, rr*ss % P)))
        logger.info("...Groth16 proof generated. Elapsed time: %s seconds.", round(time.time()-start))
        return encode_g1(A) + encode_g2(B2) + encode_g1(C)

    def verify(self, vk, stmt, proof):
        r = _Reader(vk.blob)
        n, num_vars, num_public = COUNTS.unpack(r.take(COUNTS.size))
        alpha1 = r.g1()
        beta2, gamma2, delta2 = r.g2(), r.g2(), r.g2()
        ic = r.g1(num_public+1)
        try:
            pr = _Reader(proof.blob)
            A, B, C = pr.g1(), pr.g2(), pr.g1()
        except (ValueError, FormatError):
            return False
        vk_x = _msm(ic, (1,)+tuple(stmt.values), Z1)
        acc = (pairing(B, A, final_exponentiate=False)
               * pairing(beta2, neg(alpha1), final_exponentiate=False)
               * pairing(gamma2, neg(vk_x), final_exponentiate=False)
               * pairing(delta2, neg(C), final_exponentiate=False))
        return final_exponentiate(acc) == FQ12.one()
