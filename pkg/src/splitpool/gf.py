"""GF(2^m) arithmetic and polynomial (Wegman-Carter) hashing.

Field elements are ints whose bit i is the coefficient of x^i.  A random
polynomial of degree < r over GF(2^m), evaluated at distinct points, gives
exactly r-wise independent values; keeping the low ``out_bits`` bits of each
value preserves that.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field as dc_field

import numba
import numpy as np

from .rng import SplitMix64

# Lowest-weight irreducible polynomial of each degree (smallest value among
# those of minimum weight).  Re-verified by is_irreducible in the test suite.
MODULUS_TABLE = {
    1: 0x3, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11B,
    9: 0x203, 10: 0x409, 11: 0x805, 12: 0x1009, 13: 0x201B, 14: 0x4021,
    15: 0x8003, 16: 0x1002B, 17: 0x20009, 18: 0x40009, 19: 0x80027,
    20: 0x100009, 21: 0x200005, 22: 0x400003, 23: 0x800021, 24: 0x100001B,
    25: 0x2000009, 26: 0x400001B, 27: 0x8000027, 28: 0x10000003,
    29: 0x20000005, 30: 0x40000003, 31: 0x80000009, 32: 0x10000008D,
}

MAX_DEGREE = 32


def poly_degree(p: int) -> int:
    return p.bit_length() - 1


def clmul(a: int, b: int) -> int:
    """Carryless product of two GF(2) polynomials."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, mod: int) -> int:
    """Remainder of GF(2) long division."""
    dm = poly_degree(mod)
    while a and poly_degree(a) >= dm:
        a ^= mod << (poly_degree(a) - dm)
    return a


def is_irreducible(poly: int) -> bool:
    """Brute force: no divisor of degree 1..deg/2 with nonzero constant term.

    Divisors with zero constant term are multiples of x, which only divides
    ``poly`` when its own constant term is zero.
    """
    d = poly_degree(poly)
    if d < 1:
        return False
    if not poly & 1:
        return d == 1
    for dd in range(1, d // 2 + 1):
        for low in range(1 << dd):
            if low & 1 and poly_mod(poly, (1 << dd) | low) == 0:
                return False
    return True


@dataclass(frozen=True)
class Gf2mField:
    m: int
    modulus: int

    @property
    def order(self) -> int:
        return 1 << self.m

    def mul(self, a: int, b: int) -> int:
        return gf_mul(self, a, b)

    def inverse(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        # a^(2^m - 2) by square-and-multiply
        result, base, e = 1, a, self.order - 2
        while e:
            if e & 1:
                result = gf_mul(self, result, base)
            base = gf_mul(self, base, base)
            e >>= 1
        return result


def field_new(m: int) -> Gf2mField:
    if not 1 <= m <= MAX_DEGREE:
        raise ValueError(f"field degree must be in [1, {MAX_DEGREE}], got {m}")
    return Gf2mField(m, MODULUS_TABLE[m])


def gf_mul(field: Gf2mField, a: int, b: int) -> int:
    """Shift-and-XOR product reduced modulo the field polynomial."""
    mask = field.order - 1
    a &= mask
    b &= mask
    top = field.order
    mod = field.modulus
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= mod
    return r


@dataclass
class OpCounter:
    """Field-operation tally, for checking the O(r) evaluation cost."""

    mults: int = 0
    adds: int = 0
    evals: int = 0


@dataclass(frozen=True)
class PolyHash:
    field: Gf2mField
    coeffs: tuple  # coeffs[i] multiplies x**i
    out_bits: int
    _coeff_array: np.ndarray = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_coeff_array", np.array(self.coeffs, dtype=np.uint64))

    @property
    def r(self) -> int:
        return len(self.coeffs)

    @property
    def storage_bits(self) -> int:
        return self.r * self.field.m

    def __call__(self, x: int) -> int:
        return hash_eval(self, x)

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised ``hash_eval`` over an integer array."""
        xs = np.ascontiguousarray(xs, dtype=np.uint64)
        out = _poly_eval(self._coeff_array, xs, np.uint64(self.field.modulus), self.field.m)
        return (out & np.uint64((1 << self.out_bits) - 1)).astype(np.int64)

    def to_json(self) -> dict:
        width = (self.field.m + 3) // 4
        return {"m": self.field.m, "modulus": hex(self.field.modulus),
                "out_bits": self.out_bits,
                "coeffs": [format(c, f"0{width}x") for c in self.coeffs]}

    @classmethod
    def from_json(cls, doc: dict) -> "PolyHash":
        f = field_new(doc["m"])
        if int(doc["modulus"], 16) != f.modulus:
            raise ValueError(f"unexpected modulus {doc['modulus']} for m={doc['m']}")
        return cls(f, tuple(int(c, 16) for c in doc["coeffs"]), doc["out_bits"])


def hash_new(field: Gf2mField, r: int, out_bits: int, stream: SplitMix64) -> PolyHash:
    """Draw ``r`` uniform coefficients (low ``m`` bits of successive words)."""
    if r < 1:
        raise ValueError(f"r must be at least 1, got {r}")
    if not 1 <= out_bits <= field.m:
        raise ValueError(f"out_bits must be in [1, {field.m}], got {out_bits}")
    return PolyHash(field, tuple(stream.bits(field.m) for _ in range(r)), out_bits)


def hash_eval(h: PolyHash, x: int, counter: OpCounter | None = None) -> int:
    """Horner evaluation, then truncation to the low ``out_bits`` bits."""
    if not 0 <= x < h.field.order:
        raise ValueError(f"point {x} is not an element of GF(2^{h.field.m})")
    acc = h.coeffs[-1]
    for c in reversed(h.coeffs[:-1]):
        acc = gf_mul(h.field, acc, x) ^ c
    if counter is not None:
        counter.evals += 1
        counter.mults += h.r - 1
        counter.adds += h.r - 1
    return acc & ((1 << h.out_bits) - 1)


@numba.njit(cache=True)
def _poly_eval(coeffs, xs, modulus, m):
    one = np.uint64(1)
    zero = np.uint64(0)
    top = one << np.uint64(m)
    r = coeffs.shape[0]
    out = np.empty(xs.shape[0], dtype=np.uint64)
    for i in range(xs.shape[0]):
        x = xs[i]
        acc = coeffs[r - 1]
        for j in range(r - 2, -1, -1):
            a = acc
            b = x
            p = zero
            while b != zero:
                if b & one:
                    p ^= a
                b >>= one
                a <<= one
                if a & top:
                    a ^= modulus
            acc = p ^ coeffs[j]
        out[i] = acc
    return out


@dataclass(frozen=True)
class RwiseReport:
    m: int
    r: int
    out_bits: int
    points: tuple
    n_polys: int
    expected_count: int
    min_count: int
    max_count: int
    distinct_tuples: int

    @property
    def passed(self) -> bool:
        return (self.min_count == self.max_count == self.expected_count
                and self.distinct_tuples == 1 << (self.out_bits * self.r))


MAX_ENUMERATION = 1 << 20


def verify_rwise(m: int, r: int, points=None, out_bits: int | None = None) -> RwiseReport:
    """Enumerate every degree < r polynomial and tally output tuples.

    Exact r-wise independence means each of the 2^(b*r) truncated tuples
    appears exactly 2^((m-b)*r) times (once each at full width).
    """
    f = field_new(m)
    b = m if out_bits is None else out_bits
    if not 1 <= b <= m:
        raise ValueError(f"out_bits must be in [1, {m}]")
    if r < 1 or r > f.order:
        raise ValueError(f"need 1 <= r <= 2^m distinct points, got r={r}")
    if points is None:
        points = tuple(range(r))
    points = tuple(points)
    if len(points) != r or len(set(points)) != r or not all(0 <= x < f.order for x in points):
        raise ValueError(f"need {r} distinct field elements, got {points}")
    n_polys = 1 << (m * r)
    if n_polys > MAX_ENUMERATION:
        raise ValueError(f"2^{m * r} polynomials is too many to enumerate")
    counts: Counter = Counter()
    for coeffs in itertools.product(range(f.order), repeat=r):
        h = PolyHash(f, coeffs, b)
        counts[tuple(hash_eval(h, x) for x in points)] += 1
    return RwiseReport(m, r, b, points, n_polys, 1 << ((m - b) * r),
                       min(counts.values()), max(counts.values()), len(counts))
