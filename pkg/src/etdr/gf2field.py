"""Arithmetic in binary extension fields GF(2^d).

Conventions, shared by every caller in this package:

  * A field element is a Python int. Bit i of the int is the coefficient
    of x^i, so the polynomial basis is little-endian and an element of
    GF(2^d) satisfies 0 <= value < 2**d.
  * Addition is XOR. Multiplication is carry-less (shift-and-add) followed
    by reduction modulo a fixed irreducible polynomial for the degree.
  * The reduction polynomial mask includes the leading x^d term, so
    mask.bit_length() == d + 1. REDUCTION_POLY pins one polynomial per
    degree; it is a wire-compatibility constant. Two endpoints that
    disagree on it compute different hashes, so the table is part of the
    protocol definition (see README for the documented list).

The table holds, for each degree, the irreducible polynomial with the
fewest nonzero terms, ties broken by smallest integer mask. Degrees above
the table are served by a deterministic cached search applying the same
rule, so all processes agree without coordination.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .errors import ParameterError

# fmt: off
REDUCTION_POLY: dict[int, int] = {
    1: 0x3, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11B,
    9: 0x203, 10: 0x409, 11: 0x805, 12: 0x1009, 13: 0x201B, 14: 0x4021,
    15: 0x8003, 16: 0x1002B, 17: 0x20009, 18: 0x40009, 19: 0x80027,
    20: 0x100009, 21: 0x200005, 22: 0x400003, 23: 0x800021, 24: 0x100001B,
    25: 0x2000009, 26: 0x400001B, 27: 0x8000027, 28: 0x10000003,
    29: 0x20000005, 30: 0x40000003, 31: 0x80000009, 32: 0x10000008D,
    33: 0x200000401, 34: 0x400000081, 35: 0x800000005, 36: 0x1000000201,
    37: 0x2000000053, 38: 0x4000000063, 39: 0x8000000011, 40: 0x10000000039,
    41: 0x20000000009, 42: 0x40000000081, 43: 0x80000000059,
    44: 0x100000000021, 45: 0x20000000001B, 46: 0x400000000003,
    47: 0x800000000021, 48: 0x100000000002D, 49: 0x2000000000201,
    50: 0x400000000001D, 51: 0x800000000004B, 52: 0x10000000000009,
    53: 0x20000000000047, 54: 0x40000000000201, 55: 0x80000000000081,
    56: 0x100000000000095, 57: 0x200000000000011, 58: 0x400000000080001,
    59: 0x800000000000095, 60: 0x1000000000000003, 61: 0x2000000000000027,
    62: 0x4000000020000001, 63: 0x8000000000000003, 64: 0x1000000000000001B,
    65: 0x20000000000040001, 66: 0x40000000000000009,
    67: 0x80000000000000027, 68: 0x100000000000000201,
    69: 0x200000000000000065, 70: 0x40000000000000002B,
    71: 0x800000000000000041, 72: 0x1000000000000000609,
    73: 0x2000000000002000001, 74: 0x4000000000800000001,
    75: 0x800000000000000004B, 76: 0x10000000000000200001,
    77: 0x20000000000000000065, 78: 0x40000000000000000069,
    79: 0x80000000000000000201, 80: 0x100000000000000000215,
    81: 0x200000000000000000011, 82: 0x40000000000000000010B,
    83: 0x800000000000000000095, 84: 0x1000000000000000000021,
    85: 0x2000000000000000000107, 86: 0x4000000000000000200001,
    87: 0x8000000000000000002001, 88: 0x100000000000000000000C5,
    89: 0x20000000000004000000001, 90: 0x40000000000000008000001,
    91: 0x80000000000000000000123, 92: 0x100000000000000000200001,
    93: 0x200000000000000000000005, 94: 0x400000000000000000200001,
    95: 0x800000000000000000000801, 96: 0x1000000000000000000000641,
    97: 0x2000000000000000000000041, 98: 0x4000000000000000000000801,
    99: 0x800000000000000000000004B, 100: 0x10000000000000000000008001,
    101: 0x200000000000000000000000C3, 102: 0x40000000000000000020000001,
    103: 0x80000000000000000000000201, 104: 0x10000000000000000000000001B,
    105: 0x200000000000000000000000011, 106: 0x400000000000000000000008001,
    107: 0x800000000000000000000000291, 108: 0x1000000000000000000000020001,
    109: 0x2000000000000000000000000035, 110: 0x4000000000000000000200000001,
    111: 0x8000000000000000000000000401, 112: 0x10000000000000000000000000039,
    113: 0x20000000000000000000000000201, 114: 0x4000000000000000000000000002D,
    115: 0x800000000000000000000000001A1, 116: 0x100000000000000000000000000017,
    117: 0x200000000000000000000000000027, 118: 0x400000000000000000000200000001,
    119: 0x800000000000000000000000000101, 120: 0x100000000000000000000000000001B,
    121: 0x2000000000000000000000000040001, 122: 0x4000000000000000000000000000047,
    123: 0x8000000000000000000000000000005, 124: 0x10000000000000000000000000080001,
    125: 0x200000000000000000000000000000E1, 126: 0x40000000000000000000000000200001,
    127: 0x80000000000000000000000000000003, 128: 0x100000000000000000000000000000087,
}
# fmt: on

_MUL_TABLE_MAX_DEGREE = 8  # dense tables up to 2^8 x 2^8 entries


def _poly_mod(a: int, p: int) -> int:
    dp = p.bit_length()
    da = a.bit_length()
    while da >= dp:
        a ^= p << (da - dp)
        da = a.bit_length()
    return a


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _poly_mod(a, b)
    return a


_SPREAD8 = [sum(((b >> i) & 1) << (2 * i) for i in range(8)) for b in range(256)]


def _poly_square(a: int) -> int:
    # carry-less square: bit i goes to bit 2i
    r, sh = 0, 0
    while a:
        r |= _SPREAD8[a & 0xFF] << sh
        a >>= 8
        sh += 16
    return r


def _prime_divisors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(poly: int) -> bool:
    """Whether `poly` (full mask, leading term included) is irreducible over GF(2).

    Uses the classic criterion: x^(2^d) == x mod poly, and for every prime
    divisor q of d, gcd(x^(2^(d/q)) - x, poly) == 1.
    """
    d = poly.bit_length() - 1
    if d < 1:
        return False
    if d == 1:
        return True
    if not poly & 1:
        return False  # x divides it
    t = 2  # the polynomial x
    for _ in range(d):
        t = _poly_mod(_poly_square(t), poly)
    if t != 2:
        return False
    for q in _prime_divisors(d):
        t = 2
        for _ in range(d // q):
            t = _poly_mod(_poly_square(t), poly)
        if _poly_gcd(t ^ 2, poly) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def reduction_poly(degree: int) -> int:
    """The pinned reduction polynomial for GF(2^degree) (full mask)."""
    if degree < 1:
        raise ParameterError(f"degree must be >= 1, got {degree}")
    if degree in REDUCTION_POLY:
        return REDUCTION_POLY[degree]
    # same rule as the frozen table: fewest terms, then smallest mask
    for weight in range(3, degree + 2, 2):
        best = None
        for mids in combinations(range(1, degree), weight - 2):
            p = (1 << degree) | 1
            for m in mids:
                p |= 1 << m
            if best is not None and p >= best:
                continue
            if is_irreducible(p):
                best = p
        if best is not None:
            return best
    raise AssertionError("unreachable: some irreducible of each degree exists")


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(a: int, b: int, degree: int, poly: int | None = None) -> int:
    """Product of a and b in GF(2^degree), shift-and-add with inline reduction."""
    if poly is None:
        poly = reduction_poly(degree)
    top = 1 << degree
    mask = top - 1
    if a < 0 or b < 0 or a > mask or b > mask:
        raise ParameterError("operand outside the field")
    red = poly & mask  # reduction of x^degree
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a = (a ^ poly) & mask
    return r


class GF2:
    """Multiplication context for one degree.

    Degrees up to 8 get a dense product table (built lazily, shared per
    process); larger degrees run shift-and-add. fixed_mul(k) returns a
    fast multiply-by-k closure backed by byte-indexed tables, which is
    what the hashing hot paths use.
    """

    _instances: dict[int, "GF2"] = {}

    def __init__(self, degree: int):
        self.degree = degree
        self.poly = reduction_poly(degree)
        self.order = 1 << degree
        self._table: list[list[int]] | None = None

    @classmethod
    def get(cls, degree: int) -> "GF2":
        inst = cls._instances.get(degree)
        if inst is None:
            inst = cls._instances[degree] = cls(degree)
        return inst

    def _dense_table(self) -> list[list[int]]:
        tab = self._table
        if tab is None:
            q = self.order
            tab = [[gf_mul(a, b, self.degree, self.poly) for b in range(q)] for a in range(q)]
            self._table = tab
        return tab

    def mul(self, a: int, b: int) -> int:
        if self.degree <= _MUL_TABLE_MAX_DEGREE:
            return self._dense_table()[a][b]
        return gf_mul(a, b, self.degree, self.poly)

    def fixed_mul(self, k: int):
        """A closure computing k*a for arbitrary a, O(degree/8) lookups per call."""
        if self.degree <= _MUL_TABLE_MAX_DEGREE:
            row = self._dense_table()[k]
            return row.__getitem__
        # powers[j] = k * x^j; then k*a = XOR over set bits of a
        top, mask, poly = 1 << self.degree, (1 << self.degree) - 1, self.poly
        powers = []
        cur = k
        for _ in range(self.degree):
            powers.append(cur)
            cur <<= 1
            if cur & top:
                cur = (cur ^ poly) & mask
        nchunks = (self.degree + 7) // 8
        chunk_tabs = []
        for c in range(nchunks):
            tab = [0] * 256
            base = 8 * c
            for bit in range(min(8, self.degree - base)):
                p = powers[base + bit]
                step = 1 << bit
                for lo in range(0, 256, 2 * step):
                    for b in range(lo + step, lo + 2 * step):
                        tab[b] = tab[b - step] ^ p
            chunk_tabs.append(tab)

        def mul_by_k(a: int) -> int:
            r = 0
            for c in range(nchunks):
                byte = (a >> (8 * c)) & 0xFF
                if byte:
                    r ^= chunk_tabs[c][byte]
            return r

        return mul_by_k

    def pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r
