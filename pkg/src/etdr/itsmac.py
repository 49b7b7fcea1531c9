"""One-time pads and information-theoretic one-time message authentication.

OtpPad is a strict single-use ledger: bits are taken front to back, the
consumed offset only grows, and running past the end raises. Encryption is
XOR against the taken slice, so decryption is the same operation on the
peer's mirror copy.

Tags are tag_bits long. A MacKey couples a hash key kh, an element of the
double-width field GF(2^(2*tag_bits)), with a fresh tag_bits-bit pad:

    tag = low_tag_bits( kh * poly_hash(kh, context || message) ) XOR pad

where the hash runs over blocks of 2*tag_bits bits. Multiplying the digest
by kh once more removes the key-independent constant coefficient, and the
low-bits truncation is GF(2)-linear, so for any two distinct inputs and any
target difference the tag difference matches on at most
ceil(input_bits / (2*tag_bits)) * 2^-tag_bits of the hash keys. The pad
hides the digest completely, which is what lets one hash key serve several
rounds as long as every round burns a fresh pad; MacKey enforces the
single use of the pad structurally.

forgery_bound() is the coarser budget formula the rest of the suite quotes,
ceil(msg_bits/tag_bits - 1) * 2^-tag_bits; the construction's own bound,
construction_forgery_bound(), is at least as small whenever
msg_bits > tag_bits, and tests verify both against an exhaustive game.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import KeyMaterialError, ParameterError
from .au2hash import poly_hash
from .bits import bytes_to_bits
from .gf2field import GF2


class OtpPad:
    """Single-use pad over a fixed pool of bits."""

    def __init__(self, bits: int, bit_len: int):
        if bit_len < 0 or bits < 0 or bits.bit_length() > bit_len:
            raise ParameterError("pad value wider than its declared length")
        self._bits = bits
        self.bit_len = bit_len
        self.consumed = 0

    @property
    def remaining(self) -> int:
        return self.bit_len - self.consumed

    def take(self, nbits: int) -> int:
        if nbits < 0:
            raise ParameterError("cannot take a negative number of bits")
        if nbits > self.remaining:
            raise KeyMaterialError(
                f"pad exhausted: asked for {nbits} bits, {self.remaining} left"
            )
        out = (self._bits >> self.consumed) & ((1 << nbits) - 1)
        self.consumed += nbits
        return out

    def xor_with(self, value: int, nbits: int) -> int:
        """Encrypt or decrypt nbits of value against the next pad slice."""
        if value < 0 or value.bit_length() > nbits:
            raise ParameterError("value wider than the requested slice")
        return value ^ self.take(nbits)


class MacKey:
    """One round's authentication key: shared hash key plus a one-shot pad."""

    def __init__(self, hash_key: int, pad: int, tag_bits: int):
        if tag_bits < 1:
            raise ParameterError("tag must contain at least one bit")
        if hash_key < 0 or hash_key.bit_length() > 2 * tag_bits:
            raise ParameterError("hash key must lie in GF(2^(2*tag_bits))")
        if pad < 0 or pad.bit_length() > tag_bits:
            raise ParameterError("pad must be tag_bits wide")
        self.hash_key = hash_key
        self.pad = pad
        self.tag_bits = tag_bits
        self._consumed = False

    @property
    def consumed(self) -> bool:
        return self._consumed

    def _burn(self) -> None:
        if self._consumed:
            raise KeyMaterialError("MacKey already used; a pad authenticates one message")
        self._consumed = True


def _tag_core(key: MacKey, value: int, bit_len: int) -> int:
    field = GF2.get(2 * key.tag_bits)
    digest = poly_hash(key.hash_key, value, bit_len, 2 * key.tag_bits)
    shifted = field.mul(key.hash_key, digest)
    return (shifted & ((1 << key.tag_bits) - 1)) ^ key.pad


def mac_tag_bits(key: MacKey, value: int, bit_len: int) -> int:
    """Tag for a raw bit-string; consumes the key."""
    key._burn()
    return _tag_core(key, value, bit_len)


def mac_verify_bits(key: MacKey, value: int, bit_len: int, tag: int) -> bool:
    """Check a tag against a raw bit-string; consumes the key either way."""
    key._burn()
    return _tag_core(key, value, bit_len) == tag


def _join(message: bytes, context: bytes) -> tuple[int, int]:
    data = context + message
    return bytes_to_bits(data), 8 * len(data)


def mac_tag(key: MacKey, message: bytes, context: bytes = b"") -> int:
    value, bits = _join(message, context)
    return mac_tag_bits(key, value, bits)


def mac_verify(key: MacKey, message: bytes, tag: int, context: bytes = b"") -> bool:
    value, bits = _join(message, context)
    return mac_verify_bits(key, value, bits, tag)


def forgery_bound(msg_bits: int, tag_bits: int) -> Fraction:
    """Budget formula quoted by the protocol: ceil(msg_bits/tag_bits - 1) * 2^-tag_bits."""
    if msg_bits < 1 or tag_bits < 1:
        raise ParameterError("message and tag must contain at least one bit")
    return Fraction(max(-(-msg_bits // tag_bits) - 1, 0), 1 << tag_bits)


def construction_forgery_bound(msg_bits: int, tag_bits: int) -> Fraction:
    """What the implemented construction actually guarantees per substitution."""
    if msg_bits < 1 or tag_bits < 1:
        raise ParameterError("message and tag must contain at least one bit")
    return Fraction(-(-msg_bits // (2 * tag_bits)), 1 << tag_bits)
