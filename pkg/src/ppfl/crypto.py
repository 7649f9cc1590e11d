"""Integer arithmetic, primality and deterministic randomness.

Python's ``int`` is already an exact arbitrary-precision unsigned/signed
integer, so it serves directly as the big-integer type. Modular
exponentiation goes through gmpy2 when it is installed (several times faster
on 512-2048 bit moduli) and falls back to the builtin ``pow``.

WARNING: every random value in this package, including cryptographic masks,
shares, Paillier obfuscators and key material, is drawn from a seeded,
reproducible stream. That is what a simulator needs and exactly what a real
deployment must never do. Nothing here is production-secure.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import InputError, NoInverseError

try:
    import gmpy2

    def fast_powmod(base, exp, modulus):
        return int(gmpy2.powmod(base, exp, modulus))

except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    gmpy2 = None

    def fast_powmod(base, exp, modulus):
        return pow(base, exp, modulus)


RING_BITS = 64
MILLER_RABIN_ROUNDS = 40

_SMALL_PRIMES = [
    p for p in range(3, 2000) if all(p % d for d in range(2, int(p**0.5) + 1))
]


class Stream(IntEnum):
    """First component of every stream id, so purposes never share draws."""

    DATA = 1
    PARTITION = 2
    INIT = 3
    TRAIN = 4
    DP_NOISE = 5
    SA_MASK = 6
    SMPC_SHARES = 7
    HE_OBFUSCATE = 8
    HE_KEYGEN = 9
    SPLIT = 10


def seeded_rng(master_seed, stream_id=()):
    """Return an independent, reproducible ``numpy.random.Generator``.

    Streams are addressed by ``(master_seed, stream_id)`` where ``stream_id``
    is an int or a tuple of non-negative ints. Equal addresses give identical
    sequences; distinct addresses give statistically independent ones.
    """
    if isinstance(stream_id, (int, np.integer)):
        stream_id = (int(stream_id),)
    key = tuple(int(s) for s in stream_id)
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(seq))


def rand_bits(rng, bits):
    """Uniform integer in ``[0, 2**bits)``."""
    if bits <= 0:
        return 0
    nbytes = (bits + 7) // 8
    value = int.from_bytes(rng.bytes(nbytes), "big")
    return value >> (nbytes * 8 - bits)


def rand_below(rng, n):
    """Uniform integer in ``[0, n)`` by rejection sampling."""
    if n < 1:
        raise InputError("upper bound must be >= 1")
    bits = (n - 1).bit_length()
    while True:
        value = rand_bits(rng, bits)
        if value < n:
            return value


def mod_pow(base, exp, modulus):
    """``base ** exp mod modulus`` for ``exp >= 0`` and ``modulus >= 2``."""
    if modulus < 2:
        raise InputError(f"modulus must be >= 2, got {modulus}")
    if exp < 0:
        raise InputError("negative exponents are not supported; use mod_inverse")
    return fast_powmod(base % modulus, exp, modulus)


def mod_inverse(a, m):
    """Inverse of ``a`` modulo ``m`` via the iterative extended Euclid algorithm."""
    if m < 2:
        raise InputError(f"modulus must be >= 2, got {m}")
    old_r, r = a % m, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise NoInverseError(f"{a} has no inverse modulo {m} (gcd={old_r})")
    return old_s % m


def is_probable_prime(n, rng, rounds=MILLER_RABIN_ROUNDS):
    """Miller-Rabin test with ``rounds`` random bases drawn from ``rng``."""
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = 2 + rand_below(rng, n - 3)
        x = fast_powmod(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def gen_prime(bits, rng, top_bits=1):
    """Random probable prime with exactly ``bits`` bits.

    ``top_bits`` leading bits are forced to one; keygen uses 2 so that the
    product of two such primes has exactly ``2 * bits`` bits.
    """
    if bits < 16:
        raise InputError(f"prime size must be >= 16 bits, got {bits}")
    high = ((1 << top_bits) - 1) << (bits - top_bits)
    while True:
        candidate = rand_bits(rng, bits) | high | 1
        if is_probable_prime(candidate, rng):
            return candidate


@dataclass(frozen=True)
class FieldElement:
    """Element of the ring Z_q; q defaults to 2**64 with natural wrapping."""

    value: int
    modulus: int = 1 << RING_BITS

    def __post_init__(self):
        if self.modulus < 2:
            raise InputError("modulus must be >= 2")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise InputError("field elements from different rings")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.modulus)

    def __rsub__(self, other):
        return FieldElement(self._coerce(other) - self.value, self.modulus)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)

    def __int__(self):
        return self.value


def ring_mask(ring_bits):
    return np.uint64((1 << ring_bits) - 1)


def uniform_ring(rng, size, ring_bits=RING_BITS):
    """Vector of uniform elements of Z_{2**ring_bits} as ``uint64``."""
    raw = rng.integers(0, 1 << 64, size=size, dtype=np.uint64, endpoint=False)
    if ring_bits < 64:
        raw &= ring_mask(ring_bits)
    return raw
