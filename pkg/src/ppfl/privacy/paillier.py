"""Paillier additive homomorphic encryption, simple variant with g = n + 1.

Multiplying ciphertexts modulo n^2 adds the underlying plaintexts, and
raising a ciphertext to a plaintext scalar multiplies it; nothing else is
supported or needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..crypto import fast_powmod, gen_prime, mod_inverse, mod_pow, rand_bits
from ..errors import ConfigError, InputError
from .config import MIN_KEY_BITS


class PaillierPublicKey:
    """Public half of a keypair.

    Attributes:
        n: the modulus ``p * q``.
        g: the generator, fixed to ``n + 1``.
        nsquare: ``n ** 2``, where ciphertexts live.
    """

    def __init__(self, n):
        self.n = n
        self.g = n + 1
        self.nsquare = n * n

    def __repr__(self):
        return f"<PaillierPublicKey {self.n.bit_length()} bits>"

    def __eq__(self, other):
        return isinstance(other, PaillierPublicKey) and other.n == self.n

    def __hash__(self):
        return hash(self.n)

    def obfuscators(self, rng, count):
        """``count`` random values ``r^n mod n^2`` with ``r`` in ``[1, n)``."""
        nbits = self.n.bit_length() + 64
        out = []
        for _ in range(count):
            r = rand_bits(rng, nbits) % self.n or 1
            out.append(fast_powmod(r, self.n, self.nsquare))
        return out

    def raw_encrypt(self, plaintext, obfuscator):
        if not 0 <= plaintext < self.n:
            raise InputError("plaintext must lie in [0, n)")
        # g^m = (1 + n)^m = 1 + m*n  (mod n^2)
        return (1 + plaintext * self.n) % self.nsquare * obfuscator % self.nsquare

    def encrypt(self, plaintext, rng):
        return self.raw_encrypt(plaintext, self.obfuscators(rng, 1)[0])

    def encrypt_many(self, plaintexts, rng):
        obf = self.obfuscators(rng, len(plaintexts))
        n, nsq = self.n, self.nsquare
        for m in plaintexts:
            if not 0 <= m < n:
                raise InputError("plaintext must lie in [0, n)")
        return [(1 + m * n) % nsq * r % nsq for m, r in zip(plaintexts, obf)]

    def add(self, c1, c2):
        return c1 * c2 % self.nsquare

    def scale(self, c, k):
        return mod_pow(c, k, self.nsquare)


class PaillierPrivateKey:
    """Secret half: ``lam = lcm(p-1, q-1)`` and ``mu = lam^{-1} mod n``.

    :meth:`decrypt` works modulo ``p^2`` and ``q^2`` separately and joins the
    halves with the Chinese remainder theorem, which is roughly twice as
    fast as the single exponentiation modulo ``n^2`` done by
    :meth:`decrypt_textbook`. Both return the same plaintext.
    """

    def __init__(self, public_key, p, q):
        if p * q != public_key.n:
            raise ConfigError("p * q does not match the public modulus")
        self.public_key = public_key
        self.p, self.q = p, q
        self.lam = math.lcm(p - 1, q - 1)
        self.mu = mod_inverse(self.lam, public_key.n)
        self.psquare, self.qsquare = p * p, q * q
        self.hp = self._h(p, self.psquare)
        self.hq = self._h(q, self.qsquare)
        self.q_inverse = mod_inverse(q, p)

    def _h(self, prime, square):
        # inverse of L(g^(prime-1) mod prime^2) modulo prime
        x = mod_pow(self.public_key.g, prime - 1, square)
        return mod_inverse((x - 1) // prime, prime)

    def __repr__(self):
        return f"<PaillierPrivateKey for {self.public_key!r}>"

    def _check(self, ciphertext):
        if not 0 < ciphertext < self.public_key.nsquare:
            raise InputError("ciphertext must lie in (0, n^2)")

    def decrypt(self, ciphertext):
        self._check(ciphertext)
        p, q = self.p, self.q
        mp = (fast_powmod(ciphertext % self.psquare, p - 1, self.psquare) - 1) // p * self.hp % p
        mq = (fast_powmod(ciphertext % self.qsquare, q - 1, self.qsquare) - 1) // q * self.hq % q
        return mq + (mp - mq) * self.q_inverse % p * q

    def decrypt_textbook(self, ciphertext):
        """``L(c^lam mod n^2) * mu mod n`` with ``L(x) = (x - 1) / n``."""
        self._check(ciphertext)
        n, nsq = self.public_key.n, self.public_key.nsquare
        u = mod_pow(ciphertext, self.lam, nsq)
        return (u - 1) // n * self.mu % n


@dataclass(frozen=True)
class PaillierKeypair:
    public: PaillierPublicKey
    secret: PaillierPrivateKey


def paillier_keygen(key_bits, rng):
    """Keypair whose modulus has exactly ``key_bits`` bits."""
    if key_bits < MIN_KEY_BITS:
        raise ConfigError(f"key bits must be >= {MIN_KEY_BITS}, got {key_bits}")
    half = key_bits // 2
    while True:
        p = gen_prime(half, rng, top_bits=2)
        q = gen_prime(key_bits - half, rng, top_bits=2)
        if p == q:
            continue
        n = p * q
        if n.bit_length() == key_bits and math.gcd(n, (p - 1) * (q - 1)) == 1:
            break
    public = PaillierPublicKey(n)
    return PaillierKeypair(public, PaillierPrivateKey(public, p, q))
