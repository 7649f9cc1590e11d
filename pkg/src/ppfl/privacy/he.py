"""Homomorphic aggregation: clients encrypt, the server multiplies, a key
authority decrypts only the folded sum."""

from __future__ import annotations

import numpy as np

from ..errors import EncodeOverflowError, InputError
from .codec import check_bound, fp_decode, fp_encode
from .envelope import PrivacyEnvelope


def he_protect(update, public_key, cfg, rng):
    n = public_key.n
    update = check_bound(update, cfg.max_abs_value)
    encoded = [fp_encode(float(x), cfg.scale_bits, n) for x in update]
    return PrivacyEnvelope("ciphertexts", public_key.encrypt_many(encoded, rng))


def he_aggregate(envelopes, public_key):
    """Coordinate-wise product of ciphertexts mod n^2 (plaintext addition)."""
    if not envelopes:
        raise InputError("need at least one envelope")
    dim = len(envelopes[0].payload)
    if any(len(e.payload) != dim for e in envelopes):
        raise InputError("ciphertext envelopes have different dimensions")
    nsq = public_key.nsquare
    total = list(envelopes[0].payload)
    for env in envelopes[1:]:
        total = [a * b % nsq for a, b in zip(total, env.payload)]
    return total


def he_recover(ciphertexts, keypair, num_clients, cfg):
    """Decrypt the folded sum, decode, and divide by the client count."""
    n = keypair.public.n
    bound = num_clients * cfg.max_abs_value
    sums = np.array(
        [fp_decode(keypair.secret.decrypt(c), cfg.scale_bits, n) for c in ciphertexts],
        dtype=np.float64,
    )
    if sums.size and np.abs(sums).max() > bound + 2.0**-cfg.scale_bits * num_clients:
        raise EncodeOverflowError(
            f"decoded sum {np.abs(sums).max():g} exceeds the configured bound {bound:g}"
        )
    return sums / num_clients
