"""Fixed-point encoding of reals into Z_m, negatives stored as m - |v|."""

from __future__ import annotations

import math

import numpy as np

from ..crypto import ring_mask
from ..errors import EncodeOverflowError


def fp_encode(x, scale_bits, modulus):
    """``round(x * 2**scale_bits)`` in centred representation modulo ``modulus``."""
    if not math.isfinite(x):
        raise EncodeOverflowError(f"cannot encode non-finite value {x}")
    scaled = round(x * 2.0**scale_bits)
    if 2 * abs(scaled) >= modulus:
        raise EncodeOverflowError(
            f"|{x}| * 2^{scale_bits} does not fit below half the modulus"
        )
    return scaled % modulus


def fp_decode(value, scale_bits, modulus):
    value %= modulus
    if 2 * value >= modulus:
        value -= modulus
    return value / 2.0**scale_bits


def check_bound(values, max_abs):
    """Enforce the per-coordinate bound the overflow guard was sized for."""
    values = np.asarray(values, dtype=np.float64)
    if values.size and not np.abs(values).max() <= max_abs:
        raise EncodeOverflowError(
            f"update coordinate {np.abs(values).max():g} exceeds max_abs_value {max_abs:g}"
        )
    return values


def encode_ring(values, scale_bits, ring_bits):
    """Vectorised :func:`fp_encode` for the ring Z_{2**ring_bits} (``uint64``)."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise EncodeOverflowError("cannot encode non-finite values")
    scaled = np.rint(values * 2.0**scale_bits)
    if values.size and np.abs(scaled).max() >= 2.0 ** (ring_bits - 1):
        raise EncodeOverflowError(
            f"values up to {np.abs(values).max():g} overflow the 2^{ring_bits} ring "
            f"at scale 2^{scale_bits}"
        )
    encoded = scaled.astype(np.int64).view(np.uint64)
    if ring_bits < 64:
        encoded = encoded & ring_mask(ring_bits)
    return encoded


def decode_ring(encoded, scale_bits, ring_bits):
    encoded = np.asarray(encoded, dtype=np.uint64)
    if ring_bits == 64:
        signed = encoded.view(np.int64)
    else:
        encoded = encoded & ring_mask(ring_bits)
        half = np.uint64(1 << (ring_bits - 1))
        signed = encoded.astype(np.int64) - np.where(encoded >= half, np.int64(1 << ring_bits), 0)
    return signed.astype(np.float64) / 2.0**scale_bits


def ring_sum(vectors, ring_bits):
    """Sum ``uint64`` vectors in Z_{2**ring_bits}; uint64 addition wraps mod 2^64."""
    total = np.zeros_like(vectors[0])
    for v in vectors:
        total += v
    if ring_bits < 64:
        total &= ring_mask(ring_bits)
    return total
