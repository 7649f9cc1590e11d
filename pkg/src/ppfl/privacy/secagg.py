"""Secure aggregation by pairwise additive masks that cancel in the sum.

For each unordered client pair {i, j} both ends derive the same mask from a
stream keyed by (master_seed, round, i, j); in a deployment that seed would
come from a pairwise key agreement. Client ``i`` adds masks shared with
higher ids and subtracts masks shared with lower ids, so the server's ring
sum is exactly the sum of the encoded updates. No dropout recovery: every
roster member must report.
"""

from __future__ import annotations

from ..crypto import Stream, ring_mask, seeded_rng, uniform_ring
from ..errors import InputError, ProtocolError
from .codec import check_bound, decode_ring, encode_ring, ring_sum
from .envelope import PrivacyEnvelope


def pair_mask(master_seed, round_index, i, j, dim, ring_bits):
    lo, hi = min(i, j), max(i, j)
    rng = seeded_rng(master_seed, (Stream.SA_MASK, round_index, lo, hi))
    return uniform_ring(rng, dim, ring_bits)


def sa_protect(update, client_id, roster, round_index, master_seed, cfg):
    if client_id not in roster:
        raise ProtocolError(f"client {client_id} is not on the roster")
    check_bound(update, cfg.max_abs_value)
    masked = encode_ring(update, cfg.scale_bits, cfg.ring_bits)
    for other in roster:
        if other == client_id:
            continue
        mask = pair_mask(master_seed, round_index, client_id, other, masked.size, cfg.ring_bits)
        if other > client_id:
            masked = masked + mask
        else:
            masked = masked - mask
    if cfg.ring_bits < 64:
        masked &= ring_mask(cfg.ring_bits)
    return PrivacyEnvelope("masked", masked, client_id=client_id, round_index=round_index)


def sa_aggregate(envelopes, cfg, roster):
    """Ring-sum all masked vectors, decode, and return the mean."""
    if not envelopes:
        raise InputError("need at least one envelope")
    seen = [e.client_id for e in envelopes]
    missing = sorted(set(roster) - set(seen))
    if missing:
        raise ProtocolError(f"roster members {missing} did not report; dropout is unsupported")
    if len(seen) != len(set(seen)) or set(seen) - set(roster):
        raise ProtocolError("duplicate or unknown client in masked envelopes")
    if len({e.round_index for e in envelopes}) != 1:
        raise ProtocolError("masked envelopes come from different rounds")
    dims = {e.payload.size for e in envelopes}
    if len(dims) != 1:
        raise InputError("masked envelopes have different dimensions")
    total = ring_sum([e.payload for e in envelopes], cfg.ring_bits)
    return decode_ring(total, cfg.scale_bits, cfg.ring_bits) / len(envelopes)
