"""k-party additive secret sharing of encoded updates."""

from __future__ import annotations

from ..crypto import ring_mask, uniform_ring
from ..errors import InputError, ProtocolError
from .codec import check_bound, decode_ring, encode_ring, ring_sum
from .envelope import PrivacyEnvelope


def smpc_protect(update, k, rng, cfg):
    """Split the encoded update into ``k`` shares; any ``k - 1`` are uniform."""
    if k < 2:
        raise ProtocolError(f"need at least 2 parties, got {k}")
    check_bound(update, cfg.max_abs_value)
    encoded = encode_ring(update, cfg.scale_bits, cfg.ring_bits)
    shares = [uniform_ring(rng, encoded.size, cfg.ring_bits) for _ in range(k - 1)]
    last = encoded - ring_sum(shares, cfg.ring_bits)
    if cfg.ring_bits < 64:
        last &= ring_mask(cfg.ring_bits)
    shares.append(last)
    return PrivacyEnvelope("shares", shares)


def route_shares(envelopes, k):
    """Per-party share lists: party ``j`` receives share ``j`` of every client."""
    per_party = [[] for _ in range(k)]
    for env in envelopes:
        if len(env.payload) != k:
            raise ProtocolError(f"envelope carries {len(env.payload)} shares, expected {k}")
        for j, share in enumerate(env.payload):
            per_party[j].append(share)
    return per_party


def smpc_party_fold(per_party_shares, ring_bits=64):
    """Each party sums the shares it holds; returns one total per party."""
    if not per_party_shares or any(not shares for shares in per_party_shares):
        raise InputError("every party needs at least one share")
    return [ring_sum(shares, ring_bits) for shares in per_party_shares]


def smpc_recover(party_totals, num_clients, cfg, k=None):
    k = cfg.num_parties if k is None else k
    if len(party_totals) != k:
        raise ProtocolError(f"expected {k} party totals, got {len(party_totals)}")
    total = ring_sum(party_totals, cfg.ring_bits)
    return decode_ring(total, cfg.scale_bits, cfg.ring_bits) / num_clients
