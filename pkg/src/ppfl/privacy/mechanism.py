"""One interface over the five transport modes.

Client side: ``protect`` turns an update into an envelope. Server side:
``aggregate`` takes the serialized envelopes exactly as received on the wire
and returns the mean update. Everything ``aggregate`` does (parsing,
folding, decryption by the HE key authority, SMPC party folds) counts as
server time.

``individual_visible`` says whether the server can legitimately read a single
client's update (true for ``none`` and ``dp``); ``reveal`` returns that view.
"""

from __future__ import annotations

from ..crypto import Stream, seeded_rng
from ..errors import ProtocolError
from .dp import dp_aggregate, dp_protect
from .envelope import PrivacyEnvelope
from .he import he_aggregate, he_protect, he_recover
from .paillier import paillier_keygen
from .secagg import sa_aggregate, sa_protect
from .smpc import route_shares, smpc_party_fold, smpc_protect, smpc_recover


class Mechanism:
    name = "none"
    individual_visible = True

    def __init__(self, cfg, roster, master_seed):
        self.cfg = cfg
        self.roster = sorted(roster)
        self.master_seed = master_seed

    def protect(self, client_id, update, round_index):
        return PrivacyEnvelope("plain", update)

    def parse(self, wires):
        return [PrivacyEnvelope.from_bytes(w) for w in wires]

    def aggregate(self, wires, round_index):
        envelopes = self.parse(wires)
        return dp_aggregate(envelopes)

    def reveal(self, wire):
        if not self.individual_visible:
            raise ProtocolError(f"{self.name}: the server cannot read individual updates")
        return PrivacyEnvelope.from_bytes(wire).payload


class DPMechanism(Mechanism):
    name = "dp"

    def protect(self, client_id, update, round_index):
        rng = seeded_rng(self.master_seed, (Stream.DP_NOISE, round_index, client_id))
        return dp_protect(update, self.cfg, rng)


class HEMechanism(Mechanism):
    """The keypair belongs to a key authority; the server only folds."""

    name = "he"
    individual_visible = False

    def __init__(self, cfg, roster, master_seed):
        super().__init__(cfg, roster, master_seed)
        self.keypair = paillier_keygen(cfg.key_bits, seeded_rng(master_seed, Stream.HE_KEYGEN))

    @property
    def public_key(self):
        return self.keypair.public

    def protect(self, client_id, update, round_index):
        rng = seeded_rng(self.master_seed, (Stream.HE_OBFUSCATE, round_index, client_id))
        return he_protect(update, self.public_key, self.cfg, rng)

    def aggregate(self, wires, round_index):
        folded = he_aggregate(self.parse(wires), self.public_key)
        return he_recover(folded, self.keypair, len(wires), self.cfg)


class SAMechanism(Mechanism):
    name = "sa"
    individual_visible = False

    def protect(self, client_id, update, round_index):
        return sa_protect(update, client_id, self.roster, round_index, self.master_seed, self.cfg)

    def aggregate(self, wires, round_index):
        envelopes = self.parse(wires)
        if any(e.round_index != round_index for e in envelopes):
            raise ProtocolError("masked envelope from a stale round")
        return sa_aggregate(envelopes, self.cfg, self.roster)


class SMPCMechanism(Mechanism):
    """Each client's bundle is split on receipt: share j goes to party j."""

    name = "smpc"
    individual_visible = False

    def protect(self, client_id, update, round_index):
        rng = seeded_rng(self.master_seed, (Stream.SMPC_SHARES, round_index, client_id))
        return smpc_protect(update, self.cfg.num_parties, rng, self.cfg)

    def aggregate(self, wires, round_index):
        per_party = route_shares(self.parse(wires), self.cfg.num_parties)
        totals = smpc_party_fold(per_party, self.cfg.ring_bits)
        return smpc_recover(totals, len(wires), self.cfg)


_REGISTRY = {
    "none": Mechanism,
    "dp": DPMechanism,
    "he": HEMechanism,
    "sa": SAMechanism,
    "smpc": SMPCMechanism,
}


def make_mechanism(cfg, roster, master_seed):
    cfg.validate(num_clients=len(roster))
    return _REGISTRY[cfg.mechanism](cfg, roster, master_seed)
