"""Privacy layers applied to client updates on their way to the server."""

from .codec import decode_ring, encode_ring, fp_decode, fp_encode
from .config import MECHANISMS, PrivacyConfig
from .dp import clip, dp_aggregate, dp_protect
from .envelope import PrivacyEnvelope
from .he import he_aggregate, he_protect, he_recover
from .mechanism import Mechanism, make_mechanism
from .paillier import PaillierKeypair, PaillierPrivateKey, PaillierPublicKey, paillier_keygen
from .secagg import pair_mask, sa_aggregate, sa_protect
from .smpc import route_shares, smpc_party_fold, smpc_protect, smpc_recover

__all__ = [
    "MECHANISMS",
    "Mechanism",
    "PaillierKeypair",
    "PaillierPrivateKey",
    "PaillierPublicKey",
    "PrivacyConfig",
    "PrivacyEnvelope",
    "clip",
    "decode_ring",
    "dp_aggregate",
    "dp_protect",
    "encode_ring",
    "fp_decode",
    "fp_encode",
    "he_aggregate",
    "he_protect",
    "he_recover",
    "make_mechanism",
    "paillier_keygen",
    "pair_mask",
    "route_shares",
    "sa_aggregate",
    "sa_protect",
    "smpc_party_fold",
    "smpc_protect",
    "smpc_recover",
]
