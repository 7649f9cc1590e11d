"""On-the-wire form of a protected update and its byte format.

Every envelope serialises as one tag byte followed by a variant body. All
integers in headers are unsigned 32-bit little-endian (``u32``).

=============  ===  =========================================================
variant        tag  body
=============  ===  =========================================================
plain          0    ``u32 count`` then ``count`` float64 LE
noised         1    same as plain
masked         2    ``u32 client_id``, ``u32 round``, ``u32 count``, ``count`` u64 LE
shares         3    ``u32 parties``; per party ``u32 count`` then ``count`` u64 LE
ciphertexts    4    ``u32 count``; per ciphertext ``u32 nbytes`` then the value as
                    a minimal big-endian byte string (zero is ``nbytes = 0``)
=============  ===  =========================================================

The format is stable within a package version.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import ProtocolError

VARIANTS = ("plain", "noised", "masked", "shares", "ciphertexts")
_TAG = {name: i for i, name in enumerate(VARIANTS)}
_U32 = struct.Struct("<I")
_F64 = np.dtype("<f8")
_U64 = np.dtype("<u8")


@dataclass(frozen=True)
class PrivacyEnvelope:
    """Exactly one payload, selected by ``variant``.

    * plain / noised: float64 vector
    * masked: uint64 ring vector (``client_id`` and ``round_index`` set)
    * shares: list of uint64 ring vectors, one per compute party
    * ciphertexts: list of Python ints modulo n^2
    """

    variant: str
    payload: object = field(repr=False)
    client_id: int = 0
    round_index: int = 0

    def __post_init__(self):
        if self.variant not in _TAG:
            raise ProtocolError(f"unknown envelope variant {self.variant!r}")

    @property
    def byte_size(self):
        return len(self.to_bytes())

    def to_bytes(self):
        tag = bytes([_TAG[self.variant]])
        if self.variant in ("plain", "noised"):
            vec = np.asarray(self.payload, dtype=_F64)
            return tag + _U32.pack(vec.size) + vec.tobytes()
        if self.variant == "masked":
            vec = np.asarray(self.payload, dtype=_U64)
            head = struct.pack("<III", self.client_id, self.round_index, vec.size)
            return tag + head + vec.tobytes()
        if self.variant == "shares":
            parts = [tag, _U32.pack(len(self.payload))]
            for share in self.payload:
                share = np.asarray(share, dtype=_U64)
                parts.append(_U32.pack(share.size))
                parts.append(share.tobytes())
            return b"".join(parts)
        parts = [tag, _U32.pack(len(self.payload))]
        pack = _U32.pack
        for c in self.payload:
            nbytes = (c.bit_length() + 7) // 8
            parts.append(pack(nbytes))
            parts.append(c.to_bytes(nbytes, "big"))
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data):
        view = memoryview(data)
        if not view:
            raise ProtocolError("empty envelope")
        tag = view[0]
        if tag >= len(VARIANTS):
            raise ProtocolError(f"unknown envelope tag {tag}")
        variant = VARIANTS[tag]
        try:
            if variant in ("plain", "noised"):
                (count,) = _U32.unpack_from(view, 1)
                vec = np.frombuffer(view, dtype=_F64, count=count, offset=5)
                return cls(variant, vec.astype(np.float64))
            if variant == "masked":
                client_id, round_index, count = struct.unpack_from("<III", view, 1)
                vec = np.frombuffer(view, dtype=_U64, count=count, offset=13)
                return cls(variant, vec.astype(np.uint64), client_id, round_index)
            if variant == "shares":
                (parties,) = _U32.unpack_from(view, 1)
                offset, shares = 5, []
                for _ in range(parties):
                    (count,) = _U32.unpack_from(view, offset)
                    offset += 4
                    shares.append(
                        np.frombuffer(view, dtype=_U64, count=count, offset=offset).astype(np.uint64)
                    )
                    offset += 8 * count
                return cls(variant, shares)
            (count,) = _U32.unpack_from(view, 1)
            offset, values = 5, []
            unpack = _U32.unpack_from
            from_bytes = int.from_bytes
            for _ in range(count):
                (nbytes,) = unpack(view, offset)
                offset += 4
                values.append(from_bytes(view[offset : offset + nbytes], "big"))
                offset += nbytes
            if offset > len(view):
                raise ValueError("ciphertext runs past the end of the buffer")
            return cls(variant, values)
        except (struct.error, ValueError) as exc:
            raise ProtocolError(f"truncated {variant} envelope: {exc}") from None
