"""Privacy mechanism configuration and its overflow guard."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import ConfigError

MECHANISMS = ("none", "dp", "he", "sa", "smpc")
NOISE_KINDS = ("laplace", "gaussian")
MIN_KEY_BITS = 256


@dataclass(frozen=True)
class PrivacyConfig:
    """Settings for every mechanism; fields unused by the chosen one are ignored.

    ``max_abs_value`` bounds each transported coordinate. Together with the
    client count it sizes the overflow guard: the fixed-point sum of all
    clients must stay below half the ring (SA/SMPC) or half the Paillier
    plaintext space (HE).

    ``noise_scale_override`` forces the DP noise scale (0 disables noise);
    it exists for pipeline tests and is not exposed on the CLI.
    """

    mechanism: str = "none"
    epsilon: float = 1.0
    clip_norm: float = 1.0
    noise_kind: str = "laplace"
    delta: float = 1e-5
    key_bits: int = 1024
    scale_bits: int = 16
    num_parties: int = 3
    ring_bits: int = 64
    max_abs_value: float = 1e4
    noise_scale_override: float | None = None

    def problems(self, num_clients=1):
        out = []
        if self.mechanism not in MECHANISMS:
            out.append(f"mechanism must be one of {MECHANISMS}, got {self.mechanism!r}")
        if not self.epsilon > 0:
            out.append(f"epsilon must be > 0, got {self.epsilon}")
        if not self.clip_norm > 0:
            out.append(f"clip norm must be > 0, got {self.clip_norm}")
        if self.noise_kind not in NOISE_KINDS:
            out.append(f"noise must be one of {NOISE_KINDS}, got {self.noise_kind!r}")
        if not 0 < self.delta < 1:
            out.append(f"delta must lie in (0, 1), got {self.delta}")
        if self.key_bits < MIN_KEY_BITS:
            out.append(f"key bits must be >= {MIN_KEY_BITS}, got {self.key_bits}")
        if self.scale_bits < 0:
            out.append(f"scale bits must be >= 0, got {self.scale_bits}")
        if self.num_parties < 2:
            out.append(f"SMPC needs >= 2 parties, got {self.num_parties}")
        if not 2 <= self.ring_bits <= 64:
            out.append(f"ring bits must lie in [2, 64], got {self.ring_bits}")
        if not self.max_abs_value > 0:
            out.append(f"max abs value must be > 0, got {self.max_abs_value}")
        if self.noise_scale_override is not None and self.noise_scale_override < 0:
            out.append("noise scale override must be >= 0")
        if not out:
            out.extend(self._overflow_problems(num_clients))
        return out

    def _overflow_problems(self, num_clients):
        worst = num_clients * 2.0**self.scale_bits * self.max_abs_value
        if self.mechanism in ("sa", "smpc") and not worst < 2.0 ** (self.ring_bits - 1):
            return [
                f"overflow guard: {num_clients} clients x 2^{self.scale_bits} x "
                f"{self.max_abs_value} does not fit half of the 2^{self.ring_bits} ring"
            ]
        # n has exactly key_bits bits, so n/2 >= 2^(key_bits - 2)
        if self.mechanism == "he" and not worst < 2.0 ** (self.key_bits - 2):
            return [f"overflow guard: values do not fit a {self.key_bits}-bit plaintext space"]
        return []

    def validate(self, num_clients=1):
        problems = self.problems(num_clients)
        if problems:
            raise ConfigError("; ".join(problems), problems)
        return self

    @property
    def noise_scale(self):
        """Laplace scale ``b`` or Gaussian ``sigma`` calibrated to ``clip_norm``."""
        if self.noise_scale_override is not None:
            return self.noise_scale_override
        if self.noise_kind == "laplace":
            return self.clip_norm / self.epsilon
        return self.clip_norm * math.sqrt(2.0 * math.log(1.25 / self.delta)) / self.epsilon

    @property
    def clip_ord(self):
        return 1 if self.noise_kind == "laplace" else 2
