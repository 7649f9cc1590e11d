"""Norm clipping plus calibrated Laplace or Gaussian noise."""

from __future__ import annotations

import numpy as np

from ..aggregation import fed_avg
from ..errors import InputError
from .envelope import PrivacyEnvelope


def clip(update, clip_norm, ord=1):
    """Scale ``update`` by ``min(1, clip_norm / ||update||_ord)``."""
    update = np.asarray(update, dtype=np.float64)
    norm = np.linalg.norm(update, ord=ord)
    if norm <= clip_norm:
        return update.copy()
    return update * (clip_norm / norm)


def dp_protect(update, cfg, rng, noise_scale=None):
    """Clip to ``cfg.clip_norm`` then add i.i.d. per-coordinate noise.

    The clip norm is L1 for Laplace noise (scale ``b = S / epsilon``) and L2
    for Gaussian noise (``sigma = S sqrt(2 ln(1.25/delta)) / epsilon``).
    ``noise_scale`` overrides the calibrated value; 0 returns the clipped
    update untouched.
    """
    clipped = clip(update, cfg.clip_norm, cfg.clip_ord)
    scale = cfg.noise_scale if noise_scale is None else noise_scale
    if scale > 0:
        if cfg.noise_kind == "laplace":
            clipped = clipped + rng.laplace(0.0, scale, size=clipped.shape)
        else:
            clipped = clipped + rng.normal(0.0, scale, size=clipped.shape)
    return PrivacyEnvelope("noised", clipped)


def dp_aggregate(envelopes):
    if not envelopes:
        raise InputError("need at least one envelope")
    return fed_avg([e.payload for e in envelopes])
