"""All randomness: stream derivation, fraction draws, address and permutation sampling.

Stream derivation is a fixed mixing chain, so a provenance tuple
(master_seed, seq_index, copy_index, modality_ordinal) names exactly one
draw sequence -- independent of scheduling, worker count, and backend.
Integer-valued draws (addresses, permutations) are bit-exact; the real-valued
fraction draws are deterministic but algorithm-defined rather than part of
the portable contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import _backend
from .core import Beta, Fixed, FoldedNormal, SelectionDistribution, U64_MAX

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def splitmix64(state: int) -> int:
    """One SplitMix64 step from ``state``: advance by the golden gamma, then mix."""
    z = (state + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


@dataclass
class RngStream:
    """A single-owner xoshiro256** generator bound to the provenance that derived it.

    Never share one stream across work items; derive a fresh one per
    (sequence, copy, modality) instead.
    """

    provenance: tuple[int, int, int, int]
    gen: Any

    def next_u64(self) -> int:
        return self.gen.next_u64()

    def next_double(self) -> float:
        return self.gen.next_double()

    def bounded(self, n: int) -> int:
        return self.gen.bounded(n)


def derive_stream(master_seed: int, seq_index: int, copy_index: int,
                  modality_ordinal: int, kernels: Any | None = None) -> RngStream:
    """Derive the draw stream for one (sequence, copy, modality) work item.

    Chain: s1 = SM(master_seed ^ seq_index); s2 = SM(s1 ^ copy_index);
    s3 = SM(s2 ^ modality_ordinal); then four further SplitMix64 steps from
    s3 fill the xoshiro256** state words. SM is one SplitMix64 step.
    """
    for label, value in (("master_seed", master_seed), ("seq_index", seq_index),
                         ("copy_index", copy_index), ("modality_ordinal", modality_ordinal)):
        if not isinstance(value, int) or not 0 <= value <= U64_MAX:
            raise ValueError(f"{label} must be an unsigned 64-bit integer, got {value!r}")
    s1 = splitmix64(master_seed ^ seq_index)
    s2 = splitmix64(s1 ^ copy_index)
    s3 = splitmix64(s2 ^ modality_ordinal)
    words = [splitmix64((s3 + i * _GOLDEN) & _MASK64) for i in range(4)]
    impl = kernels if kernels is not None else _backend.active()
    return RngStream(provenance=(master_seed, seq_index, copy_index, modality_ordinal),
                     gen=impl.Generator(*words))


def _standard_normal(rng: RngStream) -> float:
    # Box-Muller, cosine branch only; two uniforms per variate.
    u1 = rng.next_double()
    while u1 <= 0.0:
        u1 = rng.next_double()
    u2 = rng.next_double()
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def _standard_gamma(rng: RngStream, shape: float) -> float:
    # Marsaglia & Tsang (2000) squeeze method; shape < 1 boosted via U^(1/shape).
    if shape < 1.0:
        u = rng.next_double()
        while u <= 0.0:
            u = rng.next_double()
        return _standard_gamma(rng, shape + 1.0) * u ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = _standard_normal(rng)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = rng.next_double()
        if u < 1.0 - 0.0331 * x * x * x * x:
            return d * v
        if u > 0.0 and math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return d * v


def draw_fraction(dist: SelectionDistribution, rng: RngStream) -> float:
    """Draw the permuted-address fraction p in [0, 1] from the configured law.

    Fixed consumes no draws. FoldedNormal folds then clamps to [0, 1].
    """
    if isinstance(dist, Fixed):
        return dist.p
    if isinstance(dist, FoldedNormal):
        x = abs(dist.mu + dist.sigma * _standard_normal(rng))
        return min(x, 1.0)
    if isinstance(dist, Beta):
        g1 = _standard_gamma(rng, dist.alpha)
        g2 = _standard_gamma(rng, dist.alpha)
        total = g1 + g2
        if total <= 0.0:  # double underflow; only reachable at extreme alpha
            return 0.5
        return g1 / total
    raise TypeError(f"unknown distribution {type(dist).__name__}")


def fraction_to_count(p: float, d: int) -> int:
    """Map a fraction to an address count: round-half-up(p*d), clamped to [0, d]."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"fraction p={p} outside [0, 1]")
    if d < 1:
        raise ValueError(f"dimension d={d} must be >= 1")
    return max(0, min(d, math.floor(p * d + 0.5)))


def sample_addresses(k: int, d: int, rng: RngStream) -> np.ndarray:
    """Sample a uniform k-subset of the address set [0, d), ascending."""
    if d < 1:
        raise ValueError(f"dimension d={d} must be >= 1")
    if not 0 <= k <= d:
        raise ValueError(f"subset size k={k} outside [0, {d}]")
    return rng.gen.address_subset(k, d)


def sample_permutation(T: int, rng: RngStream) -> np.ndarray:
    """Sample a uniform permutation of range(T); identity is allowed by chance."""
    if T < 0:
        raise ValueError(f"sequence length T={T} must be >= 0")
    return rng.gen.permutation(T)
