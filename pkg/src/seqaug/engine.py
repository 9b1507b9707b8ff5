"""The augmentation algorithm: plan construction and application, multimodal
orchestration, and the train/inference gate.

One augmentation event = draw a fraction p, sample that share of feature
addresses once for the whole sequence, permute exactly those addresses along
the time axis with a shared permutation. Everything else is copied
bit-identically; inputs are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _backend
from .core import (
    AugmentConfig,
    AugmentPlan,
    FeatureSequence,
    Mode,
    PlanLogRecord,
    SelectionDistribution,
)
from .sampling import (
    RngStream,
    derive_stream,
    draw_fraction,
    fraction_to_count,
    sample_addresses,
    sample_permutation,
)


class PlanShapeError(ValueError):
    """A plan does not fit the sequence it is applied to."""


class MissingModalityError(ValueError):
    """A configured modality is absent from the sample."""


@dataclass(frozen=True)
class MultimodalSample:
    """Named feature streams for one sample; streams may differ in T and d."""

    sample_id: str
    streams: dict[str, FeatureSequence]


def make_plan(T: int, d: int, dist: SelectionDistribution, rng: RngStream) -> AugmentPlan:
    """Materialize one augmentation's randomness.

    Draw order is fixed -- fraction, then addresses, then permutation --
    which is what makes plans reproducible from provenance alone.
    """
    p = draw_fraction(dist, rng)
    addresses = sample_addresses(fraction_to_count(p, d), d, rng)
    pi = sample_permutation(T, rng)
    return AugmentPlan(p=p, addresses=addresses, pi=pi)


def apply_plan(seq: FeatureSequence, plan: AugmentPlan) -> FeatureSequence:
    """Apply a plan: out[t][a] = in[pi[t]][a] for selected addresses a.

    Unselected columns are copied bit-identically; the input is left intact
    and seq_id is preserved.
    """
    if len(plan.pi) != seq.T:
        raise PlanShapeError(
            f"plan permutation has length {len(plan.pi)} but sequence "
            f"'{seq.seq_id}' has T={seq.T}")
    if plan.addresses.size and int(plan.addresses[-1]) >= seq.d:
        raise PlanShapeError(
            f"plan address {int(plan.addresses[-1])} out of range for sequence "
            f"'{seq.seq_id}' with d={seq.d}")
    out = _backend.active().permute_columns(seq.data, plan.pi, plan.addresses)
    return FeatureSequence(seq.seq_id, out)


def augment_sequence(seq: FeatureSequence, dist: SelectionDistribution,
                     rng: RngStream) -> tuple[FeatureSequence, AugmentPlan]:
    """Plan and apply in one step; the plan is returned for audit logging."""
    plan = make_plan(seq.T, seq.d, dist, rng)
    return apply_plan(seq, plan), plan


def augment_sample(sample: MultimodalSample, cfg: AugmentConfig, seq_index: int,
                   copy_index: int) -> tuple[MultimodalSample, list[PlanLogRecord]]:
    """Augment every configured modality of one sample.

    Each modality gets its own stream derived from (master_seed, seq_index,
    copy_index, modality_ordinal). Streams present in the sample but absent
    from the config pass through unchanged. In inference mode the whole
    sample passes through bit-identically and the log is empty.
    """
    if cfg.mode is Mode.INFERENCE:
        return sample, []
    out_streams = dict(sample.streams)
    records: list[PlanLogRecord] = []
    for ordinal, mc in enumerate(cfg.modalities):
        seq = sample.streams.get(mc.name)
        if seq is None:
            raise MissingModalityError(
                f"configured modality '{mc.name}' is missing from sample "
                f"'{sample.sample_id}'")
        rng = derive_stream(cfg.master_seed, seq_index, copy_index, ordinal)
        augmented, plan = augment_sequence(seq, mc.dist, rng)
        out_streams[mc.name] = augmented
        records.append(PlanLogRecord(seq.seq_id, copy_index, mc.name, plan))
    return MultimodalSample(sample.sample_id, out_streams), records
