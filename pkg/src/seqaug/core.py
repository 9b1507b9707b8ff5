"""Domain types, configuration schema, and validation shared by all modules.

Everything here is immutable after construction and safe to share across
concurrent workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Union

import numpy as np

U64_MAX = (1 << 64) - 1
U32_MAX = (1 << 32) - 1


class ConfigError(ValueError):
    """Raised when a configuration document does not match the schema."""


class Mode(Enum):
    TRAIN = "train"
    INFERENCE = "inference"


@dataclass(frozen=True)
class Beta:
    """Symmetric beta law over the permuted-address fraction.

    Both shape parameters are tied to the single ``alpha``, so the
    U-shaped regimes (alpha < 1) stay symmetric around 0.5. The aggressive
    choice for transformer models.
    """

    alpha: float


@dataclass(frozen=True)
class FoldedNormal:
    """|N(mu, sigma^2)| clamped into [0, 1].

    A smooth unimodal law concentrated near ``mu``; the gentler choice for
    recurrent models. ``sigma`` is conventionally left at its small default.
    """

    mu: float
    sigma: float = 0.01


@dataclass(frozen=True)
class Fixed:
    """Degenerate law: always returns ``p`` and consumes no random draws."""

    p: float


SelectionDistribution = Union[Beta, FoldedNormal, Fixed]


def bits_equal(a: np.ndarray, b: np.ndarray) -> bool:
    """Exact bit-pattern equality for float32 arrays (NaN payloads included)."""
    if a.shape != b.shape:
        return False
    av = np.ascontiguousarray(a, dtype=np.float32).view(np.uint32)
    bv = np.ascontiguousarray(b, dtype=np.float32).view(np.uint32)
    return bool(np.array_equal(av, bv))


class FeatureSequence:
    """One modality's (T, d) float32 matrix for a single sample.

    Values are opaque 32-bit patterns: NaN and infinities are legal payload
    and are never inspected or altered by augmentation. T may be zero.
    """

    __slots__ = ("seq_id", "data")

    def __init__(self, seq_id: str, data: np.ndarray) -> None:
        arr = np.ascontiguousarray(data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"feature data must be 2-D (T, d), got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise ValueError("feature dimensionality d must be >= 1")
        self.seq_id = seq_id
        self.data = arr

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureSequence):
            return NotImplemented
        return self.seq_id == other.seq_id and bits_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"FeatureSequence({self.seq_id!r}, T={self.T}, d={self.d})"


@dataclass(frozen=True)
class ModalityConfig:
    name: str
    dist: SelectionDistribution


@dataclass(frozen=True)
class AugmentConfig:
    """Full augmentation settings: per-modality laws plus global mode and seed.

    Modality ordinals are assigned by list position (0-based) and feed the
    RNG stream derivation, so reordering modalities changes the draws.
    """

    modalities: tuple[ModalityConfig, ...]
    mode: Mode = Mode.TRAIN
    master_seed: int = 0
    copies: int = 1


@dataclass(frozen=True)
class AugmentPlan:
    """The materialized randomness of one augmentation event.

    ``addresses`` is a strictly ascending int64 array of selected feature
    addresses in [0, d); ``pi`` is an int64 bijection of range(T). The plan
    is sufficient to replay and verify the augmentation.
    """

    p: float
    addresses: np.ndarray
    pi: np.ndarray

    def violations(self, T: int, d: int) -> list[str]:
        """Check plan invariants against a (T, d) sequence shape.

        Used on untrusted plans (e.g. re-parsed logs); plans built by the
        engine satisfy these by construction.
        """
        problems = []
        if not (0.0 <= self.p <= 1.0):
            problems.append(f"fraction p={self.p} outside [0, 1]")
        addr = np.asarray(self.addresses)
        if addr.size:
            if addr[0] < 0 or addr[-1] >= d:
                problems.append(f"addresses outside [0, {d})")
            if np.any(np.diff(addr) <= 0):
                problems.append("addresses not strictly ascending")
        pi = np.asarray(self.pi)
        if pi.size != T:
            problems.append(f"permutation length {pi.size} != sequence length {T}")
        elif not np.array_equal(np.sort(pi), np.arange(T)):
            problems.append("permutation is not a bijection of range(T)")
        return problems


@dataclass(frozen=True)
class PlanLogRecord:
    """Audit record binding (sequence id, copy index, modality) to its plan."""

    seq_id: str
    copy_index: int
    modality_name: str
    plan: AugmentPlan


def _check_dist(name: str, dist: SelectionDistribution, problems: list[str]) -> None:
    if isinstance(dist, Beta):
        if not (isinstance(dist.alpha, (int, float)) and math.isfinite(dist.alpha) and dist.alpha > 0):
            problems.append(f"modality '{name}': beta alpha must be finite and > 0, got {dist.alpha}")
    elif isinstance(dist, FoldedNormal):
        if not (isinstance(dist.mu, (int, float)) and math.isfinite(dist.mu) and 0.0 <= dist.mu <= 1.0):
            problems.append(f"modality '{name}': folded-normal mu must lie in [0, 1], got {dist.mu}")
        if not (isinstance(dist.sigma, (int, float)) and math.isfinite(dist.sigma) and dist.sigma > 0):
            problems.append(f"modality '{name}': folded-normal sigma must be finite and > 0, got {dist.sigma}")
    elif isinstance(dist, Fixed):
        if not (isinstance(dist.p, (int, float)) and math.isfinite(dist.p) and 0.0 <= dist.p <= 1.0):
            problems.append(f"modality '{name}': fixed p must lie in [0, 1], got {dist.p}")
    else:
        problems.append(f"modality '{name}': unknown distribution {type(dist).__name__}")


def validate_config(cfg: AugmentConfig) -> list[str]:
    """Return every violated invariant; an empty list means the config is usable.

    A config that passes here executes in the engine without runtime
    parameter errors.
    """
    problems: list[str] = []
    if not isinstance(cfg.mode, Mode):
        problems.append(f"mode must be Mode.TRAIN or Mode.INFERENCE, got {cfg.mode!r}")
    if not (isinstance(cfg.master_seed, int) and 0 <= cfg.master_seed <= U64_MAX):
        problems.append(f"master_seed must be an unsigned 64-bit integer, got {cfg.master_seed!r}")
    if not (isinstance(cfg.copies, int) and 1 <= cfg.copies <= U32_MAX):
        problems.append(f"copies must be a positive 32-bit integer, got {cfg.copies!r}")
    if not cfg.modalities:
        problems.append("config must declare at least one modality")
    seen: set[str] = set()
    for mc in cfg.modalities:
        if not mc.name:
            problems.append("modality name must be non-empty")
        elif mc.name in seen:
            problems.append(f"duplicate modality name '{mc.name}'")
        else:
            seen.add(mc.name)
        _check_dist(mc.name, mc.dist, problems)
    return problems


# --- JSON configuration schema (strict: unknown keys are rejected) ---

_DIST_KEYS = {
    "beta": ({"kind", "alpha"}, {"alpha"}),
    "folded_normal": ({"kind", "mu", "sigma"}, {"mu"}),
    "fixed": ({"kind", "p"}, {"p"}),
}


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{where}: missing required key(s) {sorted(missing)}")


def _as_number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _as_uint(value: Any, where: str, lo: int, hi: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if not lo <= value <= hi:
        raise ConfigError(f"{where}: must lie in [{lo}, {hi}], got {value}")
    return value


def _dist_from_mapping(obj: Any, where: str) -> SelectionDistribution:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: dist must be an object")
    kind = obj.get("kind")
    if kind not in _DIST_KEYS:
        raise ConfigError(f"{where}: dist kind must be one of {sorted(_DIST_KEYS)}, got {kind!r}")
    allowed, required = _DIST_KEYS[kind]
    _require_keys(obj, allowed, required | {"kind"}, where)
    if kind == "beta":
        return Beta(_as_number(obj["alpha"], f"{where}.alpha"))
    if kind == "folded_normal":
        sigma = _as_number(obj["sigma"], f"{where}.sigma") if "sigma" in obj else 0.01
        return FoldedNormal(_as_number(obj["mu"], f"{where}.mu"), sigma)
    return Fixed(_as_number(obj["p"], f"{where}.p"))


def config_from_mapping(raw: Any) -> AugmentConfig:
    """Build an AugmentConfig from a parsed JSON document (strict schema)."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(raw, {"mode", "master_seed", "copies", "modalities"},
                  {"mode", "master_seed", "modalities"}, "config")
    mode_str = raw["mode"]
    if mode_str not in ("train", "inference"):
        raise ConfigError(f"config.mode must be 'train' or 'inference', got {mode_str!r}")
    master_seed = _as_uint(raw["master_seed"], "config.master_seed", 0, U64_MAX)
    copies = (_as_uint(raw["copies"], "config.copies", 1, U32_MAX)
              if "copies" in raw else 1)
    mods = raw["modalities"]
    if not isinstance(mods, list):
        raise ConfigError("config.modalities must be a list")
    parsed = []
    for i, entry in enumerate(mods):
        where = f"config.modalities[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where}: expected an object")
        _require_keys(entry, {"name", "dist"}, {"name", "dist"}, where)
        name = entry["name"]
        if not isinstance(name, str):
            raise ConfigError(f"{where}.name: expected a string, got {name!r}")
        parsed.append(ModalityConfig(name, _dist_from_mapping(entry["dist"], f"{where}.dist")))
    return AugmentConfig(modalities=tuple(parsed), mode=Mode(mode_str),
                         master_seed=master_seed, copies=copies)


def parse_config(text: str) -> AugmentConfig:
    """Parse the UTF-8 JSON configuration document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return config_from_mapping(raw)


def _dist_to_mapping(dist: SelectionDistribution) -> dict:
    if isinstance(dist, Beta):
        return {"kind": "beta", "alpha": float(dist.alpha)}
    if isinstance(dist, FoldedNormal):
        return {"kind": "folded_normal", "mu": float(dist.mu), "sigma": float(dist.sigma)}
    if isinstance(dist, Fixed):
        return {"kind": "fixed", "p": float(dist.p)}
    raise TypeError(f"unknown distribution {type(dist).__name__}")


def config_to_mapping(cfg: AugmentConfig) -> dict:
    return {
        "mode": cfg.mode.value,
        "master_seed": cfg.master_seed,
        "copies": cfg.copies,
        "modalities": [
            {"name": mc.name, "dist": _dist_to_mapping(mc.dist)} for mc in cfg.modalities
        ],
    }


def config_to_json(cfg: AugmentConfig) -> str:
    """Serialize a config; re-parsing yields a value that validates and draws identically."""
    return json.dumps(config_to_mapping(cfg), indent=2) + "\n"
