"""Command line interface for dataset-level augmentation.

Subcommands: augment (produce an augmented dataset directory), inspect
(summarize one container file), verify (replay a plan log against originals
and compare bitwise), bench (throughput measurements), presets (published
configurations).

Exit codes: 0 success, 1 validation or verification failure, 2 I/O or parse
error. Argparse usage errors also exit 2.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import _backend
from .core import (
    AugmentConfig,
    Beta,
    ConfigError,
    FeatureSequence,
    Fixed,
    FoldedNormal,
    Mode,
    ModalityConfig,
    PlanLogRecord,
    bits_equal,
    config_from_mapping,
    config_to_json,
    validate_config,
)
from .engine import MultimodalSample, apply_plan, augment_sample, augment_sequence
from .io import (
    CsvParseError,
    ModalityDataset,
    PlanLogError,
    SqafError,
    atomic_write_dir,
    import_csv_file,
    read_plan_log,
    read_sqaf_file,
    write_plan_log,
    write_sqaf_file,
)
from .sampling import derive_stream, fraction_to_count

__version__ = "0.1.0"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_IO = 2

PLAN_LOG_NAME = "plans.jsonl"
CONFIG_NAME = "config.json"


def _preset(mode: str, seed: int, mods: list[tuple[str, object]]) -> AugmentConfig:
    return AugmentConfig(
        modalities=tuple(ModalityConfig(n, d) for n, d in mods),
        mode=Mode(mode), master_seed=seed, copies=1)


# Published configurations. Modality order is part of the contract: it sets
# the ordinals that feed stream derivation.
PRESETS: dict[str, AugmentConfig] = {
    "mult-mosei": _preset("train", 0, [
        ("text", Beta(1.0)), ("audio", Beta(0.1)), ("visual", Beta(1.0))]),
    "mmrnn-mosei": _preset("train", 0, [
        ("text", FoldedNormal(0.15)), ("audio", FoldedNormal(0.1)),
        ("visual", FoldedNormal(0.2))]),
    "mmrnn-unimodal-t": _preset("train", 0, [("text", FoldedNormal(0.15))]),
    "mmrnn-unimodal-a": _preset("train", 0, [("audio", FoldedNormal(0.4))]),
    "mmrnn-unimodal-v": _preset("train", 0, [("visual", FoldedNormal(0.35))]),
}


class CliError(ValueError):
    """Semantic CLI failure (exit code 1)."""


def _load_config(args: argparse.Namespace) -> AugmentConfig:
    if args.preset is not None:
        cfg = PRESETS[args.preset]
    else:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
        # JSONDecodeError propagates to main() and maps to the parse exit code
        cfg = config_from_mapping(json.loads(text))
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.copies is not None:
        cfg = replace(cfg, copies=args.copies)
    if args.mode is not None:
        cfg = replace(cfg, mode=Mode(args.mode))
    problems = validate_config(cfg)
    if problems:
        raise CliError("invalid config:\n  " + "\n  ".join(problems))
    return cfg


def _parse_named_paths(pairs: list[str], flag: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for pair in pairs:
        name, sep, path = pair.partition("=")
        if not sep or not name or not path:
            raise CliError(f"{flag} expects NAME=PATH, got {pair!r}")
        if name in out:
            raise CliError(f"{flag} given twice for modality '{name}'")
        out[name] = path
    return out


def _load_dataset(path: str, name: str) -> ModalityDataset:
    """Load CSV (by .csv extension) or SQAF; bind it to modality ``name``."""
    if path.lower().endswith(".csv"):
        ds = import_csv_file(path, name)
    else:
        ds = read_sqaf_file(path)
        if ds.modality_name and ds.modality_name != name:
            raise CliError(
                f"file {path} carries modality name '{ds.modality_name}' "
                f"but was supplied for '{name}'")
    return ModalityDataset(name, ds.dim, ds.sequences)


def _out_id(seq_id: str, copy: int, copies: int) -> str:
    return seq_id if copies == 1 else f"{seq_id}#{copy}"


def _augment_job(datasets: dict[str, ModalityDataset], cfg: AugmentConfig,
                 seq_index: int, copy: int):
    streams = {name: ds.sequences[seq_index] for name, ds in datasets.items()}
    first = cfg.modalities[0].name
    sample = MultimodalSample(streams[first].seq_id, streams)
    out, records = augment_sample(sample, cfg, seq_index, copy)
    renamed = {
        name: FeatureSequence(_out_id(seq.seq_id, copy, cfg.copies), seq.data)
        for name, seq in out.streams.items()
    }
    return renamed, records


def cmd_augment(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    inputs = _parse_named_paths(args.input, "--input")
    names = [mc.name for mc in cfg.modalities]
    missing = [n for n in names if n not in inputs]
    extra = sorted(set(inputs) - set(names))
    if missing:
        raise CliError(f"no --input for configured modality(ies): {missing}")
    if extra:
        raise CliError(f"--input given for unconfigured modality(ies): {extra}")

    datasets = {name: _load_dataset(inputs[name], name) for name in names}
    counts = {name: len(ds) for name, ds in datasets.items()}
    if len(set(counts.values())) > 1:
        raise CliError(f"modality datasets disagree on sequence count: {counts}")
    n = counts[names[0]]

    jobs = [(i, c) for i in range(n) for c in range(cfg.copies)]
    if args.threads > 1 and jobs:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(
                lambda job: _augment_job(datasets, cfg, *job), jobs))
    else:
        results = [_augment_job(datasets, cfg, i, c) for i, c in jobs]

    out_seqs: dict[str, list[FeatureSequence]] = {name: [] for name in names}
    records: list[PlanLogRecord] = []
    for streams, recs in results:
        for name in names:
            out_seqs[name].append(streams[name])
        records.extend(recs)

    def write_into(tmp: str) -> None:
        import os
        for name in names:
            ds = ModalityDataset(name, datasets[name].dim, out_seqs[name])
            write_sqaf_file(os.path.join(tmp, f"{name}.sqaf"), ds)
        write_plan_log(os.path.join(tmp, PLAN_LOG_NAME), records)
        with open(os.path.join(tmp, CONFIG_NAME), "w", encoding="utf-8") as fh:
            fh.write(config_to_json(cfg))

    atomic_write_dir(args.output, write_into)
    print(f"augmented {n} sequence(s) x {cfg.copies} cop(ies) across "
          f"{len(names)} modality(ies) -> {args.output}")
    print(f"plan records: {len(records)}")
    return EXIT_OK


def _dataset_stats(ds: ModalityDataset) -> dict:
    lengths = [seq.T for seq in ds.sequences]
    total = int(sum(lengths))
    nan_count = 0
    dim_sum = np.zeros(ds.dim, dtype=np.float64)
    dim_sumsq = np.zeros(ds.dim, dtype=np.float64)
    for seq in ds.sequences:
        nan_count += int(np.isnan(seq.data).sum())
        x = seq.data.astype(np.float64)
        dim_sum += x.sum(axis=0)
        dim_sumsq += (x * x).sum(axis=0)
    if total:
        mean = dim_sum / total
        var = np.maximum(dim_sumsq / total - mean * mean, 0.0)
        per_dim = {"mean": mean.tolist(), "std": np.sqrt(var).tolist()}
    else:
        per_dim = None
    return {
        "modality": ds.modality_name,
        "sequences": len(ds),
        "dim": ds.dim,
        "timesteps": {
            "total": total,
            "min": min(lengths) if lengths else None,
            "mean": total / len(lengths) if lengths else None,
            "max": max(lengths) if lengths else None,
        },
        "nan_count": nan_count,
        "per_dim": per_dim,
    }


def cmd_inspect(args: argparse.Namespace) -> int:
    ds = read_sqaf_file(args.path)
    stats = _dataset_stats(ds)
    if args.json:
        print(json.dumps(stats, indent=2))
        return EXIT_OK
    ts = stats["timesteps"]
    print(f"modality:  {stats['modality'] or '(unnamed)'}")
    print(f"sequences: {stats['sequences']}")
    print(f"dim:       {stats['dim']}")
    if ts["min"] is None:
        print("timesteps: 0")
    else:
        print(f"timesteps: {ts['total']} "
              f"(min {ts['min']}, mean {ts['mean']:.2f}, max {ts['max']})")
    print(f"nan count: {stats['nan_count']}")
    if stats["per_dim"] is not None:
        overall_mean = float(np.mean(stats["per_dim"]["mean"]))
        overall_std = float(np.mean(stats["per_dim"]["std"]))
        print(f"mean of per-dim means: {overall_mean:.6g}")
        print(f"mean of per-dim stds:  {overall_std:.6g}")
    return EXIT_OK


def _verify_modality(name: str, originals: ModalityDataset,
                     augmented: ModalityDataset, records: list[PlanLogRecord],
                     copies: int, failures: list[str]) -> None:
    n = len(originals)
    if records and len(records) != n * copies:
        failures.append(
            f"modality '{name}': {len(records)} plan records, expected "
            f"{n * copies} or 0")
        return
    for i in range(n):
        orig = originals.sequences[i]
        for c in range(copies):
            pos = i * copies + c
            actual = augmented.sequences[pos]
            want_id = _out_id(orig.seq_id, c, copies)
            where = f"(seq '{orig.seq_id}', copy {c}, modality '{name}')"
            if actual.seq_id != want_id:
                failures.append(
                    f"{where}: output id {actual.seq_id!r}, expected {want_id!r}")
            if not records:
                if not bits_equal(actual.data, orig.data):
                    failures.append(f"{where}: expected identity copy, bits differ")
                continue
            rec = records[pos]
            if rec.seq_id != orig.seq_id or rec.copy_index != c:
                failures.append(
                    f"{where}: plan record mismatch, log has "
                    f"(seq {rec.seq_id!r}, copy {rec.copy_index})")
                continue
            bad = rec.plan.violations(orig.T, orig.d)
            if bad:
                failures.append(f"{where}: invalid plan: {'; '.join(bad)}")
                continue
            expected = apply_plan(orig, rec.plan)
            if not bits_equal(actual.data, expected.data):
                diff = np.flatnonzero(
                    (actual.data.view(np.uint32) != expected.data.view(np.uint32))
                    .any(axis=0))
                failures.append(
                    f"{where}: replay mismatch at address(es) "
                    f"{diff[:4].tolist()}")
                continue
            # Independent cross-checks on what replay already implies: every
            # column keeps its multiset, unselected columns keep their bits.
            a = actual.data.view(np.uint32)
            o = orig.data.view(np.uint32)
            if not np.array_equal(np.sort(a, axis=0), np.sort(o, axis=0)):
                failures.append(f"{where}: column multiset changed")
            untouched = np.setdiff1d(np.arange(orig.d), rec.plan.addresses)
            if untouched.size and not np.array_equal(
                    a[:, untouched], o[:, untouched]):
                failures.append(f"{where}: unselected column bits changed")


def cmd_verify(args: argparse.Namespace) -> int:
    import os
    originals = _parse_named_paths(args.original, "--original")
    records = read_plan_log(os.path.join(args.augmented, PLAN_LOG_NAME))
    failures: list[str] = []
    checked = 0
    for name, path in originals.items():
        orig = _load_dataset(path, name)
        aug = read_sqaf_file(os.path.join(args.augmented, f"{name}.sqaf"))
        if aug.dim != orig.dim:
            failures.append(
                f"modality '{name}': augmented dim {aug.dim} != original "
                f"dim {orig.dim}")
            continue
        if len(orig) == 0 or len(aug) % len(orig) != 0:
            failures.append(
                f"modality '{name}': augmented count {len(aug)} is not a "
                f"multiple of original count {len(orig)}")
            continue
        copies = len(aug) // len(orig)
        mod_records = [r for r in records if r.modality_name == name]
        _verify_modality(name, orig, aug, mod_records, copies, failures)
        checked += len(aug)
    if failures:
        for line in failures[:10]:
            print(f"FAIL {line}")
        if len(failures) > 10:
            print(f"... and {len(failures) - 10} more")
        print(f"verify: FAILED ({len(failures)} problem(s))")
        return EXIT_FAIL
    print(f"verify: OK ({checked} augmented sequence(s) checked)")
    return EXIT_OK


def _one_pass(seqs: list[FeatureSequence], dist, seed: int) -> float:
    t0 = time.perf_counter()
    for i, seq in enumerate(seqs):
        rng = derive_stream(seed, i, 0, 0)
        augment_sequence(seq, dist, rng)
    return time.perf_counter() - t0


def _time_workloads(workloads: dict, p: float, seed: int,
                    repeats: int) -> dict:
    """Best-of-repeats pass time per workload, measured round-robin.

    Interleaving rounds means machine-load drift hits every workload
    equally instead of biasing whichever was measured last.
    """
    dist = Fixed(p)
    best = {key: math.inf for key in workloads}
    for r in range(repeats + 1):  # round 0 is warmup
        for key, seqs in workloads.items():
            dt = _one_pass(seqs, dist, seed)
            if r > 0:
                best[key] = min(best[key], dt)
    return best


def _bench_data(M: int, T: int, d: int, seed: int) -> list[FeatureSequence]:
    gen = np.random.default_rng(seed)
    return [FeatureSequence(f"bench-{i}",
                            gen.standard_normal((T, d)).astype(np.float32))
            for i in range(M)]


def run_bench(T: int = 64, d: int = 300, M: int = 64, p: float = 0.5,
              seed: int = 0, repeats: int = 3, sweep: bool = False,
              compare_backends: bool = False) -> dict:
    """Measure augmentation throughput; returns a JSON-ready dict.

    The core metric is nanoseconds per moved cell: wall time divided by
    M * T * k where k is the selected-address count (None when k is 0).
    """
    k = fraction_to_count(p, d)

    def metrics(seqs: list[FeatureSequence]) -> dict:
        secs = _time_workloads({"base": seqs}, p, seed, repeats)["base"]
        cells = M * T * k
        return {"seconds": secs,
                "ns_per_cell": secs * 1e9 / cells if cells else None}

    base_seqs = _bench_data(M, T, d, seed)
    result: dict = {"backend": _backend.active_name(), "T": T, "d": d,
                    "M": M, "p": p, "k": k, **metrics(base_seqs)}

    if sweep:
        t_scales = [1, 2, 4]
        workloads = {("T", s): _bench_data(M, T * s, d, seed) for s in t_scales}
        workloads[("M", 2)] = _bench_data(M * 2, T, d, seed)
        best = _time_workloads(workloads, p, seed, repeats)
        t_times = [best[("T", s)] for s in t_scales]
        exponent = float(np.polyfit(np.log([T * s for s in t_scales]),
                                    np.log(t_times), 1)[0])
        m_times = [t_times[0], best[("M", 2)]]
        result["sweep"] = {
            "T_values": [T * s for s in t_scales],
            "T_seconds": t_times,
            "T_exponent": exponent,
            "M_values": [M, M * 2],
            "M_seconds": m_times,
            "M_ratio": m_times[1] / m_times[0],
        }

    if compare_backends:
        comparison = {}
        for name in _backend.available():
            with _backend.use(name):
                comparison[name] = metrics(base_seqs)
        result["backends"] = comparison

    return result


def cmd_bench(args: argparse.Namespace) -> int:
    result = run_bench(T=args.T, d=args.d, M=args.M, p=args.p, seed=args.seed,
                       repeats=args.repeats, sweep=args.sweep,
                       compare_backends=args.compare_backends)
    if args.json:
        print(json.dumps(result, indent=2))
        return EXIT_OK
    print(f"backend {result['backend']}: M={result['M']} T={result['T']} "
          f"d={result['d']} k={result['k']}")
    print(f"  {result['seconds'] * 1e3:.3f} ms per pass"
          + (f", {result['ns_per_cell']:.3f} ns per moved cell"
             if result["ns_per_cell"] is not None else ""))
    if "sweep" in result:
        s = result["sweep"]
        print(f"  T scaling exponent: {s['T_exponent']:.3f} over {s['T_values']}")
        print(f"  M doubling ratio:   {s['M_ratio']:.3f}")
    if "backends" in result:
        for name, m in result["backends"].items():
            per_cell = (f"{m['ns_per_cell']:.3f} ns/cell"
                        if m["ns_per_cell"] is not None else "n/a")
            print(f"  {name}: {m['seconds'] * 1e3:.3f} ms ({per_cell})")
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    if args.name:
        print(config_to_json(PRESETS[args.name]), end="")
        return EXIT_OK
    for name, cfg in PRESETS.items():
        mods = ", ".join(
            f"{mc.name}={type(mc.dist).__name__.lower()}" for mc in cfg.modalities)
        print(f"{name}: {mods}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqaug",
        description="Feature-wise temporal permutation augmentation for "
                    "multimodal sequence datasets.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_aug = sub.add_parser("augment", help="augment a dataset into a new directory")
    src = p_aug.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a JSON config document")
    src.add_argument("--preset", choices=sorted(PRESETS),
                     help="use a published configuration")
    p_aug.add_argument("--input", action="append", default=[], required=True,
                       metavar="NAME=PATH",
                       help="modality dataset (.csv or SQAF); repeatable")
    p_aug.add_argument("--output", required=True,
                       help="output directory (must not exist)")
    p_aug.add_argument("--seed", type=int, help="override master_seed")
    p_aug.add_argument("--copies", type=int, help="override copies per sequence")
    p_aug.add_argument("--mode", choices=["train", "inference"],
                       help="override mode")
    p_aug.add_argument("--threads", type=int, default=1,
                       help="worker threads (default 1); output is identical "
                            "for any thread count")
    p_aug.set_defaults(func=cmd_augment)

    p_ins = sub.add_parser("inspect", help="summarize one SQAF file")
    p_ins.add_argument("path")
    p_ins.add_argument("--json", action="store_true", help="machine-readable output")
    p_ins.set_defaults(func=cmd_inspect)

    p_ver = sub.add_parser(
        "verify", help="replay a plan log against originals and compare bitwise")
    p_ver.add_argument("--original", action="append", default=[], required=True,
                       metavar="NAME=PATH", help="original modality dataset; repeatable")
    p_ver.add_argument("--augmented", required=True,
                       help="directory produced by 'augment'")
    p_ver.set_defaults(func=cmd_verify)

    p_ben = sub.add_parser("bench", help="measure augmentation throughput")
    p_ben.add_argument("--len", type=int, default=64, dest="T",
                       help="timesteps per sequence")
    p_ben.add_argument("--dim", type=int, default=300, dest="d",
                       help="feature dim")
    p_ben.add_argument("--num", type=int, default=64, dest="M",
                       help="sequences per pass")
    p_ben.add_argument("--p", type=float, default=0.5, help="selected fraction")
    p_ben.add_argument("--seed", type=int, default=0)
    p_ben.add_argument("--repeats", type=int, default=3)
    p_ben.add_argument("--sweep", action="store_true",
                       help="also measure scaling in T and M")
    p_ben.add_argument("--compare-backends", action="store_true",
                       help="time every available backend")
    p_ben.add_argument("--json", action="store_true", help="machine-readable output")
    p_ben.set_defaults(func=cmd_bench)

    p_pre = sub.add_parser("presets", help="list published configurations")
    p_pre.add_argument("name", nargs="?", choices=sorted(PRESETS),
                       help="print this preset's full config JSON")
    p_pre.set_defaults(func=cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_IO
    except (SqafError, CsvParseError, PlanLogError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FileExistsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
