"""Acceptance gate: one test per shipping criterion, each printing a single
PASS line (run with -s to see them on success). Budgets are asserted inside
the tests.
"""

import itertools
import json
import os
import subprocess
import sys
import time
from collections import Counter

import numpy as np
import pytest

from seqaug import (
    AugmentConfig,
    Beta,
    FeatureSequence,
    Fixed,
    FoldedNormal,
    Mode,
    ModalityConfig,
    ModalityDataset,
    MultimodalSample,
    apply_plan,
    augment_sample,
    augment_sequence,
    bits_equal,
    derive_stream,
    draw_fraction,
    import_csv,
    read_sqaf,
    read_sqaf_file,
    sample_addresses,
    sample_permutation,
    write_sqaf,
    write_sqaf_file,
)
from seqaug.cli import main, run_bench
from seqaug.core import AugmentPlan


def test_c1_worked_example_single_selected_address():
    t0 = time.perf_counter()
    d = 7
    data = np.random.default_rng(0).standard_normal((6, d)).astype(np.float32)
    seq = FeatureSequence("fig", data)
    pi = np.array([2, 5, 4, 1, 0, 3], dtype=np.int64)
    plan = AugmentPlan(1 / d, np.array([2], dtype=np.int64), pi)
    out = apply_plan(seq, plan)
    for t in range(6):
        assert out.data[t, 2] == data[pi[t], 2]
    others = [a for a in range(d) if a != 2]
    assert bits_equal(out.data[:, others], data[:, others])
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"\nPASS worked example: selected column follows pi, others "
          f"bit-identical ({elapsed:.3f}s)")


def test_c2_multiset_and_identity_suite_10k():
    t0 = time.perf_counter()
    gen = np.random.default_rng(20240)
    # boundary shapes first, then size-skewed fuzz
    forced = [(0, 1), (0, 512), (1, 1), (1, 512), (512, 1), (512, 512), (2, 1)]
    checked = 0
    for i in range(10_000):
        if i < len(forced):
            T, d = forced[i]
        else:
            T = int(513.0 ** gen.random()) - 1
            d = int(512.0 ** gen.random())
        kind = i % 3
        if kind == 0:
            dist = Beta(float(gen.uniform(0.05, 5.0)))
        elif kind == 1:
            dist = FoldedNormal(float(gen.random()), float(gen.uniform(0.001, 0.5)))
        else:
            dist = Fixed(float(gen.random()))
        if i % 10 == 9:
            dist = Fixed(0.0)
        raw = gen.integers(0, 1 << 32, size=(T, d), dtype=np.uint32)
        seq = FeatureSequence(f"f{i}", raw.view(np.float32))

        if i % 11 == 10:
            cfg = AugmentConfig((ModalityConfig("m", dist),),
                                mode=Mode.INFERENCE, master_seed=i)
            sample = MultimodalSample("s", {"m": seq})
            out_sample, records = augment_sample(sample, cfg, i, 0)
            assert records == []
            assert out_sample.streams["m"] is seq
            checked += 1
            continue

        out, plan = augment_sequence(seq, dist, derive_stream(9, i, 0, 0))
        a = out.data.view(np.uint32)
        o = seq.data.view(np.uint32)
        assert np.array_equal(np.sort(a, axis=0), np.sort(o, axis=0))
        untouched = np.setdiff1d(np.arange(d), plan.addresses)
        assert np.array_equal(a[:, untouched], o[:, untouched])
        if T <= 1:
            assert np.array_equal(a, o)
        if isinstance(dist, Fixed) and dist.p == 0.0:
            assert plan.addresses.size == 0
            assert np.array_equal(a, o)
        checked += 1
    elapsed = time.perf_counter() - t0
    assert checked == 10_000
    assert elapsed < 60.0
    print(f"\nPASS multiset/identity suite: 10,000 fuzzed cases, zero "
          f"failures ({elapsed:.1f}s)")


def test_c3_distribution_statistics_100k():
    n = 100_000

    def draws(dist, seed):
        s = derive_stream(seed, 0, 0, 0)
        return np.array([draw_fraction(dist, s) for _ in range(n)])

    b11 = draws(Beta(1.0), 101)
    assert np.all((b11 >= 0.0) & (b11 <= 1.0))
    assert abs(b11.mean() - 0.5) < 0.01
    assert abs(b11.var() - 1 / 12) < 0.005

    b01 = draws(Beta(0.1), 102)
    assert np.all((b01 >= 0.0) & (b01 <= 1.0))
    assert abs(b01.mean() - 0.5) < 0.01

    fn = draws(FoldedNormal(0.15, 0.01), 103)
    assert np.all((fn >= 0.0) & (fn <= 1.0))
    assert abs(fn.mean() - 0.15) < 0.001

    print(f"\nPASS distribution statistics: Beta(1,1) mean {b11.mean():.4f} "
          f"var {b11.var():.4f}, Beta(.1,.1) mean {b01.mean():.4f}, "
          f"FoldedNormal(.15,.01) mean {fn.mean():.4f}")


def test_c4_uniformity_of_permutations_and_subsets():
    s = derive_stream(2025, 0, 0, 0)
    perm_counts = Counter(tuple(sample_permutation(3, s)) for _ in range(60_000))
    assert len(perm_counts) == 6
    for combo, cnt in perm_counts.items():
        assert abs(cnt / 60_000 - 1 / 6) < 0.01, combo

    s = derive_stream(2026, 0, 0, 0)
    sub_counts = Counter(tuple(sample_addresses(2, 5, s)) for _ in range(50_000))
    assert set(sub_counts) == set(itertools.combinations(range(5), 2))
    for combo, cnt in sub_counts.items():
        assert abs(cnt / 50_000 - 0.1) < 0.01, combo

    print("\nPASS uniformity: 6 permutations of T=3 at 1/6 +/- 0.01, "
          "10 2-of-5 subsets at 0.1 +/- 0.01")


def _write_fixture(tmp_path, n=8, seed=3):
    gen = np.random.default_rng(seed)
    paths = {}
    for name, d in [("text", 12), ("audio", 5)]:
        seqs = [FeatureSequence(f"u{i}", gen.standard_normal(
            (int(gen.integers(2, 21)), d)).astype(np.float32)) for i in range(n)]
        path = str(tmp_path / f"{name}.sqaf")
        write_sqaf_file(path, ModalityDataset(name, d, seqs))
        paths[name] = path
    cfg_path = str(tmp_path / "cfg.json")
    with open(cfg_path, "w") as fh:
        json.dump({"mode": "train", "master_seed": 77, "copies": 2,
                   "modalities": [
                       {"name": "text", "dist": {"kind": "beta", "alpha": 0.4}},
                       {"name": "audio", "dist": {"kind": "folded_normal",
                                                  "mu": 0.3}}]}, fh)
    return paths, cfg_path


def test_c5_byte_identical_determinism(tmp_path):
    paths, cfg = _write_fixture(tmp_path)
    outs = []
    for tag, threads in [("r1", 1), ("r2", 1), ("t8", 8)]:
        out = str(tmp_path / tag)
        proc = subprocess.run(
            [sys.executable, "-m", "seqaug", "augment", "--config", cfg,
             "--input", f"text={paths['text']}", "--input", f"audio={paths['audio']}",
             "--output", out, "--threads", str(threads)],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(out)
    for fname in ("text.sqaf", "audio.sqaf", "plans.jsonl", "config.json"):
        blobs = {open(os.path.join(o, fname), "rb").read() for o in outs}
        assert len(blobs) == 1, f"{fname} differs between runs"
    print("\nPASS determinism: byte-identical outputs across two runs and "
          "worker counts {1, 8}")


def test_c6_verification_oracle_100_mutations(tmp_path):
    paths, cfg = _write_fixture(tmp_path, n=10, seed=4)
    out = str(tmp_path / "out")
    assert main(["augment", "--config", cfg,
                 "--input", f"text={paths['text']}",
                 "--input", f"audio={paths['audio']}",
                 "--output", out]) == 0
    verify_args = ["verify", "--original", f"text={paths['text']}",
                   "--original", f"audio={paths['audio']}", "--augmented", out]
    assert main(verify_args) == 0

    records = [json.loads(ln) for ln in
               open(os.path.join(out, "plans.jsonl"))]
    by_mod = {"text": read_sqaf_file(os.path.join(out, "text.sqaf")),
              "audio": read_sqaf_file(os.path.join(out, "audio.sqaf"))}
    pristine = {m: open(os.path.join(out, f"{m}.sqaf"), "rb").read()
                for m in by_mod}
    candidates = [r for r in records if r["addresses"] and r["pi"]]
    assert candidates
    gen = np.random.default_rng(99)
    detected = 0
    for trial in range(100):
        rec = candidates[int(gen.integers(len(candidates)))]
        mod = rec["modality"]
        ds = read_sqaf(pristine[mod])
        pos = next(i for i, s in enumerate(ds.sequences)
                   if s.seq_id == f"{rec['seq_id']}#{rec['copy']}")
        data = ds.sequences[pos].data.copy()
        row = int(gen.integers(len(rec["pi"])))
        col = rec["addresses"][int(gen.integers(len(rec["addresses"])))]
        byte = int(gen.integers(4))
        flip = int(gen.integers(1, 256)) << (8 * byte)
        data.view(np.uint32)[row, col] ^= flip
        ds.sequences[pos] = FeatureSequence(ds.sequences[pos].seq_id, data)
        write_sqaf_file(os.path.join(out, f"{mod}.sqaf"),
                        ModalityDataset(mod, ds.dim, ds.sequences))
        if main(verify_args) == 1:
            detected += 1
        with open(os.path.join(out, f"{mod}.sqaf"), "wb") as fh:
            fh.write(pristine[mod])
    assert detected == 100
    print("\nPASS verification oracle: genuine output accepted, 100/100 "
          "single-byte mutations in selected columns detected")


def test_c7_scaling_is_linear_in_T_and_M():
    t0 = time.perf_counter()
    result = run_bench(T=1024, d=300, M=64, p=0.5, seed=1, repeats=3, sweep=True)
    elapsed = time.perf_counter() - t0
    sweep = result["sweep"]
    assert sweep["T_values"] == [1024, 2048, 4096]
    assert 0.8 <= sweep["T_exponent"] <= 1.3, sweep
    assert 1.6 <= sweep["M_ratio"] <= 2.4, sweep
    assert elapsed < 120.0
    print(f"\nPASS scaling: T exponent {sweep['T_exponent']:.3f} in [0.8, 1.3], "
          f"M doubling ratio {sweep['M_ratio']:.3f} in [1.6, 2.4] "
          f"({elapsed:.1f}s)")


def test_c8_format_round_trips_1000_fuzzed():
    gen = np.random.default_rng(8080)
    for case in range(700):
        d = int(gen.integers(1, 16))
        seqs = []
        for i in range(int(gen.integers(0, 6))):
            T = int(gen.integers(0, 12))
            raw = gen.integers(0, 1 << 32, size=(T, d), dtype=np.uint32)
            seqs.append(FeatureSequence(f"s{i}", raw.view(np.float32)))
        name = ["", "text", "m/…", "日本語"][case % 4]
        ds = ModalityDataset(name, d, seqs)
        back = read_sqaf(write_sqaf(ds))
        assert back.modality_name == name and back.dim == d
        assert len(back) == len(ds)
        for a, b in zip(ds.sequences, back.sequences):
            assert a.seq_id == b.seq_id
            assert np.array_equal(a.data.view(np.uint32), b.data.view(np.uint32))

    specials = ["nan", "inf", "-inf", "0.0", "-0.0"]
    for case in range(300):
        d = int(gen.integers(1, 6))
        rows_per_seq = [int(gen.integers(1, 6)) for _ in range(int(gen.integers(1, 4)))]
        lines = ["seq_id,t," + ",".join(f"f_{j}" for j in range(d))]
        expected: list[np.ndarray] = []
        for si, rows in enumerate(rows_per_seq):
            want = np.empty((rows, d), dtype=np.float32)
            for t in range(rows):
                cells = []
                for j in range(d):
                    if gen.random() < 0.1:
                        cells.append(specials[int(gen.integers(len(specials)))])
                    else:
                        cells.append(repr(float(np.float32(
                            gen.standard_normal() * 10.0 ** gen.integers(-20, 20)))))
                    want[t, j] = np.float32(float(cells[-1]))
                lines.append(f"q{si},{t}," + ",".join(cells))
            expected.append(want)
        ds = import_csv("\n".join(lines) + "\n", "fuzz")
        back = read_sqaf(write_sqaf(ds))
        # the text form pins exact float32 bit patterns; both hops keep them
        assert len(back) == len(rows_per_seq)
        for si, (a, b) in enumerate(zip(ds.sequences, back.sequences)):
            assert a.seq_id == b.seq_id == f"q{si}"
            assert np.array_equal(a.data.view(np.uint32),
                                  expected[si].view(np.uint32))
            assert np.array_equal(a.data.view(np.uint32), b.data.view(np.uint32))
    print("\nPASS format round trips: 700 fuzzed binary datasets and 300 "
          "CSV chains bit-exact, zero failures")
