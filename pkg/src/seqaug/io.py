"""Dataset containers and serialization: the SQAF binary container, a strict
CSV importer, and the JSONL plan log.

SQAF layout, all integers little-endian, no padding or alignment:

    magic "SQAF" (4) | version u16 (2) | name_len u32 (4) | name bytes |
    num_sequences u32 (4) | dim u32 (4)

then per sequence:

    seq_id_len u32 (4) | seq_id bytes | T u32 (4) | T*dim float32 row-major

Strings are UTF-8. Parsing is strict: wrong magic, unsupported version,
truncation, and trailing bytes are all hard errors with byte offsets.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass

import numpy as np

from .core import U32_MAX, AugmentPlan, FeatureSequence, PlanLogRecord

SQAF_MAGIC = b"SQAF"
SQAF_VERSION = 1


class SqafError(ValueError):
    """Malformed or unreadable SQAF payload; offset is where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class CsvParseError(ValueError):
    """Malformed CSV input; line is the 1-based offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class PlanLogError(ValueError):
    """Malformed plan log; line is the 1-based offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


@dataclass
class ModalityDataset:
    """All sequences of one modality; every sequence shares the feature dim."""

    modality_name: str
    dim: int
    sequences: list[FeatureSequence]

    def __post_init__(self) -> None:
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"dim must be a positive int, got {self.dim!r}")
        for seq in self.sequences:
            if seq.d != self.dim:
                raise ValueError(
                    f"sequence '{seq.seq_id}' has d={seq.d}, dataset dim is "
                    f"{self.dim}")

    def __len__(self) -> int:
        return len(self.sequences)


def _encode_str(value: str, what: str) -> bytes:
    raw = value.encode("utf-8")
    if len(raw) > U32_MAX:
        raise ValueError(f"{what} is too long to encode ({len(raw)} bytes)")
    return struct.pack("<I", len(raw)) + raw


def write_sqaf(dataset: ModalityDataset) -> bytes:
    """Serialize a dataset to SQAF bytes."""
    if len(dataset.sequences) > U32_MAX:
        raise ValueError("too many sequences for the container")
    parts = [SQAF_MAGIC, struct.pack("<H", SQAF_VERSION),
             _encode_str(dataset.modality_name, "modality name"),
             struct.pack("<II", len(dataset.sequences), dataset.dim)]
    for seq in dataset.sequences:
        if seq.T > U32_MAX:
            raise ValueError(f"sequence '{seq.seq_id}' is too long ({seq.T})")
        parts.append(_encode_str(seq.seq_id, "sequence id"))
        parts.append(struct.pack("<I", seq.T))
        parts.append(seq.data.tobytes())
    return b"".join(parts)


class _Reader:
    """Cursor over a bytes payload that raises located truncation errors."""

    __slots__ = ("buf", "pos")

    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.buf):
            raise SqafError(
                f"truncated payload: expected {n} bytes for {what}, only "
                f"{len(self.buf) - self.pos} available", self.pos)
        chunk = self.buf[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u16(self, what: str) -> int:
        return struct.unpack("<H", self.take(2, what))[0]

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def string(self, what: str) -> str:
        n = self.u32(f"{what} length")
        start = self.pos
        raw = self.take(n, what)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SqafError(f"{what} is not valid UTF-8: {exc}", start) from None


def read_sqaf(payload: bytes) -> ModalityDataset:
    """Parse SQAF bytes back into a dataset.

    Inverse of write_sqaf: round trips are bit-exact, including NaN payloads,
    because float payloads are copied as raw bytes.
    """
    r = _Reader(payload)
    if r.take(4, "magic") != SQAF_MAGIC:
        raise SqafError("bad magic: not an SQAF payload", 0)
    version = r.u16("version")
    if version != SQAF_VERSION:
        raise SqafError(f"unsupported version {version}", 4)
    name = r.string("modality name")
    num_sequences = r.u32("sequence count")
    dim = r.u32("feature dim")
    if dim < 1:
        raise SqafError("feature dim must be positive", r.pos - 4)
    sequences: list[FeatureSequence] = []
    for i in range(num_sequences):
        seq_id = r.string(f"sequence {i} id")
        T = r.u32(f"sequence {i} length")
        nbytes = T * dim * 4
        if nbytes >= 2**64:
            raise SqafError(
                f"sequence {i} data size {T}x{dim} floats overflows a 64-bit "
                f"byte count", r.pos - 4)
        if nbytes > len(payload) - r.pos:
            raise SqafError(
                f"truncated payload: expected {nbytes} bytes for sequence {i} "
                f"data, only {len(payload) - r.pos} available", r.pos)
        raw = r.take(nbytes, f"sequence {i} data")
        data = np.frombuffer(raw, dtype="<f4").reshape(T, dim)
        sequences.append(FeatureSequence(seq_id, data))
    if r.pos != len(payload):
        raise SqafError(
            f"trailing bytes: {len(payload) - r.pos} after last sequence", r.pos)
    return ModalityDataset(name, dim, sequences)


def read_sqaf_file(path: str) -> ModalityDataset:
    with open(path, "rb") as fh:
        return read_sqaf(fh.read())


def write_sqaf_file(path: str, dataset: ModalityDataset) -> None:
    with open(path, "wb") as fh:
        fh.write(write_sqaf(dataset))


def import_csv(text: str, modality_name: str) -> ModalityDataset:
    """Parse the CSV interchange form into a dataset.

    Expected header: seq_id,t,f_0,...,f_{d-1}. Rows for a sequence must be
    contiguous and their t values must count up from 0. Values go through
    float() and are stored as float32.
    """
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise CsvParseError("empty input: missing header", 1)
    header = lines[0].split(",")
    if len(header) < 3 or header[0] != "seq_id" or header[1] != "t":
        raise CsvParseError(
            "header must start with seq_id,t followed by feature columns", 1)
    d = len(header) - 2
    for j, col in enumerate(header[2:]):
        if col != f"f_{j}":
            raise CsvParseError(
                f"feature column {j} must be named f_{j}, got {col!r}", 1)

    sequences: list[FeatureSequence] = []
    seen: set[str] = set()
    cur_id: str | None = None
    cur_rows: list[list[float]] = []

    def flush() -> None:
        if cur_id is not None:
            data = np.array(cur_rows, dtype=np.float32).reshape(len(cur_rows), d)
            sequences.append(FeatureSequence(cur_id, data))

    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != d + 2:
            raise CsvParseError(
                f"expected {d + 2} fields, got {len(fields)}", lineno)
        seq_id = fields[0]
        try:
            t = int(fields[1])
        except ValueError:
            raise CsvParseError(
                f"t must be an integer, got {fields[1]!r}", lineno) from None
        if seq_id != cur_id:
            if seq_id in seen:
                raise CsvParseError(
                    f"rows for sequence {seq_id!r} are not contiguous", lineno)
            flush()
            seen.add(seq_id)
            cur_id = seq_id
            cur_rows = []
        if t != len(cur_rows):
            raise CsvParseError(
                f"t values for sequence {seq_id!r} must count up from 0: "
                f"expected {len(cur_rows)}, got {t}", lineno)
        try:
            cur_rows.append([float(v) for v in fields[2:]])
        except ValueError as exc:
            raise CsvParseError(f"bad float value: {exc}", lineno) from None
    flush()
    if not sequences:
        raise CsvParseError("no data rows", max(2, len(lines)))
    return ModalityDataset(modality_name, d, sequences)


def import_csv_file(path: str, modality_name: str) -> ModalityDataset:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return import_csv(fh.read(), modality_name)


def _record_to_obj(record: PlanLogRecord) -> dict:
    return {
        "seq_id": record.seq_id,
        "copy": record.copy_index,
        "modality": record.modality_name,
        "p": record.plan.p,
        "addresses": [int(a) for a in record.plan.addresses],
        "pi": [int(t) for t in record.plan.pi],
    }


def write_plan_log(path: str, records: list[PlanLogRecord]) -> None:
    """Write one JSON object per line, in the order given."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(_record_to_obj(record), separators=(",", ":")))
            fh.write("\n")


def _record_from_obj(obj, line: int) -> PlanLogRecord:
    expected = {"seq_id", "copy", "modality", "p", "addresses", "pi"}
    if not isinstance(obj, dict):
        raise PlanLogError("not a JSON object", line)
    if set(obj) != expected:
        raise PlanLogError(f"wrong keys {sorted(obj)!r}", line)
    if not isinstance(obj["seq_id"], str) or not isinstance(obj["modality"], str):
        raise PlanLogError("seq_id and modality must be strings", line)
    if isinstance(obj["copy"], bool) or not isinstance(obj["copy"], int):
        raise PlanLogError("copy must be an integer", line)
    if isinstance(obj["p"], bool) or not isinstance(obj["p"], (int, float)):
        raise PlanLogError("p must be a number", line)
    for key in ("addresses", "pi"):
        val = obj[key]
        if not isinstance(val, list) or any(
                isinstance(v, bool) or not isinstance(v, int) for v in val):
            raise PlanLogError(f"{key} must be a flat list of integers", line)
    plan = AugmentPlan(
        p=float(obj["p"]),
        addresses=np.asarray(obj["addresses"], dtype=np.int64).reshape(-1),
        pi=np.asarray(obj["pi"], dtype=np.int64).reshape(-1),
    )
    return PlanLogRecord(obj["seq_id"], obj["copy"], obj["modality"], plan)


def read_plan_log(path: str) -> list[PlanLogRecord]:
    """Read a plan log written by write_plan_log; strict about shape."""
    records: list[PlanLogRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PlanLogError(str(exc), lineno) from None
            records.append(_record_from_obj(obj, lineno))
    return records


def atomic_write_dir(final_dir: str, write_into) -> None:
    """Populate final_dir atomically: write into a temp sibling, then rename.

    write_into(tmp_path) fills the directory; on any failure the temp tree is
    removed and final_dir is left untouched. Refuses an existing final_dir.
    """
    import shutil
    import tempfile

    if os.path.exists(final_dir):
        raise FileExistsError(f"output path already exists: {final_dir}")
    parent = os.path.dirname(os.path.abspath(final_dir)) or "."
    os.makedirs(parent, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=".seqaug-tmp-", dir=parent)
    try:
        write_into(tmp)
        os.replace(tmp, final_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
