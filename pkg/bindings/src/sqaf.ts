// SQAF codec: the binary dataset format the augmentation CLI reads and
// writes. Little-endian throughout. Float payloads are moved through u32
// reads/writes so NaN bit patterns survive byte-exactly (DataView float
// accessors may canonicalize signaling NaNs).

export interface SqafSequence {
  seqId: string;
  // T rows by `dim` columns, row-major, length T*dim.
  data: Float32Array;
}

export interface SqafDataset {
  name: string;
  dim: number;
  sequences: SqafSequence[];
}

const MAGIC = 0x46415153; // "SQAF" read as LE u32
const VERSION = 1;

export class SqafFormatError extends Error {
  readonly offset: number;

  constructor(message: string, offset: number) {
    super(`${message} (at byte offset ${offset})`);
    this.name = "SqafFormatError";
    this.offset = offset;
  }
}

export function encodeSqaf(ds: SqafDataset): Uint8Array {
  if (!Number.isInteger(ds.dim) || ds.dim < 1) {
    throw new RangeError(`dim must be a positive integer, got ${ds.dim}`);
  }
  const enc = new TextEncoder();
  const nameBytes = enc.encode(ds.name);
  const idBytes = ds.sequences.map((s) => enc.encode(s.seqId));

  let total = 4 + 2 + 4 + nameBytes.length + 4 + 4;
  for (let i = 0; i < ds.sequences.length; i++) {
    const seq = ds.sequences[i]!;
    if (seq.data.length % ds.dim !== 0) {
      throw new RangeError(
        `sequence ${i} (${seq.seqId}): data length ${seq.data.length} is not a multiple of dim ${ds.dim}`,
      );
    }
    total += 4 + idBytes[i]!.length + 4 + seq.data.byteLength;
  }

  const out = new Uint8Array(total);
  const dv = new DataView(out.buffer);
  let pos = 0;
  dv.setUint32(pos, MAGIC, true);
  pos += 4;
  dv.setUint16(pos, VERSION, true);
  pos += 2;
  dv.setUint32(pos, nameBytes.length, true);
  pos += 4;
  out.set(nameBytes, pos);
  pos += nameBytes.length;
  dv.setUint32(pos, ds.sequences.length, true);
  pos += 4;
  dv.setUint32(pos, ds.dim, true);
  pos += 4;

  for (let i = 0; i < ds.sequences.length; i++) {
    const seq = ds.sequences[i]!;
    const id = idBytes[i]!;
    dv.setUint32(pos, id.length, true);
    pos += 4;
    out.set(id, pos);
    pos += id.length;
    dv.setUint32(pos, seq.data.length / ds.dim, true);
    pos += 4;
    const words = new Uint32Array(
      seq.data.buffer,
      seq.data.byteOffset,
      seq.data.length,
    );
    for (let j = 0; j < words.length; j++) {
      dv.setUint32(pos, words[j]!, true);
      pos += 4;
    }
  }
  return out;
}

class Reader {
  pos = 0;

  constructor(private readonly dv: DataView) {}

  private need(n: number, what: string): void {
    if (this.pos + n > this.dv.byteLength) {
      throw new SqafFormatError(
        `truncated file: ${what} needs ${n} byte(s), ${this.dv.byteLength - this.pos} available`,
        this.pos,
      );
    }
  }

  u16(what: string): number {
    this.need(2, what);
    const v = this.dv.getUint16(this.pos, true);
    this.pos += 2;
    return v;
  }

  u32(what: string): number {
    this.need(4, what);
    const v = this.dv.getUint32(this.pos, true);
    this.pos += 4;
    return v;
  }

  string(what: string): string {
    const at = this.pos;
    const len = this.u32(`${what} length`);
    this.need(len, what);
    const bytes = new Uint8Array(this.dv.buffer, this.dv.byteOffset + this.pos, len);
    this.pos += len;
    try {
      return new TextDecoder("utf-8", { fatal: true }).decode(bytes);
    } catch {
      throw new SqafFormatError(`${what} is not valid UTF-8`, at + 4);
    }
  }
}

export function decodeSqaf(bytes: Uint8Array): SqafDataset {
  const dv = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const r = new Reader(dv);
  const magicAt = r.pos;
  if (r.u32("magic") !== MAGIC) {
    throw new SqafFormatError('bad magic, expected "SQAF"', magicAt);
  }
  const versionAt = r.pos;
  const version = r.u16("version");
  if (version !== VERSION) {
    throw new SqafFormatError(`unsupported version ${version}`, versionAt);
  }
  const name = r.string("dataset name");
  const numSequences = r.u32("sequence count");
  const dimAt = r.pos;
  const dim = r.u32("dim");
  if (dim < 1) {
    throw new SqafFormatError("dim must be >= 1", dimAt);
  }

  const sequences: SqafSequence[] = [];
  for (let i = 0; i < numSequences; i++) {
    const seqId = r.string(`sequence ${i} id`);
    const tAt = r.pos;
    const T = r.u32(`sequence ${i} timestep count`);
    const cells = T * dim;
    if (cells * 4 > dv.byteLength - r.pos) {
      throw new SqafFormatError(
        `truncated file: sequence ${i} data needs ${cells * 4} byte(s), ${dv.byteLength - r.pos} available`,
        tAt + 4,
      );
    }
    const data = new Float32Array(cells);
    const words = new Uint32Array(data.buffer);
    for (let j = 0; j < cells; j++) {
      words[j] = dv.getUint32(r.pos + j * 4, true);
    }
    r.pos += cells * 4;
    sequences.push({ seqId, data });
  }
  if (r.pos !== dv.byteLength) {
    throw new SqafFormatError(
      `trailing bytes: ${dv.byteLength - r.pos} byte(s) past the last sequence`,
      r.pos,
    );
  }
  return { name, dim, sequences };
}
