import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import type { AugmentConfigMapping, PlanRecord } from "./config.js";
import { runCliOrThrow } from "./cli.js";
import { decodeSqaf, encodeSqaf, type SqafSequence } from "./sqaf.js";

export type {
  AugmentConfigMapping,
  BetaDist,
  DistMapping,
  FixedDist,
  FoldedNormalDist,
  ModalityMapping,
  PlanRecord,
} from "./config.js";
export {
  decodeSqaf,
  encodeSqaf,
  SqafFormatError,
  type SqafDataset,
  type SqafSequence,
} from "./sqaf.js";

export interface BoundSequence {
  seqId: string;
  // Feature dimension; data is row-major T x dim with T = data.length / dim.
  dim: number;
  data: Float32Array;
}

export interface BoundBatch {
  config: AugmentConfigMapping;
  // One list per modality name, all lists the same length; position i across
  // the lists is one sample. Position maps to RNG sequence index
  // seqIndexBase + i, so determinism survives batching.
  modalities: Record<string, BoundSequence[]>;
}

export interface BoundResult {
  // Fresh buffers in the same modality/position layout; inputs are never
  // mutated. seqIds are the caller's original ids.
  modalities: Record<string, BoundSequence[]>;
  // Plan records for this copy index, in (position, modality ordinal) order;
  // empty in inference mode.
  plans: PlanRecord[];
}

const U32_MAX = 0xffffffff;
const PAD_PREFIX = "__seqaug_pad__";

function checkIndex(value: number, what: string): void {
  if (!Number.isSafeInteger(value) || value < 0) {
    throw new RangeError(`${what} must be a non-negative integer, got ${value}`);
  }
}

function validateBatch(batch: BoundBatch): { names: string[]; count: number } {
  if (batch === null || typeof batch !== "object" || batch.modalities === null ||
      typeof batch.modalities !== "object") {
    throw new TypeError("batch must be an object with config and modalities");
  }
  const names = Object.keys(batch.modalities);
  let count = -1;
  for (const name of names) {
    const list = batch.modalities[name]!;
    if (!Array.isArray(list)) {
      throw new TypeError(`modality ${name}: expected an array of sequences`);
    }
    if (count === -1) {
      count = list.length;
    } else if (list.length !== count) {
      throw new RangeError(
        `modality ${name} has ${list.length} sequence(s), expected ${count} to match the other modalities`,
      );
    }
    let dim = 0;
    for (let i = 0; i < list.length; i++) {
      const seq = list[i]!;
      if (!(seq.data instanceof Float32Array)) {
        throw new TypeError(`modality ${name} sequence ${i}: data must be a Float32Array`);
      }
      if (!Number.isInteger(seq.dim) || seq.dim < 1) {
        throw new RangeError(`modality ${name} sequence ${i}: dim must be a positive integer, got ${seq.dim}`);
      }
      if (i === 0) {
        dim = seq.dim;
      } else if (seq.dim !== dim) {
        throw new RangeError(
          `modality ${name} sequence ${i}: dim ${seq.dim} differs from the modality's dim ${dim}`,
        );
      }
      if (seq.data.length % seq.dim !== 0) {
        throw new RangeError(
          `modality ${name} sequence ${i} (${seq.seqId}): data length ${seq.data.length} is not a multiple of dim ${seq.dim}`,
        );
      }
      if (typeof seq.seqId !== "string") {
        throw new TypeError(`modality ${name} sequence ${i}: seqId must be a string`);
      }
      if (seq.seqId.startsWith(PAD_PREFIX)) {
        throw new RangeError(
          `modality ${name} sequence ${i}: seq ids starting with ${PAD_PREFIX} are reserved`,
        );
      }
    }
  }
  return { names, count: count === -1 ? 0 : count };
}

function expectedOutputId(seqId: string, copyIndex: number, copies: number): string {
  return copies === 1 ? seqId : `${seqId}#${copyIndex}`;
}

/**
 * Augment one batch of in-memory sequences.
 *
 * Every byte of the result comes from the augmentation CLI run on a private
 * temp directory, so outputs are bitwise-identical to the file pipeline for
 * the same data, config, master_seed, sequence index, and copy index.
 * Position i augments as sequence index seqIndexBase + i with the given
 * copyIndex. Work scales with (seqIndexBase + batch size) * (copyIndex + 1),
 * so keep seqIndexBase/copyIndex small where throughput matters.
 */
export function boundAugment(
  batch: BoundBatch,
  seqIndexBase = 0,
  copyIndex = 0,
): BoundResult {
  checkIndex(seqIndexBase, "seqIndexBase");
  checkIndex(copyIndex, "copyIndex");
  const { names, count } = validateBatch(batch);
  const copies = copyIndex + 1;
  if ((seqIndexBase + count) * copies > U32_MAX) {
    throw new RangeError(
      `seqIndexBase ${seqIndexBase} with ${count} sequence(s) and copyIndex ${copyIndex} overflows the dataset size limit`,
    );
  }

  const tmp = mkdtempSync(join(tmpdir(), "seqaug-bindings-"));
  try {
    const configPath = join(tmp, "config.json");
    writeFileSync(configPath, JSON.stringify(batch.config));

    const args = ["augment", "--config", configPath, "--copies", String(copies)];
    for (const name of names) {
      const list = batch.modalities[name]!;
      const dim = count > 0 ? list[0]!.dim : 1;
      const sequences: SqafSequence[] = [];
      for (let i = 0; i < seqIndexBase; i++) {
        sequences.push({ seqId: `${PAD_PREFIX}${i}`, data: new Float32Array(0) });
      }
      for (const seq of list) {
        sequences.push({ seqId: seq.seqId, data: seq.data });
      }
      const path = join(tmp, `${name}.sqaf`);
      writeFileSync(path, encodeSqaf({ name, dim, sequences }));
      args.push("--input", `${name}=${path}`);
    }
    const outDir = join(tmp, "out");
    args.push("--output", outDir);
    runCliOrThrow(args);

    const modalities: Record<string, BoundSequence[]> = {};
    for (const name of names) {
      const list = batch.modalities[name]!;
      const ds = decodeSqaf(readFileSync(join(outDir, `${name}.sqaf`)));
      const picked: BoundSequence[] = [];
      for (let i = 0; i < count; i++) {
        const pos = (seqIndexBase + i) * copies + copyIndex;
        const seq = ds.sequences[pos];
        if (seq === undefined) {
          throw new Error(
            `augmented ${name} dataset has ${ds.sequences.length} sequence(s), position ${pos} missing`,
          );
        }
        const want = expectedOutputId(list[i]!.seqId, copyIndex, copies);
        if (seq.seqId !== want) {
          throw new Error(
            `augmented ${name} position ${pos} has id ${seq.seqId}, expected ${want}`,
          );
        }
        picked.push({ seqId: list[i]!.seqId, dim: ds.dim, data: seq.data });
      }
      modalities[name] = picked;
    }

    const plans: PlanRecord[] = [];
    const logText = readFileSync(join(outDir, "plans.jsonl"), "utf-8");
    for (const line of logText.split("\n")) {
      if (line.trim() === "") continue;
      const record = JSON.parse(line) as PlanRecord;
      if (record.copy !== copyIndex) continue;
      if (record.seq_id.startsWith(PAD_PREFIX)) continue;
      plans.push(record);
    }
    return { modalities, plans };
  } finally {
    rmSync(tmp, { recursive: true, force: true });
  }
}

/** Version string of the underlying engine; always equals CLI --version. */
export function boundVersion(): string {
  return runCliOrThrow(["--version"]).stdout.trim();
}
