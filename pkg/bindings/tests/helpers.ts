import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import type { BoundSequence } from "../src/index";

// Deterministic fixture data: splitmix32 over a seed, mapped into a spread
// of float32 values (negatives, magnitudes across several decades).
export function fillData(cells: number, seed: number): Float32Array {
  const out = new Float32Array(cells);
  let s = seed >>> 0;
  for (let i = 0; i < cells; i++) {
    s = (s + 0x9e3779b9) >>> 0;
    let z = s;
    z = Math.imul(z ^ (z >>> 16), 0x21f0aaad) >>> 0;
    z = Math.imul(z ^ (z >>> 15), 0x735a2d97) >>> 0;
    z = (z ^ (z >>> 15)) >>> 0;
    out[i] = Math.fround((z / 0x100000000 - 0.5) * 200);
  }
  return out;
}

export function makeSequences(
  count: number,
  dim: number,
  tOf: (i: number) => number,
  seed: number,
): BoundSequence[] {
  const out: BoundSequence[] = [];
  for (let i = 0; i < count; i++) {
    out.push({
      seqId: `clip-${i}`,
      dim,
      data: fillData(tOf(i) * dim, seed ^ (i * 2654435761)),
    });
  }
  return out;
}

export function bytesOf(a: Float32Array): Buffer {
  return Buffer.from(a.buffer, a.byteOffset, a.byteLength);
}

export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "seqaug-bindings-test-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
