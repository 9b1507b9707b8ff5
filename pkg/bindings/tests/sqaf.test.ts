import { writeFileSync } from "node:fs";
import { join } from "node:path";
import { expect, test } from "vitest";

import { decodeSqaf, encodeSqaf, SqafFormatError } from "../src/sqaf";
import { runCliOrThrow } from "../src/cli";
import { fillData, withTempDir } from "./helpers";

test("empty dataset encodes to the 18-byte header", () => {
  const bytes = encodeSqaf({ name: "", dim: 4, sequences: [] });
  expect(bytes.length).toBe(18);
  const dv = new DataView(bytes.buffer);
  expect(new TextDecoder().decode(bytes.subarray(0, 4))).toBe("SQAF");
  expect(dv.getUint16(4, true)).toBe(1); // version
  expect(dv.getUint32(6, true)).toBe(0); // name length
  expect(dv.getUint32(10, true)).toBe(0); // num sequences
  expect(dv.getUint32(14, true)).toBe(4); // dim
});

test("one empty-id sequence T=2 d=3 encodes to 50 bytes", () => {
  const bytes = encodeSqaf({
    name: "",
    dim: 3,
    sequences: [{ seqId: "", data: new Float32Array(6) }],
  });
  expect(bytes.length).toBe(50);
  const dv = new DataView(bytes.buffer);
  expect(dv.getUint32(18, true)).toBe(0); // seq id length
  expect(dv.getUint32(22, true)).toBe(2); // T
});

test("round trip preserves every bit, NaN payloads included", () => {
  const words = new Uint32Array([
    0x7fc00001, // quiet NaN with payload
    0xffc00002, // negative NaN with payload
    0x7f800000, // +inf
    0x80000000, // -0.0
    0x00000001, // smallest denormal
    0x3f800000, // 1.0
  ]);
  const data = new Float32Array(words.buffer);
  const ds = {
    name: "日本語",
    dim: 3,
    sequences: [
      { seqId: "α", data },
      { seqId: "", data: new Float32Array(0) }, // T=0
    ],
  };
  const back = decodeSqaf(encodeSqaf(ds));
  expect(back.name).toBe("日本語");
  expect(back.dim).toBe(3);
  expect(back.sequences.length).toBe(2);
  expect(back.sequences[0]!.seqId).toBe("α");
  const backWords = new Uint32Array(back.sequences[0]!.data.buffer);
  expect([...backWords]).toEqual([...words]);
  expect(back.sequences[1]!.data.length).toBe(0);
});

test("strict decode rejects corrupt inputs with offsets", () => {
  const good = encodeSqaf({
    name: "m",
    dim: 2,
    sequences: [{ seqId: "a", data: fillData(8, 7) }],
  });

  const badMagic = good.slice();
  badMagic[0] = 0x58;
  expect(() => decodeSqaf(badMagic)).toThrowError(/bad magic.*offset 0\)/);

  const badVersion = good.slice();
  badVersion[4] = 9;
  expect(() => decodeSqaf(badVersion)).toThrowError(/version 9.*offset 4\)/);

  expect(() => decodeSqaf(good.subarray(0, good.length - 3))).toThrowError(
    SqafFormatError,
  );

  const trailing = new Uint8Array(good.length + 1);
  trailing.set(good);
  expect(() => decodeSqaf(trailing)).toThrowError(/trailing bytes/);

  expect(() => decodeSqaf(new Uint8Array(0))).toThrowError(/truncated/);
});

test("files written here parse under the engine's strict reader", () => {
  withTempDir((dir) => {
    const path = join(dir, "text.sqaf");
    writeFileSync(
      path,
      encodeSqaf({
        name: "text",
        dim: 5,
        sequences: [
          { seqId: "a", data: fillData(15, 1) },
          { seqId: "b", data: fillData(5, 2) },
        ],
      }),
    );
    const out = runCliOrThrow(["inspect", path, "--json"]);
    const info = JSON.parse(out.stdout);
    expect(info.modality).toBe("text");
    expect(info.sequences).toBe(2);
    expect(info.dim).toBe(5);
    expect(info.timesteps.total).toBe(4);
  });
});
