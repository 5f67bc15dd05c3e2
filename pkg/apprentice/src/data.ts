/** Training-pair loading and batch assembly.
 *
 * Pairs arrive in the master's JSONL export format, one record per verse:
 * {"source": ..., "target": ..., "poem_id": ..., "verse_index": ..., "era": ...}
 */

import * as fs from "node:fs";

import { EncodedExample, PAD, Vocab, tokenize } from "./vocab.js";

export interface VersePair {
  source: string;
  target: string;
}

export function readPairsJsonl(path: string): VersePair[] {
  const pairs: VersePair[] = [];
  const text = fs.readFileSync(path, "utf-8");
  for (const [lineno, raw] of text.split("\n").entries()) {
    const line = raw.trim();
    if (!line) {
      continue;
    }
    let record: unknown;
    try {
      record = JSON.parse(line);
    } catch {
      throw new Error(`${path}:${lineno + 1}: invalid JSON`);
    }
    const { source, target } = record as { source?: string; target?: string };
    if (typeof source !== "string" || typeof target !== "string") {
      throw new Error(`${path}:${lineno + 1}: record needs string source and target`);
    }
    if (tokenize(source).length === 0 || tokenize(target).length === 0) {
      throw new Error(`${path}:${lineno + 1}: empty source or target verse`);
    }
    pairs.push({ source, target });
  }
  return pairs;
}

/** Padded id matrices for one batch of encoded examples. */
export interface Batch {
  n: number;
  srcLen: number;
  tgtLen: number;
  /** [n, srcLen] encoder input ids (OOV as UNK), PAD-padded */
  srcIds: Int32Array;
  /** [n, srcLen] extended source ids for the copy scatter */
  srcExtIds: Int32Array;
  /** [n, srcLen] 1.0 at real positions */
  srcMask: Float32Array;
  /** [n, srcLen] per-example reversal indices (valid prefix reversed) */
  revIdx: Int32Array;
  /** [n, tgtLen] decoder input ids: BOS + target[:-1], extended ids as UNK */
  decInputIds: Int32Array;
  /** [n, tgtLen] extended target ids incl. EOS */
  tgtExtIds: Int32Array;
  /** [n, tgtLen] 1.0 at real positions */
  tgtMask: Float32Array;
  /** per-example OOV word lists */
  oovs: string[][];
  maxOov: number;
}

export function buildBatch(examples: EncodedExample[], vocabSize: number): Batch {
  if (examples.length === 0) {
    throw new Error("cannot build an empty batch");
  }
  const n = examples.length;
  const srcLen = Math.max(...examples.map((e) => e.srcIds.length));
  const tgtLen = Math.max(...examples.map((e) => e.tgtExtIds.length));
  const batch: Batch = {
    n,
    srcLen,
    tgtLen,
    srcIds: new Int32Array(n * srcLen).fill(PAD),
    srcExtIds: new Int32Array(n * srcLen).fill(PAD),
    srcMask: new Float32Array(n * srcLen),
    revIdx: new Int32Array(n * srcLen),
    decInputIds: new Int32Array(n * tgtLen).fill(PAD),
    tgtExtIds: new Int32Array(n * tgtLen).fill(PAD),
    tgtMask: new Float32Array(n * tgtLen),
    oovs: examples.map((e) => e.oovs),
    maxOov: Math.max(0, ...examples.map((e) => e.oovs.length)),
  };
  examples.forEach((example, b) => {
    const len = example.srcIds.length;
    example.srcIds.forEach((id, t) => {
      batch.srcIds[b * srcLen + t] = id;
      batch.srcExtIds[b * srcLen + t] = example.srcExtIds[t];
      batch.srcMask[b * srcLen + t] = 1.0;
    });
    for (let t = 0; t < srcLen; t++) {
      batch.revIdx[b * srcLen + t] = t < len ? len - 1 - t : t;
    }
    const decIn = [1 /* BOS */, ...example.tgtExtIds.slice(0, -1)].map((id) =>
      id >= vocabSize ? 3 /* UNK */ : id,
    );
    example.tgtExtIds.forEach((id, t) => {
      batch.tgtExtIds[b * tgtLen + t] = id;
      batch.tgtMask[b * tgtLen + t] = 1.0;
      batch.decInputIds[b * tgtLen + t] = decIn[t];
    });
  });
  return batch;
}
