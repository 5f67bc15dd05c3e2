/** Sequence-to-sequence verse transformer with copy attention.
 *
 * Encoder: 2-layer bidirectional LSTM.  Decoder: 2-layer LSTM whose
 * states start from a bridge over the mean encoder output, with general
 * (Luong) global attention over the encoder outputs.  A generation gate
 * mixes the vocabulary softmax with the attention distribution scattered
 * onto the extended (copy) vocabulary, so source words outside the
 * vocabulary can still be emitted.
 *
 * Sizes are desk scale on purpose; everything is seeded and runs on the
 * deterministic CPU backend.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { Batch } from "./data.js";
import { mulberry32, uniformArray } from "./prng.js";
import { BOS, EOS, UNK, Vocab } from "./vocab.js";

tf.enableProdMode();

export interface ModelConfig {
  vocabSize: number;
  embedDim: number;
  hiddenDim: number;
  maxOov: number;
  seed: number;
}

export const DEFAULT_DIMS = { embedDim: 32, hiddenDim: 48, maxOov: 16 };

interface PreparedBatch {
  n: number;
  srcLen: number;
  tgtLen: number;
  srcIds: tf.Tensor2D;
  srcMask: tf.Tensor2D;
  revIdx: tf.Tensor2D;
  decInputIds: tf.Tensor2D;
  tgtIds: tf.Tensor2D;
  tgtMask: tf.Tensor2D;
  tgtOneHot: tf.Tensor3D;
  srcExtOneHot: tf.Tensor3D;
}

interface EncoderState {
  encOut: tf.Tensor3D; // [B, Ts, 2h]
  encProj: tf.Tensor3D; // [B, Ts, h]
  states: tf.Tensor2D[]; // [c1, h1, c2, h2], each [B, h]
}

export class CopyAttentionSeq2Seq {
  readonly cfg: ModelConfig;
  private readonly vars = new Map<string, tf.Variable>();
  private readonly one = tf.scalar(1.0);

  constructor(cfg: ModelConfig) {
    this.cfg = cfg;
    const rand = mulberry32(cfg.seed);
    const { vocabSize: V, embedDim: e, hiddenDim: h } = cfg;
    const add = (name: string, rows: number, cols: number, zero = false) => {
      const data = zero
        ? new Float32Array(rows * cols)
        : uniformArray(rand, rows * cols, 0.08);
      this.vars.set(name, tf.variable(tf.tensor2d(data, [rows, cols]), true, name));
    };
    add("embedding", V, e);
    add("encF1.kernel", e + h, 4 * h);
    add("encF1.bias", 1, 4 * h, true);
    add("encB1.kernel", e + h, 4 * h);
    add("encB1.bias", 1, 4 * h, true);
    add("encF2.kernel", 2 * h + h, 4 * h);
    add("encF2.bias", 1, 4 * h, true);
    add("encB2.kernel", 2 * h + h, 4 * h);
    add("encB2.bias", 1, 4 * h, true);
    add("bridgeC1", 2 * h, h);
    add("bridgeH1", 2 * h, h);
    add("bridgeC2", 2 * h, h);
    add("bridgeH2", 2 * h, h);
    add("dec1.kernel", e + h, 4 * h);
    add("dec1.bias", 1, 4 * h, true);
    add("dec2.kernel", h + h, 4 * h);
    add("dec2.bias", 1, 4 * h, true);
    add("attn.W", 2 * h, h);
    add("combine.W", h + 2 * h, h);
    add("out.W", h, V);
    add("out.b", 1, V, true);
    add("copy.W", h + 2 * h + e, 1);
    add("copy.b", 1, 1, true);
  }

  private v(name: string): tf.Variable {
    const variable = this.vars.get(name);
    if (!variable) {
      throw new Error(`unknown variable ${name}`);
    }
    return variable;
  }

  get trainable(): tf.Variable[] {
    return [...this.vars.values()];
  }

  dispose(): void {
    for (const variable of this.vars.values()) {
      variable.dispose();
    }
    this.one.dispose();
  }

  private cell(prefix: string, x: tf.Tensor2D, c: tf.Tensor2D, h: tf.Tensor2D) {
    const kernel = this.v(`${prefix}.kernel`) as unknown as tf.Tensor2D;
    const bias = tf.reshape(this.v(`${prefix}.bias`), [-1]) as tf.Tensor1D;
    return tf.basicLSTMCell(this.one, kernel, bias, x, c, h) as [tf.Tensor2D, tf.Tensor2D];
  }

  /** Run one LSTM direction over a [B, T, in] sequence -> [B, T, h]. */
  private runDirection(prefix: string, inputs: tf.Tensor3D): tf.Tensor3D {
    const [batch, , ] = inputs.shape;
    const h = this.cfg.hiddenDim;
    let c = tf.zeros([batch, h]) as tf.Tensor2D;
    let hidden = tf.zeros([batch, h]) as tf.Tensor2D;
    const outs: tf.Tensor2D[] = [];
    for (const x of tf.unstack(inputs, 1)) {
      [c, hidden] = this.cell(prefix, x as tf.Tensor2D, c, hidden);
      outs.push(hidden);
    }
    return tf.stack(outs, 1) as tf.Tensor3D;
  }

  private reverseByIndex(x: tf.Tensor3D, revIdx: tf.Tensor2D): tf.Tensor3D {
    return tf.gather(x, revIdx, 1, 1) as tf.Tensor3D;
  }

  private encode(srcIds: tf.Tensor2D, srcMask: tf.Tensor2D, revIdx: tf.Tensor2D): EncoderState {
    const embedding = this.v("embedding");
    const embedded = tf.gather(embedding, srcIds) as tf.Tensor3D;
    const embeddedRev = this.reverseByIndex(embedded, revIdx);

    const f1 = this.runDirection("encF1", embedded);
    const b1 = this.reverseByIndex(this.runDirection("encB1", embeddedRev), revIdx);
    const layer1 = tf.concat([f1, b1], 2) as tf.Tensor3D;

    const f2 = this.runDirection("encF2", layer1);
    const b2 = this.reverseByIndex(
      this.runDirection("encB2", this.reverseByIndex(layer1, revIdx)),
      revIdx,
    );
    const encOut = tf.concat([f2, b2], 2) as tf.Tensor3D;

    const mask3 = tf.expandDims(srcMask, 2);
    const lengths = tf.sum(srcMask, 1, true);
    const meanEnc = tf.div(tf.sum(tf.mul(encOut, mask3), 1), lengths) as tf.Tensor2D;
    const states = ["bridgeC1", "bridgeH1", "bridgeC2", "bridgeH2"].map(
      (name) => tf.tanh(tf.matMul(meanEnc, this.v(name) as unknown as tf.Tensor2D)) as tf.Tensor2D,
    );

    const [batch, srcLen] = srcIds.shape;
    const h = this.cfg.hiddenDim;
    const encProj = tf.reshape(
      tf.matMul(tf.reshape(encOut, [batch * srcLen, 2 * h]), this.v("attn.W") as unknown as tf.Tensor2D),
      [batch, srcLen, h],
    ) as tf.Tensor3D;
    return { encOut, encProj, states };
  }

  /** One attention step: scores, masked softmax, context, attentional state. */
  private attend(
    hDec: tf.Tensor2D,
    enc: EncoderState,
    srcMask: tf.Tensor2D,
    x: tf.Tensor2D,
  ): { attnh: tf.Tensor2D; att: tf.Tensor2D; pGen: tf.Tensor2D } {
    const scores = tf.squeeze(tf.matMul(enc.encProj, tf.expandDims(hDec, 2)), [2]) as tf.Tensor2D;
    const masked = tf.add(scores, tf.mul(tf.sub(srcMask, 1), 1e9)) as tf.Tensor2D;
    const att = tf.softmax(masked) as tf.Tensor2D; // [B, Ts]
    const context = tf.squeeze(
      tf.matMul(tf.expandDims(att, 1), enc.encOut),
      [1],
    ) as tf.Tensor2D; // [B, 2h]
    const attnh = tf.tanh(
      tf.matMul(tf.concat([hDec, context], 1), this.v("combine.W") as unknown as tf.Tensor2D),
    ) as tf.Tensor2D;
    const gateIn = tf.concat([attnh, context, x], 1);
    const pGen = tf.sigmoid(
      tf.add(tf.matMul(gateIn, this.v("copy.W") as unknown as tf.Tensor2D), this.v("copy.b")),
    ) as tf.Tensor2D; // [B, 1]
    return { attnh, att, pGen };
  }

  /** Teacher-forced decode: stacked attentional states over all steps. */
  private decodeAll(
    enc: EncoderState,
    srcMask: tf.Tensor2D,
    decInputIds: tf.Tensor2D,
  ): { attnh: tf.Tensor3D; att: tf.Tensor3D; pGen: tf.Tensor3D } {
    let [c1, h1, c2, h2] = enc.states;
    const embedded = tf.gather(this.v("embedding"), decInputIds) as tf.Tensor3D;
    const attnhs: tf.Tensor2D[] = [];
    const atts: tf.Tensor2D[] = [];
    const pGens: tf.Tensor2D[] = [];
    for (const xRaw of tf.unstack(embedded, 1)) {
      const x = xRaw as tf.Tensor2D;
      [c1, h1] = this.cell("dec1", x, c1, h1);
      [c2, h2] = this.cell("dec2", h1, c2, h2);
      const { attnh, att, pGen } = this.attend(h2, enc, srcMask, x);
      attnhs.push(attnh);
      atts.push(att);
      pGens.push(pGen);
    }
    return {
      attnh: tf.stack(attnhs, 1) as tf.Tensor3D,
      att: tf.stack(atts, 1) as tf.Tensor3D,
      pGen: tf.stack(pGens, 1) as tf.Tensor3D,
    };
  }

  /** Mixed generation/copy probabilities over the extended vocabulary. */
  private mixedProbs(
    decoded: { attnh: tf.Tensor3D; att: tf.Tensor3D; pGen: tf.Tensor3D },
    srcExtOneHot: tf.Tensor3D,
  ): tf.Tensor3D {
    const { vocabSize: V, hiddenDim: h, maxOov } = this.cfg;
    const [batch, tgtLen] = [decoded.attnh.shape[0], decoded.attnh.shape[1]];
    const logits = tf.add(
      tf.matMul(tf.reshape(decoded.attnh, [batch * tgtLen, h]), this.v("out.W") as unknown as tf.Tensor2D),
      this.v("out.b"),
    );
    const genProbs = tf.reshape(tf.softmax(logits as tf.Tensor2D), [batch, tgtLen, V]);
    const genPadded = tf.pad(genProbs, [[0, 0], [0, 0], [0, maxOov]]) as tf.Tensor3D;
    const copyProbs = tf.matMul(decoded.att, srcExtOneHot) as tf.Tensor3D;
    return tf.add(
      tf.mul(decoded.pGen, genPadded),
      tf.mul(tf.sub(1, decoded.pGen), copyProbs),
    ) as tf.Tensor3D;
  }

  /** Upload a batch once; the tensors are reused across training steps. */
  prepare(batch: Batch): PreparedBatch {
    if (batch.maxOov > this.cfg.maxOov) {
      throw new Error(
        `batch has ${batch.maxOov} per-example OOVs, model allows ${this.cfg.maxOov}`,
      );
    }
    const vExt = this.cfg.vocabSize + this.cfg.maxOov;
    const srcExt = tf.tensor2d(batch.srcExtIds, [batch.n, batch.srcLen], "int32");
    const srcExtOneHot = tf.oneHot(srcExt, vExt).asType("float32") as tf.Tensor3D;
    srcExt.dispose();
    const tgtIds = tf.tensor2d(batch.tgtExtIds, [batch.n, batch.tgtLen], "int32");
    return {
      n: batch.n,
      srcLen: batch.srcLen,
      tgtLen: batch.tgtLen,
      srcIds: tf.tensor2d(batch.srcIds, [batch.n, batch.srcLen], "int32"),
      srcMask: tf.tensor2d(batch.srcMask, [batch.n, batch.srcLen]),
      revIdx: tf.tensor2d(batch.revIdx, [batch.n, batch.srcLen], "int32"),
      decInputIds: tf.tensor2d(batch.decInputIds, [batch.n, batch.tgtLen], "int32"),
      tgtIds,
      tgtMask: tf.tensor2d(batch.tgtMask, [batch.n, batch.tgtLen]),
      tgtOneHot: tf.oneHot(tgtIds, vExt).asType("float32") as tf.Tensor3D,
      srcExtOneHot,
    };
  }

  private batchLoss(prep: PreparedBatch): tf.Scalar {
    const enc = this.encode(prep.srcIds, prep.srcMask, prep.revIdx);
    const decoded = this.decodeAll(enc, prep.srcMask, prep.decInputIds);
    const probs = this.mixedProbs(decoded, prep.srcExtOneHot);
    const picked = tf.sum(tf.mul(probs, prep.tgtOneHot), 2);
    const nll = tf.neg(tf.log(tf.add(picked, 1e-9)));
    return tf.div(
      tf.sum(tf.mul(nll, prep.tgtMask)),
      tf.sum(prep.tgtMask),
    ) as tf.Scalar;
  }

  /** One optimizer step over a prepared batch; returns the loss. */
  trainStep(prep: PreparedBatch, optimizer: tf.Optimizer): number {
    const loss = optimizer.minimize(() => this.batchLoss(prep), true, this.trainable);
    const value = loss!.dataSync()[0];
    loss!.dispose();
    return value;
  }

  /** Teacher-forced next-token accuracy over real (non-pad) positions. */
  tokenAccuracy(prep: PreparedBatch): number {
    return tf.tidy(() => {
      const enc = this.encode(prep.srcIds, prep.srcMask, prep.revIdx);
      const decoded = this.decodeAll(enc, prep.srcMask, prep.decInputIds);
      const probs = this.mixedProbs(decoded, prep.srcExtOneHot);
      const predicted = tf.argMax(probs, 2).asType("int32");
      const hits = tf.equal(predicted, prep.tgtIds).asType("float32");
      return (
        tf.div(tf.sum(tf.mul(hits, prep.tgtMask)), tf.sum(prep.tgtMask)) as tf.Scalar
      ).dataSync()[0];
    });
  }

  /** Greedily transform one verse; copy attention may emit source OOVs. */
  generateVerse(vocab: Vocab, source: string, maxExtra = 4): string {
    const example = vocab.encodeSource(source);
    if (example.srcIds.length === 0) {
      return "";
    }
    if (example.oovs.length > this.cfg.maxOov) {
      example.oovs.length = this.cfg.maxOov;
    }
    const srcLen = example.srcIds.length;
    const vExt = this.cfg.vocabSize + this.cfg.maxOov;
    const outIds: number[] = [];
    tf.tidy(() => {
      const srcIds = tf.tensor2d(example.srcIds, [1, srcLen], "int32");
      const srcMask = tf.ones([1, srcLen]) as tf.Tensor2D;
      const revIdx = tf.tensor2d(
        Array.from({ length: srcLen }, (_, t) => srcLen - 1 - t),
        [1, srcLen],
        "int32",
      );
      const srcExtCapped = example.srcExtIds.map((id) => (id < vExt ? id : UNK));
      const srcExtOneHot = tf
        .oneHot(tf.tensor2d(srcExtCapped, [1, srcLen], "int32"), vExt)
        .asType("float32") as tf.Tensor3D;

      const enc = this.encode(srcIds, srcMask, revIdx);
      let [c1, h1, c2, h2] = enc.states;
      let previous = BOS;
      for (let step = 0; step < srcLen + maxExtra; step++) {
        const x = tf.gather(
          this.v("embedding"),
          tf.tensor1d([previous >= this.cfg.vocabSize ? UNK : previous], "int32"),
        ) as tf.Tensor2D;
        [c1, h1] = this.cell("dec1", x, c1, h1);
        [c2, h2] = this.cell("dec2", h1, c2, h2);
        const { attnh, att, pGen } = this.attend(h2, enc, srcMask, x);
        const probs = this.mixedProbs(
          {
            attnh: tf.expandDims(attnh, 1) as tf.Tensor3D,
            att: tf.expandDims(att, 1) as tf.Tensor3D,
            pGen: tf.expandDims(pGen, 1) as tf.Tensor3D,
          },
          srcExtOneHot,
        );
        const next = (tf.argMax(probs, 2).dataSync() as Int32Array)[0];
        if (next === EOS) {
          break;
        }
        outIds.push(next);
        previous = next;
      }
    });
    return vocab.decode(outIds, example.oovs);
  }

  /** Transform a poem verse by verse; output keeps the verse count. */
  generatePoem(vocab: Vocab, verses: string[]): string[] {
    return verses.map((verse) => this.generateVerse(vocab, verse));
  }

  save(dir: string, vocab: Vocab): void {
    fs.mkdirSync(dir, { recursive: true });
    const weights: Record<string, { shape: number[]; data: number[] }> = {};
    for (const [name, variable] of this.vars) {
      weights[name] = {
        shape: variable.shape.slice(),
        data: Array.from(variable.dataSync() as Float32Array),
      };
    }
    fs.writeFileSync(
      path.join(dir, "model.json"),
      JSON.stringify({ config: this.cfg, weights }, null, 1),
    );
    fs.writeFileSync(path.join(dir, "vocab.json"), JSON.stringify(vocab.toJSON()));
  }

  static load(dir: string): { model: CopyAttentionSeq2Seq; vocab: Vocab } {
    const payload = JSON.parse(fs.readFileSync(path.join(dir, "model.json"), "utf-8"));
    const model = new CopyAttentionSeq2Seq(payload.config as ModelConfig);
    for (const [name, entry] of Object.entries(
      payload.weights as Record<string, { shape: number[]; data: number[] }>,
    )) {
      model.v(name).assign(tf.tensor(entry.data, entry.shape as [number, number]));
    }
    const vocab = Vocab.fromJSON(
      JSON.parse(fs.readFileSync(path.join(dir, "vocab.json"), "utf-8")),
    );
    return { model, vocab };
  }
}

export interface TrainOptions {
  steps: number;
  learningRate?: number;
  targetAccuracy?: number;
  checkEvery?: number;
  log?: (step: number, loss: number, accuracy?: number) => void;
}

export interface TrainResult {
  steps: number;
  finalLoss: number;
  tokenAccuracy: number;
}

/** Full-batch Adam training with optional early stop on token accuracy. */
export function train(
  model: CopyAttentionSeq2Seq,
  batch: Batch,
  options: TrainOptions,
): TrainResult {
  const optimizer = tf.train.adam(options.learningRate ?? 0.01);
  const prep = model.prepare(batch);
  const checkEvery = options.checkEvery ?? 25;
  let loss = Number.NaN;
  let accuracy = 0;
  let step = 0;
  for (step = 1; step <= options.steps; step++) {
    loss = model.trainStep(prep, optimizer);
    options.log?.(step, loss);
    if (step % checkEvery === 0 || step === options.steps) {
      accuracy = model.tokenAccuracy(prep);
      options.log?.(step, loss, accuracy);
      if (options.targetAccuracy !== undefined && accuracy >= options.targetAccuracy) {
        break;
      }
    }
  }
  if (step > options.steps) {
    step = options.steps;
  }
  accuracy = accuracy || model.tokenAccuracy(prep);
  optimizer.dispose();
  return { steps: step, finalLoss: loss, tokenAccuracy: accuracy };
}
