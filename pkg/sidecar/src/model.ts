import fs from "node:fs";

import { averagePrecision } from "./curve";
import { DEFAULT_SPEC, FeatureSpec, hashFeatures, validateSpec } from "./features";
import { mulberry32, shuffleInPlace } from "./prng";

export interface LabeledSample {
  surface: string;
  label: "valid" | "invalid";
}

export interface TrainOptions {
  epochs?: number;
  batchSize?: number;
  learningRate?: number;
  lrDecay?: number;
  patience?: number;
  spec?: FeatureSpec;
}

const MODEL_FORMAT = "validity-scorer/1";

export class ScorerModel {
  constructor(
    readonly spec: FeatureSpec,
    readonly weights: Float64Array, // dim entries
    readonly bias: number,
    public threshold: number,
    readonly trainingMeta: Record<string, unknown> = {},
  ) {
    validateSpec(spec);
    if (weights.length !== spec.dim) {
      throw new Error(`weights must have ${spec.dim} entries, got ${weights.length}`);
    }
    if (!(threshold >= 0 && threshold <= 1)) {
      throw new Error(`threshold ${threshold} outside [0, 1]`);
    }
  }

  scoreText(text: string): number {
    let z = this.bias;
    for (const [idx, count] of hashFeatures(text, this.spec)) {
      z += this.weights[idx] * count;
    }
    return 1 / (1 + Math.exp(-z));
  }

  save(path: string): void {
    const payload = {
      format: MODEL_FORMAT,
      ngram_orders: this.spec.ngramOrders,
      dim: this.spec.dim,
      weights: Array.from(this.weights),
      bias: this.bias,
      threshold: this.threshold,
      training_meta: this.trainingMeta,
    };
    fs.writeFileSync(path, JSON.stringify(payload) + "\n", "utf-8");
  }

  static load(path: string): ScorerModel {
    const payload = JSON.parse(fs.readFileSync(path, "utf-8"));
    if (payload.format !== MODEL_FORMAT) {
      throw new Error(`unsupported model format ${JSON.stringify(payload.format)}`);
    }
    return new ScorerModel(
      { ngramOrders: payload.ngram_orders, dim: payload.dim },
      Float64Array.from(payload.weights),
      payload.bias,
      payload.threshold,
      payload.training_meta ?? {},
    );
  }
}

function sigmoid(z: number): number {
  return 1 / (1 + Math.exp(-z));
}

export function trainModel(
  train: LabeledSample[],
  validation: LabeledSample[],
  seed = 0,
  options: TrainOptions = {},
): ScorerModel {
  const epochs = options.epochs ?? 30;
  const batchSize = options.batchSize ?? 32;
  const learningRate = options.learningRate ?? 0.5;
  const lrDecay = options.lrDecay ?? 0.1;
  const patience = options.patience ?? 5;
  const spec = options.spec ?? DEFAULT_SPEC;
  validateSpec(spec);

  if (train.length === 0) throw new Error("empty training set");
  if (validation.length === 0) throw new Error("empty validation set");
  const trainLabels = new Set(train.map((s) => s.label));
  if (trainLabels.size < 2) {
    throw new Error(`training set has a single label: ${[...trainLabels][0]}`);
  }

  const features = train.map((s) => hashFeatures(s.surface, spec));
  const targets = train.map((s) => (s.label === "valid" ? 1 : 0));
  const valLabels = validation.map((s) => (s.label === "valid" ? 1 : 0));
  const valFeatures = validation.map((s) => hashFeatures(s.surface, spec));

  const weights = new Float64Array(spec.dim);
  let bias = 0;
  let bestWeights = new Float64Array(weights);
  let bestBias = bias;
  let bestAp = -1;
  let bestEpoch = -1;
  let epochsRun = 0;
  let stale = 0;

  const rng = mulberry32((seed >>> 0) ^ 0x9e3779b9);
  const order = train.map((_, i) => i);

  const score = (feats: Map<number, number>) => {
    let z = bias;
    for (const [idx, count] of feats) z += weights[idx] * count;
    return sigmoid(z);
  };

  for (let epoch = 0; epoch < epochs; epoch++) {
    epochsRun = epoch + 1;
    const lr = learningRate / (1 + lrDecay * epoch);
    shuffleInPlace(order, rng);
    for (let start = 0; start < order.length; start += batchSize) {
      const batch = order.slice(start, start + batchSize);
      const gradient = new Map<number, number>();
      let biasGradient = 0;
      for (const i of batch) {
        const error = score(features[i]) - targets[i];
        biasGradient += error;
        for (const [idx, count] of features[i]) {
          gradient.set(idx, (gradient.get(idx) ?? 0) + error * count);
        }
      }
      const step = lr / batch.length;
      for (const [idx, g] of gradient) weights[idx] -= step * g;
      bias -= step * biasGradient;
    }

    const valScores = valFeatures.map((f) => score(f));
    const ap = averagePrecision(valLabels, valScores);
    if (ap > bestAp) {
      bestAp = ap;
      bestEpoch = epoch;
      bestWeights = new Float64Array(weights);
      bestBias = bias;
      stale = 0;
    } else {
      stale++;
      if (stale >= patience) break;
    }
  }

  return new ScorerModel(spec, bestWeights, bestBias, 0.5, {
    seed,
    epochs_run: epochsRun,
    best_epoch: bestEpoch,
    best_validation_ap: bestAp,
    batch_size: batchSize,
    learning_rate: learningRate,
    lr_decay: lrDecay,
    n_train: train.length,
    n_validation: validation.length,
  });
}
