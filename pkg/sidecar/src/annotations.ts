import fs from "node:fs";

import { LabeledSample } from "./model";
import { mulberry32, shuffleInPlace } from "./prng";

// Annotation files are two-column TSV: header "event<TAB>label", one labeled
// surface per row. Rows with an empty or unknown label are a hard error at
// training time.
export function readAnnotationTsv(path: string): LabeledSample[] {
  const text = fs.readFileSync(path, "utf-8");
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path} is empty`);
  }
  const header = lines[0].split("\t");
  if (header[0] !== "event" || header[1] !== "label") {
    throw new Error(`${path} must start with an event/label header`);
  }
  const samples: LabeledSample[] = [];
  for (let i = 1; i < lines.length; i++) {
    const [surface, label] = lines[i].split("\t");
    if (!surface) {
      throw new Error(`${path}:${i + 1}: empty event surface`);
    }
    if (label !== "valid" && label !== "invalid") {
      throw new Error(
        `${path}:${i + 1}: label must be valid or invalid, got ${JSON.stringify(label ?? "")}`,
      );
    }
    samples.push({ surface, label });
  }
  return samples;
}

export interface SplitResult {
  train: LabeledSample[];
  validation: LabeledSample[];
  test: LabeledSample[];
}

// Stratified 80/10/10 partition: validation and test take floor(0.1 N) of
// each label's group, remainder goes to train.
export function splitSamples(samples: LabeledSample[], seed = 0): SplitResult {
  if (samples.length < 10) {
    throw new Error(`need at least 10 labeled samples, got ${samples.length}`);
  }
  const byLabel = new Map<string, LabeledSample[]>();
  for (const sample of samples) {
    const group = byLabel.get(sample.label);
    if (group) group.push(sample);
    else byLabel.set(sample.label, [sample]);
  }
  for (const [label, group] of byLabel) {
    if (group.length < 3) {
      throw new Error(`label ${label} has only ${group.length} samples; need >= 3`);
    }
  }
  const result: SplitResult = { train: [], validation: [], test: [] };
  for (const label of [...byLabel.keys()].sort()) {
    const group = [...byLabel.get(label)!];
    const rng = mulberry32(((seed >>> 0) * 2654435761 + label.length) >>> 0);
    shuffleInPlace(group, rng);
    const holdout = Math.floor(group.length * 0.1);
    result.validation.push(...group.slice(0, holdout));
    result.test.push(...group.slice(holdout, 2 * holdout));
    result.train.push(...group.slice(2 * holdout));
  }
  return result;
}
