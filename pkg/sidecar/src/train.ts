import fs from "node:fs";

import { readAnnotationTsv, splitSamples } from "./annotations";
import { prCurve, selectThreshold } from "./curve";
import { trainModel } from "./model";

export interface TrainCommandOptions {
  annotations: string;
  model: string;
  report?: string;
  seed?: number;
  recallFloor?: number;
}

export interface TrainSummary {
  nSamples: number;
  bestValidationAp: number;
  threshold: number;
  precision: number;
  recall: number;
  meetsRecallFloor: boolean;
}

export function runTrain(options: TrainCommandOptions): TrainSummary {
  const seed = options.seed ?? 0;
  const recallFloor = options.recallFloor ?? 0.8;
  const samples = readAnnotationTsv(options.annotations);
  const { train, validation } = splitSamples(samples, seed);
  const model = trainModel(train, validation, seed);

  const labels = validation.map((s) => (s.label === "valid" ? 1 : 0));
  const scores = validation.map((s) => model.scoreText(s.surface));
  const points = prCurve(labels, scores);
  const choice = selectThreshold(points, recallFloor);
  model.threshold = choice.threshold;
  model.save(options.model);

  if (options.report) {
    const payload = {
      points: points.map((p) => ({
        threshold: p.threshold,
        precision: p.precision,
        recall: p.recall,
      })),
      selected: {
        threshold: choice.threshold,
        precision: choice.precision,
        recall: choice.recall,
        meets_recall_floor: choice.meetsRecallFloor,
      },
    };
    fs.writeFileSync(options.report, JSON.stringify(payload, null, 2) + "\n", "utf-8");
  }

  return {
    nSamples: samples.length,
    bestValidationAp: model.trainingMeta.best_validation_ap as number,
    threshold: choice.threshold,
    precision: choice.precision,
    recall: choice.recall,
    meetsRecallFloor: choice.meetsRecallFloor,
  };
}
