// Precision/recall sweep and operating-point selection. Prediction rule is
// score >= threshold, thresholds are the distinct scores in ascending
// order, so every point's precision has a non-empty denominator.

export interface CurvePoint {
  threshold: number;
  precision: number;
  recall: number;
}

export interface ThresholdChoice extends CurvePoint {
  meetsRecallFloor: boolean;
}

export function prCurve(labels: number[], scores: number[]): CurvePoint[] {
  if (labels.length !== scores.length) {
    throw new Error("labels and scores must have the same length");
  }
  if (labels.length === 0) {
    throw new Error("empty evaluation set");
  }
  const totalPos = labels.reduce((acc, y) => acc + y, 0);
  if (totalPos === 0 || totalPos === labels.length) {
    throw new Error("evaluation set must contain both labels");
  }
  const thresholds = Array.from(new Set(scores)).sort((a, b) => a - b);
  const points: CurvePoint[] = [];
  for (const t of thresholds) {
    let tp = 0;
    let fp = 0;
    for (let i = 0; i < scores.length; i++) {
      if (scores[i] >= t) {
        if (labels[i] === 1) tp++;
        else fp++;
      }
    }
    points.push({ threshold: t, precision: tp / (tp + fp), recall: tp / totalPos });
  }
  return points;
}

export function averagePrecision(labels: number[], scores: number[]): number {
  const totalPos = labels.reduce((acc, y) => acc + y, 0);
  if (totalPos === 0) return 0;
  const groups = new Map<number, number[]>();
  for (let i = 0; i < scores.length; i++) {
    const group = groups.get(scores[i]);
    if (group) group.push(labels[i]);
    else groups.set(scores[i], [labels[i]]);
  }
  const descending = Array.from(groups.keys()).sort((a, b) => b - a);
  let tp = 0;
  let seen = 0;
  let ap = 0;
  for (const score of descending) {
    const group = groups.get(score)!;
    const groupPos = group.reduce((acc, y) => acc + y, 0);
    tp += groupPos;
    seen += group.length;
    ap += (groupPos / totalPos) * (tp / seen);
  }
  return ap;
}

export function selectThreshold(
  points: CurvePoint[],
  recallFloor = 0.8,
): ThresholdChoice {
  if (points.length === 0) {
    throw new Error("empty curve");
  }
  const byPreference = (a: CurvePoint, b: CurvePoint) =>
    b.precision - a.precision || b.recall - a.recall || a.threshold - b.threshold;
  const eligible = points.filter((p) => p.recall >= recallFloor);
  if (eligible.length > 0) {
    const best = [...eligible].sort(byPreference)[0];
    return { ...best, meetsRecallFloor: true };
  }
  const fallback = [...points].sort(
    (a, b) => b.recall - a.recall || b.precision - a.precision || a.threshold - b.threshold,
  )[0];
  return { ...fallback, meetsRecallFloor: false };
}
