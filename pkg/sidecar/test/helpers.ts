import { LabeledSample } from "../src/model";
import { mulberry32 } from "../src/prng";

// Cleanly separable toy corpus: plausible indicator+theme surfaces against
// latin keyboard junk. Mirrors the shape of the annotation data the scorer
// is trained on for real.
export function makeSeparable(nPerClass = 60, seed = 0): LabeledSample[] {
  const rng = mulberry32(seed + 1);
  const pick = <T>(items: T[]) => items[Math.floor(rng() * items.length)];
  const heads = ["遭受", "蒙受", "饱受", "忍受", "经受"];
  const themes = ["挫折", "痛苦", "失败的打击", "严重的损失", "无情的嘲讽",
    "巨大的压力", "意外的伤害", "不公平的待遇"];
  const junk = "qwxzkj0189#@";
  const samples: LabeledSample[] = [];
  const seen = new Set<string>();
  while (samples.filter((s) => s.label === "valid").length < nPerClass) {
    const surface = pick(heads) + pick(themes) + pick(["", "了", "啊"]);
    if (!seen.has(surface)) {
      seen.add(surface);
      samples.push({ surface, label: "valid" });
    }
  }
  while (samples.filter((s) => s.label === "invalid").length < nPerClass) {
    let surface = "";
    const length = 4 + Math.floor(rng() * 7);
    for (let i = 0; i < length; i++) surface += junk[Math.floor(rng() * junk.length)];
    if (!seen.has(surface)) {
      seen.add(surface);
      samples.push({ surface, label: "invalid" });
    }
  }
  return samples;
}
