import fs from "node:fs";
import os from "node:os";
import path from "node:path";

import { describe, expect, it } from "vitest";

import { readAnnotationTsv, splitSamples } from "../src/annotations";
import { LabeledSample } from "../src/model";

function write(content: string): string {
  const file = path.join(fs.mkdtempSync(path.join(os.tmpdir(), "ann-")), "ann.tsv");
  fs.writeFileSync(file, content, "utf-8");
  return file;
}

describe("readAnnotationTsv", () => {
  it("reads labeled rows", () => {
    const file = write("event\tlabel\n遭受挫折\tvalid\nxq9w\tinvalid\n");
    expect(readAnnotationTsv(file)).toEqual([
      { surface: "遭受挫折", label: "valid" },
      { surface: "xq9w", label: "invalid" },
    ]);
  });

  it("rejects a missing header", () => {
    expect(() => readAnnotationTsv(write("遭受挫折\tvalid\n"))).toThrow("header");
  });

  it("rejects unlabeled and unknown-label rows", () => {
    expect(() => readAnnotationTsv(write("event\tlabel\n遭受挫折\t\n"))).toThrow("label");
    expect(() => readAnnotationTsv(write("event\tlabel\n遭受挫折\tmaybe\n"))).toThrow("maybe");
  });

  it("rejects an empty surface", () => {
    expect(() => readAnnotationTsv(write("event\tlabel\n\tvalid\n"))).toThrow("empty event");
  });
});

describe("splitSamples", () => {
  function corpus(nValid: number, nInvalid: number): LabeledSample[] {
    const samples: LabeledSample[] = [];
    for (let i = 0; i < nValid; i++) samples.push({ surface: `有效${i}`, label: "valid" });
    for (let i = 0; i < nInvalid; i++) samples.push({ surface: `junk${i}`, label: "invalid" });
    return samples;
  }

  it("partitions 80/10/10 per label", () => {
    const { train, validation, test } = splitSamples(corpus(60, 60), 0);
    expect(validation.length).toBe(12);
    expect(test.length).toBe(12);
    expect(train.length).toBe(96);
    expect(validation.filter((s) => s.label === "valid").length).toBe(6);
    expect(test.filter((s) => s.label === "valid").length).toBe(6);
  });

  it("keeps the three parts disjoint and complete", () => {
    const samples = corpus(40, 40);
    const { train, validation, test } = splitSamples(samples, 3);
    const surfaces = [...train, ...validation, ...test].map((s) => s.surface).sort();
    expect(surfaces).toEqual(samples.map((s) => s.surface).sort());
  });

  it("is deterministic per seed and varies across seeds", () => {
    const samples = corpus(40, 40);
    const a = splitSamples(samples, 1).train.map((s) => s.surface);
    const b = splitSamples(samples, 1).train.map((s) => s.surface);
    const c = splitSamples(samples, 2).train.map((s) => s.surface);
    expect(a).toEqual(b);
    expect(a).not.toEqual(c);
  });

  it("rejects tiny or one-sided corpora", () => {
    expect(() => splitSamples(corpus(3, 2), 0)).toThrow("at least 10");
    expect(() => splitSamples(corpus(12, 2), 0)).toThrow("only 2");
  });
});
