import readline from "node:readline";
import { once } from "node:events";
import { parseArgs } from "node:util";

import { ScorerModel } from "./model";
import { serveStream } from "./protocol";
import { runTrain } from "./train";

const USAGE = `usage:
  cli.js train --annotations <tsv> --model <out.json> [--report <out.json>] [--seed N] [--recall-floor F]
  cli.js serve --model <model.json> [--shuffle-window N]`;

function fail(message: string, code: number): never {
  process.stderr.write(message + "\n");
  process.exit(code);
}

async function writeStdoutLine(line: string): Promise<void> {
  if (!process.stdout.write(line + "\n")) {
    await once(process.stdout, "drain");
  }
}

function trainCommand(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      annotations: { type: "string" },
      model: { type: "string" },
      report: { type: "string" },
      seed: { type: "string", default: "0" },
      "recall-floor": { type: "string", default: "0.8" },
    },
  });
  if (!values.annotations || !values.model) {
    fail(USAGE, 2);
  }
  const summary = runTrain({
    annotations: values.annotations,
    model: values.model,
    report: values.report,
    seed: Number(values.seed),
    recallFloor: Number(values["recall-floor"]),
  });
  console.log(
    `trained on ${summary.nSamples} samples: validation AP ` +
      `${summary.bestValidationAp.toFixed(4)}, threshold ` +
      `${summary.threshold.toFixed(4)} (precision=${summary.precision.toFixed(4)} ` +
      `recall=${summary.recall.toFixed(4)} floor_met=${summary.meetsRecallFloor})`,
  );
}

async function serveCommand(argv: string[]): Promise<void> {
  const { values } = parseArgs({
    args: argv,
    options: {
      model: { type: "string" },
      "shuffle-window": { type: "string", default: "1" },
    },
  });
  if (!values.model) {
    fail(USAGE, 2);
  }
  const model = ScorerModel.load(values.model);
  const lines = readline.createInterface({
    input: process.stdin,
    crlfDelay: Infinity,
  });
  await serveStream(lines, writeStdoutLine, (text) => model.scoreText(text), Number(values["shuffle-window"]));
}

async function main(): Promise<void> {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === "train") {
      trainCommand(rest);
    } else if (command === "serve") {
      await serveCommand(rest);
    } else {
      fail(USAGE, 2);
    }
  } catch (err) {
    fail(`error: ${err instanceof Error ? err.message : String(err)}`, 1);
  }
}

main();
