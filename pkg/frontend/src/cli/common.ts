/** Shared flag handling for the figure entry points: --in, --out, --baseline. */

import { readFileSync, writeFileSync } from "node:fs";
import { DataError } from "../csv.js";

export interface CliArgs {
  input: string;
  output: string;
  baseline?: string;
}

export function parseArgs(argv: string[], kind: string): CliArgs {
  const args: Partial<CliArgs> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      usage(kind, `missing value for ${flag}`);
    }
    if (flag === "--in") args.input = value;
    else if (flag === "--out") args.output = value;
    else if (flag === "--baseline") args.baseline = value;
    else usage(kind, `unknown flag ${flag}`);
  }
  if (!args.input || !args.output) {
    usage(kind, "--in and --out are required");
  }
  return args as CliArgs;
}

function usage(kind: string, message: string): never {
  process.stderr.write(
    `${kind}: ${message}\nusage: ${kind} --in <csv> --out <svg> [--baseline <csv>]\n`,
  );
  process.exit(2);
}

export function runFigure(
  kind: string,
  argv: string[],
  render: (csvText: string, baselineCsv?: string) => string,
): void {
  const args = parseArgs(argv, kind);
  try {
    const csvText = readFileSync(args.input, "utf8");
    const baselineCsv =
      args.baseline !== undefined ? readFileSync(args.baseline, "utf8") : undefined;
    const svg = render(csvText, baselineCsv);
    writeFileSync(args.output, svg);
  } catch (err) {
    if (err instanceof DataError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`${kind}: ${(err as Error).message}\n`);
      process.exit(1);
    }
    throw err;
  }
}
