/** Render figure-spec JSON files to SVG: `node dist/cli.js spec.json ...` */

import { readFileSync } from "node:fs";
import { dirname } from "node:path";

import { SchemaError } from "./csv.js";
import { FigureSpec, render } from "./render.js";

export function main(argv: string[]): number {
  if (argv.length === 0) {
    console.error("usage: cli.js <figure-spec.json> [...]");
    return 2;
  }
  for (const path of argv) {
    let spec: FigureSpec;
    try {
      spec = JSON.parse(readFileSync(path, "utf8")) as FigureSpec;
    } catch (err) {
      console.error(`${path}: ${(err as Error).message}`);
      return 2;
    }
    try {
      const out = render(spec, dirname(path));
      console.log(`${path} -> ${out}`);
    } catch (err) {
      if (err instanceof SchemaError) {
        console.error(`${path}: schema: ${err.message}`);
        return 2;
      }
      console.error(`${path}: ${(err as Error).message}`);
      return 1;
    }
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
