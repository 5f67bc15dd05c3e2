/** Tiny flag parser: --name value, --flag (boolean), repeated --name
 * collecting into arrays for multi-value options. */

export interface ArgSpec {
  multi?: string[];
  flags?: string[];
}

export function parseArgs(
  argv: string[],
  spec: ArgSpec = {},
): Record<string, string | string[] | boolean> {
  const multi = new Set(spec.multi ?? []);
  const flags = new Set(spec.flags ?? []);
  const out: Record<string, string | string[] | boolean> = {};
  let i = 0;
  while (i < argv.length) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      throw new Error(`unexpected argument ${arg}`);
    }
    const name = arg.slice(2);
    if (flags.has(name)) {
      out[name] = true;
      i += 1;
      continue;
    }
    const values: string[] = [];
    i += 1;
    while (i < argv.length && !argv[i].startsWith("--")) {
      values.push(argv[i]);
      i += 1;
    }
    if (values.length === 0) {
      throw new Error(`missing value for --${name}`);
    }
    if (multi.has(name)) {
      out[name] = [...((out[name] as string[]) ?? []), ...values];
    } else if (values.length > 1) {
      throw new Error(`--${name} takes a single value`);
    } else {
      out[name] = values[0];
    }
  }
  return out;
}

export function required(args: Record<string, unknown>, name: string): string {
  const value = args[name];
  if (typeof value !== "string") {
    throw new Error(`--${name} is required`);
  }
  return value;
}

export function requiredList(args: Record<string, unknown>, name: string): string[] {
  const value = args[name];
  if (!Array.isArray(value) || value.length === 0) {
    throw new Error(`--${name} is required (one or more values)`);
  }
  return value;
}
