import { spawnSync } from "node:child_process";
import { dirname, resolve } from "node:path";
import { fileURLToPath } from "node:url";

// The engine is always invoked through its CLI so every byte this package
// returns is, by construction, what the file-based pipeline produces.
// Override the command with SEQAUG_CLI (whitespace-separated argv prefix),
// e.g. SEQAUG_CLI="python3 -m seqaug".

function cliCommand(): string[] {
  const env = process.env["SEQAUG_CLI"];
  if (env && env.trim() !== "") {
    return env.trim().split(/\s+/);
  }
  return ["python3", "-m", "seqaug"];
}

function pythonPathEnv(): NodeJS.ProcessEnv {
  // Prepend the sibling package source so `python3 -m seqaug` works even
  // without an installed copy (the engine falls back to its pure-Python
  // backend there; outputs are bit-identical either way).
  const here = dirname(fileURLToPath(import.meta.url));
  const repoSrc = resolve(here, "..", "..", "src");
  const existing = process.env["PYTHONPATH"];
  return {
    ...process.env,
    PYTHONPATH: existing ? `${repoSrc}:${existing}` : repoSrc,
  };
}

export interface CliResult {
  status: number;
  stdout: string;
  stderr: string;
}

export function runCli(args: string[]): CliResult {
  const [head, ...rest] = cliCommand();
  const proc = spawnSync(head!, [...rest, ...args], {
    encoding: "utf-8",
    env: pythonPathEnv(),
    maxBuffer: 256 * 1024 * 1024,
  });
  if (proc.error) {
    throw new Error(`failed to launch augmentation CLI: ${proc.error.message}`);
  }
  return {
    status: proc.status ?? -1,
    stdout: proc.stdout ?? "",
    stderr: proc.stderr ?? "",
  };
}

export function runCliOrThrow(args: string[]): CliResult {
  const result = runCli(args);
  if (result.status !== 0) {
    const detail = result.stderr.trim() || result.stdout.trim() || "no diagnostic output";
    throw new Error(
      `augmentation CLI exited with status ${result.status}: ${detail}`,
    );
  }
  return result;
}
