/** Spawn the real Python service for integration tests. */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

const HELPERS_DIR = fileURLToPath(new URL(".", import.meta.url));

export interface RunningService {
  baseUrl: string;
  stop: () => void;
}

export function makeFixtureDocument(): { path: string; cleanup: () => void } {
  const dir = mkdtempSync(join(tmpdir(), "patternsync-ui-"));
  const docPath = join(dir, "fixture.json");
  const res = spawnSync("python3", [join(HELPERS_DIR, "make_fixture.py"), docPath], {
    encoding: "utf8",
  });
  if (res.status !== 0) {
    throw new Error(`fixture generation failed: ${res.stderr}`);
  }
  return { path: docPath, cleanup: () => rmSync(dir, { recursive: true, force: true }) };
}

export async function startService(documentPath: string): Promise<RunningService> {
  const port = 8100 + Math.floor(Math.random() * 400);
  const baseUrl = `http://127.0.0.1:${port}`;
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "patternsync.cli", "serve", documentPath, "--port", String(port)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let stderr = "";
  child.stderr?.on("data", (d) => {
    stderr += String(d);
  });

  const deadline = Date.now() + 30000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early (${child.exitCode}): ${stderr}`);
    }
    try {
      const res = await fetch(`${baseUrl}/healthz`);
      if (res.ok) {
        return { baseUrl, stop: () => child.kill("SIGTERM") };
      }
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  child.kill("SIGTERM");
  throw new Error(`service did not become healthy: ${stderr}`);
}
