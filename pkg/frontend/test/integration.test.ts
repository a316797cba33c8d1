// End-to-end check against the real Python service when it is available:
// spawn `macrobell serve` on a scratch config, run a scripted session over
// real HTTP, and verify the wire contract. Skipped cleanly when the backend
// is not installed in this environment.

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { isComplete, ObserverApi } from "../src/api.js";

const PORT = 8741;
const BASE = `http://127.0.0.1:${PORT}`;

const SCRATCH_CONFIG = `
[source]
t_z = 0.8419468311620646
t_x = 0.9456193887305276

[detection]
mode = observer
discrimination_gap = 0.8647134405201551

[run]
seed = 15
trials_per_setting = 60
block_length = 20
`;

function backendAvailable(): boolean {
  const probe = spawnSync("python3", ["-c", "import macrobell"], {
    timeout: 10_000,
  });
  return probe.status === 0;
}

const enabled = backendAvailable();
let server: ChildProcess | null = null;

async function waitForServer(): Promise<boolean> {
  for (let attempt = 0; attempt < 50; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/session`);
      if (response.ok) return true;
    } catch {
      await new Promise((r) => setTimeout(r, 200));
    }
  }
  return false;
}

describe.runIf(enabled)("live service round trip", () => {
  beforeAll(async () => {
    const dir = mkdtempSync(join(tmpdir(), "macrobell-ui-"));
    const config = join(dir, "session.cfg");
    writeFileSync(config, SCRATCH_CONFIG);
    server = spawn(
      "python3",
      ["-m", "macrobell.cli", "serve", "--config", config, "--port", String(PORT)],
      { stdio: "ignore" },
    );
    expect(await waitForServer()).toBe(true);
  }, 30_000);

  afterAll(() => {
    server?.kill();
  });

  it("runs a scripted gap-rule session to completion", async () => {
    const api = new ObserverApi(BASE);
    const info = await api.newSession();
    expect(info.trials_total).toBe(240);

    const gap = 0.5;
    for (;;) {
      const trial = await api.getTrial(info.session_id);
      if (isComplete(trial)) break;
      expect(Object.keys(trial).sort()).toEqual([
        "left_brightness",
        "right_brightness",
        "trial_id",
      ]);
      const spread = trial.left_brightness - trial.right_brightness;
      const verdict =
        spread > gap ? "LEFT" : spread < -gap ? "RIGHT" : "INCONCLUSIVE";
      const ack = await api.postAnswer(info.session_id, trial.trial_id, verdict);
      expect(ack.status).toBe("accepted");
    }

    const results = await api.getResults(info.session_id);
    expect(results.complete).toBe(true);
    expect(results.answered).toBe(240);
    expect(results.S).not.toBeNull();
    expect(results.success_probability).toBeGreaterThan(0.3);
  }, 60_000);

  it("rejects stale answers over the wire", async () => {
    const api = new ObserverApi(BASE);
    const info = await api.newSession();
    await expect(api.postAnswer(info.session_id, 999, "LEFT")).rejects.toThrow();
  });
});

describe.runIf(!enabled)("live service round trip (backend missing)", () => {
  it.skip("requires the macrobell package on PATH", () => {});
});
