// Session state machine: fetch a trial, collect one judgment, submit,
// advance. All rendering goes through the View interface so the logic is
// testable without a DOM.

import {
  isComplete,
  ObserverApi,
  Results,
  StaleTrialError,
  TrialPayload,
  Verdict,
} from "./api.js";

export interface TrialView {
  trialId: number;
  left: number;
  right: number;
  answered: boolean;
}

export interface View {
  showTrial(trial: TrialView): void;
  setControlsEnabled(enabled: boolean): void;
  showProgress(answered: number, conclusive: number, total: number): void;
  showResults(results: Results): void;
  showError(message: string, retryable: boolean): void;
  clearError(): void;
}

export type Phase =
  | "idle"
  | "loading"
  | "awaiting_answer"
  | "submitting"
  | "complete"
  | "error";

const sleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class ObserverSession {
  phase: Phase = "idle";
  private sessionId = "";
  private current: TrialPayload | null = null;
  private pacingMs: number;
  private lastFailed: (() => Promise<void>) | null = null;

  constructor(
    private readonly api: ObserverApi,
    private readonly view: View,
    options: { pacingMs?: number } = {},
  ) {
    this.pacingMs = options.pacingMs ?? -1; // -1: use the service's value
  }

  async start(): Promise<void> {
    await this.guarded(async () => {
      const info = await this.api.newSession();
      this.sessionId = info.session_id;
      if (this.pacingMs < 0) {
        this.pacingMs = info.pacing_ms;
      }
      this.view.showProgress(0, 0, info.trials_total);
      await this.advance();
    });
  }

  /** One button press. Ignored unless a trial is actually awaiting an answer,
   * which makes double-clicks and late key presses harmless. */
  async answer(verdict: Verdict): Promise<void> {
    if (this.phase !== "awaiting_answer" || this.current === null) {
      return;
    }
    const trial = this.current;
    this.phase = "submitting";
    this.view.setControlsEnabled(false);
    this.view.showTrial({
      trialId: trial.trial_id,
      left: trial.left_brightness,
      right: trial.right_brightness,
      answered: true,
    });
    await this.guarded(async () => {
      try {
        const ack = await this.api.postAnswer(
          this.sessionId,
          trial.trial_id,
          verdict,
        );
        this.view.showProgress(ack.answered, ack.conclusive, ack.total);
      } catch (error) {
        if (!(error instanceof StaleTrialError)) {
          throw error;
        }
        // someone answered ahead of us (another tab, a retry): resync
      }
      if (this.pacingMs > 0) {
        await sleep(this.pacingMs);
      }
      await this.advance();
    });
  }

  /** Re-run the step that failed (network error banner). */
  async retry(): Promise<void> {
    if (this.phase !== "error" || this.lastFailed === null) {
      return;
    }
    const step = this.lastFailed;
    this.lastFailed = null;
    this.view.clearError();
    await this.guarded(step);
  }

  private async advance(): Promise<void> {
    this.phase = "loading";
    const trial = await this.api.getTrial(this.sessionId);
    if (isComplete(trial)) {
      const results = await this.api.getResults(this.sessionId);
      this.phase = "complete";
      this.view.setControlsEnabled(false);
      this.view.showResults(results);
      return;
    }
    this.current = {
      trial_id: trial.trial_id,
      left_brightness: trial.left_brightness,
      right_brightness: trial.right_brightness,
    };
    this.phase = "awaiting_answer";
    this.view.showTrial({
      trialId: trial.trial_id,
      left: trial.left_brightness,
      right: trial.right_brightness,
      answered: false,
    });
    this.view.setControlsEnabled(true);
  }

  private async guarded(step: () => Promise<void>): Promise<void> {
    try {
      await step();
    } catch (error) {
      this.phase = "error";
      this.lastFailed = step;
      this.view.setControlsEnabled(false);
      this.view.showError(
        error instanceof Error ? error.message : String(error),
        true,
      );
    }
  }
}
