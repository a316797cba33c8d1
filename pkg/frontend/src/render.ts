// DOM rendering: two luminance-only disks on a dark page, three buttons,
// a progress line, and the final results table. No basis labels, no
// A-side outcomes, no running Bell parameter during the session.

import { Results } from "./api.js";
import { TrialView, View } from "./session.js";

function luminance(level: number): string {
  const percent = Math.round(Math.min(Math.max(level, 0), 1) * 100);
  return `hsl(0, 0%, ${percent}%)`;
}

export class DomView implements View {
  private leftSpot: HTMLElement;
  private rightSpot: HTMLElement;
  private buttons: HTMLButtonElement[];
  private progress: HTMLElement;
  private results: HTMLElement;
  private stage: HTMLElement;
  private banner: HTMLElement;
  private retryButton: HTMLButtonElement;

  constructor(root: Document) {
    const get = <T extends HTMLElement>(id: string): T => {
      const el = root.getElementById(id);
      if (el === null) throw new Error(`missing element #${id}`);
      return el as T;
    };
    this.leftSpot = get("spot-left");
    this.rightSpot = get("spot-right");
    this.buttons = [
      get<HTMLButtonElement>("answer-left"),
      get<HTMLButtonElement>("answer-none"),
      get<HTMLButtonElement>("answer-right"),
    ];
    this.progress = get("progress");
    this.results = get("results");
    this.stage = get("stage");
    this.banner = get("banner");
    this.retryButton = get<HTMLButtonElement>("retry");
  }

  showTrial(trial: TrialView): void {
    this.leftSpot.style.backgroundColor = luminance(trial.left);
    this.rightSpot.style.backgroundColor = luminance(trial.right);
  }

  setControlsEnabled(enabled: boolean): void {
    for (const button of this.buttons) {
      button.disabled = !enabled;
    }
  }

  showProgress(answered: number, conclusive: number, total: number): void {
    this.progress.textContent =
      `answered ${answered} / ${total} - conclusive ${conclusive}`;
  }

  showResults(results: Results): void {
    this.stage.hidden = true;
    this.results.hidden = false;
    const fmt = (value: number | null, digits = 3): string =>
      value === null ? "-" : value.toFixed(digits);
    const rows = Object.keys(results.E)
      .map(
        (name) =>
          `<tr><td>E(${name})</td><td>${fmt(results.E[name] ?? null)}` +
          ` &plusmn; ${fmt(results.sigma_E[name] ?? null)}</td></tr>`,
      )
      .join("");
    this.results.innerHTML = `
      <h2>Session complete</h2>
      <table>${rows}</table>
      <p class="headline">S = ${fmt(results.S)} &plusmn; ${fmt(results.sigma_S)}</p>
      <p>success probability ${fmt(results.success_probability)}
         (${results.conclusive} conclusive of ${results.answered} trials)</p>
    `;
  }

  showError(message: string, retryable: boolean): void {
    this.banner.hidden = false;
    this.banner.querySelector("span")!.textContent = `connection trouble: ${message}`;
    this.retryButton.hidden = !retryable;
  }

  clearError(): void {
    this.banner.hidden = true;
  }
}
