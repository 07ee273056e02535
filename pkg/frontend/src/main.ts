/**
 * Entry point: wires the DOM to the session controller.
 *
 * Serve this directory statically and point it at the API with
 * ?api=http://host:port (defaults to same origin). One active session
 * per tab; all state is authoritative on the server.
 */

import { ApiClient } from "./api.js";
import { buildModel, drawChart, type ChartLayout, type ChartPoint } from "./chart.js";
import { bindHoldButton, HoldTracker } from "./hold.js";
import { SessionController, type LevelTally, type SessionView } from "./session.js";
import type { BlockOrder, ChoiceResult, FitReport, HumanAction, TrialInfo } from "./types.js";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error("missing element #" + id);
  }
  return node as T;
}

const LAYOUT: ChartLayout = { width: 460, height: 320, pad: 34 };

const api = new ApiClient(apiBase);
const tracker = new HoldTracker();
bindHoldButton(el("hold"), tracker);

const canvas = el<HTMLCanvasElement>("chart");
const ctx = canvas.getContext("2d");

function renderTallies(tallies: LevelTally[]): void {
  el("tallies").textContent = tallies
    .map((t) => `${Math.round(t.pR * 100)}%: ${t.nCompensate}/${t.nTrials}`)
    .join("   ");
}

async function refreshPanel(fit: FitReport | null): Promise<void> {
  let points: ChartPoint[] = [];
  try {
    const summary = await api.summary(controller.sessionId);
    points = summary.blocks.map((b) => ({ pR: b.pR, p2: b.p2, round: b.round }));
  } catch {
    // panel refresh is cosmetic; the trial loop handles real failures
  }
  if (ctx) {
    drawChart(ctx, buildModel(points, fit, LAYOUT), LAYOUT);
  }
  if (fit) {
    const p = fit.cptParams;
    el("fit-caption").textContent =
      `after block ${fit.block}: alpha ${p.alpha.toFixed(2)}, beta ${p.beta.toFixed(2)}, ` +
      `cost ${p.effortCost.toFixed(2)}, determinism ${p.determinism.toFixed(2)} | ` +
      `logistic ${fit.blrMap.intercept.toFixed(2)} + ${fit.blrMap.slope.toFixed(2)}·p`;
  } else if (points.length > 0) {
    el("fit-caption").textContent = "fit unavailable; showing data only";
  } else {
    el("fit-caption").textContent = "complete a block to see the fitted curves";
  }
}

const view: SessionView = {
  showTrial(trial: TrialInfo, successesSoFar: number) {
    el("level").textContent = Math.round(trial.pR * 100) + "%";
    el("phase").textContent = "Ready";
    el("outcome").textContent = "";
    const total = successesSoFar + trial.successesNeeded;
    el("progress").textContent =
      `round ${trial.round + 1}, block ${trial.block + 1} - ` +
      `${successesSoFar}/${total} successful reaches`;
  },
  countdownTick(secondsLeft: number) {
    el("countdown").textContent = String(secondsLeft);
  },
  go() {
    el("countdown").textContent = "Go!";
    el("phase").textContent = "Movement";
  },
  showOutcome(result: ChoiceResult, action: HumanAction, tallies: LevelTally[]) {
    el("phase").textContent = "Reset";
    el("outcome").textContent = result.success
      ? `Success - you ${action === "HA2" ? "compensated" : "relaxed and the robot assisted"}`
      : "Failure - you relaxed and the robot perturbed";
    renderTallies(tallies);
  },
  blockComplete(fit: FitReport | null) {
    el("phase").textContent = "Rest";
    void refreshPanel(fit);
  },
  sessionComplete() {
    el("phase").textContent = "Done";
    el("countdown").textContent = "";
    el("outcome").textContent = "Session complete. Thank you!";
    el<HTMLButtonElement>("start").disabled = false;
  },
  confirmRetry(error: unknown): Promise<boolean> {
    return Promise.resolve(window.confirm("Network problem: " + String(error) + "\nRetry?"));
  },
};

const controller = new SessionController(api, view, tracker);

el<HTMLButtonElement>("start").addEventListener("click", () => {
  const button = el<HTMLButtonElement>("start");
  button.disabled = true;
  const order = el<HTMLSelectElement>("order").value as BlockOrder;
  const participantRaw = el<HTMLInputElement>("participant").value.trim();
  const options = participantRaw === ""
    ? { order }
    : { order, participantId: participantRaw };
  renderTallies([]);
  void refreshPanel(null);
  controller.run(options).catch((err) => {
    el("outcome").textContent = "Session aborted: " + String(err);
    button.disabled = false;
  });
});

renderTallies([]);
void refreshPanel(null);
