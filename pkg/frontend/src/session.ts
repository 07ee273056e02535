/**
 * Trial-loop state machine.
 *
 * All experiment state is authoritative on the server; this controller
 * sequences the client side of each trial (announce, countdown, commit
 * the hold decision at Go, render the outcome) and keeps running
 * per-level compensation tallies for the view. It learns the robot's
 * action only from the choice response, after commitment: the
 * next-trial payload does not carry it and the client never asks.
 *
 * Timers are injected so tests and headless drivers can run without
 * waiting out real countdowns.
 */

import { ApiError } from "./api.js";
import { actionForHold } from "./hold.js";
import type {
  ChoiceResult,
  FitReport,
  HumanAction,
  SessionHandle,
  TrialInfo,
} from "./types.js";
import type { CreateSessionOptions } from "./api.js";

export interface Scheduler {
  delay(ms: number): Promise<void>;
  now(): number;
}

export const realScheduler: Scheduler = {
  delay: (ms) => new Promise((resolve) => setTimeout(resolve, ms)),
  now: () => Date.now(),
};

// Subset of ApiClient the controller needs; fakes implement this.
export interface SessionApi {
  createSession(options?: CreateSessionOptions): Promise<SessionHandle>;
  nextTrial(sessionId: string): Promise<TrialInfo>;
  submitChoice(sessionId: string, humanAction: HumanAction, holdMs?: number): Promise<ChoiceResult>;
  latestFit(sessionId: string): Promise<FitReport | null>;
}

export interface LevelTally {
  pR: number;
  nTrials: number;
  nCompensate: number;
}

export interface SessionView {
  showTrial(trial: TrialInfo, successesSoFar: number): void;
  countdownTick(secondsLeft: number): void;
  go(): void;
  showOutcome(result: ChoiceResult, action: HumanAction, tallies: LevelTally[]): void;
  blockComplete(fit: FitReport | null): void;
  sessionComplete(): void;
  /** Transport failure: resolve true to retry the failed call, false to abort. */
  confirmRetry(error: unknown): Promise<boolean>;
}

export interface ChoiceInput {
  holdMs(): number;
}

export class SessionController {
  private handle: SessionHandle | null = null;
  private readonly tallies = new Map<number, LevelTally>();
  private successesInBlock = 0;

  constructor(
    private readonly api: SessionApi,
    private readonly view: SessionView,
    private readonly input: ChoiceInput,
    private readonly scheduler: Scheduler = realScheduler,
  ) {}

  get sessionId(): string {
    if (!this.handle) {
      throw new Error("session not started");
    }
    return this.handle.sessionId;
  }

  get session(): SessionHandle | null {
    return this.handle;
  }

  async start(options: CreateSessionOptions = {}): Promise<SessionHandle> {
    this.handle = await this.withRetry(() => this.api.createSession(options));
    return this.handle;
  }

  /** Run trials until the server reports the session done. */
  async run(options: CreateSessionOptions = {}): Promise<void> {
    if (!this.handle) {
      await this.start(options);
    }
    while (await this.step()) {
      // next trial
    }
  }

  /** One full trial; resolves false once the session is over. */
  async step(): Promise<boolean> {
    const id = this.sessionId;
    let trial: TrialInfo;
    try {
      trial = await this.withRetry(() => this.api.nextTrial(id));
    } catch (err) {
      // the server answers 409 for a finished session
      if (err instanceof ApiError && err.status === 409) {
        this.view.sessionComplete();
        return false;
      }
      throw err;
    }

    this.view.showTrial(trial, this.successesInBlock);
    for (let s = Math.ceil(trial.countdownSeconds); s > 0; s--) {
      this.view.countdownTick(s);
      await this.scheduler.delay(1000);
    }
    this.view.go();

    const holdMs = this.input.holdMs();
    const action = actionForHold(holdMs);
    const result = await this.withRetry(() =>
      this.api.submitChoice(id, action, action === "HA2" ? holdMs : undefined),
    );

    this.recordTally(trial.pR, action);
    this.successesInBlock = result.success ? this.successesInBlock + 1 : this.successesInBlock;
    this.view.showOutcome(result, action, this.levelTallies());

    if (result.blockDone) {
      this.successesInBlock = 0;
      this.view.blockComplete(await this.fetchFit(id));
    }
    if (result.sessionDone) {
      this.view.sessionComplete();
      return false;
    }
    return true;
  }

  /** Running empirical compensation tallies, sorted by level. */
  levelTallies(): LevelTally[] {
    return [...this.tallies.values()].sort((a, b) => a.pR - b.pR);
  }

  private recordTally(pR: number, action: HumanAction): void {
    const tally = this.tallies.get(pR) ?? { pR, nTrials: 0, nCompensate: 0 };
    tally.nTrials += 1;
    if (action === "HA2") {
      tally.nCompensate += 1;
    }
    this.tallies.set(pR, tally);
  }

  private async fetchFit(id: string): Promise<FitReport | null> {
    return this.withRetry(() => this.api.latestFit(id));
  }

  private async withRetry<T>(call: () => Promise<T>): Promise<T> {
    for (;;) {
      try {
        return await call();
      } catch (err) {
        if (err instanceof ApiError) {
          throw err; // protocol signal, not a transport failure
        }
        if (!(await this.view.confirmRetry(err))) {
          throw err;
        }
      }
    }
  }
}
