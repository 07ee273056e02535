/**
 * Hold-to-compensate input. The participant presses and holds through
 * the countdown; whatever hold is live when "Go!" fires is the
 * committed effort. A sustained hold of at least HOLD_MS_MIN maps to
 * HA2 (compensate), anything shorter or no press at all to HA1 (relax).
 */

import type { HumanAction } from "./types.js";

export const HOLD_MS_MIN = 1000;

export class HoldTracker {
  private pressStart: number | null = null;

  constructor(private readonly now: () => number = () => Date.now()) {}

  press(): void {
    // repeated pointerdown while held keeps the original start
    if (this.pressStart === null) {
      this.pressStart = this.now();
    }
  }

  release(): void {
    this.pressStart = null;
  }

  get held(): boolean {
    return this.pressStart !== null;
  }

  /** Duration of the live press in ms; 0 when not pressed. */
  holdMs(): number {
    return this.pressStart === null ? 0 : this.now() - this.pressStart;
  }
}

export function actionForHold(holdMs: number): HumanAction {
  return holdMs >= HOLD_MS_MIN ? "HA2" : "HA1";
}

// Structural subset of HTMLElement so the binding is testable without a DOM.
export interface Pressable {
  addEventListener(type: string, listener: () => void): void;
}

export function bindHoldButton(el: Pressable, tracker: HoldTracker): void {
  el.addEventListener("pointerdown", () => tracker.press());
  for (const type of ["pointerup", "pointerleave", "pointercancel"]) {
    el.addEventListener(type, () => tracker.release());
  }
}
