"""HTTP service hosting interactive sessions for the browser client.

The trial loop mirrors the simulator exactly: per-block seeds spawn
from the session seed, robot draws come from the block's pre-generated
uniform stream, and every committed trial is appended to a JSONL file
that is schema-identical to simulator output. The upcoming robot action
is never present in any response before the choice is committed.

Per-session mutations are serialized under a lock; a choice submitted
in the wrong phase gets 409. Fits run on a worker thread at each block
completion and /fit waits for the in-flight one, so its output is
deterministic for a given log.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .actions import HumanAction, RobotAction, outcome
from .analysis import build_choice_dataset, curve_export
from .bayes import blr_map
from .fitting import fit_cpt
from .io import format_trial_line, write_config_sidecar
from .protocol import (LEVEL_STREAM, RA_STREAM, ProtocolConfig, SessionLog,
                       TrialRecord)

AWAITING = "AwaitingChoice"
SHOWING = "ShowingOutcome"
REST = "Rest"
DONE = "Done"

HOLD_MS_MIN = 1000  # client-reported sustained hold that registers HA2
FIT_GRID = np.linspace(0.0, 1.0, 101)


class CreateSessionBody(BaseModel):
    order: Literal["ascending", "descending", "randomized_per_trial"] = "ascending"
    seed: int | None = None
    participantId: str | None = None


class ChoiceBody(BaseModel):
    humanAction: Literal["HA1", "HA2"]
    holdMs: int | None = None


class SessionRuntime:
    """State machine for one interactive session."""

    def __init__(self, session_id: str, config: ProtocolConfig, seed: int,
                 participant_id: str, log_path: Path, executor: ThreadPoolExecutor,
                 max_trials_per_block: int = 1000):
        self.id = session_id
        self.config = config
        self.seed = seed
        self.participant_id = participant_id
        self.log_path = log_path
        self.executor = executor
        self.max_trials = max_trials_per_block
        self.lock = threading.Lock()

        levels_per_round = config.block_levels()
        self.block_plan = [(r, b, lv) for r in range(config.rounds)
                           for b, lv in enumerate(levels_per_round)]
        children = np.random.SeedSequence(seed).spawn(len(self.block_plan))
        self.block_seed_list = [int(c.generate_state(1)[0]) for c in children]
        self.block_seeds = {(r, b): s for (r, b, _), s in
                            zip(self.block_plan, self.block_seed_list)}

        self.phase = REST  # pre-block; first /next enters the first block
        self.block_cursor = -1
        self.trial_index = 0
        self.successes = 0
        self.current_p_r: float | None = None
        self.trials: list[TrialRecord] = []
        self.completed_blocks = 0
        self._ra_uniforms: np.ndarray | None = None
        self._level_rng: np.random.Generator | None = None
        self._fit_future = None

        write_config_sidecar(log_path, participant_id, config.order, seed,
                             self.block_seeds, config)
        log_path.touch()

    # -- internal helpers, caller holds the lock --

    def _enter_next_block(self):
        self.block_cursor += 1
        seed = self.block_seed_list[self.block_cursor]
        self._ra_uniforms = np.random.default_rng([seed, RA_STREAM]).random(self.max_trials)
        self._level_rng = (np.random.default_rng([seed, LEVEL_STREAM])
                           if self.config.order == "randomized_per_trial" else None)
        self.trial_index = 0
        self.successes = 0
        self._announce_trial()

    def _announce_trial(self):
        _, _, level = self.block_plan[self.block_cursor]
        if self._level_rng is not None:
            levels = sorted(self.config.levels)
            level = levels[int(self._level_rng.integers(len(levels)))]
        self.current_p_r = float(level)
        self.phase = AWAITING

    def _trial_payload(self) -> dict:
        round_index, block_index, _ = self.block_plan[self.block_cursor]
        return {
            "pR": self.current_p_r,
            "round": round_index,
            "block": block_index,
            "successesNeeded": self.config.successes_per_block - self.successes,
            "countdownSeconds": self.config.countdown_seconds,
        }

    def _append_trial(self, trial: TrialRecord):
        self.trials.append(trial)
        seed = self.block_seed_list[self.block_cursor]
        with open(self.log_path, "a") as fh:
            fh.write(format_trial_line(self.participant_id, trial, seed) + "\n")

    def _snapshot_log(self) -> SessionLog:
        return SessionLog(self.participant_id, self.config.order, self.config,
                          tuple(self.trials), self.seed, dict(self.block_seeds))

    def _compute_fit(self, log: SessionLog, completed_blocks: int) -> dict:
        dataset = build_choice_dataset(log)
        cpt = fit_cpt(dataset, n_starts=16, seed=0)
        blr = blr_map(dataset)
        return {
            "block": completed_blocks,
            "cptParams": {
                "alpha": cpt.params.alpha,
                "beta": cpt.params.beta,
                "effortCost": cpt.params.effort_cost,
                "determinism": cpt.params.determinism,
            },
            "cptNll": cpt.nll,
            "blrMap": {"intercept": blr.intercept, "slope": blr.slope},
            "curves": {
                "cpt": [[p, v] for p, v in curve_export(cpt.params, FIT_GRID)],
                "blr": [[p, v] for p, v in curve_export(blr, FIT_GRID)],
            },
        }

    # -- endpoint bodies --

    def next_trial(self) -> dict:
        with self.lock:
            if self.phase == DONE:
                raise HTTPException(409, "session complete")
            if self.phase == AWAITING:
                return self._trial_payload()  # idempotent re-read
            if self.phase == REST:
                self._enter_next_block()
            else:  # ShowingOutcome: advance within the block
                self._announce_trial()
            return self._trial_payload()

    def submit_choice(self, body: ChoiceBody) -> dict:
        with self.lock:
            if self.phase == DONE:
                raise HTTPException(409, "session complete")
            if self.phase != AWAITING:
                raise HTTPException(409, f"choice not accepted in phase {self.phase}")
            action = HumanAction(body.humanAction)
            if action is HumanAction.COMPENSATE and (body.holdMs is None
                                                     or body.holdMs < HOLD_MS_MIN):
                raise HTTPException(
                    422, f"HA2 requires a sustained hold of >= {HOLD_MS_MIN} ms")
            if self.trial_index >= self.max_trials:
                raise HTTPException(409, "block unfinishable: trial budget exhausted")

            robot = (RobotAction.PERTURB
                     if self._ra_uniforms[self.trial_index] < self.current_p_r
                     else RobotAction.ASSIST)
            success = outcome(action, robot)
            round_index, block_index, _ = self.block_plan[self.block_cursor]
            trial = TrialRecord(round_index, block_index, self.current_p_r,
                                robot, action, success,
                                int(time.time() * 1000))
            self._append_trial(trial)
            self.trial_index += 1
            if success:
                self.successes += 1

            block_done = self.successes >= self.config.successes_per_block
            session_done = block_done and self.block_cursor == len(self.block_plan) - 1
            if block_done:
                self.completed_blocks += 1
                self.phase = DONE if session_done else REST
                snapshot = self._snapshot_log()
                self._fit_future = self.executor.submit(
                    self._compute_fit, snapshot, self.completed_blocks)
            else:
                self.phase = SHOWING
            return {
                "robotAction": robot.value,
                "success": success,
                "blockDone": block_done,
                "sessionDone": session_done,
            }

    def summary(self) -> dict:
        with self.lock:
            log = self._snapshot_log()
        blocks = []
        for (round_index, block_index), trials in log.iter_blocks():
            n2 = sum(t.human_action is HumanAction.COMPENSATE for t in trials)
            blocks.append({
                "round": round_index,
                "block": block_index,
                "pR": trials[0].p_r,
                "p2": n2 / len(trials),
                "nTrials": len(trials),
            })
        pooled: dict[float, list[int]] = {}
        for t in log.trials:
            entry = pooled.setdefault(t.p_r, [0, 0])
            entry[t.human_action is HumanAction.COMPENSATE] += 1
        levels = [{"pR": p, "p2": n2 / (n1 + n2), "nTrials": n1 + n2}
                  for p, (n1, n2) in sorted(pooled.items())]
        return {"participantId": log.participant_id, "blocks": blocks,
                "levels": levels, "phase": self.phase}

    def latest_fit(self) -> dict:
        with self.lock:
            future = self._fit_future
        if future is None:
            raise HTTPException(404, "no completed block to fit yet")
        return future.result(timeout=300)


def create_app(data_dir=None) -> FastAPI:
    """Build the service with its own session store and data directory."""
    root = Path(data_dir or os.environ.get("RISKREACH_DATA_DIR") or "riskreach-data")
    root.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="riskreach session service")
    sessions: dict[str, SessionRuntime] = {}
    store_lock = threading.Lock()
    executor = ThreadPoolExecutor(max_workers=2)

    def get_session(session_id: str) -> SessionRuntime:
        with store_lock:
            runtime = sessions.get(session_id)
        if runtime is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return runtime

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        config = ProtocolConfig(order=body.order)
        seed = body.seed if body.seed is not None else int(
            np.random.SeedSequence().generate_state(1)[0])
        session_id = uuid.uuid4().hex[:12]
        participant = body.participantId or f"web-{session_id}"
        runtime = SessionRuntime(session_id, config, seed, participant,
                                 root / f"{session_id}.jsonl", executor)
        with store_lock:
            sessions[session_id] = runtime
        return {"sessionId": session_id, "config": config.to_dict()}

    @app.get("/sessions/{session_id}/next")
    def next_trial(session_id: str):
        return get_session(session_id).next_trial()

    @app.post("/sessions/{session_id}/choice")
    def submit_choice(session_id: str, body: ChoiceBody):
        return get_session(session_id).submit_choice(body)

    @app.get("/sessions/{session_id}/summary")
    def summary(session_id: str):
        return get_session(session_id).summary()

    @app.get("/sessions/{session_id}/fit")
    def latest_fit(session_id: str):
        return get_session(session_id).latest_fit()

    return app
