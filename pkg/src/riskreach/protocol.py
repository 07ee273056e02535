"""Discrete-event replica of the blockwise reaching experiment.

A session is rounds x levels blocks; each block repeats announced-level
trials until the required number of successful reaches is in. Robot
actions come from per-block pre-generated Bernoulli sequences, and every
random stream hangs off a single session seed, so a completed log
replays bit for bit.

Timing fields (countdown, movement window, rest) are metadata here; the
interactive service is what enforces them against a wall clock.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .actions import HumanAction, RobotAction, outcome
from .agents import Agent
from .validation import check_positive, check_probability

ORDERS = ("ascending", "descending", "randomized_per_trial")

# Synthetic clock: fixed reset pause between trials (milliseconds).
RESET_MS = 1000

# Substream indices hung off each block seed. Keeping the robot draws,
# the agent draws, and the per-trial level draws in separate streams
# means any one of them can be replayed in isolation.
RA_STREAM = 0
AGENT_STREAM = 1
LEVEL_STREAM = 2

_CONFIG_KEYS = {
    "levels": "levels",
    "successesPerBlock": "successes_per_block",
    "rounds": "rounds",
    "order": "order",
    "movementWindowS": "movement_window_s",
    "targetRadiusCm": "target_radius_cm",
    "targetDistanceCm": "target_distance_cm",
    "forceThresholdN": "force_threshold_n",
    "preGoWindowS": "pre_go_window_s",
    "calibrationFactor": "calibration_factor",
    "restBetweenBlocksS": "rest_between_blocks_s",
    "countdownSeconds": "countdown_seconds",
}


@dataclass(frozen=True)
class ProtocolConfig:
    """Experiment constants: levels, block size, geometry, thresholds."""

    levels: tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9)
    successes_per_block: int = 10
    rounds: int = 2
    order: str = "ascending"
    movement_window_s: float = 0.5
    target_radius_cm: float = 8.0
    target_distance_cm: float = 25.0
    force_threshold_n: float = 10.0
    pre_go_window_s: float = 1.0
    calibration_factor: float = 0.8
    rest_between_blocks_s: float = 30.0
    countdown_seconds: float = 3.0

    def __post_init__(self):
        if not self.levels:
            raise ValueError("levels must be non-empty")
        object.__setattr__(self, "levels", tuple(float(p) for p in self.levels))
        for p in self.levels:
            if not 0.0 < p < 1.0:
                raise ValueError(f"levels must lie strictly inside (0, 1), got {p}")
        if int(self.successes_per_block) != self.successes_per_block or self.successes_per_block < 1:
            raise ValueError("successes_per_block must be a positive integer")
        if int(self.rounds) != self.rounds or self.rounds < 1:
            raise ValueError("rounds must be a positive integer")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {self.order!r}")
        if not 0.0 < self.calibration_factor <= 1.0:
            raise ValueError("calibration_factor must lie in (0, 1]")
        for name in ("movement_window_s", "target_radius_cm", "target_distance_cm",
                     "force_threshold_n", "pre_go_window_s"):
            check_positive(getattr(self, name), name)
        for name in ("rest_between_blocks_s", "countdown_seconds"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0")

    def block_levels(self) -> list[float]:
        """Level sequence for one round under the configured order."""
        levels = sorted(self.levels)
        if self.order == "descending":
            return levels[::-1]
        # randomized_per_trial keeps the ascending labels; actual trial
        # levels are drawn inside the block
        return levels

    def to_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "successesPerBlock": self.successes_per_block,
            "rounds": self.rounds,
            "order": self.order,
            "movementWindowS": self.movement_window_s,
            "targetRadiusCm": self.target_radius_cm,
            "targetDistanceCm": self.target_distance_cm,
            "forceThresholdN": self.force_threshold_n,
            "preGoWindowS": self.pre_go_window_s,
            "calibrationFactor": self.calibration_factor,
            "restBetweenBlocksS": self.rest_between_blocks_s,
            "countdownSeconds": self.countdown_seconds,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ProtocolConfig":
        unknown = set(doc) - set(_CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {field: doc[key] for key, field in _CONFIG_KEYS.items() if key in doc}
        if "levels" in kwargs:
            kwargs["levels"] = tuple(kwargs["levels"])
        return cls(**kwargs)


@dataclass(frozen=True)
class TrialRecord:
    """One reach: announced level, both actions, and the outcome."""

    round: int
    block: int
    p_r: float
    robot_action: RobotAction
    human_action: HumanAction
    success: bool
    chosen_at_ms: int
    force_trace: "ForceTrace | None" = None

    def __post_init__(self):
        check_probability(self.p_r, "p_r")
        if self.round < 0 or self.block < 0:
            raise ValueError("round and block must be non-negative")
        if self.success != outcome(self.human_action, self.robot_action):
            raise ValueError("success flag contradicts the outcome rule")


@dataclass(frozen=True)
class SessionLog:
    """Complete record of one simulated or interactive session."""

    participant_id: str
    order: str
    config: ProtocolConfig
    trials: tuple[TrialRecord, ...]
    session_seed: int
    block_seeds: dict[tuple[int, int], int]

    @property
    def n_trials(self) -> int:
        return len(self.trials)

    def iter_blocks(self) -> Iterator[tuple[tuple[int, int], list[TrialRecord]]]:
        """Yield ((round, block), trials) groups in recorded order."""
        key = None
        bucket: list[TrialRecord] = []
        for trial in self.trials:
            trial_key = (trial.round, trial.block)
            if trial_key != key:
                if bucket:
                    yield key, bucket
                key, bucket = trial_key, []
            bucket.append(trial)
        if bucket:
            yield key, bucket


class BlockUnfinishableError(RuntimeError):
    """Trial budget ran out before the block collected its successes."""

    def __init__(self, round_index: int, block_index: int, p_r: float, max_trials: int):
        super().__init__(
            f"block (round {round_index}, block {block_index}, p_r {p_r}) "
            f"did not reach the required successes within {max_trials} trials")
        self.round = round_index
        self.block = block_index
        self.p_r = p_r


def generate_ra_sequence(p_r, seed, max_len: int = 1000) -> list[RobotAction]:
    """Pre-draw the robot's actions for one block.

    Returns ``max_len`` i.i.d. draws; the perturbing action appears with
    probability ``p_r``. Deterministic given the seed.
    """
    check_probability(p_r, "p_r")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    draws = np.random.default_rng(seed).random(max_len) < p_r
    return [RobotAction.PERTURB if hit else RobotAction.ASSIST for hit in draws]


def _block_loop(agent: Agent,
                next_level: Callable[[int], float],
                next_ra: Callable[[int, float], RobotAction],
                agent_rng: np.random.Generator,
                config: ProtocolConfig,
                round_index: int,
                block_index: int,
                start_ms: int,
                max_trials: int) -> tuple[list[TrialRecord], int]:
    countdown_ms = int(round(config.countdown_seconds * 1000))
    movement_ms = int(round(config.movement_window_s * 1000))
    trials: list[TrialRecord] = []
    successes = 0
    clock = int(start_ms)
    for i in range(max_trials):
        p_r = next_level(i)
        robot = next_ra(i, p_r)
        choice = agent.choose(p_r, agent_rng)
        hit = outcome(choice, robot)
        chosen_at = clock + countdown_ms
        trials.append(TrialRecord(round_index, block_index, p_r, robot, choice,
                                  hit, chosen_at))
        clock = chosen_at + movement_ms + RESET_MS
        if hit:
            successes += 1
            if successes == config.successes_per_block:
                return trials, clock
    raise BlockUnfinishableError(round_index, block_index, next_level(0), max_trials)


def simulate_block(agent: Agent, p_r, config: ProtocolConfig, seed,
                   *, round_index: int = 0, block_index: int = 0,
                   start_ms: int = 0, max_trials: int = 1000) -> list[TrialRecord]:
    """Run one fixed-level block until enough successful reaches.

    One entry of the pre-generated robot sequence is consumed per trial,
    failed trials included.
    """
    check_probability(p_r, "p_r")
    sequence = generate_ra_sequence(p_r, [seed, RA_STREAM], max_trials)
    agent_rng = np.random.default_rng([seed, AGENT_STREAM])
    trials, _ = _block_loop(agent, lambda i: float(p_r), lambda i, p: sequence[i],
                            agent_rng, config, round_index, block_index,
                            start_ms, max_trials)
    return trials


def _randomized_block(agent: Agent, config: ProtocolConfig, block_seed: int,
                      round_index: int, block_index: int, start_ms: int,
                      max_trials: int) -> tuple[list[TrialRecord], int]:
    # Extension mode: each trial announces a level drawn uniformly from
    # the configured set. The robot draw compares its own uniform stream
    # against that trial's level, which reduces to the pre-generated
    # sequence when the level is constant.
    levels = sorted(config.levels)
    level_rng = np.random.default_rng([block_seed, LEVEL_STREAM])
    ra_uniforms = np.random.default_rng([block_seed, RA_STREAM]).random(max_trials)
    agent_rng = np.random.default_rng([block_seed, AGENT_STREAM])

    def next_level(i: int) -> float:
        return levels[int(level_rng.integers(len(levels)))]

    def next_ra(i: int, p: float) -> RobotAction:
        return RobotAction.PERTURB if ra_uniforms[i] < p else RobotAction.ASSIST

    return _block_loop(agent, next_level, next_ra, agent_rng, config,
                       round_index, block_index, start_ms, max_trials)


def simulate_session(agent: Agent, config: ProtocolConfig | None = None,
                     seed: int = 0, participant_id: str = "sim",
                     max_trials_per_block: int = 1000) -> SessionLog:
    """Run rounds x levels blocks in the configured order.

    Per-block seeds are spawned from the session seed in execution
    order, so any block can be replayed in isolation from its logged
    seed. Identical (agent, config, seed) produce bit-identical logs.
    """
    config = config if config is not None else ProtocolConfig()
    n_blocks = config.rounds * len(config.levels)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    block_seeds: dict[tuple[int, int], int] = {}
    trials: list[TrialRecord] = []
    clock = 0
    rest_ms = int(round(config.rest_between_blocks_s * 1000))
    k = 0
    for round_index in range(config.rounds):
        for block_index, level in enumerate(config.block_levels()):
            block_seed = int(children[k].generate_state(1)[0])
            k += 1
            block_seeds[(round_index, block_index)] = block_seed
            if config.order == "randomized_per_trial":
                block_trials, clock = _randomized_block(
                    agent, config, block_seed, round_index, block_index,
                    clock, max_trials_per_block)
            else:
                sequence = generate_ra_sequence(level, [block_seed, RA_STREAM],
                                                max_trials_per_block)
                agent_rng = np.random.default_rng([block_seed, AGENT_STREAM])
                block_trials, clock = _block_loop(
                    agent, lambda i, lv=level: lv, lambda i, p: sequence[i],
                    agent_rng, config, round_index, block_index,
                    clock, max_trials_per_block)
            trials.extend(block_trials)
            clock += rest_ms
    return SessionLog(participant_id, config.order, config, tuple(trials),
                      int(seed), block_seeds)


@dataclass(frozen=True)
class ForceTrace:
    """Sampled interaction force around the Go cue."""

    samples: np.ndarray
    sample_rate_hz: float
    go_index: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-d series")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", samples)
        check_positive(self.sample_rate_hz, "sample_rate_hz")
        if not 0 <= self.go_index <= samples.size:
            raise ValueError("go_index must lie within the trace")


def classify_action(trace: ForceTrace, config: ProtocolConfig) -> HumanAction:
    """Threshold rule on mean force over the window just before Go.

    Strictly above ``force_threshold_n`` reads as a compensating hold;
    a mean exactly at the threshold reads as relaxed.
    """
    n = int(round(config.pre_go_window_s * trace.sample_rate_hz))
    if n < 1:
        raise ValueError("pre-Go window is shorter than one sample")
    if trace.go_index < n:
        raise ValueError("trace does not cover the pre-Go window")
    window = trace.samples[trace.go_index - n:trace.go_index]
    if window.mean() > config.force_threshold_n:
        return HumanAction.COMPENSATE
    return HumanAction.RELAX


def synthesize_force_trace(action: HumanAction, config: ProtocolConfig,
                           seed, sample_rate_hz: float = 100.0) -> ForceTrace:
    """Generate a trace whose classification round-trips to ``action``.

    Compensating traces hold 1.5x the threshold through the pre-Go
    window; relaxed traces idle near zero. Noise margins are wide
    enough that no seed can push the window mean across the threshold.
    """
    rng = np.random.default_rng(seed)
    n_window = max(int(round(config.pre_go_window_s * sample_rate_hz)), 1)
    n_lead = max(int(round(0.5 * sample_rate_hz)), 1)
    n_post = max(int(round(0.2 * sample_rate_hz)), 1)
    go_index = n_lead + n_window
    total = go_index + n_post
    if action is HumanAction.COMPENSATE:
        hold = 1.5 * config.force_threshold_n
        ramp = np.linspace(0.0, hold, n_lead, endpoint=False)
        plateau = np.full(n_window + n_post, hold)
        samples = np.concatenate([ramp, plateau])
        samples = samples + rng.normal(0.0, 0.02 * hold, total)
        samples = np.maximum(samples, 0.0)
    else:
        samples = np.abs(rng.normal(0.0, 0.03 * config.force_threshold_n, total))
    return ForceTrace(samples, sample_rate_hz, go_index)


def calibrate_disturbance(max_sustained_force, config: ProtocolConfig) -> float:
    """Scale a familiarization-phase maximum into the perturbation force."""
    force = float(max_sustained_force)
    if not np.isfinite(force) or force <= 0:
        raise ValueError("max_sustained_force must be positive")
    return config.calibration_factor * force
