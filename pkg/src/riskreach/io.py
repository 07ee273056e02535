"""Session log persistence: line-delimited JSON trials plus a config sidecar.

Field names on the trial lines are frozen wire format:
participant_id, round, block, p_r, robot_action, human_action, success,
chosen_at_ms, seed. The seed on each line is the block's seed, so any
block can be regenerated without the sidecar.
"""

from __future__ import annotations

import json
from pathlib import Path

from .actions import HumanAction, RobotAction
from .protocol import ProtocolConfig, SessionLog, TrialRecord

TRIAL_FIELDS = ("participant_id", "round", "block", "p_r", "robot_action",
                "human_action", "success", "chosen_at_ms", "seed")


def config_sidecar_path(path) -> Path:
    """foo.jsonl -> foo.config.json (suffix replaced, or appended)."""
    path = Path(path)
    if path.suffix == ".jsonl":
        return path.with_suffix(".config.json")
    return path.with_name(path.name + ".config.json")


def format_trial_line(participant_id: str, trial: TrialRecord, block_seed: int) -> str:
    """One trial as a JSONL line, the single source of the wire format."""
    doc = {
        "participant_id": participant_id,
        "round": trial.round,
        "block": trial.block,
        "p_r": trial.p_r,
        "robot_action": trial.robot_action.value,
        "human_action": trial.human_action.value,
        "success": trial.success,
        "chosen_at_ms": trial.chosen_at_ms,
        "seed": block_seed,
    }
    return json.dumps(doc, separators=(", ", ": "))


def write_config_sidecar(path, participant_id: str, order: str, session_seed: int,
                         block_seeds: dict, config: ProtocolConfig) -> Path:
    """Write the per-session config document next to a trial file."""
    sidecar = config_sidecar_path(path)
    doc = {
        "participantId": participant_id,
        "order": order,
        "sessionSeed": session_seed,
        "blockSeeds": {f"{r}:{b}": s for (r, b), s in sorted(block_seeds.items())},
        "config": config.to_dict(),
    }
    sidecar.write_text(json.dumps(doc, indent=2) + "\n")
    return sidecar


def write_session_jsonl(log: SessionLog, path) -> tuple[Path, Path]:
    """Write one line per trial plus the config sidecar.

    Returns (log path, sidecar path). Output is deterministic: the same
    log always produces byte-identical files.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [format_trial_line(log.participant_id, t,
                               log.block_seeds[(t.round, t.block)])
             for t in log.trials]
    path.write_text("\n".join(lines) + ("\n" if lines else ""))
    sidecar = write_config_sidecar(path, log.participant_id, log.order,
                                   log.session_seed, log.block_seeds, log.config)
    return path, sidecar


def _parse_trial(doc: dict, lineno: int) -> tuple[str, TrialRecord, int]:
    for field in TRIAL_FIELDS:
        if field not in doc:
            raise ValueError(f"line {lineno}: missing field {field!r}")
    extra = set(doc) - set(TRIAL_FIELDS)
    if extra:
        raise ValueError(f"line {lineno}: unknown fields {sorted(extra)}")
    try:
        trial = TrialRecord(
            round=int(doc["round"]),
            block=int(doc["block"]),
            p_r=float(doc["p_r"]),
            robot_action=RobotAction(doc["robot_action"]),
            human_action=HumanAction(doc["human_action"]),
            success=bool(doc["success"]),
            chosen_at_ms=int(doc["chosen_at_ms"]),
        )
    except ValueError as exc:
        raise ValueError(f"line {lineno}: {exc}") from exc
    return str(doc["participant_id"]), trial, int(doc["seed"])


def read_session_jsonl(path) -> SessionLog:
    """Rebuild a SessionLog from a trial file and its sidecar.

    Malformed input raises ValueError naming the offending line. A
    missing sidecar falls back to the default config with order and
    session seed unknown (order "ascending", seed 0).
    """
    path = Path(path)
    participant_id: str | None = None
    trials: list[TrialRecord] = []
    block_seeds: dict[tuple[int, int], int] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(doc, dict):
                raise ValueError(f"line {lineno}: expected an object")
            pid, trial, seed = _parse_trial(doc, lineno)
            if participant_id is None:
                participant_id = pid
            elif pid != participant_id:
                raise ValueError(
                    f"line {lineno}: participant {pid!r} does not match {participant_id!r}")
            key = (trial.round, trial.block)
            if key in block_seeds and block_seeds[key] != seed:
                raise ValueError(f"line {lineno}: conflicting seed for block {key}")
            block_seeds[key] = seed
            trials.append(trial)
    if not trials:
        raise ValueError(f"{path}: no trials")

    sidecar = config_sidecar_path(path)
    order = "ascending"
    session_seed = 0
    config = ProtocolConfig()
    if sidecar.exists():
        doc = json.loads(sidecar.read_text())
        config = ProtocolConfig.from_dict(doc.get("config", {}))
        order = doc.get("order", config.order)
        session_seed = int(doc.get("sessionSeed", 0))
        if "participantId" in doc and doc["participantId"] != participant_id:
            raise ValueError(
                f"{sidecar.name}: participant {doc['participantId']!r} "
                f"does not match trial lines {participant_id!r}")
    return SessionLog(participant_id, order, config, tuple(trials),
                      session_seed, block_seeds)


def write_curve_csv(path, points) -> Path:
    """Write (p_r, p2) pairs as CSV with the fixed header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["p_r,p2"]
    for p_r, p2 in points:
        lines.append(f"{float(p_r):.6g},{float(p2):.10g}")
    path.write_text("\n".join(lines) + "\n")
    return path
