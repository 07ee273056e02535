"""Protocol simulator: config, seeded trial loop, force classification."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskreach.actions import HumanAction, RobotAction
from riskreach.agents import (Agent, BlrAgent, CptAgent, FixedAgent,
                              ThresholdAgent, agent_from_spec)
from riskreach.models import BlrParams, CptParams, blr_choice_prob, cpt_choice_prob
from riskreach.protocol import (AGENT_STREAM, RA_STREAM, RESET_MS,
                                BlockUnfinishableError, ForceTrace,
                                ProtocolConfig, SessionLog, TrialRecord,
                                calibrate_disturbance, classify_action,
                                generate_ra_sequence, simulate_block,
                                simulate_session, synthesize_force_trace)

RELAX = HumanAction.RELAX
COMP = HumanAction.COMPENSATE


class TestProtocolConfig:
    def test_defaults(self):
        cfg = ProtocolConfig()
        assert cfg.levels == (0.1, 0.3, 0.5, 0.7, 0.9)
        assert cfg.successes_per_block == 10
        assert cfg.rounds == 2
        assert cfg.order == "ascending"
        assert cfg.movement_window_s == 0.5
        assert cfg.target_radius_cm == 8.0
        assert cfg.target_distance_cm == 25.0
        assert cfg.force_threshold_n == 10.0
        assert cfg.pre_go_window_s == 1.0
        assert cfg.calibration_factor == 0.8
        assert cfg.rest_between_blocks_s == 30.0

    @pytest.mark.parametrize("kwargs", [
        {"levels": ()},
        {"levels": (0.0, 0.5)},
        {"levels": (0.5, 1.0)},
        {"successes_per_block": 0},
        {"rounds": 0},
        {"order": "sideways"},
        {"calibration_factor": 0.0},
        {"calibration_factor": 1.2},
        {"movement_window_s": 0.0},
        {"force_threshold_n": -1.0},
        {"rest_between_blocks_s": -5.0},
        {"countdown_seconds": -1.0},
    ])
    def test_invalid_config_rejected(self, kwargs):
        with pytest.raises(ValueError):
            ProtocolConfig(**kwargs)

    def test_dict_round_trip(self):
        cfg = ProtocolConfig(order="descending", rounds=3, countdown_seconds=1.5)
        assert ProtocolConfig.from_dict(cfg.to_dict()) == cfg

    def test_from_dict_defaults_and_unknown_keys(self):
        assert ProtocolConfig.from_dict({}) == ProtocolConfig()
        assert ProtocolConfig.from_dict({"order": "descending"}).order == "descending"
        with pytest.raises(ValueError, match="unknown config keys"):
            ProtocolConfig.from_dict({"blockCount": 5})

    def test_block_levels_ordering(self):
        assert ProtocolConfig().block_levels() == [0.1, 0.3, 0.5, 0.7, 0.9]
        assert ProtocolConfig(order="descending").block_levels() == [0.9, 0.7, 0.5, 0.3, 0.1]


class TestTrialRecord:
    def test_success_flag_must_match_outcome_rule(self):
        TrialRecord(0, 0, 0.5, RobotAction.PERTURB, COMP, True, 0)
        with pytest.raises(ValueError, match="outcome rule"):
            TrialRecord(0, 0, 0.5, RobotAction.PERTURB, COMP, False, 0)
        with pytest.raises(ValueError, match="outcome rule"):
            TrialRecord(0, 0, 0.5, RobotAction.PERTURB, RELAX, True, 0)

    def test_level_validated(self):
        with pytest.raises(ValueError):
            TrialRecord(0, 0, 1.5, RobotAction.ASSIST, RELAX, True, 0)


class TestRaSequence:
    def test_degenerate_levels(self):
        assert set(generate_ra_sequence(0.0, 1, 200)) == {RobotAction.ASSIST}
        assert set(generate_ra_sequence(1.0, 1, 200)) == {RobotAction.PERTURB}

    def test_frequency_concentrates_on_level(self):
        seq = generate_ra_sequence(0.5, 123, 100_000)
        frac = sum(a is RobotAction.PERTURB for a in seq) / 100_000
        assert abs(frac - 0.5) <= 0.01

    def test_deterministic_given_seed(self):
        assert generate_ra_sequence(0.3, 42, 50) == generate_ra_sequence(0.3, 42, 50)
        assert generate_ra_sequence(0.3, 42, 50) != generate_ra_sequence(0.3, 43, 50)

    def test_bad_args(self):
        with pytest.raises(ValueError):
            generate_ra_sequence(1.2, 0)
        with pytest.raises(ValueError):
            generate_ra_sequence(0.5, 0, max_len=0)


class TestSimulateBlock:
    def test_always_compensate_is_minimal_all_success(self):
        trials = simulate_block(FixedAgent(COMP), 0.5, ProtocolConfig(), 7)
        assert len(trials) == 10
        assert all(t.success for t in trials)
        assert all(t.human_action is COMP for t in trials)

    def test_always_relax_no_disturbance(self):
        trials = simulate_block(FixedAgent(RELAX), 0.0, ProtocolConfig(), 7)
        assert len(trials) == 10
        assert all(t.success for t in trials)

    def test_relaxed_block_length_matches_expectation(self):
        # success per trial is a fair coin at p_r = 0.5, so trials to ten
        # successes average 20
        lengths = [len(simulate_block(FixedAgent(RELAX), 0.5, ProtocolConfig(), s))
                   for s in range(2000)]
        assert abs(np.mean(lengths) - 20.0) <= 0.5

    def test_failed_trials_consume_sequence_entries(self):
        cfg = ProtocolConfig()
        trials = simulate_block(FixedAgent(RELAX), 0.5, cfg, 99)
        expected = generate_ra_sequence(0.5, [99, RA_STREAM], 1000)
        assert [t.robot_action for t in trials] == expected[:len(trials)]
        assert any(not t.success for t in trials)

    def test_budget_exhaustion_raises(self):
        with pytest.raises(BlockUnfinishableError, match="block"):
            simulate_block(FixedAgent(RELAX), 0.9, ProtocolConfig(), 0,
                           round_index=1, block_index=4, max_trials=20)

    def test_trial_metadata(self):
        trials = simulate_block(FixedAgent(COMP), 0.3, ProtocolConfig(), 5,
                                round_index=1, block_index=2, start_ms=1000)
        assert all(t.round == 1 and t.block == 2 and t.p_r == 0.3 for t in trials)
        assert trials[0].chosen_at_ms == 1000 + 3000
        deltas = np.diff([t.chosen_at_ms for t in trials])
        assert all(d == 500 + RESET_MS + 3000 for d in deltas)


class TestSimulateSession:
    def test_always_compensate_session_shape(self):
        log = simulate_session(FixedAgent(COMP), seed=3, participant_id="p")
        assert log.n_trials == 100
        assert log.participant_id == "p"
        blocks = list(log.iter_blocks())
        assert len(blocks) == 10
        for _, trials in blocks:
            assert sum(t.success for t in trials) == 10

    def test_ascending_level_sequence(self):
        log = simulate_session(FixedAgent(COMP), seed=3)
        seq = [trials[0].p_r for _, trials in log.iter_blocks()]
        assert seq == [0.1, 0.3, 0.5, 0.7, 0.9] * 2

    def test_descending_level_sequence(self):
        cfg = ProtocolConfig(order="descending")
        log = simulate_session(FixedAgent(COMP), cfg, seed=3)
        seq = [trials[0].p_r for _, trials in log.iter_blocks()]
        assert seq == [0.9, 0.7, 0.5, 0.3, 0.1] * 2

    def test_bit_identical_replay(self):
        agent = CptAgent(CptParams(1.61, 1.17, 1.16, 1.76))
        a = simulate_session(agent, seed=11)
        b = simulate_session(agent, seed=11)
        assert a.trials == b.trials
        assert a.block_seeds == b.block_seeds
        c = simulate_session(agent, seed=12)
        assert c.trials != a.trials

    def test_blocks_replayable_from_logged_seeds(self):
        agent = CptAgent(CptParams(0.67, 0.53, 1.30, 9.21))
        log = simulate_session(agent, seed=21)
        for (round_index, block_index), trials in log.iter_blocks():
            replay = simulate_block(agent, trials[0].p_r, log.config,
                                    log.block_seeds[(round_index, block_index)],
                                    round_index=round_index, block_index=block_index)
            assert [t.human_action for t in replay] == [t.human_action for t in trials]
            assert [t.robot_action for t in replay] == [t.robot_action for t in trials]
            assert [t.success for t in replay] == [t.success for t in trials]

    def test_every_block_has_required_successes(self):
        cfg = ProtocolConfig(successes_per_block=4)
        log = simulate_session(ThresholdAgent(0.5), cfg, seed=9)
        for _, trials in log.iter_blocks():
            assert sum(t.success for t in trials) == 4

    def test_clock_is_strictly_increasing(self):
        log = simulate_session(FixedAgent(RELAX), seed=2)
        stamps = [t.chosen_at_ms for t in log.trials]
        assert all(b > a for a, b in zip(stamps, stamps[1:]))
        assert log.trials[0].chosen_at_ms == 3000

    def test_stochastic_agent_tracks_own_curve(self):
        # averaged over many sessions the per-level compensation rate
        # converges to the agent's closed-form choice probability
        params = CptParams(0.67, 0.53, 1.30, 9.21)
        agent = CptAgent(params)
        counts = {lv: [0, 0] for lv in ProtocolConfig().levels}
        for s in range(100):
            log = simulate_session(agent, seed=1000 + s)
            for t in log.trials:
                counts[t.p_r][0] += t.human_action is COMP
                counts[t.p_r][1] += 1
        levels = sorted(counts)
        empirical = [counts[lv][0] / counts[lv][1] for lv in levels]
        assert all(b >= a - 0.01 for a, b in zip(empirical, empirical[1:]))
        for lv, emp in zip(levels, empirical):
            assert abs(emp - cpt_choice_prob(lv, params)) <= 0.05

    def test_randomized_per_trial_mode(self):
        cfg = ProtocolConfig(order="randomized_per_trial")
        log = simulate_session(ThresholdAgent(0.5), cfg, seed=4)
        first_block = next(iter(log.iter_blocks()))[1]
        block_levels = {t.p_r for t in first_block}
        assert len(block_levels) > 1
        assert block_levels <= set(cfg.levels)
        replay = simulate_session(ThresholdAgent(0.5), cfg, seed=4)
        assert replay.trials == log.trials

    def test_unfinishable_block_propagates(self):
        cfg = ProtocolConfig(levels=(0.9,), rounds=1)
        with pytest.raises(BlockUnfinishableError):
            simulate_session(FixedAgent(RELAX), cfg, seed=0,
                             max_trials_per_block=20)


class TestForceClassification:
    def test_sustained_hold_reads_as_compensation(self):
        cfg = ProtocolConfig()
        trace = ForceTrace(np.full(150, 15.0), 100.0, 120)
        assert classify_action(trace, cfg) is COMP

    def test_idle_trace_reads_as_relax(self):
        cfg = ProtocolConfig()
        trace = ForceTrace(np.zeros(150), 100.0, 120)
        assert classify_action(trace, cfg) is RELAX

    def test_threshold_boundary_is_strict(self):
        cfg = ProtocolConfig()
        trace = ForceTrace(np.full(150, 10.0), 100.0, 120)
        assert classify_action(trace, cfg) is RELAX
        trace = ForceTrace(np.full(150, 10.0 + 1e-9), 100.0, 120)
        assert classify_action(trace, cfg) is COMP

    def test_window_coverage_required(self):
        cfg = ProtocolConfig()
        with pytest.raises(ValueError, match="pre-Go window"):
            classify_action(ForceTrace(np.zeros(150), 100.0, 80), cfg)

    def test_trace_validation(self):
        with pytest.raises(ValueError):
            ForceTrace(np.zeros(0), 100.0, 0)
        with pytest.raises(ValueError):
            ForceTrace(np.array([1.0, np.nan]), 100.0, 1)
        with pytest.raises(ValueError):
            ForceTrace(np.zeros(10), -1.0, 5)
        with pytest.raises(ValueError):
            ForceTrace(np.zeros(10), 100.0, 11)

    def test_round_trip_many_seeds(self):
        cfg = ProtocolConfig()
        for seed in range(10_000):
            action = COMP if seed % 2 else RELAX
            trace = synthesize_force_trace(action, cfg, seed)
            assert classify_action(trace, cfg) is action

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**63 - 1), st.sampled_from([RELAX, COMP]),
           st.floats(50.0, 500.0))
    def test_round_trip_property(self, seed, action, rate):
        cfg = ProtocolConfig()
        trace = synthesize_force_trace(action, cfg, seed, sample_rate_hz=rate)
        assert classify_action(trace, cfg) is action


class TestCalibration:
    def test_scaling(self):
        cfg = ProtocolConfig()
        assert calibrate_disturbance(50.0, cfg) == pytest.approx(40.0)
        assert calibrate_disturbance(10.0, cfg) == pytest.approx(8.0)

    def test_identity_factor(self):
        cfg = ProtocolConfig(calibration_factor=1.0)
        assert calibrate_disturbance(25.0, cfg) == pytest.approx(25.0)

    def test_rejects_non_positive(self):
        cfg = ProtocolConfig()
        for bad in (0.0, -3.0, float("nan")):
            with pytest.raises(ValueError):
                calibrate_disturbance(bad, cfg)


class TestAgents:
    def test_fixed_agents(self):
        rng = np.random.default_rng(0)
        assert FixedAgent(COMP).choose(0.1, rng) is COMP
        assert FixedAgent(RELAX).choose(0.9, rng) is RELAX

    def test_threshold_agent_boundary_inclusive(self):
        rng = np.random.default_rng(0)
        agent = ThresholdAgent(0.5)
        assert agent.choose(0.5, rng) is COMP
        assert agent.choose(0.49, rng) is RELAX
        with pytest.raises(ValueError):
            ThresholdAgent(1.5)

    def test_stochastic_agents_match_their_curves(self):
        rng = np.random.default_rng(7)
        params = CptParams(1.61, 1.17, 1.16, 1.76)
        agent = CptAgent(params)
        n = 20_000
        frac = sum(agent.choose(0.5, rng) is COMP for _ in range(n)) / n
        assert abs(frac - cpt_choice_prob(0.5, params)) <= 0.01

        rng = np.random.default_rng(8)
        blr = BlrParams(-2.0, 4.0)
        agent = BlrAgent(blr)
        frac = sum(agent.choose(0.7, rng) is COMP for _ in range(n)) / n
        assert abs(frac - blr_choice_prob(0.7, blr)) <= 0.01

    def test_one_draw_per_choice(self):
        # draw streams stay aligned across agents with the same seed
        a = np.random.default_rng(42)
        CptAgent(CptParams(1.0, 1.0, 1.0, 5.0)).choose(0.5, a)
        b = np.random.default_rng(42)
        b.random()
        assert a.random() == b.random()

    def test_agent_from_spec(self):
        assert isinstance(agent_from_spec("always-ha1"), FixedAgent)
        assert agent_from_spec("always-ha2").action is COMP
        assert agent_from_spec("threshold", threshold=0.3).threshold == 0.3
        cpt = agent_from_spec("cpt", theta=(1.6, 1.2, 1.2, 5.0))
        assert cpt.params == CptParams(1.6, 1.2, 1.2, 5.0)
        blr = agent_from_spec("blr", blr=(-2.0, 4.0))
        assert blr.params == BlrParams(-2.0, 4.0)
        for name, kwargs in [("cpt", {}), ("blr", {}), ("threshold", {}),
                             ("warp", {})]:
            with pytest.raises(ValueError):
                agent_from_spec(name, **kwargs)
