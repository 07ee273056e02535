"""riskreach: risk-sensitive human choice modeling for disturbed reaching tasks.

Layers, bottom up: action/payoff definitions, probability weighting and
choice models, likelihood fitting, Bayesian logistic estimation with a
from-scratch no-U-turn sampler, a seeded protocol simulator, analysis
pipelines, estimator-style wrappers, and a CLI plus HTTP service.
"""

from .actions import HumanAction, PayoffSpec, RobotAction, outcome, subjective_value
from .agents import (Agent, BlrAgent, CptAgent, FixedAgent, ThresholdAgent,
                     agent_from_spec)
from .analysis import (ALWAYS_COMPENSATE, TRADE_OFF, ParticipantSummary,
                       build_choice_dataset, classify_strategy,
                       cluster_participants, compensation_probability,
                       curve_export, min_pooled_p2, recovery_report,
                       summarize_participant)
from .bayes import DEFAULT_PRIOR_SD, PosteriorSummary, blr_map, blr_posterior
from .estimators import BayesianLogisticChoice, CptChoiceModel
from .fitting import NLL_TIE_TOL, FitResult, empirical_points, fit_cpt, rmse
from .hmc import (SampleRun, effective_sample_size, nuts_sample, split_rhat,
                  standard_normal_self_test)
from .io import (read_session_jsonl, write_curve_csv, write_session_jsonl)
from .likelihood import (PROB_FLOOR, ChoiceDataset, ChoiceLevel, nll,
                         nll_gradient, sample_dataset)
from .models import (CPT_BOUNDS, INTERCEPT_CAP, BlrParams, CptParams,
                     action_utilities, blr_choice_prob, cpt_choice_prob,
                     delta_utility, dual_weighted_utilities, softmax_choice)
from .protocol import (BlockUnfinishableError, ForceTrace, ProtocolConfig,
                       SessionLog, TrialRecord, calibrate_disturbance,
                       classify_action, generate_ra_sequence, simulate_block,
                       simulate_session, synthesize_force_trace)
from .weighting import prelec_weight

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # actions and payoffs
    "HumanAction", "RobotAction", "PayoffSpec", "subjective_value", "outcome",
    # choice models
    "prelec_weight", "CptParams", "BlrParams", "CPT_BOUNDS", "INTERCEPT_CAP",
    "delta_utility", "action_utilities", "dual_weighted_utilities",
    "cpt_choice_prob", "softmax_choice", "blr_choice_prob",
    # likelihood and fitting
    "PROB_FLOOR", "ChoiceLevel", "ChoiceDataset", "nll", "nll_gradient",
    "sample_dataset", "FitResult", "fit_cpt", "rmse", "empirical_points",
    "NLL_TIE_TOL",
    # Bayesian estimation
    "DEFAULT_PRIOR_SD", "PosteriorSummary", "blr_map", "blr_posterior",
    "SampleRun", "nuts_sample", "split_rhat", "effective_sample_size",
    "standard_normal_self_test",
    # protocol simulation
    "ProtocolConfig", "TrialRecord", "SessionLog", "BlockUnfinishableError",
    "ForceTrace", "generate_ra_sequence", "simulate_block", "simulate_session",
    "classify_action", "synthesize_force_trace", "calibrate_disturbance",
    # agents
    "Agent", "FixedAgent", "ThresholdAgent", "CptAgent", "BlrAgent",
    "agent_from_spec",
    # persistence
    "write_session_jsonl", "read_session_jsonl", "write_curve_csv",
    # analysis
    "ParticipantSummary", "build_choice_dataset", "compensation_probability",
    "classify_strategy", "cluster_participants", "min_pooled_p2",
    "recovery_report", "curve_export", "summarize_participant",
    "ALWAYS_COMPENSATE", "TRADE_OFF",
    # estimator wrappers
    "CptChoiceModel", "BayesianLogisticChoice",
]
