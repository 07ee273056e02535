import numpy as np
import pytest

from riskreach.likelihood import ChoiceDataset, ChoiceLevel, sample_dataset
from riskreach.fitting import empirical_points, fit_cpt, rmse
from riskreach.models import CPT_BOUNDS, CptParams, cpt_choice_prob

LEVELS = [0.1, 0.3, 0.5, 0.7, 0.9]


def dataset_from(params, n_per_level=100, seed=0, levels=LEVELS):
    return sample_dataset(
        levels, n_per_level, lambda p: cpt_choice_prob(p, params), seed=seed
    )


class TestFitCpt:
    def test_all_compensate_drives_cost_to_floor(self):
        ds = ChoiceDataset([ChoiceLevel(p, 0, 20) for p in LEVELS])
        fit = fit_cpt(ds, seed=0)
        assert fit.params.effort_cost == CPT_BOUNDS["effort_cost"][0]
        assert fit.nll < 1e-6
        assert fit.converged

    def test_deterministic_given_seed(self):
        ds = dataset_from(CptParams(1.61, 1.17, 1.16, 1.76), seed=4)
        a = fit_cpt(ds, seed=123)
        b = fit_cpt(ds, seed=123)
        assert a.params == b.params
        assert a.nll == b.nll

    def test_seed_invariant_up_to_nll_ties(self):
        ds = dataset_from(CptParams(1.61, 1.17, 1.16, 1.76), seed=4)
        a = fit_cpt(ds, seed=0)
        b = fit_cpt(ds, seed=31337)
        assert abs(a.nll - b.nll) <= 1e-6

    def test_parameters_respect_bounds_exactly(self):
        rng = np.random.default_rng(8)
        for trial in range(5):
            counts = rng.integers(0, 30, size=len(LEVELS))
            ds = ChoiceDataset(
                [
                    ChoiceLevel(p, 30 - int(k), int(k))
                    for p, k in zip(LEVELS, counts)
                ]
            )
            fit = fit_cpt(ds, n_starts=8, seed=trial)
            for name, (lo, hi) in CPT_BOUNDS.items():
                v = getattr(fit.params, name)
                assert lo <= v <= hi

    def test_recovery_of_generating_parameters(self):
        truth = CptParams(1.6, 1.2, 1.2, 5.0)
        ds = dataset_from(truth, n_per_level=300, seed=21, levels=np.linspace(0.1, 0.9, 9))
        fit = fit_cpt(ds, seed=0)
        assert abs(fit.params.effort_cost - truth.effort_cost) <= 0.2
        grid = np.linspace(0, 1, 101)
        err = np.max(
            np.abs(cpt_choice_prob(grid, fit.params) - cpt_choice_prob(grid, truth))
        )
        assert err <= 0.05

    def test_local_optima_reported_sorted(self):
        ds = dataset_from(CptParams(1.86, 0.5, 0.01, 2.15), n_per_level=21, seed=5)
        fit = fit_cpt(ds, seed=0)
        vals = [v for _, v in fit.local_optima]
        assert vals == sorted(vals)
        assert fit.local_optima[0][1] == fit.nll

    def test_single_level_flagged_non_identifiable(self):
        ds = ChoiceDataset([ChoiceLevel(0.5, 4, 16)])
        fit = fit_cpt(ds, n_starts=8, seed=0)
        assert fit.n_levels == 1
        assert not fit.identifiable

    def test_cost_ceiling_constrains_fit(self):
        ds = dataset_from(CptParams(1.61, 1.17, 1.16, 1.76), seed=4)
        free = fit_cpt(ds, seed=0)
        capped = fit_cpt(ds, seed=0, cost_ceiling=0.05)
        assert capped.params.effort_cost <= 0.05
        # graded trade-off data clearly rejects a floor-level cost
        assert capped.nll - free.nll > 1e-2

    def test_cost_ceiling_validation(self):
        ds = ChoiceDataset([ChoiceLevel(0.5, 4, 16)])
        with pytest.raises(ValueError):
            fit_cpt(ds, cost_ceiling=9.0)

    def test_rejects_bad_start_count(self):
        ds = ChoiceDataset([ChoiceLevel(0.5, 4, 16)])
        with pytest.raises(ValueError):
            fit_cpt(ds, n_starts=0)

    def test_to_dict_round_trips_fields(self):
        ds = dataset_from(CptParams(1.61, 1.17, 1.16, 1.76), n_per_level=40, seed=4)
        d = fit_cpt(ds, n_starts=4, seed=0).to_dict()
        assert set(d) == {
            "params",
            "nll",
            "rmse",
            "restarts",
            "converged",
            "identifiable",
            "nLevels",
            "localOptima",
        }
        assert set(d["params"]) == {"alpha", "beta", "effortCost", "determinism"}


class TestRmse:
    def test_zero_when_curve_interpolates(self):
        ds = ChoiceDataset(
            [ChoiceLevel(0.2, 5, 5), ChoiceLevel(0.8, 2, 8)]
        )
        curve = lambda p: 0.5 if p == 0.2 else 0.8
        assert rmse(ds, curve) == pytest.approx(0.0, abs=1e-15)

    def test_known_value(self):
        # errors 0.1 and -0.3 -> sqrt((0.01 + 0.09)/2)
        ds = ChoiceDataset([ChoiceLevel(0.2, 5, 5), ChoiceLevel(0.8, 5, 5)])
        curve = lambda p: 0.6 if p == 0.2 else 0.2
        assert rmse(ds, curve) == pytest.approx(np.sqrt(0.05), abs=1e-12)

    def test_round_tags_give_one_point_per_block(self):
        ds = ChoiceDataset(
            [
                ChoiceLevel(0.5, 5, 5, round_index=0),
                ChoiceLevel(0.5, 0, 10, round_index=1),
            ]
        )
        pts = empirical_points(ds)
        assert len(pts) == 2
        pooled = empirical_points(ds, pool_rounds=True)
        assert pooled == [(0.5, 0.75)]
        # pooled rmse uses the merged point
        assert rmse(ds, lambda p: 0.75, pool_rounds=True) == pytest.approx(0.0)
        assert rmse(ds, lambda p: 0.75) == pytest.approx(0.25)
