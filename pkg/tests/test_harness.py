"""Experiment runner: determinism, summaries, comparison, replay checks."""

import json

import numpy as np
import pytest

from salsa_opt.core import TrainingTrace, StepRecord
from salsa_opt.harness import (ConfigError, ExperimentConfig, RunSummary,
                               batch_scaling_experiment, build_problem,
                               compare, emit, final_smoothed_loss,
                               frequency_ablation, replay_verify,
                               run_experiment, run_single, summarize)
from salsa_opt.problems import make_logreg, make_quadratic

QUAD_SPEC = {"kind": "quadratic", "dim": 3, "cond": 10, "seed": 1}


def quick_config(**overrides):
    base = dict(problem=QUAD_SPEC,
                optimizer={"kind": "sgd_sls"}, seeds=[0], epochs=30,
                batch_size=1)
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfig:
    def test_empty_seeds_rejected(self):
        with pytest.raises(ConfigError):
            quick_config(seeds=[])

    def test_unknown_optimizer_rejected(self):
        with pytest.raises(ConfigError):
            quick_config(optimizer={"kind": "lbfgs"})

    def test_unknown_problem_kind_rejected(self):
        with pytest.raises(ConfigError):
            build_problem({"kind": "rosenbrock"})

    def test_unknown_problem_param_rejected(self):
        with pytest.raises(ConfigError):
            build_problem({"kind": "quadratic", "dim": 2, "curvature": 3})

    def test_unknown_config_field_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({
                "problem": QUAD_SPEC, "optimizer": {"kind": "sgd_sls"},
                "seeds": [0], "epochs": 1, "batch_size": 1, "turbo": True})

    def test_unknown_optimizer_param_rejected(self):
        with pytest.raises(ConfigError):
            run_experiment(quick_config(
                optimizer={"kind": "sgd_sls", "momentum": 0.9}, epochs=1))


class TestRunExperiment:
    def test_zero_epochs_gives_initial_record_only(self):
        traces = run_experiment(quick_config(epochs=0))
        assert len(traces) == 1
        assert len(traces[0].records) == 1
        rec = traces[0].records[0]
        assert rec.k == 0 and not rec.searched

    def test_identical_configs_give_identical_traces(self):
        a = run_experiment(quick_config(seeds=[3, 4]))
        b = run_experiment(quick_config(seeds=[3, 4]))
        for ta, tb in zip(a, b):
            assert ta.records == tb.records
            assert ta.to_csv() == tb.to_csv()
            assert ta.to_json() == tb.to_json()

    def test_one_trace_per_seed_in_order(self):
        traces = run_experiment(quick_config(seeds=[5, 1, 9], epochs=2))
        assert [t.metadata["seed"] for t in traces] == [5, 1, 9]

    def test_quadratic_salsa_adam_reaches_tiny_loss(self):
        cfg = quick_config(problem={"kind": "quadratic", "dim": 5, "cond": 10,
                                    "seed": 11},
                           optimizer={"kind": "adam_salsa"},
                           seeds=[0, 1, 2, 3, 4], epochs=3500)
        for trace in run_experiment(cfg):
            assert final_smoothed_loss(trace) <= 1e-6

    def test_all_optimizer_kinds_run(self):
        for kind in ("sgd", "adam", "sgd_sls", "adam_sls", "sgd_salsa",
                     "adam_salsa"):
            opt = {"kind": kind, "lr": 0.05} if kind in ("sgd", "adam") \
                else {"kind": kind}
            traces = run_experiment(quick_config(optimizer=opt, epochs=5))
            assert len(traces[0].records) == 5


class TestFinalSmoothedLoss:
    def test_single_record(self):
        trace = TrainingTrace(metadata={})
        trace.append(StepRecord(0, 1.0, 0.7, 1.0, False, 0, 0))
        assert final_smoothed_loss(trace) == 0.7

    def test_matches_reference_ema(self):
        trace = TrainingTrace(metadata={})
        losses = [1.0, 0.5, 0.25, 0.125]
        for k, loss in enumerate(losses):
            trace.append(StepRecord(k, 1.0, loss, 1.0, False, 0, 0))
        expected = losses[0]
        for x in losses[1:]:
            expected = 0.99 * expected + 0.01 * x
        assert final_smoothed_loss(trace) == pytest.approx(expected, rel=1e-12)


class TestCompare:
    def _summary(self, opt, prob, loss):
        return RunSummary(optimizer=opt, problem=prob, final_losses=[loss],
                          mean_final_loss=loss)

    def test_single_candidate_rank_one(self):
        table = compare([self._summary("adam_salsa", "p1", 0.5),
                         self._summary("adam_salsa", "p2", 0.1)])
        assert table.average_rank == {"adam_salsa": 1.0}

    def test_log_average_is_geometric_mean(self):
        table = compare([self._summary("a", "p1", 0.01),
                         self._summary("a", "p2", 1.0)])
        assert table.log_mean["a"] == pytest.approx(0.1, rel=1e-12)

    def test_ranks_match_hand_computed_table(self):
        losses = {("a", "p1"): 0.1, ("b", "p1"): 0.2, ("c", "p1"): 0.3,
                  ("a", "p2"): 0.9, ("b", "p2"): 0.2, ("c", "p2"): 0.5}
        table = compare([self._summary(o, p, v)
                         for (o, p), v in losses.items()])
        # p1 ranks: a=1 b=2 c=3 ; p2 ranks: a=3 b=1 c=2
        assert table.average_rank == {"a": 2.0, "b": 1.5, "c": 2.5}

    def test_ties_averaged(self):
        table = compare([self._summary("a", "p1", 0.2),
                         self._summary("b", "p1", 0.2)])
        assert table.average_rank == {"a": 1.5, "b": 1.5}

    def test_rank_invariant_under_monotone_transform(self):
        base = {("a", "p1"): 0.1, ("b", "p1"): 0.7, ("a", "p2"): 0.4,
                ("b", "p2"): 0.2}
        t1 = compare([self._summary(o, p, v) for (o, p), v in base.items()])
        t2 = compare([self._summary(o, p, np.exp(v))
                      for (o, p), v in base.items()])
        assert t1.average_rank == t2.average_rank

    def test_nonpositive_loss_falls_back_with_warning(self):
        with pytest.warns(UserWarning):
            table = compare([self._summary("a", "p1", -0.5),
                             self._summary("a", "p2", 1.0)])
        assert table.log_mean["a"] == table.arithmetic_mean["a"] == \
            pytest.approx(0.25)

    def test_incomplete_problem_coverage_rejected(self):
        with pytest.raises(ConfigError):
            compare([self._summary("a", "p1", 0.1),
                     self._summary("b", "p2", 0.2)])

    def test_csv_has_summary_rows(self):
        table = compare([self._summary("a", "p1", 0.1),
                         self._summary("b", "p1", 0.2)])
        lines = table.to_csv().splitlines()
        assert lines[0] == "problem,a,b"
        labels = [ln.split(",")[0] for ln in lines[1:]]
        assert labels == ["p1", "arithmetic_mean", "log_mean", "average_rank"]


class TestSummarize:
    def test_peak_val_accuracy_mean_over_seeds(self):
        prob = make_logreg(n=200, dim=5, seed=1, label_noise=0.1)
        results = [run_single(prob, {"kind": "sgd_sls"}, seed, epochs=2,
                              batch_size=16) for seed in (0, 1)]
        summary = summarize("sgd_sls", prob.name,
                            [r.trace for r in results],
                            [r.val_accuracy_by_epoch for r in results])
        assert summary.peak_val_accuracy is not None
        assert 0.0 <= summary.peak_val_accuracy <= 1.0
        assert len(summary.final_losses) == 2


class TestScalingExperiment:
    def test_full_batch_deterministic_ratio_exactly_one(self):
        # dataset of one: every batch size clamps to the same full batch
        prob = make_quadratic(dim=3, cond=5, seed=2)
        report = batch_scaling_experiment(prob, batch_sizes=(4, 8, 16, 32),
                                          seeds=(0, 1), epochs=60)
        for _, _, ratio in report.ratios:
            assert ratio == 1.0

    def test_reports_h_and_s_series(self):
        prob = make_logreg(n=256, dim=5, seed=1, label_noise=0.1)
        report = batch_scaling_experiment(prob, batch_sizes=(8, 16),
                                          seeds=(0,), epochs=1)
        assert (8, 0) in report.h_series and (16, 0) in report.s_series
        assert len(report.h_series[(8, 0)]) > 0


class TestFrequencyAblation:
    def test_fractions_and_pairing(self):
        prob = make_logreg(n=512, dim=8, seed=0, label_noise=0.1)
        report = frequency_ablation(prob, seeds=(0, 1, 2), epochs=2,
                                    batch_size=16)
        assert report.searched_fraction_off == 1.0
        assert report.searched_fraction_on < 0.5
        assert len(report.final_loss_on) == 3


class TestEmit:
    def test_round_trip_json(self, tmp_path):
        trace = run_experiment(quick_config(epochs=3))[0]
        path = tmp_path / "t.json"
        emit(trace, "json", str(path))
        back = TrainingTrace.from_json(path.read_text())
        assert back.records == trace.records

    def test_golden_csv_bytes(self, tmp_path):
        trace = TrainingTrace(metadata={})
        trace.append(StepRecord(0, 1.5, 0.25, 4.0, True, 1, 7))
        trace.append(StepRecord(1, 0.75, 0.125, 1.0, True, 0, 8))
        trace.append(StepRecord(2, 0.75, 0.0625, 1e-20, False, 0, 9))
        path = tmp_path / "t.csv"
        emit(trace, "csv", str(path))
        golden = (
            "k,eta,loss,grad_norm_sq,searched,backtracks,batch_seed\n"
            "0,1.5,0.25,4.0,true,1,7\n"
            "1,0.75,0.125,1.0,true,0,8\n"
            "2,0.75,0.0625,1e-20,false,0,9\n"
        )
        assert path.read_text() == golden

    def test_bad_format_rejected(self, tmp_path):
        trace = TrainingTrace(metadata={})
        with pytest.raises(ConfigError):
            emit(trace, "xml", str(tmp_path / "t.xml"))

    def test_io_error_includes_path(self):
        trace = TrainingTrace(metadata={})
        with pytest.raises(OSError, match="no/such/dir"):
            emit(trace, "csv", "/no/such/dir/t.csv")


class TestReplayVerify:
    @pytest.mark.parametrize("kind", ["sgd_sls", "adam_sls", "sgd_salsa",
                                      "adam_salsa"])
    def test_clean_runs_verify(self, kind):
        prob = make_logreg(n=300, dim=6, seed=2, label_noise=0.1)
        opt = {"kind": kind}
        result = run_single(prob, opt, seed=1, epochs=4, batch_size=16)
        report = replay_verify(prob, opt, 1, 4, 16, result.trace)
        assert report.ok
        assert report.n_checked > 0
        assert report.n_searched >= report.n_checked

    def test_tampered_trace_detected(self):
        prob = make_quadratic(dim=2, cond=5, seed=1)
        opt = {"kind": "sgd_sls"}
        result = run_single(prob, opt, seed=0, epochs=10, batch_size=1)
        result.trace.records[3].eta *= 2.0
        with pytest.raises(ValueError, match="replay"):
            replay_verify(prob, opt, 0, 10, 1, result.trace)

    def test_nondecrease_mode_replays_exactly(self):
        # the extra shrink re-commits h at the applied eta, so the replayed
        # recurrence must still match and the criterion must still hold
        prob = make_quadratic(dim=6, cond=50, seed=7)
        opt = {"kind": "sgd_salsa", "enforce_nondecrease": True}
        result = run_single(prob, opt, seed=0, epochs=500, batch_size=1)
        report = replay_verify(prob, opt, 0, 500, 1, result.trace)
        assert report.ok
        assert report.n_checked > 0

    def test_giveup_steps_keep_replay_in_sync(self):
        # a tiny backtrack budget forces give-ups; those steps still commit
        # the smoothed state, so later accepted steps must verify cleanly
        prob = make_logreg(n=400, dim=12, seed=4, label_noise=0.2)
        opt = {"kind": "adam_salsa", "max_backtracks": 2}
        result = run_single(prob, opt, seed=1, epochs=6, batch_size=8)
        giveups = sum(r.searched and r.backtracks >= 2
                      for r in result.trace.records)
        assert giveups > 0, "configuration produced no give-ups"
        report = replay_verify(prob, opt, 1, 6, 8, result.trace)
        assert report.ok
        assert report.n_checked < report.n_searched

    def test_frequency_gated_run_verifies(self):
        prob = make_logreg(n=300, dim=6, seed=2, label_noise=0.1)
        opt = {"kind": "adam_salsa"}
        result = run_single(prob, opt, seed=0, epochs=4, batch_size=16,
                            frequency_controller=True)
        report = replay_verify(prob, opt, 0, 4, 16, result.trace,
                               frequency_controller=True)
        assert report.ok
        n_searched = sum(r.searched for r in result.trace.records)
        assert n_searched < len(result.trace.records)
