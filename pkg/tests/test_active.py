"""Sampling, run execution, multi-run orchestration, discovery analysis."""

from __future__ import annotations

import numpy as np
import pytest

from foodkb.active.analysis import (
    discovery_acceleration,
    discovery_curve,
    mean_discovery_curve,
)
from foodkb.active.runner import (
    RunConfig,
    RunResult,
    RoundRecord,
    multi_run,
    run_active_learning,
)
from foodkb.active.sampling import RANDOM, UNCERTAINTY, sample_batch, uncertainty_score
from foodkb.classifier.baseline import HyperParams
from foodkb.classifier.contract import BaselineBackend
from foodkb.metrics.confusion import MetricSet
from tests.conftest import build_synthetic_split

HP = HyperParams(learning_rate=0.1, batch_size=16, epochs=3)


def small_config(strategy=UNCERTAINTY, rounds=4, batch_size=10, seed=123):
    pool = build_synthetic_split(rounds * batch_size + 5, (rounds * batch_size) // 2,
                                 seed=31, chem_range=(0, 40))
    val = build_synthetic_split(20, 8, seed=32, chem_range=(40, 50),
                                index_base=100000)
    test = build_synthetic_split(30, 12, seed=33, chem_range=(50, 60),
                                 index_base=200000)
    return RunConfig(rounds=rounds, batch_size=batch_size, strategy=strategy,
                     seed=seed, pool=tuple(pool), val=tuple(val), test=tuple(test),
                     hyperparams=HP)


class TestUncertaintyScore:
    def test_maximum_at_half(self):
        assert uncertainty_score(0.5) == 0.5

    def test_confident_positive(self):
        assert abs(uncertainty_score(0.9) - 0.1) < 1e-15

    def test_certain(self):
        assert uncertainty_score(0.0) == 0.0
        assert uncertainty_score(1.0) == 0.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            uncertainty_score(1.5)
        with pytest.raises(ValueError):
            uncertainty_score(-0.1)

    def test_symmetry_fuzz(self):
        rng = np.random.default_rng(2)
        for p in rng.uniform(0, 1, size=10000):
            s = uncertainty_score(float(p))
            assert s == uncertainty_score(float(1.0 - p))
            assert 0.0 <= s <= 0.5


class TestSampleBatch:
    def test_uncertainty_top_k_with_id_tiebreak(self):
        # 0.75/0.25 are dyadic, so their scores tie exactly: a=0.5, b=c=0.25;
        # the b/c tie breaks by ascending pair id
        probs = {"a": 0.5, "b": 0.75, "c": 0.25}
        rng = np.random.default_rng(0)
        batch = sample_batch(UNCERTAINTY, ["a", "b", "c"], probs, 2, rng)
        assert batch == ["a", "b"]

    def test_non_dyadic_near_tie_follows_float_scores(self):
        # 1 - 0.9 rounds below 0.1 in binary, so b scores strictly lower
        # than c and the id tie-break never fires
        probs = {"a": 0.5, "b": 0.9, "c": 0.1}
        assert uncertainty_score(0.9) < uncertainty_score(0.1)
        batch = sample_batch(UNCERTAINTY, ["a", "b", "c"], probs, 2,
                             np.random.default_rng(0))
        assert batch == ["a", "c"]

    def test_k_equals_remaining_returns_all(self):
        probs = {"a": 0.4, "b": 0.6}
        rng = np.random.default_rng(0)
        assert sorted(sample_batch(UNCERTAINTY, ["b", "a"], probs, 2, rng)) == ["a", "b"]
        rng = np.random.default_rng(0)
        assert sorted(sample_batch(RANDOM, ["b", "a"], None, 2, rng)) == ["a", "b"]

    def test_random_deterministic_given_rng(self):
        ids = [f"p{i}" for i in range(50)]
        b1 = sample_batch(RANDOM, ids, None, 10, np.random.default_rng(7))
        b2 = sample_batch(RANDOM, ids, None, 10, np.random.default_rng(7))
        assert b1 == b2

    def test_random_input_order_independent(self):
        ids = [f"p{i}" for i in range(50)]
        b1 = sample_batch(RANDOM, ids, None, 10, np.random.default_rng(7))
        b2 = sample_batch(RANDOM, list(reversed(ids)), None, 10,
                          np.random.default_rng(7))
        assert b1 == b2

    def test_oversized_k_rejected(self):
        with pytest.raises(ValueError):
            sample_batch(RANDOM, ["a"], None, 2, np.random.default_rng(0))

    def test_missing_probabilities_rejected(self):
        with pytest.raises(ValueError, match="missing probabilities"):
            sample_batch(UNCERTAINTY, ["a", "b"], {"a": 0.5}, 1,
                         np.random.default_rng(0))


class TestRunActiveLearning:
    def test_cumulative_sizes_and_disjoint_batches(self):
        cfg = small_config()
        result = run_active_learning(cfg, BaselineBackend())
        assert result.complete
        assert [r.cumulative_train_size for r in result.rounds] == [10, 20, 30, 40]
        seen: set[str] = set()
        for record in result.rounds:
            ids = set(record.sampled_ids)
            assert len(ids) == len(record.sampled_ids) == 10
            assert not (ids & seen)
            seen |= ids

    def test_full_consumption_discovers_all_positives(self):
        for strategy in (UNCERTAINTY, RANDOM):
            pool = build_synthetic_split(40, 17, seed=3, chem_range=(0, 40))
            test = build_synthetic_split(20, 9, seed=4, chem_range=(50, 60),
                                         index_base=200000)
            cfg = RunConfig(rounds=4, batch_size=10, strategy=strategy, seed=5,
                            pool=tuple(pool), val=(), test=tuple(test),
                            hyperparams=HP)
            result = run_active_learning(cfg, BaselineBackend())
            assert result.rounds[-1].positives_discovered_cumulative == 17
            assert set().union(*(r.sampled_ids for r in result.rounds)) == {
                item.pair.pair_id for item in pool}

    def test_single_round_strategies_identical(self):
        pool = build_synthetic_split(20, 9, seed=6, chem_range=(0, 40))
        test = build_synthetic_split(20, 9, seed=7, chem_range=(50, 60),
                                     index_base=200000)
        results = []
        for strategy in (UNCERTAINTY, RANDOM):
            cfg = RunConfig(rounds=1, batch_size=20, strategy=strategy, seed=11,
                            pool=tuple(pool), val=(), test=tuple(test),
                            hyperparams=HP)
            result = run_active_learning(cfg, BaselineBackend())
            results.append([r.to_record() for r in result.rounds])
        # round 1 is random for both strategies, so single-round runs coincide
        assert results[0] == results[1]

    def test_byte_identical_repeat(self):
        cfg = small_config()
        r1 = run_active_learning(cfg, BaselineBackend())
        r2 = run_active_learning(cfg, BaselineBackend())
        assert r1.to_json_bytes() == r2.to_json_bytes()

    def test_backend_failure_preserves_partial_result(self):
        cfg = small_config()

        class FlakyBackend(BaselineBackend):
            def __init__(self):
                self.fits = 0

            def fit(self, train, hp, seed):
                self.fits += 1
                if self.fits >= 3:
                    from foodkb.classifier.contract import BackendTransportError

                    raise BackendTransportError("sidecar went away")
                return super().fit(train, hp, seed)

        result = run_active_learning(cfg, FlakyBackend())
        assert not result.complete
        assert len(result.rounds) == 2
        assert "round 3" in result.error

    def test_oversized_schedule_rejected(self):
        pool = build_synthetic_split(15, 6, seed=8, chem_range=(0, 40))
        with pytest.raises(ValueError, match="exceeds"):
            RunConfig(rounds=2, batch_size=10, strategy=RANDOM, seed=1,
                      pool=tuple(pool), val=(), test=(), hyperparams=HP)

    def test_pool_test_overlap_rejected(self):
        pool = build_synthetic_split(15, 6, seed=8, chem_range=(0, 40))
        with pytest.raises(ValueError, match="shares a sentence"):
            RunConfig(rounds=1, batch_size=10, strategy=RANDOM, seed=1,
                      pool=tuple(pool), val=(), test=tuple(pool[:3]),
                      hyperparams=HP)


class TestMultiRun:
    def test_result_count_and_seed_order(self, tmp_path):
        cfg = small_config(rounds=2, batch_size=10)
        results = multi_run(cfg, 3, out_dir=tmp_path)
        assert len(results) == 3
        assert len({r.seed for r in results}) == 3

    def test_rerun_bit_identical(self, tmp_path):
        cfg = small_config(rounds=2, batch_size=10)
        r1 = multi_run(cfg, 2)
        r2 = multi_run(cfg, 2)
        assert [a.to_json_bytes() for a in r1] == [b.to_json_bytes() for b in r2]

    def test_resume_skips_completed_runs(self, tmp_path):
        cfg = small_config(rounds=2, batch_size=10)
        first = multi_run(cfg, 2, out_dir=tmp_path)
        files = sorted(tmp_path.glob("run_*.json"))
        assert len(files) == 2
        stamps = {f: f.stat().st_mtime_ns for f in files}

        resumed = multi_run(cfg, 4, out_dir=tmp_path)
        assert len(resumed) == 4
        #Byte content of the first two runs is untouched on resume.
        for f in files:
            assert f.stat().st_mtime_ns == stamps[f]
        assert [r.to_json_bytes() for r in resumed[:2]] == [
            r.to_json_bytes() for r in first]

    def test_duplicate_seeds_rejected(self):
        cfg = small_config(rounds=2, batch_size=10)
        with pytest.raises(ValueError, match="distinct"):
            multi_run(cfg, 2, seeds=[1, 1])


def _result_with_curve(strategy, counts, seed=0):
    metrics = MetricSet(precision=1.0, recall=1.0, f1=1.0, accuracy=1.0,
                        specificity=1.0)
    rounds = tuple(
        RoundRecord(round_index=i + 1, sampled_ids=(f"r{seed}i{i}",),
                    cumulative_train_size=i + 1, metrics=metrics,
                    positives_discovered_cumulative=c)
        for i, c in enumerate(counts))
    return RunResult(config_digest="x", strategy=strategy, seed=seed, batch_size=1,
                     rounds_planned=len(counts), backend_kind="baseline",
                     hyperparams=HP, rounds=rounds, complete=True)


class TestDiscovery:
    def test_curve_non_decreasing(self):
        cfg = small_config()
        result = run_active_learning(cfg, BaselineBackend())
        curve = discovery_curve(result)
        values = [v for _, v in curve]
        assert values == sorted(values)

    def test_all_negative_pool_flat_zero(self):
        counts = [0, 0, 0, 0]
        run = _result_with_curve(RANDOM, counts)
        assert [v for _, v in discovery_curve(run)] == counts

    def test_identical_curves_zero_acceleration(self):
        unc = [_result_with_curve(UNCERTAINTY, [10, 20, 30, 40, 50])]
        rnd = [_result_with_curve(RANDOM, [10, 20, 30, 40, 50])]
        accel = discovery_acceleration(unc, rnd)
        assert accel.mean_percent == 0.0
        assert accel.std_percent == 0.0

    def test_constant_factor_acceleration(self):
        rnd_counts = [10, 20, 30, 40, 50]
        unc_counts = [10, 24.2, 36.3, 48.4, 50]
        # intermediate rounds 2..4 are exactly 1.21x random
        unc = [_result_with_curve(UNCERTAINTY, unc_counts)]
        rnd = [_result_with_curve(RANDOM, rnd_counts)]
        accel = discovery_acceleration(unc, rnd)
        assert abs(accel.mean_percent - 21.0) < 1e-9
        assert abs(accel.std_percent) < 1e-9

    def test_zero_denominator_round_excluded(self):
        unc = [_result_with_curve(UNCERTAINTY, [0, 5, 10, 20])]
        rnd = [_result_with_curve(RANDOM, [0, 0, 10, 20])]
        accel = discovery_acceleration(unc, rnd)
        assert accel.excluded_rounds == (2,)

    def test_mean_curve_averages_runs(self):
        runs = [_result_with_curve(RANDOM, [0, 10], seed=1),
                _result_with_curve(RANDOM, [10, 30], seed=2)]
        assert mean_discovery_curve(runs) == [(1, 5.0), (2, 20.0)]
