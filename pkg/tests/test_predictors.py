"""Estimators: count forecasters vs exhaustive oracle, partitioning, linear AR."""

import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from ergolab import predictors
from ergolab.errors import CoverageError, SingularFit
from ergolab.intervals import rational_set
from ergolab.partitions import Partition, PartitionSchedule, regularity_report
from ergolab.predictors import (CountPredictor, dynamic_count, fit_linear_ar,
                                make_predictor, partitioning_autoregression,
                                partitioning_estimate, static_count)


def two_cell_partition():
    return Partition([
        ("left", rational_set((0, Fraction(1, 2)))),
        ("right", rational_set((Fraction(1, 2), 1))),
    ])


class TestCountForecasters:
    def test_static_examples(self):
        assert static_count((0, 1, 0, 1), 1) == 0
        assert static_count((0, 1, 1, 1), 1) == 1
        assert static_count((0, 0, 0, 1), 1) == 0  # context 1 never seen

    def test_dynamic_examples(self):
        assert dynamic_count((0, 1, 0, 1, 0), 1) == 1
        assert dynamic_count((1, 1, 1, 1), 1) == 1
        assert dynamic_count((0, 0, 0, 2), 1, context=(2,)) == 0  # unseen

    def test_against_exhaustive_oracle(self):
        # literal string matching over every binary series of length <= 12
        for n in range(2, 13):
            for bits in product((0, 1), repeat=n):
                for m in range(1, min(4, n)):
                    context = bits[n - m:]
                    hits = [bits[i + m] for i in range(0, n - m)
                            if bits[i:i + m] == context]
                    expected = Fraction(sum(hits), len(hits)) if hits else 0
                    assert dynamic_count(bits, m) == expected, (bits, m)
                    # static scans placements of the context before the end
                    hits_s = [bits[i + m] for i in range(0, n - m)
                              if bits[i:i + m] == context]
                    expected_s = Fraction(sum(hits_s), len(hits_s)) \
                        if hits_s else 0
                    assert static_count(bits, m) == expected_s, (bits, m)

    def test_static_and_dynamic_agree_on_full_history(self):
        rng = random.Random(0)
        for _ in range(100):
            data = [rng.randrange(2) for _ in range(rng.randrange(4, 30))]
            for m in (1, 2):
                assert static_count(data, m) == dynamic_count(data, m)

    def test_predictor_wrapper_batches(self):
        pred = CountPredictor(1, "dynamic")
        obs = [(0, 1, 0, 1, 0), (1, 1, 1, 1), (0, 0, 1), (0,)]
        batched = pred.predict_batch(obs)
        assert list(batched) == [pred(o) for o in obs]

    def test_predictor_wrapper_fraction_alphabet(self):
        pred = CountPredictor(1, "dynamic")
        obs = [(Fraction(0), Fraction(1, 2), Fraction(1, 4), Fraction(1, 2)),
               (Fraction(0), Fraction(1, 2))]
        batched = pred.predict_batch(obs)
        assert list(batched) == [pred(o) for o in obs]

    def test_registry(self):
        assert make_predictor("constant:0.5")((1, 2, 3)) == 0.5
        assert make_predictor("dynamic-count:2").context_len == 2
        with pytest.raises(KeyError):
            make_predictor("oracle")


class TestPartitioningEstimate:
    def test_examples(self):
        pairs = [(0.1, 1), (0.15, 2), (0.7, 5)]
        part = two_cell_partition()
        assert partitioning_estimate(pairs, part, 0.2) == 1.5
        assert partitioning_estimate(pairs, part, 0.6) == 5
        empty = [(0.7, 5)]
        assert partitioning_estimate(empty, part, 0.2) == 0

    def test_coverage_error(self):
        with pytest.raises(CoverageError):
            partitioning_estimate([(0.1, 1)], two_cell_partition(), 1.5)

    def test_autoregression_example(self):
        series = (0.1, 0.6, 0.2, 0.7)
        assert partitioning_autoregression(series, two_cell_partition(), 0.7) \
            == 0.2

    def test_single_pair(self):
        series = (0.3, 0.4)
        assert partitioning_autoregression(series, two_cell_partition(), 0.4) \
            == 0.4

    def test_matches_general_estimate_on_random_series(self):
        rng = random.Random(8)
        part = two_cell_partition()
        for _ in range(100):
            series = [Fraction(rng.randrange(0, 64), 64)
                      for _ in range(rng.randrange(3, 20))]
            x = series[-1]
            pairs = predictors.autoregression_pairs(series)
            assert partitioning_autoregression(series, part, x) \
                == partitioning_estimate(pairs, part, x)

    def test_exact_zero_on_empty_cell(self):
        series = [Fraction(3, 4), Fraction(7, 8), Fraction(1, 4)]
        est = partitioning_autoregression(series, two_cell_partition(),
                                          Fraction(1, 4))
        assert est == 0 and isinstance(est, int)


class TestConsistencyOnTwoStateChain:
    def test_count_estimates_converge(self):
        p = np.array([[0.75, 0.25], [0.40, 0.60]])
        for seed in range(5):
            rng = np.random.default_rng(seed)
            n = 100_000
            draws = rng.random(n)
            states = np.empty(n, dtype=np.int64)
            s = 0
            for i in range(n):
                s = int(draws[i] < p[s, 1])
                states[i] = s
            data = states.tolist()
            for context in (0, 1):
                truth = p[context, 1]
                assert abs(float(static_count(data, 1, context=(context,)))
                           - truth) <= 0.01
                assert abs(float(dynamic_count(data, 1, context=(context,)))
                           - truth) <= 0.01


class TestLinearAR:
    def test_exact_on_noise_free_recurrence(self):
        series = [1.0]
        for _ in range(40):
            series.append(0.5 * series[-1])
        model, prediction = fit_linear_ar(series, 1)
        assert abs(model.coefficients[0] - 0.5) < 1e-9
        assert abs(prediction - 0.5 * series[-1]) < 1e-12

    def test_exact_on_order_two(self):
        series = [1.0, 2.0]
        for _ in range(60):
            series.append(0.5 * series[-1] - 0.06 * series[-2])
        model, prediction = fit_linear_ar(series, 2)
        assert np.allclose(model.coefficients, [0.5, -0.06], atol=1e-8)
        expected = 0.5 * series[-1] - 0.06 * series[-2]
        assert abs(prediction - expected) < 1e-10

    def test_overfit_order_is_singular(self):
        series = [1.0]
        for _ in range(40):
            series.append(0.5 * series[-1])
        with pytest.raises(SingularFit):
            fit_linear_ar(series, 2)

    def test_iid_coefficient_shrinks(self):
        rng = np.random.default_rng(3)
        series = rng.standard_normal(10_000)
        model, _ = fit_linear_ar(series, 1)
        assert abs(model.coefficients[0]) <= 0.05

    def test_sqrt_series_beats_linear(self):
        from ergolab.markov import sample_sqrt_ar
        series = sample_sqrt_ar(1.0, 10_001, seed=12)
        model, _ = fit_linear_ar(series, 1)
        prev, nxt = series[:-1], series[1:]
        mse_linear = np.mean((nxt - model.coefficients[0] * prev) ** 2)
        mse_truth = np.mean((nxt - np.sqrt(np.abs(prev))) ** 2)
        diff = (nxt - model.coefficients[0] * prev) ** 2 \
            - (nxt - np.sqrt(np.abs(prev))) ** 2
        z = diff.mean() / (diff.std(ddof=1) / np.sqrt(len(diff)))
        assert mse_linear > mse_truth
        assert z >= 3.0


class TestScheduleAndRegularity:
    def test_sqrt_schedule_values(self):
        schedule = PartitionSchedule.sqrt()
        assert schedule.q(3) == 2
        assert schedule.q(9) == 3
        assert schedule.q(64) == 8
        assert PartitionSchedule.sqrt(72).q(8) == 24

    def test_schedule_validation(self):
        with pytest.raises(ValueError):
            PartitionSchedule(lambda n: max(2, 64 // n), ns=[4, 16, 64])
        PartitionSchedule.constant(4)  # irregular but explicitly allowed

    def test_regularity_verdicts(self):
        from ergolab.odometer import starving_partition
        ns = [4, 16, 64, 256]
        good = PartitionSchedule.sqrt(ns=ns)
        parts = [(n, starving_partition(n, good)) for n in ns]
        report = regularity_report(good, parts)
        assert report["verdicts"][0]["diameters_shrink"]
        assert report["verdicts"][0]["cell_ratio_decays"]

        flat = PartitionSchedule.constant(4)
        parts = [(n, starving_partition(n, flat)) for n in ns]
        report = regularity_report(flat, parts)
        assert not report["verdicts"][0]["diameters_shrink"]
