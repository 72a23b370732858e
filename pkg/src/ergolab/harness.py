"""Experiment orchestration: configs, runners, reports, persistence.

Seven experiments share one configuration shape and one persistence format:

* ``thm1`` / ``thm2`` -- adversarial labelings against a named predictor,
  reported as per-checkpoint exceedance probabilities;
* ``thm3`` -- the odometer starvation sweep for the partitioning forecaster;
* ``thm4`` -- the rotation tower experiment with exact L1 integrals;
* ``consistency`` / ``linear`` -- the positive count-estimator baseline and
  the linear-predictor suboptimality demo;
* ``check-partitions`` -- partition-regularity trend report.

Every run is deterministic given its config: per-trial seeds are derived
from the master seed with a splittable sequence, and reports serialize to
byte-identical CSV.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import adversary, markov, odometer, predictors, rotation as rot
from .dyadic import BinaryPoint
from .errors import CapExceeded, ConfigError, ErgolabError, ExceptionalPoint
from .intervals import IntervalSet
from .partitions import PartitionSchedule, regularity_report, split_grid_partition
from .surd import QuadraticReal

EXPERIMENTS = ("thm1", "thm2", "thm3", "thm4",
               "consistency", "linear", "check-partitions")


def derived_seed(master, index: int) -> int:
    """Stable per-trial seed from the master seed."""
    return int(np.random.SeedSequence([int(master), int(index)])
               .generate_state(1)[0])


@dataclass
class ExperimentConfig:
    experiment: str = ""
    trials: int = 1000
    seed: int = 0
    kmax: int = 4
    smax: int = 8
    nlist: tuple = ()
    q_schedule: str = ""
    method: str = "exact:1e-4"
    predictor: str = "dynamic-count:1"
    alpha: str = "2,-1,1"
    out: str = ""
    threshold: float | None = None

    _DEFAULT_NLIST = {"thm3": tuple(range(3, 65)), "thm4": (8,),
                      "consistency": (1000, 10_000, 100_000),
                      "linear": (10_000,),
                      "check-partitions": (4, 16, 64, 256)}
    _DEFAULT_SCHEDULE = {"thm3": "sqrt:1", "thm4": "sqrt:72",
                         "check-partitions": "sqrt:1"}

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials <= 0:
            raise ConfigError("trials must be positive")
        if self.kmax <= 0 or self.smax < 2:
            raise ConfigError("kmax must be >= 1 and smax >= 2")
        if not self.nlist:
            self.nlist = self._DEFAULT_NLIST.get(self.experiment, (8,))
        if any(n <= 0 for n in self.nlist):
            raise ConfigError("every n must be positive")
        if not self.q_schedule:
            self.q_schedule = self._DEFAULT_SCHEDULE.get(self.experiment,
                                                         "sqrt:1")
        try:
            adversary.AttackMethod.parse(self.method)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    # -- pieces assembled from the flat string fields

    def schedule(self, require_regular=True) -> PartitionSchedule:
        kind, _, arg = self.q_schedule.partition(":")
        if kind == "sqrt":
            return PartitionSchedule.sqrt(int(arg) if arg else 1,
                                          ns=self.nlist,
                                          require_regular=require_regular)
        if kind == "const":
            return PartitionSchedule.constant(int(arg))
        if kind == "table":
            table = {}
            for item in arg.split(","):
                n, _, q = item.partition("=")
                table[int(n)] = int(q)
            return PartitionSchedule(table, ns=self.nlist,
                                     require_regular=require_regular)
        raise ConfigError(f"unknown q-schedule {self.q_schedule!r}")

    def rotation(self) -> rot.Rotation:
        try:
            d, a, b = (part.strip() for part in self.alpha.split(","))
            return rot.Rotation(QuadraticReal(Fraction(a), Fraction(b), int(d)))
        except (ValueError, ErgolabError) as exc:
            raise ConfigError(f"bad alpha spec {self.alpha!r}: {exc}") from None

    def attack_method(self) -> adversary.AttackMethod:
        return adversary.AttackMethod.parse(self.method)

    def target_predictor(self):
        try:
            return predictors.make_predictor(self.predictor)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None

    # -- flat text round trip (``key = value`` lines)

    _KEYS = ("experiment", "trials", "seed", "kmax", "smax", "nlist",
             "q-schedule", "method", "predictor", "alpha", "out", "threshold")

    def to_lines(self):
        values = {
            "experiment": self.experiment,
            "trials": self.trials,
            "seed": self.seed,
            "kmax": self.kmax,
            "smax": self.smax,
            "nlist": format_nlist(self.nlist),
            "q-schedule": self.q_schedule,
            "method": self.method,
            "predictor": self.predictor,
            "alpha": self.alpha,
            "out": self.out,
            "threshold": "" if self.threshold is None else repr(self.threshold),
        }
        return [f"{key} = {values[key]}" for key in self._KEYS]

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        cfg = cls()
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, eq, value = line.partition("=")
                if not eq:
                    raise ConfigError(f"not a key = value line: {line!r}")
                cfg.set_key(key.strip(), value.strip())
        return cfg

    def set_key(self, key: str, value: str):
        if value == "":
            return
        if key == "experiment":
            self.experiment = value
        elif key == "trials":
            self.trials = int(value)
        elif key == "seed":
            self.seed = int(value)
        elif key == "kmax":
            self.kmax = int(value)
        elif key == "smax":
            self.smax = int(value)
        elif key == "nlist":
            self.nlist = parse_nlist(value)
        elif key == "q-schedule":
            self.q_schedule = value
        elif key == "method":
            self.method = value
        elif key == "predictor":
            self.predictor = value
        elif key == "alpha":
            self.alpha = value
        elif key == "out":
            self.out = value
        elif key == "threshold":
            self.threshold = float(value)
        else:
            raise ConfigError(f"unknown config key {key!r}")


def parse_nlist(text: str) -> tuple:
    out = []
    for item in text.split(","):
        item = item.strip()
        if ":" in item:
            lo, _, hi = item.partition(":")
            out.extend(range(int(lo), int(hi) + 1))
        elif item:
            out.append(int(item))
    return tuple(out)


def format_nlist(ns) -> str:
    ns = list(ns)
    if not ns:
        return ""
    if len(ns) > 2 and ns == list(range(ns[0], ns[-1] + 1)):
        return f"{ns[0]}:{ns[-1]}"
    return ",".join(str(n) for n in ns)


@dataclass
class Report:
    """Rows ready for CSV plus a free-form summary and plot data."""

    schema: str                 # attack | static | baseline | partitions
    columns: tuple
    rows: list
    summary: dict = field(default_factory=dict)
    plot: list = field(default_factory=list)
    stat: float | None = None   # the statistic a threshold applies to
    stat_direction: str = "ge"

    def passed(self, threshold) -> bool:
        if threshold is None or self.stat is None:
            return True
        if self.stat_direction == "ge":
            return self.stat >= threshold
        return self.stat <= threshold

    def csv_text(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _half_width(p_hat: float, trials: int) -> float:
    return 3 * math.sqrt(p_hat * (1 - p_hat) / trials)


def _proven_lower_bound(split) -> Fraction:
    """Exact lower bound on the chosen event's probability.

    A margin-certified split proves the chosen side is the heavier one, so
    by the half-split identity its probability is at least 1/8.  A split
    that merely reached its mass tolerance proves 1/8 - residual/8 (picking
    the lighter side costs at most half the unseen mass).  Otherwise only
    the enumerated partial mass of the chosen side is proven; for a Monte
    Carlo split that is whatever the preceding exact attempt established.
    """
    attempt = split.detail.get("exact_attempt")
    if attempt is not None:
        side = attempt.p_minus if split.minus_wins else attempt.p_plus
        return Fraction(side)
    if split.method.startswith("mc"):
        return Fraction(0)
    side = Fraction(split.p_minus if split.minus_wins else split.p_plus)
    if split.detail.get("margin_certified"):
        return max(Fraction(1, 8), side)
    residual = Fraction(split.detail.get("residual", 1))
    return max(side, Fraction(1, 8) - residual / 8)


# -- thm1 / thm2: the confounding attacks


def run_attack(config: ExperimentConfig) -> Report:
    config.validate()
    if config.experiment not in ("thm1", "thm2"):
        raise ConfigError("run_attack handles thm1 and thm2")
    predictor = config.target_predictor()
    method = config.attack_method()
    if config.experiment == "thm1":
        table, build_report = adversary.confound_binary(
            predictor, config.kmax, method, seed=derived_seed(config.seed, 0))
        checkpoints = [(k, 2 * k) for k in range(1, config.kmax + 1)]
        gap_threshold = 0.25
    else:
        table, build_report = adversary.confound_injective(
            predictor, config.smax, method, seed=derived_seed(config.seed, 0))
        checkpoints = [(s, s) for s in range(2, config.smax + 1)]
        gap_threshold = 0.125
    top_level = checkpoints[-1][1]

    truths = {}
    for checkpoint, level in checkpoints:
        truths[checkpoint] = float(markov.HALF * table.label(level + 1))

    exceed = {checkpoint: 0 for checkpoint, _ in checkpoints}
    rng = random.Random(derived_seed(config.seed, 1))
    pending_obs, pending_cp = [], []

    def flush():
        for cp, value in zip(pending_cp,
                             predictors.evaluate_many(predictor, pending_obs)):
            if abs(float(value) - truths[cp]) >= gap_threshold:
                exceed[cp] += 1
        pending_obs.clear()
        pending_cp.clear()

    for _ in range(config.trials):
        path = markov.sample_until(top_level, rng)
        obs = table.observe(path)
        hit_at = {}
        for idx, state in enumerate(path):
            if state not in hit_at:
                hit_at[state] = idx
        for checkpoint, level in checkpoints:
            pending_obs.append(obs[:hit_at[level] + 1])
            pending_cp.append(checkpoint)
        if len(pending_obs) >= 20_000:
            flush()
    flush()

    rows = []
    plot = []
    min_p = 1.0
    for checkpoint, _ in checkpoints:
        p_hat = exceed[checkpoint] / config.trials
        min_p = min(min_p, p_hat)
        rows.append((checkpoint, config.trials, exceed[checkpoint],
                     p_hat, _half_width(p_hat, config.trials), True))
        rows.append((checkpoint, config.trials, exceed[checkpoint],
                     p_hat / 4, _half_width(p_hat, config.trials) / 4, False))
        plot.append((checkpoint, p_hat))

    label_summary = []
    for entry in build_report:
        split = entry["split"]
        label_summary.append({
            "checkpoint": entry["checkpoint"],
            "bit": entry["bit"],
            "method": split.method,
            "certified": split.certified,
            "p_plus": float(split.p_plus),
            "p_minus": float(split.p_minus),
            "uncertainty": float(split.uncertainty),
            "chosen_lower_bound": float(split.chosen_lower_bound),
            "proven_lower_bound": float(_proven_lower_bound(split)),
        })
    if config.experiment == "thm1":
        chosen = {"odd": table.odd_bits}
    else:
        chosen = {"L": {s: b for s, b in table.shift_bits.items() if s > 2}}
    return Report(
        schema="attack",
        columns=("checkpoint", "trials", "exceed_count", "p_hat",
                 "half_width", "conditional"),
        rows=rows,
        summary={"labels": label_summary,
                 "table": chosen,
                 "min_conditional_exceedance": min_p,
                 "gap_threshold": gap_threshold},
        plot=plot,
        stat=min_p,
        stat_direction="ge",
    )


# -- thm3: odometer starvation sweep


def run_starvation(config: ExperimentConfig) -> Report:
    config.validate()
    schedule = config.schedule()
    ns = list(config.nlist)
    parts = {n: odometer.starving_partition(n, schedule) for n in ns}
    max_n = max(ns)

    rows = []
    sweep_hits = 0
    in_b_hits = 0
    per_n_exceed = {n: 0 for n in ns}
    for trial in range(config.trials):
        try:
            omega = BinaryPoint.seeded(derived_seed(config.seed, trial))
            past = [omega]
            for _ in range(max_n - 1):
                past.append(odometer.step_back(past[-1]))
            x_next = odometer.step(omega)
            truth_high = x_next.bit(1) == 1
            truth = float(x_next)
            event_somewhere = False
            in_b_somewhere = False
            for n in ns:
                series = list(reversed(past[:n]))
                est = predictors.partitioning_autoregression(
                    series, parts[n], omega)
                est_zero = est == 0
                in_b = odometer.in_starving_set(omega, n)
                if in_b:
                    in_b_somewhere = True
                    assert est_zero and truth_high, \
                        "starvation must force an exactly-empty cell"
                event = est_zero and truth_high
                if event:
                    per_n_exceed[n] += 1
                    event_somewhere = True
                est_f = 0.0 if est_zero else float(est)
                rows.append((n, trial, in_b, est_f, truth,
                             abs(est_f - truth), None))
            if event_somewhere:
                sweep_hits += 1
            if in_b_somewhere:
                in_b_hits += 1
        except (CapExceeded, ExceptionalPoint) as exc:
            raise type(exc)(f"trial {trial}: {exc}") from exc

    union = IntervalSet.empty()
    for n in ns:
        union = union.union(odometer.starving_set(n))
    union_measure = union.measure()
    if hasattr(union_measure, "as_fraction"):
        union_measure = union_measure.as_fraction()
    sweep_freq = sweep_hits / config.trials
    return Report(
        schema="static",
        columns=("n", "trial", "in_Bn", "estimate", "truth", "error", "l1"),
        rows=rows,
        summary={
            "sweep_event_frequency": sweep_freq,
            "in_set_frequency": in_b_hits / config.trials,
            "starving_union_measure": float(union_measure),
            "starving_union_measure_exact": str(union_measure),
        },
        plot=[(n, per_n_exceed[n] / config.trials) for n in ns],
        stat=sweep_freq,
        stat_direction="ge",
    )


# -- thm4: rotation tower with exact L1 integrals


def run_rotation_l1(config: ExperimentConfig) -> Report:
    config.validate()
    if len(config.nlist) != 1:
        raise ConfigError("the rotation experiment runs one n at a time")
    n = config.nlist[0]
    schedule = config.schedule(require_regular=False)
    rotation = config.rotation()
    tower = rot.build_tower(rotation, 4 * n, Fraction(1, 2))
    b_set, c_set = tower.starving_pair(n)
    partition = split_grid_partition(n, schedule, c_set)
    h = schedule.h(n)

    # cells with no data predict zero; their |0 - m| integral never changes
    zero_integral = {}
    for label, cell in partition:
        total = rotation.scalar(0)
        for iv in cell:
            total = total + rot.integral_abs_error_on_interval(
                iv.lo, iv.hi, rotation.scalar(0), "rotation", rotation)
        zero_integral[label] = total

    sixteenth = Fraction(1, 16)
    rows = []
    l1_hits = 0
    in_b_hits = 0
    rng = random.Random(derived_seed(config.seed, 0))
    for trial in range(config.trials):
        omega = rotation.scalar(Fraction(rng.getrandbits(64), 1 << 64))
        past = [rotation.step(omega, -i + 1) for i in range(n, 0, -1)]
        pairs = predictors.autoregression_pairs(past)
        counts = predictors.CellCounts.from_pairs(pairs, partition)
        in_b = b_set.contains(omega)
        if in_b:
            in_b_hits += 1
            assert all(c_set.contains(z) for z, _ in pairs), \
                "recent data must sit inside the cover set"
            assert all(counts.counts.get((j, False), 0) == 0
                       for j in range(1, schedule.q(n) + 1)), \
                "outside-cells must be exactly empty on the starving event"
        l1 = rotation.scalar(0)
        for label, _ in partition:
            if counts.counts.get(label, 0) == 0:
                l1 = l1 + zero_integral[label]
            else:
                cell = partition.cell(label)
                constant = rotation.scalar(counts.estimate(label))
                for iv in cell:
                    l1 = l1 + rot.integral_abs_error_on_interval(
                        iv.lo, iv.hi, constant, "rotation", rotation)
        l1_exceeds = l1.compare(sixteenth) >= 0
        if l1_exceeds:
            l1_hits += 1
        est_f = float(counts.estimate_at(omega))
        truth = float(rotation.regression(omega))
        rows.append((n, trial, in_b, est_f, truth,
                     abs(est_f - truth), float(l1)))

    mu_b = tower.rotation.scalar(b_set.measure())
    freq = l1_hits / config.trials
    mu_b_f = float(mu_b)
    return Report(
        schema="static",
        columns=("n", "trial", "in_Bn", "estimate", "truth", "error", "l1"),
        rows=rows,
        summary={
            "l1_event_frequency": freq,
            "in_set_frequency": in_b_hits / config.trials,
            "tower_height": tower.height,
            "tower_coverage": float(tower.coverage),
            "mu_B": mu_b_f,
            "mu_B_at_least_eighth": bool(mu_b.compare(Fraction(1, 8)) >= 0),
            "cell_width": str(h),
            "mc_floor": mu_b_f - _half_width(mu_b_f, config.trials),
        },
        plot=[(n, freq)],
        stat=freq,
        stat_direction="ge",
    )


# -- positive baselines


_TWO_STATE = np.array([[0.75, 0.25], [0.40, 0.60]])


def run_consistency(config: ExperimentConfig) -> Report:
    config.validate()
    ns = sorted(config.nlist)
    seeds = [derived_seed(config.seed, i) for i in range(5)]
    rows = []
    worst = 0.0
    for seed_idx, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        length = max(ns)
        states = np.empty(length, dtype=np.int64)
        state = 0
        uniforms = rng.random(length)
        for i in range(length):
            state = int(uniforms[i] < _TWO_STATE[state, 1])
            states[i] = state
        data = states.tolist()
        for n in ns:
            for context in (0, 1):
                truth = float(_TWO_STATE[context, 1])
                est_s = float(predictors.static_count(data[:n], 1,
                                                      context=(context,)))
                est_d = float(predictors.dynamic_count(data[:n], 1,
                                                       context=(context,)))
                err = max(abs(est_s - truth), abs(est_d - truth))
                if n == max(ns):
                    worst = max(worst, err)
                rows.append((n, f"seed{seed_idx}-ctx{context}", err))
    return Report(
        schema="baseline",
        columns=("n", "context_or_model", "error"),
        rows=rows,
        summary={"max_error_at_longest_n": worst, "seeds": len(seeds)},
        plot=[(n, max(r[2] for r in rows if r[0] == n)) for n in ns],
        stat=worst,
        stat_direction="le",
    )


def run_linear(config: ExperimentConfig) -> Report:
    config.validate()
    n = max(config.nlist)
    series = markov.sample_sqrt_ar(1.0, n + 1,
                                   seed=derived_seed(config.seed, 0))
    model, _ = predictors.fit_linear_ar(series, 1)
    x_prev = series[:-1]
    x_next = series[1:]
    err_linear = (x_next - model.coefficients[0] * x_prev) ** 2
    err_truth = (x_next - np.sqrt(np.abs(x_prev))) ** 2
    diff = err_linear - err_truth
    z = float(diff.mean() / (diff.std(ddof=1) / math.sqrt(len(diff))))
    rows = [
        (n, "linear-ar", float(err_linear.mean())),
        (n, "true-regression", float(err_truth.mean())),
    ]
    return Report(
        schema="baseline",
        columns=("n", "context_or_model", "error"),
        rows=rows,
        summary={"coefficient": float(model.coefficients[0]),
                 "mse_gap": float(diff.mean()), "z_score": z},
        plot=[(n, z)],
        stat=z,
        stat_direction="ge",
    )


def run_check_partitions(config: ExperimentConfig) -> Report:
    config.validate()
    schedule = config.schedule(require_regular=False)
    parts = [(n, odometer.starving_partition(n, schedule))
             for n in config.nlist]
    windows = [IntervalSet.unit()]
    report = regularity_report(schedule, parts, windows)
    rows = [(r["n"], r["window"], float(r["max_diameter"]),
             float(r["cells_over_n"])) for r in report["rows"]]
    verdict = report["verdicts"][0]
    both = verdict["diameters_shrink"] and verdict["cell_ratio_decays"]
    return Report(
        schema="partitions",
        columns=("n", "window", "max_diameter", "cells_over_n"),
        rows=rows,
        summary={"verdicts": verdict, "regular_on_tested_range": both},
        plot=[(r["n"], float(r["max_diameter"])) for r in report["rows"]],
        stat=1.0 if both else 0.0,
        stat_direction="ge",
    )


RUNNERS = {
    "thm1": run_attack,
    "thm2": run_attack,
    "thm3": run_starvation,
    "thm4": run_rotation_l1,
    "consistency": run_consistency,
    "linear": run_linear,
    "check-partitions": run_check_partitions,
}


def run(config: ExperimentConfig) -> Report:
    config.validate()
    return RUNNERS[config.experiment](config)


def persist(config: ExperimentConfig, report: Report, out_dir) -> dict:
    """Write config echo, CSV rows and plot data; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}

    config_path = out / "config.txt"
    config_path.write_text("\n".join(config.to_lines()) + "\n",
                           encoding="utf-8")
    paths["config"] = config_path

    csv_path = out / f"{report.schema}.csv"
    csv_path.write_text(report.csv_text(), encoding="utf-8")
    paths["csv"] = csv_path

    plot_path = out / "plot.dat"
    plot_lines = [f"{_fmt(x)} {_fmt(y)}" for x, y in report.plot]
    plot_path.write_text("\n".join(plot_lines) + "\n", encoding="utf-8")
    paths["plot"] = plot_path
    return paths
