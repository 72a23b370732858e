#!/usr/bin/env python3
"""Choosing hidden-chain labels to confound a black-box forecaster.

The chain climbs 0, 1, 2, ... and falls back to 0 on fair coins.  Labels on
even states are pinned; the adversary watches what the forecaster says at
each first visit of an even level and picks the free odd label so that the
forecaster is wrong by 1/4 on whichever side of the split is heavier --
which is always at least half the anchor event.
"""
from ergolab.adversary import AttackMethod, confound_binary, confound_injective
from ergolab.harness import ExperimentConfig, run
from ergolab.predictors import make_predictor

print("== against the running count forecaster ==")
predictor = make_predictor("dynamic-count:1")
table, report = confound_binary(predictor, 3, AttackMethod(max_atoms=300_000))
print("chosen odd labels:", {2 * k + 1: b for k, b in table.odd_bits.items()})
for entry in report:
    split = entry["split"]
    print(f"  level {entry['level']}: split "
          f"{float(split.p_plus):.4f} vs {float(split.p_minus):.4f}, "
          f"method {split.method}, certified={split.certified}")

print()
print("== against constants ==")
for name in ("constant:0", "constant:1"):
    table, _ = confound_binary(make_predictor(name), 3,
                               AttackMethod(max_atoms=5000))
    print(f"  {name} -> odd labels",
          {2 * k + 1: b for k, b in table.odd_bits.items()})

print()
print("== the injective labeling variant ==")
table, report = confound_injective(make_predictor("dynamic-count:1"), 5,
                                   AttackMethod(max_atoms=100_000))
print("chosen shift bits:", {s: b for s, b in table.shift_bits.items() if s > 2})
print("(the count forecaster never saw the trailing label before, so it")
print(" answers zero everywhere and the low side always wins)")

print()
print("== full attack reports with exceedance ==")
for experiment, threshold in (("thm1", 0.25), ("thm2", 0.125)):
    config = ExperimentConfig(experiment=experiment, trials=2000, seed=5,
                              kmax=3, smax=5)
    rep = run(config)
    print(f"{experiment}: miss >= {threshold} at every checkpoint with "
          f"conditional frequency >= "
          f"{rep.summary['min_conditional_exceedance']:.3f}")
