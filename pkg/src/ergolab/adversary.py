"""Adversarial label construction against a black-box predictor.

The chain anchored at state 0 reaches any target level through a sequence of
failed climbs followed by one successful climb; each such path has an exact
dyadic probability, and the path-to-observation map is invertible.  The
adversary splits paths by whether the predictor's value at the hitting time
is at least 1/4, and picks the free label so the predictor is wrong by a
fixed gap on the heavier side.  Because the two sides partition the anchor
event, the heavier side always carries at least half the anchor mass -- the
adversary only has to identify it.

Two estimation routes are provided.  The exact route enumerates paths in
nonincreasing probability order with exact partial sums; it stops once the
residual is below the tolerance or once the decision is *certified* (the
partial-sum margin exceeds the unenumerated mass, which proves the argmax).
Deep targets spread their mass over exponentially many paths, so the exact
route may exhaust its atom budget undecided; the Monte Carlo route then
estimates the split from anchored sampling with a 3-sigma half width.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CapExceeded
from .markov import OddLabelTable, ShiftLabelTable, sample_until

ANCHOR_MASS = Fraction(1, 4)  # stationary probability of state 0
THRESHOLD = 0.25


@dataclass(frozen=True)
class PathAtom:
    """An anchored path to the first visit of a target level.

    `prob` is exact and conditional on starting at state 0.
    """

    states: tuple
    prob: Fraction


def _atom_from_heights(heights, level) -> PathAtom:
    states = []
    flips = level - 2
    for h in heights:
        states.extend(range(h + 1))
        flips += h - 1
    states.extend(range(level + 1))
    return PathAtom(tuple(states), Fraction(1, 2 ** flips))


def _compositions(total: int, max_part: int):
    """Ordered compositions of `total` with parts in [1, max_part], lex order."""
    if total == 0:
        yield ()
        return
    for first in range(1, min(total, max_part) + 1):
        for rest in _compositions(total - first, max_part):
            yield (first,) + rest


def hitting_paths(level: int, mass_tol, max_atoms: int = 200_000,
                  partial_ok: bool = False):
    """Anchored paths to the first visit of `level`, heaviest first.

    Returns ``(atoms, residual)`` where `residual` is the exact unenumerated
    conditional mass.  Stops once the residual drops to `mass_tol`; raises
    :class:`CapExceeded` if the atom budget runs out first, unless
    `partial_ok` is set.
    """
    atoms, residual = [], Fraction(1)
    for batch in _atom_layers(level):
        for atom in batch:
            atoms.append(atom)
            residual -= atom.prob
            if len(atoms) >= max_atoms and residual > mass_tol:
                if partial_ok:
                    return atoms, residual
                raise CapExceeded(
                    f"residual {float(residual):.3g} above tolerance after "
                    f"{len(atoms)} atoms")
        if residual <= mass_tol:
            return atoms, residual
    return atoms, residual  # reached only by the single-layer level 2


def _atom_layers(level: int):
    """Atoms grouped by coin-flip count, i.e. nonincreasing probability."""
    if level < 2:
        raise ValueError("target level must be >= 2")
    max_part = level - 2  # failed climbs stop at heights 2 .. level-1
    extra = 0
    while True:
        if max_part == 0:
            # level 2 is reached deterministically: the single direct path
            yield [_atom_from_heights((), level)]
            return
        yield [_atom_from_heights(tuple(p + 1 for p in comp), level)
               for comp in _compositions(extra, max_part)]
        extra += 1


@dataclass
class EventSplit:
    """Estimated split of the anchor event by the predictor's side.

    Unconditional probabilities (anchor mass 1/4 folded in); each true value
    lies within `uncertainty` above its estimate for the exact method, and
    within the 3-sigma half width for Monte Carlo.
    """

    p_plus: Fraction | float
    p_minus: Fraction | float
    uncertainty: Fraction | float
    certified: bool
    method: str
    detail: dict = field(default_factory=dict)

    @property
    def minus_wins(self) -> bool:
        return self.p_minus >= self.p_plus

    @property
    def chosen_lower_bound(self):
        """Certified lower bound on the chosen event's probability."""
        return max(self.p_plus, self.p_minus)


def _observe_atoms(table, atoms):
    return [table.observe(atom.states) for atom in atoms]


def _evaluate(predictor, observations):
    from .predictors import evaluate_many
    return evaluate_many(predictor, observations)


def exact_split(predictor, table, level: int, mass_tol,
                max_atoms: int = 200_000, chunk: int = 100_000) -> EventSplit:
    """Exact-partial-sum split with early argmax certification.

    Enumerates atoms heaviest first; after each chunk checks whether the
    margin between the sides already exceeds the unenumerated mass (the
    decision can then never flip) or the residual fell under `mass_tol`.
    """
    mass_tol = Fraction(mass_tol)
    s_plus = s_minus = Fraction(0)
    residual = Fraction(1)
    n_atoms = 0
    exhausted = False
    pending = []

    def flush():
        nonlocal s_plus, s_minus, residual, n_atoms
        if not pending:
            return
        observations = _observe_atoms(table, pending)
        values = _evaluate(predictor, observations)
        for atom, value in zip(pending, values):
            if value >= THRESHOLD:
                s_plus += atom.prob
            else:
                s_minus += atom.prob
            residual -= atom.prob
        n_atoms += len(pending)
        pending.clear()

    done = False
    for layer in _atom_layers(level):
        for atom in layer:
            pending.append(atom)
            if len(pending) >= chunk:
                flush()
                if residual <= mass_tol or abs(s_plus - s_minus) > residual:
                    done = True
                    break
                if n_atoms >= max_atoms:
                    exhausted = True
                    done = True
                    break
        if not done:
            flush()
            if residual <= mass_tol or abs(s_plus - s_minus) > residual:
                done = True
            elif n_atoms >= max_atoms:
                exhausted = True
                done = True
        if done:
            break

    certified = abs(s_plus - s_minus) > residual
    return EventSplit(
        p_plus=s_plus * ANCHOR_MASS,
        p_minus=s_minus * ANCHOR_MASS,
        uncertainty=residual * ANCHOR_MASS,
        certified=certified or residual <= mass_tol,
        method=f"exact:{float(mass_tol):g}",
        detail={
            "residual": residual,
            "atoms": n_atoms,
            "budget_exhausted": exhausted,
            "margin_certified": certified,
        },
    )


def mc_split(predictor, table, level: int, trials: int, rng) -> EventSplit:
    """Monte Carlo split from anchored sampling; 3-sigma half width."""
    if trials < 1:
        raise ValueError("need at least one trial")
    plus = 0
    for _ in range(trials):
        path = sample_until(level, rng)
        if predictor(table.observe(path)) >= THRESHOLD:
            plus += 1
    p_hat = Fraction(plus, trials)
    sigma = (float(p_hat) * (1 - float(p_hat)) / trials) ** 0.5
    return EventSplit(
        p_plus=p_hat * ANCHOR_MASS,
        p_minus=(1 - p_hat) * ANCHOR_MASS,
        uncertainty=3 * sigma * float(ANCHOR_MASS),
        certified=False,
        method=f"mc:{trials}",
        detail={"trials": trials, "plus": plus},
    )


@dataclass
class AttackMethod:
    """How the adversary estimates each event split."""

    kind: str = "exact"            # "exact" or "mc"
    mass_tol: Fraction = Fraction(1, 10_000)
    max_atoms: int = 200_000
    trials: int = 20_000
    mc_fallback: bool = True       # exact budget exhausted -> Monte Carlo

    @classmethod
    def parse(cls, text: str) -> "AttackMethod":
        kind, _, arg = text.partition(":")
        if kind == "exact":
            return cls(kind="exact",
                       mass_tol=Fraction(arg) if arg else Fraction(1, 10_000))
        if kind == "mc":
            return cls(kind="mc", trials=int(arg) if arg else 20_000)
        raise ValueError(f"unknown attack method {text!r}")

    def describe(self) -> str:
        if self.kind == "exact":
            return f"exact:{float(self.mass_tol):g}"
        return f"mc:{self.trials}"


def _split_for(predictor, table, level, method: AttackMethod, rng) -> EventSplit:
    if method.kind == "exact":
        split = exact_split(predictor, table, level, method.mass_tol,
                            method.max_atoms)
        if split.certified or not split.detail["budget_exhausted"] \
                or not method.mc_fallback:
            return split
        # undecidable within the atom budget: estimate the split instead
        mc = mc_split(predictor, table, level, method.trials, rng)
        mc.detail["exact_attempt"] = split
        return mc
    split = mc_split(predictor, table, level, method.trials, rng)
    gap = abs(float(split.p_plus) - float(split.p_minus))
    if gap < 2 * split.uncertainty:
        # statistical tie: escalate once, then apply the >= rule as is
        split = mc_split(predictor, table, level, method.trials * 10, rng)
        split.detail["escalated"] = True
    return split


def confound_binary(predictor, k_max: int, method: AttackMethod | None = None,
                    seed=0):
    """Choose the odd labels so the predictor misses by 1/4 at every level.

    For k = 1..k_max in order: split the anchor event at the first visit of
    level 2k by the predictor's side, then set the odd label above the level
    to 1 exactly when the light side is the predictor's high side (ties favor
    the low side).  Returns the finished table and per-level diagnostics.
    """
    method = method or AttackMethod()
    rng = random.Random(seed)
    table = OddLabelTable()
    report = []
    for k in range(1, k_max + 1):
        split = _split_for(predictor, table, 2 * k, method, rng)
        bit = 1 if split.minus_wins else 0
        table = table.with_odd(k, bit)
        report.append({"checkpoint": k, "level": 2 * k, "bit": bit,
                       "split": split})
    return table, report


def confound_injective(predictor, s_max: int,
                       method: AttackMethod | None = None, seed=0):
    """Choose the shift bits of the injective labeling, one state at a time.

    For s = 2..s_max: split the anchor event at the first visit of state s;
    the bit above s is 1 exactly when the predictor's low side is at least
    as likely (the >= rule), creating a gap of at least 1/8 there.
    """
    method = method or AttackMethod()
    rng = random.Random(seed)
    table = ShiftLabelTable()
    report = []
    for s in range(2, s_max + 1):
        split = _split_for(predictor, table, s, method, rng)
        bit = 1 if split.minus_wins else 0
        table = table.with_bit(s + 1, bit)
        report.append({"checkpoint": s, "level": s, "bit": bit,
                       "split": split})
    return table, report


# -- freezing an attack to disk


def save_labels(table, path, predictor_name: str, method: str):
    """Text format: a header naming the target, one line per chosen label."""
    lines = [f"# predictor: {predictor_name}", f"# method: {method}"]
    if isinstance(table, OddLabelTable):
        for k in sorted(table.odd_bits):
            lines.append(f"odd {2 * k + 1} {table.odd_bits[k]}")
    elif isinstance(table, ShiftLabelTable):
        for s in sorted(table.shift_bits):
            if s <= 2:
                continue  # the first two bits are fixed, not chosen
            lines.append(f"L {s} {table.shift_bits[s]}")
    else:
        raise TypeError(f"cannot serialize {type(table).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_labels(path):
    """Inverse of :func:`save_labels`; returns (table, header dict)."""
    header = {}
    odd = {}
    shift = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                header[key.strip()] = value.strip()
                continue
            kind, where, bit = line.split()
            if kind == "odd":
                state = int(where)
                odd[(state - 1) // 2] = int(bit)
            elif kind == "L":
                shift[int(where)] = int(bit)
            else:
                raise ValueError(f"unrecognized line {line!r}")
    if odd and shift:
        raise ValueError("file mixes both label kinds")
    table = ShiftLabelTable(shift) if shift else OddLabelTable(odd)
    return table, header
