"""Grid partitions of [0, 1) refined by a distinguished set.

The estimators under study work over a sequence of partitions: an equal-width
grid of ``q(n)`` intervals, each cell split into its intersection with a
distinguished set and with that set's complement.  Cell diameters are at most
``1/q(n)`` and there are at most ``2*q(n)`` cells, which is what the usual
regression-consistency conditions ask of a partition sequence.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import CoverageError
from .intervals import IntervalSet, _cmp
from .surd import QuadraticReal


class PartitionSchedule:
    """The cell-count sequence ``n -> q(n)`` with width ``h(n) = 1/q(n)``.

    Construction checks the shrinking-cells / growing-resolution trend on the
    supplied index list: `h` may never increase, ``n*h(n)`` must grow from
    the first index to the last, and over a window spanning at least a
    factor of four the width must actually decrease (shorter windows cannot
    witness the trend).  Pass ``require_regular=False`` to build a
    deliberately irregular family, e.g. to demonstrate a failing condition.
    """

    def __init__(self, q, ns=None, require_regular=True):
        if callable(q):
            self._q = q
        else:
            table = {int(k): int(v) for k, v in dict(q).items()}
            self._q = table.__getitem__
        self.ns = sorted(int(n) for n in ns) if ns is not None else None
        if require_regular and self.ns and len(self.ns) > 1:
            hs = [self.h(n) for n in self.ns]
            for a, b in zip(hs, hs[1:]):
                if b > a:
                    raise ValueError("cell width must not increase with n")
            if self.ns[-1] >= 4 * self.ns[0] and not hs[-1] < hs[0]:
                raise ValueError("cell width must decrease over the range")
            if not self.ns[-1] * hs[-1] > self.ns[0] * hs[0]:
                raise ValueError("n * h(n) must grow over the range")

    def q(self, n: int) -> int:
        value = int(self._q(n))
        if value < 1:
            raise ValueError(f"q({n}) = {value} must be positive")
        return value

    def h(self, n: int) -> Fraction:
        return Fraction(1, self.q(n))

    @classmethod
    def sqrt(cls, scale: int = 1, ns=None, require_regular=True):
        """q(n) = max(2, floor(sqrt(scale * n))), exact integer square root."""
        return cls(lambda n: max(2, math.isqrt(scale * n)), ns, require_regular)

    @classmethod
    def constant(cls, q: int, ns=None):
        return cls(lambda n: q, ns, require_regular=False)


class Partition:
    """Labelled cells partitioning [0, 1); cells may be empty."""

    def __init__(self, cells, n=None, locator=None):
        self.cells = list(cells)
        self.n = n
        self._locator = locator

    def locate(self, x):
        """Label of the cell containing `x`; CoverageError if none."""
        if self._locator is not None:
            return self._locator(x)
        for label, cell in self.cells:
            if cell.contains(x):
                return label
        raise CoverageError(f"{x!r} is not covered by the partition")

    def cell(self, label) -> IntervalSet:
        for lab, cell in self.cells:
            if lab == label:
                return cell
        raise KeyError(label)

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def max_diameter(self):
        """Largest cell diameter (sup - inf of nonempty cells)."""
        best = 0
        for _, cell in self.cells:
            d = cell.diameter()
            if _cmp_scalar(d, best) > 0:
                best = d
        return best


def _cmp_scalar(a, b):
    if isinstance(a, QuadraticReal) or isinstance(b, QuadraticReal):
        if not isinstance(a, QuadraticReal):
            a = QuadraticReal.rational(Fraction(a), b.d)
        return a.compare(b)
    return (a > b) - (a < b)


def split_grid_partition(n: int, schedule: PartitionSchedule,
                         split_set: IntervalSet) -> Partition:
    """Equal grid of q(n) intervals, each cell cut by `split_set`.

    Cell labels are ``(j, True)`` for grid cell ``j`` inside the set and
    ``(j, False)`` outside; ``j`` runs from 1 to q(n).  The locator decides
    membership with two exact comparisons per grid probe.
    """
    q = schedule.q(n)
    quadratic = split_set.domain and split_set.domain[0] == "quadratic"
    if quadratic:
        d = split_set.domain[1]
        bounds = [QuadraticReal.rational(Fraction(j, q), d) for j in range(q + 1)]
    else:
        bounds = [Fraction(j, q) for j in range(q + 1)]
    cells = []
    for j in range(1, q + 1):
        grid_cell = IntervalSet([(bounds[j - 1], bounds[j])],
                                domain=split_set.domain)
        inside = grid_cell.intersection(split_set)
        outside = grid_cell.difference(split_set)
        cells.append(((j, True), inside))
        cells.append(((j, False), outside))

    def locator(x):
        lo, hi = 1, q
        while lo < hi:
            mid = (lo + hi) // 2
            if _cmp(x, bounds[mid]) < 0:
                hi = mid
            else:
                lo = mid + 1
        if _cmp(x, bounds[lo - 1]) < 0 or _cmp(x, bounds[lo]) >= 0:
            raise CoverageError(f"{x!r} outside [0, 1)")
        return (lo, split_set.contains(x))

    return Partition(cells, n=n, locator=locator)


def regularity_report(schedule: PartitionSchedule, partitions, windows=None):
    """Trend check for a partition family over its index list.

    For each ``n`` and window ``S`` reports the largest diameter among cells
    meeting ``S`` and the cell count meeting ``S`` divided by ``n``.  Verdicts
    state whether, on the tested range, diameters shrink and the relative
    cell count decays; a finite list can only ever be consistent with the
    limit conditions, never prove them.
    """
    if windows is None:
        windows = [IntervalSet.unit()]
    rows = []
    for n, part in partitions:
        for w_idx, window in enumerate(windows):
            diam = 0
            count = 0
            for _, cell in part:
                if cell.is_empty():
                    continue
                if not cell.intersection(window).is_empty():
                    count += 1
                    d = cell.diameter()
                    if _cmp_scalar(d, diam) > 0:
                        diam = d
            rows.append({
                "n": n,
                "window": w_idx,
                "max_diameter": diam,
                "cells_over_n": Fraction(count, n),
            })
    verdicts = {}
    for w_idx in range(len(windows)):
        series = [r for r in rows if r["window"] == w_idx]
        diams = [r["max_diameter"] for r in series]
        ratios = [r["cells_over_n"] for r in series]
        shrink = all(_cmp_scalar(b, a) <= 0 for a, b in zip(diams, diams[1:])) \
            and len(diams) > 1 and _cmp_scalar(diams[-1], diams[0]) < 0
        decay = len(ratios) > 1 and ratios[-1] < ratios[0]
        verdicts[w_idx] = {
            "diameters_shrink": bool(shrink),
            "cell_ratio_decays": bool(decay),
        }
    return {"rows": rows, "verdicts": verdicts}
