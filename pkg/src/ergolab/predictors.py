"""The estimators: count forecasters, the partitioning estimate, linear AR.

Count forecasters average the successors of every past occurrence of the
current context (the 0/0 = 0 convention applies to unseen contexts).  The
partitioning estimate averages responses whose predictor fell in the same
partition cell as the query; with exact inputs the cell sums stay exact, so
"the estimate is zero because the cell is empty" is a statement, not a
tolerance.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .dyadic import BinaryPoint
from .errors import SingularFit
from .partitions import Partition


# -- count forecasters over a finite alphabet


def static_count(data, context_len: int, context=None):
    """Backward-scanning count estimate of the next value after `context`.

    `data` is the past segment ``X_{-n} .. X_{-1}``; the context defaults to
    the trailing `context_len` values.  Scans every earlier placement of the
    context and averages the values that followed it.
    """
    data = list(data)
    n = len(data)
    if not 1 <= context_len < n:
        raise ValueError("need 1 <= context_len < len(data)")
    if context is None:
        context = tuple(data[n - context_len:])
    else:
        context = tuple(context)
    num = 0
    den = 0
    if context_len == 1:
        c0 = context[0]
        for j in range(1, n):
            if data[n - j - 1] == c0:
                num += data[n - j]
                den += 1
        return _ratio(num, den)
    for j in range(1, n - context_len + 1):
        if tuple(data[n - j - context_len:n - j]) == context:
            num += data[n - j]
            den += 1
    return _ratio(num, den)


def dynamic_count(data, context_len: int, context=None):
    """Forward-scanning count estimate from ``X_0 .. X_{n-1}``."""
    data = list(data)
    n = len(data)
    if not 1 <= context_len < n:
        raise ValueError("need 1 <= context_len < len(data)")
    if context is None:
        context = tuple(data[n - context_len:])
    else:
        context = tuple(context)
    num = 0
    den = 0
    if context_len == 1:
        c0 = context[0]
        for j in range(1, n):
            if data[j - 1] == c0:
                num += data[j]
                den += 1
        return _ratio(num, den)
    for j in range(context_len, n):
        if tuple(data[j - context_len:j]) == context:
            num += data[j]
            den += 1
    return _ratio(num, den)


def _ratio(num, den):
    if den == 0:
        return 0
    if isinstance(num, float):
        return num / den
    return Fraction(num, den) if isinstance(num, int) else num / den


class CountPredictor:
    """Callable wrapper around a count forecaster, for use as an attack target.

    Deterministic by construction; results are cached by observation string.
    `predict_batch` evaluates many observations at once (vectorized for
    context length 1), which the exact attack machinery exploits.
    """

    def __init__(self, context_len: int = 1, mode: str = "dynamic"):
        if mode not in ("dynamic", "static"):
            raise ValueError("mode is 'dynamic' or 'static'")
        self.context_len = context_len
        self.mode = mode
        self.name = f"{mode}-count:{context_len}"
        self._cache = {}

    def __call__(self, obs) -> float:
        key = tuple(obs)
        hit = self._cache.get(key)
        if hit is None:
            if len(key) <= self.context_len:
                hit = 0.0
            else:
                fn = dynamic_count if self.mode == "dynamic" else static_count
                hit = float(fn(key, self.context_len))
            self._cache[key] = hit
        return hit

    def predict_batch(self, observations) -> np.ndarray:
        observations = list(observations)
        if self.mode != "dynamic" or self.context_len != 1:
            return np.array([self(obs) for obs in observations], dtype=float)
        if not observations:
            return np.zeros(0)
        codes = {}
        rows = len(observations)
        width = max(len(o) for o in observations)
        mat = np.full((rows, width), -1, dtype=np.int32)
        lengths = np.empty(rows, dtype=np.int64)
        for r, obs in enumerate(observations):
            lengths[r] = len(obs)
            for c, v in enumerate(obs):
                code = codes.get(v)
                if code is None:
                    code = len(codes)
                    codes[v] = code
                mat[r, c] = code
        values = np.zeros(len(codes))
        for v, code in codes.items():
            values[code] = float(v)
        prev = mat[:, :-1]
        nxt = mat[:, 1:]
        valid = nxt >= 0
        ctx = mat[np.arange(rows), lengths - 1]
        match = (prev == ctx[:, None]) & valid
        den = match.sum(axis=1)
        num = np.where(match, values[np.clip(nxt, 0, None)], 0.0).sum(axis=1)
        out = np.where(den > 0, num / np.maximum(den, 1), 0.0)
        short = lengths <= self.context_len
        if short.any():
            out = np.where(short, 0.0, out)
        return out


class ConstantPredictor:
    """Predicts the same value regardless of the observation."""

    def __init__(self, value: float):
        self.value = float(value)
        self.name = f"constant:{value}"

    def __call__(self, obs) -> float:
        return self.value

    def predict_batch(self, observations) -> np.ndarray:
        return np.full(len(list(observations)), self.value)


def evaluate_many(predictor, observations):
    """Evaluate a predictor on many observation strings, batched when the
    predictor supports it."""
    batch = getattr(predictor, "predict_batch", None)
    if batch is not None:
        return batch(observations)
    return [predictor(obs) for obs in observations]


def make_predictor(name: str):
    """Predictor registry: 'dynamic-count[:N]', 'static-count[:N]',
    'constant:<value>'."""
    head, _, arg = name.partition(":")
    if head == "dynamic-count":
        return CountPredictor(int(arg) if arg else 1, "dynamic")
    if head == "static-count":
        return CountPredictor(int(arg) if arg else 1, "static")
    if head == "constant":
        return ConstantPredictor(float(arg) if arg else 0.0)
    raise KeyError(f"unknown predictor {name!r}")


# -- the partitioning estimate


class CellCounts:
    """Per-cell response totals and hit counts over a partition.

    Sums stay exact for exact responses (int / Fraction / field elements);
    lazy binary points are reduced to exact dyadic values first.
    """

    def __init__(self, partition: Partition, response_bits: int = 64):
        self.partition = partition
        self.response_bits = response_bits
        self.totals = {}
        self.counts = {}

    @classmethod
    def from_pairs(cls, pairs, partition: Partition, response_bits: int = 64):
        cc = cls(partition, response_bits)
        for z, y in pairs:
            cc.add(z, y)
        return cc

    def add(self, z, y):
        label = self.partition.locate(z)
        if isinstance(y, BinaryPoint):
            y = y.truncated(self.response_bits).as_fraction()
        self.counts[label] = self.counts.get(label, 0) + 1
        prev = self.totals.get(label)
        self.totals[label] = y if prev is None else prev + y

    def estimate(self, label):
        """Cell average; exactly 0 on empty cells."""
        count = self.counts.get(label, 0)
        if count == 0:
            return 0
        return self.totals[label] / count

    def estimate_at(self, z):
        return self.estimate(self.partition.locate(z))

    def pieces(self):
        """(cell set, constant) pairs -- the estimate as a function."""
        return [(cell, self.estimate(label)) for label, cell in self.partition]


def partitioning_estimate(pairs, partition: Partition, z):
    """Average response among pairs whose predictor shares z's cell."""
    return CellCounts.from_pairs(pairs, partition).estimate_at(z)


def autoregression_pairs(series):
    """(predictor, response) pairs ``(X_{i-1}, X_i)`` from a past segment."""
    series = list(series)
    return [(series[i - 1], series[i]) for i in range(1, len(series))]


def partitioning_autoregression(series, partition: Partition, x,
                                response_bits: int = 64):
    """One-step forecaster: the partitioning estimate on lagged pairs.

    `series` is ``X_{-n} .. X_{-1}``; querying at ``x = X_{-1}`` gives the
    static forecast of the next value.  Only responses landing in the query
    cell are accumulated, so an empty cell yields an exact integer zero.
    """
    series = list(series)
    if len(series) < 2:
        raise ValueError("need at least two observations")
    label = partition.locate(x)
    num = 0
    den = 0
    for z, y in autoregression_pairs(series):
        if partition.locate(z) == label:
            if isinstance(y, BinaryPoint):
                y = y.truncated(response_bits).as_fraction()
            num = y + num
            den += 1
    return _ratio(num, den)


# -- linear autoregression (least squares through the origin)


class LinearARModel:
    """Fitted convolution coefficients, oldest lag last."""

    def __init__(self, coefficients: np.ndarray):
        self.coefficients = np.asarray(coefficients, dtype=float)

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def predict(self, recent) -> float:
        """One-step prediction from the most recent `order` values
        (given oldest first)."""
        recent = np.asarray(recent, dtype=float)
        if len(recent) < self.order:
            raise ValueError("not enough history")
        lags = recent[::-1][:self.order]  # most recent first
        return float(self.coefficients @ lags)


def fit_linear_ar(series, order: int):
    """Least-squares fit of a no-intercept linear predictor; returns
    ``(model, one_step_prediction)``.

    Raises :class:`SingularFit` when the lagged design is rank deficient at
    relative tolerance 1e-10.
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n <= 2 * order:
        raise ValueError("series too short for the requested order")
    design = np.column_stack([x[order - 1 - i:n - 1 - i] for i in range(order)])
    target = x[order:]
    rank = np.linalg.matrix_rank(design, tol=1e-10 * np.abs(design).max())
    if rank < order:
        raise SingularFit(f"design rank {rank} < order {order}")
    coeffs, *_ = np.linalg.lstsq(design, target, rcond=None)
    model = LinearARModel(coeffs)
    return model, model.predict(x[-order:])
