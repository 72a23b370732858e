"""Exact dyadic rationals and lazily materialized binary-expansion points.

Two value types form the exact substrate of the unit interval:

* :class:`DyadicRational` -- numbers ``k / 2**e`` kept in canonical form
  (odd-or-zero numerator), with all arithmetic exact.
* :class:`BinaryPoint` -- a point of ``[0, 1)`` described by its binary
  expansion: a finite, possibly modified prefix backed by an infinite bit
  source (a seeded generator or a repeating pattern).  Bits are materialized
  on demand and never change once returned, so every query is idempotent and
  deterministic given the seed.

Points with two expansions are always represented by the one with finitely
many trailing ones (i.e. the terminating expansion of a dyadic rational).
"""

from __future__ import annotations

import random
import threading
from fractions import Fraction

from .errors import CapExceeded, ExceptionalPoint


class DyadicRational:
    """Exact value ``numerator / 2**exponent`` in canonical form.

    Canonical means the numerator is odd or zero and the exponent is the
    smallest possible.  The exponent is bounded by the class-level
    :attr:`exponent_cap` so runaway precision shows up as a loud
    :class:`CapExceeded` instead of silent memory growth.
    """

    __slots__ = ("_num", "_exp")

    exponent_cap = 128

    def __init__(self, numerator: int, exponent: int = 0):
        numerator = int(numerator)
        exponent = int(exponent)
        if exponent < 0:
            numerator <<= -exponent
            exponent = 0
        if numerator == 0:
            exponent = 0
        else:
            while numerator % 2 == 0 and exponent > 0:
                numerator //= 2
                exponent -= 1
        if exponent > self.exponent_cap:
            raise CapExceeded(
                f"dyadic exponent {exponent} exceeds cap {self.exponent_cap}"
            )
        self._num = numerator
        self._exp = exponent

    @property
    def numerator(self) -> int:
        return self._num

    @property
    def exponent(self) -> int:
        return self._exp

    @classmethod
    def from_fraction(cls, value) -> "DyadicRational":
        frac = Fraction(value)
        den = frac.denominator
        exp = den.bit_length() - 1
        if den != 1 << exp:
            raise ValueError(f"{value} is not a dyadic rational")
        return cls(frac.numerator, exp)

    def as_fraction(self) -> Fraction:
        return Fraction(self._num, 1 << self._exp)

    def bits(self, width: int) -> tuple:
        """First `width` expansion bits; only valid for values in [0, 1)."""
        if not (0 <= self._num and self.as_fraction() < 1):
            raise ValueError("bits() requires a value in [0, 1)")
        if width < self._exp:
            raise ValueError("width shorter than the exact expansion")
        scaled = self._num << (width - self._exp)
        return tuple((scaled >> (width - i)) & 1 for i in range(1, width + 1))

    # -- arithmetic (exact; Fraction operands degrade gracefully to Fraction)

    def _coerce(self, other):
        if isinstance(other, DyadicRational):
            return other
        if isinstance(other, int):
            return DyadicRational(other, 0)
        return None

    def __add__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            if isinstance(other, Fraction):
                return self.as_fraction() + other
            return NotImplemented
        e = max(self._exp, rhs._exp)
        num = (self._num << (e - self._exp)) + (rhs._num << (e - rhs._exp))
        return DyadicRational(num, e)

    __radd__ = __add__

    def __sub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            if isinstance(other, Fraction):
                return self.as_fraction() - other
            return NotImplemented
        e = max(self._exp, rhs._exp)
        num = (self._num << (e - self._exp)) - (rhs._num << (e - rhs._exp))
        return DyadicRational(num, e)

    def __rsub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            if isinstance(other, Fraction):
                return other - self.as_fraction()
            return NotImplemented
        return rhs - self

    def __mul__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            if isinstance(other, Fraction):
                return self.as_fraction() * other
            return NotImplemented
        return DyadicRational(self._num * rhs._num, self._exp + rhs._exp)

    __rmul__ = __mul__

    def __neg__(self):
        return DyadicRational(-self._num, self._exp)

    def shift(self, k: int) -> "DyadicRational":
        """Exact value times ``2**-k``."""
        return DyadicRational(self._num, self._exp + k)

    # -- total order, exact across DyadicRational / int / Fraction

    def _cmp(self, other) -> int:
        if isinstance(other, DyadicRational):
            lhs = self._num << max(0, other._exp - self._exp)
            rhs = other._num << max(0, self._exp - other._exp)
        elif isinstance(other, int):
            lhs, rhs = self._num, other << self._exp
        elif isinstance(other, Fraction):
            lhs = self._num * other.denominator
            rhs = other.numerator << self._exp
        else:
            return NotImplemented
        return (lhs > rhs) - (lhs < rhs)

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __hash__(self):
        return hash(self.as_fraction())

    def __float__(self):
        return self._num / (1 << self._exp)

    def __repr__(self):
        if self._exp == 0:
            return f"DyadicRational({self._num})"
        return f"DyadicRational({self._num}, {self._exp})"

    def __str__(self):
        return f"{self._num}/2^{self._exp}" if self._exp else str(self._num)


ZERO = DyadicRational(0)
ONE = DyadicRational(1)


class _SeededSource:
    """Append-only stream of fair coin bits driven by a fixed seed.

    Bit ``i`` depends only on the seed and ``i``.  Extension is guarded by a
    lock so concurrent readers always observe identical bits.
    """

    __slots__ = ("_rng", "_bits", "_lock")

    def __init__(self, seed):
        self._rng = random.Random(seed)
        self._bits = []
        self._lock = threading.Lock()

    def bit(self, i: int) -> int:
        if i > len(self._bits):
            with self._lock:
                while len(self._bits) < i:
                    self._bits.append(self._rng.getrandbits(1))
        return self._bits[i - 1]

    def provably_constant_from(self, i: int, value: int) -> bool:
        return False


class _PeriodicSource:
    """Bit source repeating `pattern` from absolute position `start`."""

    __slots__ = ("pattern", "start")

    def __init__(self, pattern, start: int):
        pattern = tuple(int(b) & 1 for b in pattern)
        if not pattern:
            raise ValueError("pattern must be nonempty")
        self.pattern = pattern
        self.start = start

    def bit(self, i: int) -> int:
        if i < self.start:
            raise IndexError("position below the periodic region")
        return self.pattern[(i - self.start) % len(self.pattern)]

    def provably_constant_from(self, i: int, value: int) -> bool:
        # A full period of constant bits proves the tail is constant.
        return all(b == value for b in self.pattern)


class BinaryPoint:
    """A point of [0, 1) given by a lazy binary expansion.

    The first ``prefix_len`` bits live in an integer overlay (most significant
    bit is expansion bit 1); everything deeper is read from the shared bit
    source at its absolute position.  Transformations that rewrite leading
    bits produce a new point sharing the same source, so materialized bits
    are never regenerated.
    """

    __slots__ = ("_ov", "_ovlen", "_src", "cap")

    default_cap = 128

    def __init__(self, overlay: int, overlay_len: int, source, cap: int | None = None):
        self._ov = overlay
        self._ovlen = overlay_len
        self._src = source
        self.cap = self.default_cap if cap is None else cap

    # -- constructors

    @classmethod
    def seeded(cls, seed, prefix=(), cap: int | None = None) -> "BinaryPoint":
        ov = 0
        for b in prefix:
            ov = (ov << 1) | (int(b) & 1)
        return cls(ov, len(tuple(prefix)), _SeededSource(seed), cap)

    @classmethod
    def periodic(cls, prefix, pattern, cap: int | None = None) -> "BinaryPoint":
        prefix = tuple(int(b) & 1 for b in prefix)
        ov = 0
        for b in prefix:
            ov = (ov << 1) | b
        return cls(ov, len(prefix), _PeriodicSource(pattern, len(prefix) + 1), cap)

    @classmethod
    def from_dyadic(cls, value, cap: int | None = None) -> "BinaryPoint":
        """Terminating expansion of a dyadic rational in [0, 1)."""
        if not isinstance(value, DyadicRational):
            value = DyadicRational.from_fraction(value)
        if value < 0 or value >= 1:
            raise ValueError("binary points live in [0, 1)")
        return cls(value.numerator, value.exponent,
                   _PeriodicSource((0,), value.exponent + 1), cap)

    # -- bit access

    def bit(self, i: int) -> int:
        """Expansion bit ``r_i`` (1-indexed)."""
        if i < 1:
            raise IndexError("bit positions start at 1")
        if i > self.cap:
            raise CapExceeded(f"bit {i} beyond cap {self.cap}")
        if i <= self._ovlen:
            return (self._ov >> (self._ovlen - i)) & 1
        return self._src.bit(i)

    def prefix_int(self, width: int) -> int:
        """First `width` bits packed into an int (bit 1 is the MSB)."""
        if width <= self._ovlen:
            return self._ov >> (self._ovlen - width)
        v = self._ov
        for i in range(self._ovlen + 1, width + 1):
            if i > self.cap:
                raise CapExceeded(f"bit {i} beyond cap {self.cap}")
            v = (v << 1) | self._src.bit(i)
        return v

    def truncated(self, width: int) -> DyadicRational:
        """Exact value of the first `width` bits."""
        return DyadicRational(self.prefix_int(width), width)

    @property
    def materialized_len(self) -> int:
        return self._ovlen

    def _with_overlay(self, overlay: int, overlay_len: int) -> "BinaryPoint":
        return BinaryPoint(overlay, overlay_len, self._src, self.cap)

    # -- structural scans

    def _provably_constant_from(self, i: int, value: int) -> bool:
        if i <= self._ovlen:
            for j in range(i, self._ovlen + 1):
                if self.bit(j) != value:
                    return False
            i = self._ovlen + 1
        return self._src.provably_constant_from(i, value)

    def first_index_of(self, value: int, start: int = 1) -> int:
        """Smallest ``i >= start`` with ``r_i == value``.

        Raises :class:`ExceptionalPoint` when the tail provably never takes
        `value` again, :class:`CapExceeded` when the scan passes the cap.
        """
        i = start
        while True:
            if i > self._ovlen and self._src.provably_constant_from(i, 1 - value):
                raise ExceptionalPoint(
                    f"expansion is provably constant {1 - value} from bit {i}")
            if i > self.cap:
                raise CapExceeded(
                    f"no bit equal to {value} within cap {self.cap}")
            if self.bit(i) == value:
                return i
            i += 1

    # -- exact comparison against rationals

    def compare(self, other) -> int:
        """Exact three-way comparison against a rational in [0, 1].

        Walks the expansion of `other` bit by bit until the expansions
        diverge.  Raises :class:`CapExceeded` if the point tracks the
        rational past the cap without a decision.
        """
        if isinstance(other, DyadicRational):
            other = other.as_fraction()
        elif isinstance(other, int):
            other = Fraction(other)
        num, den = other.numerator, other.denominator
        if num <= 0:
            # the point is >= 0; it equals 0 only with a provably zero tail
            if num < 0:
                return 1
            if self._provably_constant_from(1, 0):
                return 0
            self.first_index_of(1)  # CapExceeded if undecidable
            return 1
        if num >= den:
            return -1
        i = 1
        while True:
            if i > self.cap:
                raise CapExceeded(f"comparison undecided within cap {self.cap}")
            num *= 2
            qbit = 1 if num >= den else 0
            if qbit:
                num -= den
            pbit = self.bit(i)
            if pbit != qbit:
                return 1 if pbit > qbit else -1
            if num == 0:
                # rational expansion terminated; point >= other from here on
                if self._provably_constant_from(i + 1, 0):
                    return 0
                j = i + 1
                while True:
                    if j > self.cap:
                        raise CapExceeded(
                            f"comparison undecided within cap {self.cap}")
                    if self.bit(j) == 1:
                        return 1
                    j += 1
            i += 1

    def __float__(self):
        return float(self.truncated(min(self.cap, 56)))

    def __repr__(self):
        shown = min(self._ovlen, 24)
        bits = "".join(str(self.bit(i)) for i in range(1, shown + 1))
        return f"BinaryPoint(0.{bits}..., cap={self.cap})"
