"""Exact positional expansions of rationals.

Five systems are supported: s-adic, nega-s-adic, positive Cantor series,
alternating Cantor series and the nega-Q̃ expansion. Every one of them
is written as a chain of per-position affine maps

    x = a_1(d_1) + b_1(d_1) * (a_2(d_2) + b_2(d_2) * (...))

so a single resummation routine serves all of them, and eventually
periodic digit strings are summed exactly by solving ``T = c + r*T`` for
the value of one tail period.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Iterable, Sequence

from .errors import DomainError, NonPeriodicError, ValidationError

Rational = Fraction

AffineFn = Callable[[int, int], "tuple[Fraction, Fraction]"]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``p/q`` (or a bare integer) into a reduced Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValidationError(f"cannot parse {text!r} as a rational")
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValidationError(f"malformed rational {text!r}, expected p/q")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValidationError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _periodic_index(n: int, start: int, length: int) -> int:
    """0-based storage index of 1-based position n in a prefix+period layout."""
    if n < 1:
        raise ValidationError(f"positions are 1-based, got {n}")
    if n <= start:
        return n - 1
    return start + (n - start - 1) % length


def _minimal_period(word: Sequence[int]) -> int:
    n = len(word)
    for u in range(1, n + 1):
        if n % u == 0 and all(word[i] == word[i % u] for i in range(n)):
            return u
    return n


@dataclass(frozen=True)
class CantorBase:
    """Eventually periodic sequence of bases d_n >= 2.

    A constant base s is ``CantorBase((), (s,))``.
    """

    prefix: tuple[int, ...] = ()
    period: tuple[int, ...] = (2,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(int(d) for d in self.prefix))
        object.__setattr__(self, "period", tuple(int(d) for d in self.period))
        if not self.period:
            raise ValidationError("Cantor base period must be nonempty")
        bad = [d for d in self.prefix + self.period if d < 2]
        if bad:
            raise ValidationError(f"Cantor base entries must be >= 2, got {bad}")

    @classmethod
    def constant(cls, s: int) -> CantorBase:
        return cls((), (s,))

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> CantorBase:
        try:
            return cls(tuple(obj.get("prefix", ())), tuple(obj["period"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed Cantor base config: {exc}") from exc

    def to_json(self) -> dict[str, Any]:
        return {"prefix": list(self.prefix), "period": list(self.period)}

    def __getitem__(self, n: int) -> int:
        return (self.prefix + self.period)[_periodic_index(n, len(self.prefix), len(self.period))]

    @property
    def start(self) -> int:
        return len(self.prefix)

    @property
    def length(self) -> int:
        return len(self.period)


@dataclass(frozen=True)
class ColumnMatrix:
    """Eventually periodic sequence of weight columns.

    ``columns[:period_start]`` are used once, the remaining columns repeat.
    Column n (1-based) holds the weights for digits 0..len-1 at position n.
    """

    columns: tuple[tuple[Fraction, ...], ...]
    period_start: int = 0

    key = "q"

    def __post_init__(self) -> None:
        cols = tuple(tuple(parse_rational(w) for w in col) for col in self.columns)
        object.__setattr__(self, "columns", cols)
        if not 0 <= self.period_start < len(cols):
            raise ValidationError(
                f"period_start={self.period_start} leaves no periodic columns (have {len(cols)})"
            )
        for n, col in enumerate(cols, 1):
            self._check_column(n, col)

    def _check_column(self, n: int, col: tuple[Fraction, ...]) -> None:
        if len(col) < 2:
            raise ValidationError(f"column {n} needs at least two weights")
        if sum(col) != 1:
            raise ValidationError(f"column {n} weights sum to {sum(col)}, not 1")

    @classmethod
    def from_json(cls, obj: dict[str, Any]):
        try:
            cols = []
            for c in obj["columns"]:
                weights = c.get(cls.key, c.get("p", c.get("q")))
                if weights is None:
                    raise KeyError(cls.key)
                if "m" in c and int(c["m"]) != len(weights) - 1:
                    raise ValidationError(f"column declares m={c['m']} but has {len(weights)} weights")
                cols.append(tuple(parse_rational(w) for w in weights))
            return cls(tuple(cols), int(obj.get("period_start", 0)))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValidationError(f"malformed matrix config: missing or bad {exc}") from exc

    def to_json(self) -> dict[str, Any]:
        return {
            "columns": [
                {"m": len(c) - 1, self.key: [format_rational(w) for w in c]} for c in self.columns
            ],
            "period_start": self.period_start,
        }

    @classmethod
    def uniform(cls, size: int):
        return cls(((Fraction(1, size),) * size,), 0)

    def column(self, n: int) -> tuple[Fraction, ...]:
        return self.columns[_periodic_index(n, self.start, self.length)]

    def m(self, n: int) -> int:
        """Largest digit at position n."""
        return len(self.column(n)) - 1

    @property
    def start(self) -> int:
        return self.period_start

    @property
    def length(self) -> int:
        return len(self.columns) - self.period_start


class QMatrix(ColumnMatrix):
    """Strictly positive stochastic columns q_{i,n} defining a nega-Q̃ expansion."""

    key = "q"

    def _check_column(self, n: int, col: tuple[Fraction, ...]) -> None:
        super()._check_column(n, col)
        if any(q <= 0 for q in col):
            raise ValidationError(f"column {n}: every q_(i,n) must be positive")


class Kind(enum.Enum):
    SADIC = "s-adic"
    NEGA_SADIC = "nega-s-adic"
    CANTOR = "cantor"
    ALT_CANTOR = "alternating-cantor"
    NEGA_Q = "nega-q"


@dataclass(frozen=True)
class NumberSystem:
    kind: Kind
    radix: int | None = None
    base: CantorBase | None = None
    matrix: QMatrix | None = None

    def __post_init__(self) -> None:
        if self.kind in (Kind.SADIC, Kind.NEGA_SADIC):
            if self.radix is None or self.radix < 2:
                raise ValidationError(f"radix must be an integer >= 2, got {self.radix}")
        elif self.kind in (Kind.CANTOR, Kind.ALT_CANTOR):
            if not isinstance(self.base, CantorBase):
                raise ValidationError("Cantor systems need a CantorBase")
        elif not isinstance(self.matrix, QMatrix):
            raise ValidationError("nega-Q systems need a QMatrix")

    @classmethod
    def sadic(cls, s: int) -> NumberSystem:
        return cls(Kind.SADIC, radix=s)

    @classmethod
    def nega_sadic(cls, s: int) -> NumberSystem:
        return cls(Kind.NEGA_SADIC, radix=s)

    @classmethod
    def cantor(cls, base: CantorBase) -> NumberSystem:
        return cls(Kind.CANTOR, base=base)

    @classmethod
    def alternating_cantor(cls, base: CantorBase) -> NumberSystem:
        return cls(Kind.ALT_CANTOR, base=base)

    @classmethod
    def nega_q(cls, matrix: QMatrix) -> NumberSystem:
        return cls(Kind.NEGA_Q, matrix=matrix)

    @property
    def label(self) -> str:
        return {
            Kind.SADIC: str(self.radix),
            Kind.NEGA_SADIC: f"-{self.radix}",
            Kind.CANTOR: "D",
            Kind.ALT_CANTOR: "-D",
            Kind.NEGA_Q: "-Q",
        }[self.kind]

    # -- digit alphabets -------------------------------------------------

    def size(self, n: int) -> int:
        """Number of admissible digits at position n."""
        if self.radix is not None:
            return self.radix
        if self.base is not None:
            return self.base[n]
        return self.matrix.m(n) + 1

    @property
    def digit_start(self) -> int:
        if self.base is not None:
            return self.base.start
        if self.matrix is not None:
            return self.matrix.start
        return 0

    @property
    def digit_period(self) -> int:
        if self.base is not None:
            return self.base.length
        if self.matrix is not None:
            return self.matrix.length
        return 1

    # -- affine structure --------------------------------------------------

    @property
    def map_start(self) -> int:
        return self.digit_start

    @property
    def map_period(self) -> int:
        # nega-Q digits are read in reversed order at even positions
        if self.kind is Kind.NEGA_Q:
            return math.lcm(self.digit_period, 2)
        return self.digit_period

    def phase(self, n: int) -> int:
        start, length = self.map_start, self.map_period
        return n if n <= start else start + (n - start - 1) % length + 1

    @cached_property
    def _affine_cache(self) -> dict[tuple[int, int], tuple[Fraction, Fraction]]:
        return {}

    def affine(self, n: int, digit: int) -> tuple[Fraction, Fraction]:
        """(a, b) with value_n = a + b * value_(n+1) when digit n is ``digit``."""
        key = (self.phase(n), digit)
        hit = self._affine_cache.get(key)
        if hit is not None:
            return hit
        if not 0 <= digit < self.size(n):
            raise ValidationError(f"digit {digit} outside alphabet at position {n} of {self.label}")
        k = self.kind
        if k is Kind.SADIC:
            out = (Fraction(digit, self.radix), Fraction(1, self.radix))
        elif k is Kind.NEGA_SADIC:
            out = (Fraction(-digit, self.radix), Fraction(-1, self.radix))
        elif k is Kind.CANTOR:
            out = (Fraction(digit, self.base[n]), Fraction(1, self.base[n]))
        elif k is Kind.ALT_CANTOR:
            out = (Fraction(1 + digit, self.base[n]), Fraction(-1, self.base[n]))
        else:
            col = self.matrix.column(n)
            r = digit if n % 2 else len(col) - 1 - digit
            out = (sum(col[:r], Fraction(0)), col[r])
        self._affine_cache[key] = out
        return out

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        """Range of values taken by a full expansion (and by every tail)."""
        if self.kind is Kind.NEGA_SADIC:
            s = self.radix
            return Fraction(-s, s + 1), Fraction(1, s + 1)
        return Fraction(0), Fraction(1)

    def forbidden_value(self, k: int) -> Fraction:
        """Tail value at position k that canonical strings avoid (when a twin exists)."""
        if self.kind is Kind.NEGA_SADIC:
            return Fraction(1, self.radix + 1)
        if self.kind in (Kind.ALT_CANTOR, Kind.NEGA_Q):
            return Fraction(k % 2)
        return Fraction(1)

    def contains(self, x: Fraction) -> bool:
        lo, hi = self.interval
        if self.kind is Kind.NEGA_Q:
            return lo <= x < hi
        return lo <= x <= hi


def resum(
    prefix: Sequence[int],
    tail: Sequence[int],
    affine: AffineFn,
    start: int = 0,
    length: int = 1,
) -> Fraction:
    """Exact value of an eventually periodic affine chain.

    ``affine(n, digit)`` gives (a_n, b_n); the maps must repeat with period
    ``length`` for positions past ``start``. An empty tail means all zeros.
    """
    prefix = list(prefix)
    tail = list(tail) or [0]
    period = math.lcm(len(tail), length)
    tail = tail * (period // len(tail))
    while len(prefix) < start:
        prefix.append(tail[0])
        tail = tail[1:] + tail[:1]
    p0 = len(prefix) + 1
    c, r = Fraction(0), Fraction(1)
    for t, digit in enumerate(tail):
        a, b = affine(p0 + t, digit)
        c += r * a
        r *= b
    if r == 1:
        raise ValidationError("tail period does not contract; series diverges")
    value = c / (1 - r)
    for n in range(len(prefix), 0, -1):
        a, b = affine(n, prefix[n - 1])
        value = a + b * value
    return value


@dataclass(frozen=True, repr=False)
class DigitString:
    """Finite digit prefix followed by a periodic tail; ``tail=()`` is the zero tail.

    Stored in a normal form (shortest admissible period, shortest prefix), so
    two strings compare equal exactly when their digit sequences agree.
    """

    system: NumberSystem
    prefix: tuple[int, ...] = ()
    tail: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        prefix = tuple(int(d) for d in self.prefix)
        tail = tuple(int(d) for d in self.tail)
        sysm = self.system
        for n, d in enumerate(prefix, 1):
            if not 0 <= d < sysm.size(n):
                raise ValidationError(f"digit {d} at position {n} outside alphabet of {sysm.label}")
        if tail:
            if len(tail) % sysm.digit_period:
                raise ValidationError(
                    f"tail period {len(tail)} is not a multiple of the base period {sysm.digit_period}"
                )
            p0 = len(prefix) + 1
            stop = max(p0, sysm.digit_start + 1) + len(tail)
            for n in range(p0, stop):
                d = tail[(n - p0) % len(tail)]
                if not 0 <= d < sysm.size(n):
                    raise ValidationError(
                        f"tail digit {d} at position {n} outside alphabet of {sysm.label}"
                    )
        prefix, tail = _normal_form(sysm, prefix, tail)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "tail", tail)

    def digit(self, n: int) -> int:
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        if not self.tail:
            return 0
        return self.tail[(n - len(self.prefix) - 1) % len(self.tail)]

    def digits(self, count: int) -> tuple[int, ...]:
        return tuple(self.digit(n) for n in range(1, count + 1))

    def expanded(self, min_prefix: int = 0, multiple: int = 1) -> tuple[list[int], list[int]]:
        """Same digit sequence as (prefix, tail) lists with the tail starting after
        position max(min_prefix, digit_start) and a tail length divisible by ``multiple``."""
        prefix = list(self.prefix)
        tail = list(self.tail) or [0] * self.system.digit_period
        period = math.lcm(len(tail), multiple, self.system.digit_period)
        tail = tail * (period // len(tail))
        while len(prefix) < max(min_prefix, self.system.digit_start):
            prefix.append(tail[0])
            tail = tail[1:] + tail[:1]
        return prefix, tail

    def replace(self, n: int, digit: int) -> DigitString:
        prefix, tail = self.expanded(min_prefix=n)
        prefix[n - 1] = digit
        return DigitString(self.system, tuple(prefix), tuple(tail))

    def with_system(self, system: NumberSystem) -> DigitString:
        """Reinterpret the same digits in another system."""
        return DigitString(system, self.prefix, self.tail)

    @cached_property
    def value(self) -> Fraction:
        return from_digits(self)

    def __str__(self) -> str:
        return format_digits(self)

    def __repr__(self) -> str:
        return f"DigitString({format_digits(self)!r})"


def _normal_form(
    system: NumberSystem, prefix: tuple[int, ...], tail: tuple[int, ...]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if tail and not any(tail):
        tail = ()
    if not tail:
        while prefix and prefix[-1] == 0:
            prefix = prefix[:-1]
        return prefix, tail
    u = math.lcm(_minimal_period(tail), system.digit_period)
    tail = tail[:u]
    while len(prefix) > system.digit_start and prefix[-1] == tail[-1]:
        tail = (prefix[-1],) + tail[:-1]
        prefix = prefix[:-1]
    return prefix, tail


def from_digits(d: DigitString) -> Fraction:
    """Exact value of the series a digit string encodes."""
    sysm = d.system
    if sysm.radix is not None:
        return _radix_value(d.prefix, d.tail, sysm.radix, -1 if sysm.kind is Kind.NEGA_SADIC else 1)
    return resum(d.prefix, d.tail, sysm.affine, sysm.map_start, sysm.map_period)


def _radix_value(prefix: Sequence[int], tail: Sequence[int], s: int, sign: int) -> Fraction:
    """sum a_n (sign/s)^n in integer arithmetic: one Fraction at the end."""
    p, L = len(prefix), len(tail)
    A = 0
    for n, a in enumerate(prefix, 1):
        A = A * s + (a if sign > 0 or n % 2 == 0 else -a)
    if not L:
        return Fraction(A, s**p)
    B = 0
    for t, b in enumerate(tail, 1):
        B = B * s + (b if sign > 0 or t % 2 == 0 else -b)
    gap = s**L - sign**L
    lead = 1 if sign > 0 or p % 2 == 0 else -1
    return Fraction(A * gap + lead * B, s**p * gap)


def cylinder(prefix: Sequence[int], system: NumberSystem) -> tuple[Fraction, Fraction]:
    """Closed interval of all values whose expansion starts with ``prefix``."""
    A, B = Fraction(0), Fraction(1)
    for n, digit in enumerate(prefix, 1):
        a, b = system.affine(n, int(digit))
        A += B * a
        B *= b
    lo, hi = system.interval
    ends = (A + B * lo, A + B * hi)
    return min(ends), max(ends)


def _select(system: NumberSystem, n: int, v: Fraction, prefer_twin: bool) -> tuple[int, Fraction, bool]:
    """Pick digit n for residual v. Returns (digit, next residual, was_tie)."""
    lo, hi = system.interval
    if system.kind in (Kind.SADIC, Kind.CANTOR):
        size = system.size(n)
        t = v * size
        digit = min(math.floor(t), size - 1)
        rest = t - digit
        if rest == 0 and digit > 0:
            if prefer_twin:
                return digit - 1, Fraction(1), True
            return digit, rest, True
        return digit, rest, False
    cands = []
    for digit in range(system.size(n)):
        a, b = system.affine(n, digit)
        r = (v - a) / b
        if lo <= r <= hi:
            cands.append((digit, r))
    if not cands:
        raise DomainError(f"residual {v} not representable at position {n}")
    if len(cands) == 1:
        return cands[0][0], cands[0][1], False
    bad = system.forbidden_value(n + 1)
    good = [c for c in cands if c[1] != bad]
    worse = [c for c in cands if c[1] == bad]
    pick = (worse or good)[0] if prefer_twin else (good or worse)[0]
    return pick[0], pick[1], True


def _extract(x: Fraction, system: NumberSystem, max_depth: int, twin: bool):
    """Nested-interval extraction. Returns (digits, repeat_index or None, residual, took_twin)."""
    v = Fraction(x)
    digits: list[int] = []
    seen: dict[tuple[int, Fraction, bool], int] = {}
    took = False
    n = 1
    while True:
        key = (system.phase(n), v, took)
        if key in seen:
            return digits, seen[key], v, took
        if n > max_depth:
            return digits, None, v, took
        seen[key] = len(digits)
        digit, v, tie = _select(system, n, v, prefer_twin=twin and not took)
        if tie and twin and not took:
            took = True
        digits.append(digit)
        n += 1


def to_digits(x: Fraction, system: NumberSystem, max_depth: int = 100_000) -> DigitString:
    """Canonical digit string of a rational in ``system``."""
    x = parse_rational(x)
    if not system.contains(x):
        lo, hi = system.interval
        raise DomainError(f"{x} lies outside the interval [{lo}, {hi}] of {system.label}")
    digits, rep, _, _ = _extract(x, system, max_depth, twin=False)
    if rep is None:
        raise NonPeriodicError(f"expansion of {x} in {system.label} not periodic within {max_depth} digits")
    return canonicalize(DigitString(system, tuple(digits[:rep]), tuple(digits[rep:])))


def representations(x: Fraction, system: NumberSystem, max_depth: int = 100_000) -> list[DigitString]:
    """All digit strings of x: the canonical one first, then its twin if x has two."""
    canonical = to_digits(x, system, max_depth)
    digits, rep, _, took = _extract(parse_rational(x), system, max_depth, twin=True)
    if not took or rep is None:
        return [canonical]
    twin = DigitString(system, tuple(digits[:rep]), tuple(digits[rep:]))
    return [canonical] if twin == canonical else [canonical, twin]


@dataclass(frozen=True)
class TruncatedExpansion:
    """Finite part of an expansion that did not turn periodic.

    ``residual`` is the exact value of the unexpanded tail and ``interval`` the
    cylinder of ``digits``; x always lies in ``interval``.
    """

    system: NumberSystem
    digits: tuple[int, ...]
    residual: Fraction
    interval: tuple[Fraction, Fraction]


def nega_q_digits(x: Fraction, matrix: QMatrix, depth: int = 10_000) -> DigitString | TruncatedExpansion:
    """Nega-Q̃ digits of x in [0, 1): periodic string, or a truncated expansion."""
    system = NumberSystem.nega_q(matrix)
    x = parse_rational(x)
    if not system.contains(x):
        raise DomainError(f"nega-Q expansions need x in [0, 1), got {x}")
    digits, rep, v, _ = _extract(x, system, depth, twin=False)
    if rep is None:
        return TruncatedExpansion(system, tuple(digits), v, cylinder(digits, system))
    return canonicalize(DigitString(system, tuple(digits[:rep]), tuple(digits[rep:])))


# -- canonical forms ---------------------------------------------------------


def _with_tail_from(
    system: NumberSystem, head: list[int], k: int, digit_fn: Callable[[int], int], period: int
) -> DigitString:
    """String whose first k-1 digits are ``head`` and digit j >= k is digit_fn(j)."""
    t0 = max(k, system.digit_start + 1)
    prefix = list(head) + [digit_fn(j) for j in range(k, t0)]
    length = math.lcm(period, system.digit_period)
    tail = [digit_fn(j) for j in range(t0, t0 + length)]
    return DigitString(system, tuple(prefix), tuple(tail))


def _canonical_max_tail(d: DigitString) -> DigitString:
    """s-adic / Cantor: rewrite ...a (max)(max)... as ...(a+1) 0 0 ..."""
    sysm = d.system
    prefix, tail = d.expanded()
    p0 = len(prefix) + 1
    if any(tail[t] != sysm.size(p0 + t) - 1 for t in range(len(tail))):
        return d
    k = p0
    while k > 1 and prefix[k - 2] == sysm.size(k - 1) - 1:
        k -= 1
    if k == 1:
        return d  # the right end point has no other expansion
    head = prefix[: k - 1]
    head[-1] += 1
    return DigitString(sysm, tuple(head), ())


def _canonical_alternating(d: DigitString, lead: Callable[[int], int], other: Callable[[int], int], step: int) -> DigitString:
    """Rewrite a maximal alternating tail lead(k), other(k+1), lead(k+2), ... starting at k >= 2.

    The digit before it moves by ``step`` and the tail becomes other, lead, other, ...
    """
    sysm = d.system
    prefix, tail = d.expanded(multiple=2)
    p0 = len(prefix) + 1
    start_kind = None
    for kind in (0, 1):  # 0: lead at p0, 1: other at p0
        ok = True
        for t in range(len(tail)):
            want = lead if (t + kind) % 2 == 0 else other
            if tail[t] != want(p0 + t):
                ok = False
                break
        if ok:
            start_kind = kind
            break
    if start_kind is None:
        return d
    k, kind = p0, start_kind
    while k > 1:
        want = other if kind == 0 else lead
        if prefix[k - 2] != want(k - 1):
            break
        k -= 1
        kind ^= 1
    if kind != 0 or k == 1:
        return d
    head = prefix[: k - 1]
    head[-1] += step

    def digit_fn(j: int) -> int:
        return other(j) if (j - k) % 2 == 0 else lead(j)

    return _with_tail_from(sysm, head, k, digit_fn, 2)


def canonicalize(d: DigitString) -> DigitString:
    """Equal-valued representative that avoids the system's excluded tails."""
    sysm = d.system
    k = sysm.kind
    if k in (Kind.SADIC, Kind.CANTOR):
        return _canonical_max_tail(d)
    if k is Kind.NEGA_SADIC:
        top = sysm.radix - 1
        return _canonical_alternating(d, lambda j: 0, lambda j: top, +1)
    if k is Kind.NEGA_Q:
        return _canonical_alternating(d, sysm.matrix.m, lambda j: 0, -1)
    return cantor_dual(_canonical_max_tail(cantor_dual(d)))


# -- Cantor series dualities ---------------------------------------------------


def complement(d: DigitString, parity: str = "all") -> DigitString:
    """Replace digit e_n by (size_n - 1 - e_n) at all, odd or even positions."""
    if parity not in ("all", "odd", "even"):
        raise ValidationError(f"parity must be all/odd/even, got {parity!r}")
    sysm = d.system
    prefix, tail = d.expanded(multiple=1 if parity == "all" else 2)

    def flip(n: int, e: int) -> int:
        if parity == "all" or (n % 2 == 1) == (parity == "odd"):
            return sysm.size(n) - 1 - e
        return e

    p0 = len(prefix) + 1
    new_prefix = tuple(flip(n, e) for n, e in enumerate(prefix, 1))
    new_tail = tuple(flip(p0 + t, e) for t, e in enumerate(tail))
    return DigitString(sysm, new_prefix, new_tail)


def cantor_dual(d: DigitString) -> DigitString:
    """Positive <-> alternating Cantor string of the same value (even digits complemented)."""
    sysm = d.system
    if sysm.kind is Kind.CANTOR:
        target = NumberSystem.alternating_cantor(sysm.base)
    elif sysm.kind is Kind.ALT_CANTOR:
        target = NumberSystem.cantor(sysm.base)
    else:
        raise ValidationError(f"cantor_dual needs a Cantor-series string, got {sysm.label}")
    return complement(d, "even").with_system(target)


def dp_map(d: DigitString) -> DigitString:
    """Dimension-preserving companion of the dual: odd digits complemented, system switched."""
    sysm = d.system
    if sysm.kind is Kind.CANTOR:
        target = NumberSystem.alternating_cantor(sysm.base)
    elif sysm.kind is Kind.ALT_CANTOR:
        target = NumberSystem.cantor(sysm.base)
    else:
        raise ValidationError(f"dp_map needs a Cantor-series string, got {sysm.label}")
    return complement(d, "odd").with_system(target)


# -- text form -----------------------------------------------------------------

_DIGITS_RE = re.compile(r"^\s*Δ(?P<tag>-?\d+|D|-D|-Q):(?P<prefix>[0-9,\s]*)\((?P<tail>[0-9,\s]*)\)\s*$")


def format_digits(d: DigitString) -> str:
    prefix = ",".join(map(str, d.prefix))
    tail = ",".join(map(str, d.tail))
    return f"Δ{d.system.label}:{prefix}({tail})"


def _digit_list(text: str) -> tuple[int, ...]:
    parts = [p.strip() for p in text.split(",")]
    if parts == [""]:
        return ()
    if any(not p.isdigit() for p in parts):
        raise ValidationError(f"malformed digit list {text!r}")
    return tuple(int(p) for p in parts)


def parse_digits(text: str, system: NumberSystem | None = None) -> DigitString:
    """Parse ``Δ3:1()`` / ``Δ-3:(0,2)``; Cantor and nega-Q tags need ``system``."""
    m = _DIGITS_RE.match(text)
    if not m:
        raise ValidationError(f"malformed digit string {text!r}")
    tag = m.group("tag")
    if tag.lstrip("-").isdigit():
        s = int(tag)
        sysm = NumberSystem.sadic(s) if s > 0 else NumberSystem.nega_sadic(-s)
        if system is not None and system != sysm:
            raise ValidationError(f"digit string tag {tag} does not match {system.label}")
    else:
        if system is None or system.label != tag:
            raise ValidationError(f"digit string tag {tag} needs a matching base/matrix config")
        sysm = system
    return DigitString(sysm, _digit_list(m.group("prefix")), _digit_list(m.group("tail")))


def random_digit_string(
    rng, system: NumberSystem, max_prefix: int = 6, max_period: int = 4
) -> DigitString:
    """Random eventually periodic string (used by the sampling sweeps)."""
    plen = rng.randint(0, max_prefix)
    L = system.digit_period
    tlen = L * rng.randint(0, max(1, max_period // L))
    prefix = tuple(rng.randrange(system.size(n)) for n in range(1, plen + 1))
    p0 = plen + 1
    # draw tail digits where the alphabet has become periodic
    shift = max(0, system.digit_start + 1 - p0)
    prefix += tuple(rng.randrange(system.size(n)) for n in range(p0, p0 + shift))
    p0 += shift
    tail = tuple(rng.randrange(system.size(n)) for n in range(p0, p0 + tlen))
    return DigitString(system, prefix, tail)


def iter_prefixes(system: NumberSystem, rank: int) -> Iterable[tuple[int, ...]]:
    """All admissible digit prefixes of the given length, in lexicographic order."""
    if rank == 0:
        yield ()
        return
    for head in iter_prefixes(system, rank - 1):
        for d in range(system.size(rank)):
            yield head + (d,)
