"""Salem's singular function and its matrix-weighted generalizations.

All evaluators share one shape: for a digit string (e_n),

    F = beta(e_1, 1) + sum_{n>=2} beta(e_n, n) * prod_{j<n} p(e_j, j)

which is the affine chain a_n = beta, b_n = p, resummed exactly. The
alternating-Cantor and nega-Q̃ variants replace e_n by m_n - e_n at even n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, NonPeriodicError, ValidationError
from .maps import DigitMap
from .numbers import (
    CantorBase,
    ColumnMatrix,
    DigitString,
    Kind,
    NumberSystem,
    QMatrix,
    TruncatedExpansion,
    nega_q_digits,
    parse_rational,
    resum,
    to_digits,
)


class PMatrix(ColumnMatrix):
    """Signed weights p_{i,n} in (-1, 1), columns summing to 1, partial sums in (0, 1)."""

    key = "p"

    def _check_column(self, n: int, col: tuple[Fraction, ...]) -> None:
        super()._check_column(n, col)
        if any(not -1 < p < 1 for p in col):
            raise ValidationError(f"column {n}: every p_(i,n) must lie in (-1, 1)")
        beta = Fraction(0)
        for i, p in enumerate(col[:-1], 1):
            beta += p
            if not 0 < beta < 1:
                raise ValidationError(f"column {n}: beta_{i} = {beta} is not in (0, 1)")

    def beta(self, i: int, n: int) -> Fraction:
        return sum(self.column(n)[:i], Fraction(0))

    def is_positive(self) -> bool:
        return all(p > 0 for col in self.columns for p in col)


@dataclass(frozen=True)
class SalemParams:
    q0: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "q0", parse_rational(self.q0))
        if not 0 < self.q0 < 1:
            raise ValidationError(f"q0 must lie in (0, 1), got {self.q0}")

    @property
    def q1(self) -> Fraction:
        return 1 - self.q0


def salem_eval(params: SalemParams, x) -> Fraction:
    x = parse_rational(x)
    if not 0 <= x <= 1:
        raise DomainError(f"Salem's function is defined on [0, 1], got {x}")
    d = to_digits(x, NumberSystem.sadic(2))
    q = (params.q0, params.q1)
    beta = (Fraction(0), params.q0)
    prefix, tail = d.expanded()
    return resum(prefix, tail, lambda n, a: (beta[a], q[a]))


# -- generic series --------------------------------------------------------------


def _twisted(system: NumberSystem) -> bool:
    return system.kind in (Kind.ALT_CANTOR, Kind.NEGA_Q)


def _check_shape(P: PMatrix, system: NumberSystem) -> None:
    stop = max(P.start, system.digit_start) + math.lcm(P.length, system.digit_period)
    for n in range(1, stop + 1):
        if len(P.column(n)) != system.size(n):
            raise ValidationError(
                f"column {n} of P has {len(P.column(n))} weights but the digit alphabet has {system.size(n)}"
            )


def _affine(P: PMatrix, twist: bool):
    cache: dict[tuple[int, int], tuple[Fraction, Fraction]] = {}

    def affine(n: int, e: int) -> tuple[Fraction, Fraction]:
        key = (n, e)
        if key not in cache:
            col = P.column(n)
            i = len(col) - 1 - e if twist and n % 2 == 0 else e
            cache[key] = (sum(col[:i], Fraction(0)), col[i])
        return cache[key]

    return affine


def series_value(P: PMatrix, d: DigitString) -> Fraction:
    """F at a formal digit string; the twist follows the string's system."""
    _check_shape(P, d.system)
    twist = _twisted(d.system)
    prefix, tail = d.expanded()
    return resum(prefix, tail, _affine(P, twist), P.start, math.lcm(P.length, 2 if twist else 1))


def series_bounds(P: PMatrix, digits: Sequence[int], twist: bool) -> tuple[Fraction, Fraction]:
    """Exact enclosure of F for a string known only through ``digits``.

    The unknown remainder T satisfies |T| <= B / (1 - M) where B and M bound
    |beta| and |p| over all columns.
    """
    B = max(abs(sum(col[:i], Fraction(0))) for col in P.columns for i in range(len(col)))
    M = max(abs(p) for col in P.columns for p in col)
    radius = B / (1 - M)
    aff = _affine(P, twist)
    c, r = Fraction(0), Fraction(1)
    for n, e in enumerate(digits, 1):
        a, b = aff(n, e)
        c += r * a
        r *= b
    return c - abs(r) * radius, c + abs(r) * radius


def eval_F_cantor(P: PMatrix, D: CantorBase, x) -> Fraction:
    x = parse_rational(x)
    system = NumberSystem.cantor(D)
    _check_shape(P, system)
    return series_value(P, to_digits(x, system))


def eval_F_tilde(P: PMatrix, D: CantorBase, x) -> Fraction:
    x = parse_rational(x)
    system = NumberSystem.alternating_cantor(D)
    _check_shape(P, system)
    return series_value(P, to_digits(x, system))


def eval_F_negaQ(P: PMatrix, Q: QMatrix, x) -> Fraction:
    x = parse_rational(x)
    system = NumberSystem.nega_q(Q)
    _check_shape(P, system)
    if not system.contains(x):
        raise DomainError(f"nega-Q̃ expansions cover [0, 1), got {x}")
    d = nega_q_digits(x, Q)
    if isinstance(d, TruncatedExpansion):
        raise NonPeriodicError("nega-Q̃ digits of x did not become periodic; use eval_F_negaQ_bounds")
    return series_value(P, d)


def eval_F_negaQ_bounds(P: PMatrix, Q: QMatrix, x, depth: int = 200) -> tuple[Fraction, Fraction]:
    """Interval enclosing F(x) from ``depth`` digits; exact (lo == hi) when periodic."""
    x = parse_rational(x)
    system = NumberSystem.nega_q(Q)
    _check_shape(P, system)
    if not system.contains(x):
        raise DomainError(f"nega-Q̃ expansions cover [0, 1), got {x}")
    d = nega_q_digits(x, Q, depth=depth)
    if isinstance(d, DigitString):
        v = series_value(P, d)
        return v, v
    return series_bounds(P, d.digits, twist=True)


@dataclass(frozen=True)
class SeriesFunction(DigitMap):
    """F as a map on digit strings of ``system``; usable by the probes."""

    P: PMatrix
    system: NumberSystem

    def __post_init__(self) -> None:
        if self.system.kind not in (Kind.CANTOR, Kind.ALT_CANTOR, Kind.NEGA_Q):
            raise ValidationError(f"F is defined over Cantor or nega-Q̃ digits, not {self.system.label}")
        _check_shape(self.P, self.system)

    @property
    def domain(self) -> NumberSystem:
        return self.system

    def value_at(self, d: DigitString) -> Fraction:
        if d.system != self.system:
            raise ValidationError(f"expected {self.system.label} digits, got {d.system.label}")
        return series_value(self.P, d)

    def __call__(self, x) -> Fraction:
        x = parse_rational(x)
        if self.system.kind is Kind.NEGA_Q:
            return eval_F_negaQ(self.P, self.system.matrix, x)
        return series_value(self.P, to_digits(x, self.system))


# -- sign and product conditions ----------------------------------------------

DEFAULT_THRESHOLD = Fraction(1, 10**6)


@dataclass(frozen=True)
class ProductSequence:
    name: str
    values: tuple[Fraction, ...]
    period_factor: Fraction
    verdict: str  # nonzero-limit-plausible | tends-to-zero | inconclusive


@dataclass(frozen=True)
class ConditionReport:
    sign_condition_ok: bool
    sign_violations: tuple[tuple[int, int], ...]
    products: tuple[ProductSequence, ProductSequence]

    @property
    def verdict(self) -> str:
        verdicts = {p.verdict for p in self.products}
        if "tends-to-zero" in verdicts:
            return "tends-to-zero"
        if verdicts == {"nonzero-limit-plausible"}:
            return "nonzero-limit-plausible"
        return "inconclusive"


def _product_verdict(values: list[Fraction], start: int, period: int, threshold: Fraction) -> tuple[Fraction, str]:
    depth = len(values)
    base = values[start - 1] if start else Fraction(1)
    factor = values[start + period - 1] / base if base else Fraction(0)
    if values[-1] == 0:
        return factor, "tends-to-zero"
    if abs(factor) >= 1:
        return factor, "nonzero-limit-plausible"
    last = [abs(v) for v in values[max(0, depth - period - 1) :]]
    decreasing = all(b < a for a, b in zip(last, last[1:]))
    if abs(values[-1]) < threshold and decreasing:
        return factor, "tends-to-zero"
    return factor, "inconclusive"


def check_conditions(
    P: PMatrix, D: CantorBase | QMatrix, depth: int = 40, threshold: Fraction = DEFAULT_THRESHOLD
) -> ConditionReport:
    """Sign condition over one period and the two limit products to ``depth``.

    For a Cantor base the products are prod d_k p_{0,k} and prod d_k p_{d_k-1,k};
    for a Q̃ matrix they are prod p_{0,k}/q_{0,k} and prod p_{m_k,k}/q_{m_k,k}.
    """
    if isinstance(D, CantorBase):
        system = NumberSystem.cantor(D)
        first = lambda n: D[n] * P.column(n)[0]
        last = lambda n: D[n] * P.column(n)[-1]
        dstart, dlen = D.start, D.length
    elif isinstance(D, QMatrix):
        system = NumberSystem.nega_q(D)
        first = lambda n: P.column(n)[0] / D.column(n)[0]
        last = lambda n: P.column(n)[-1] / D.column(n)[-1]
        dstart, dlen = D.start, D.length
    else:
        raise ValidationError("second argument must be a CantorBase or a QMatrix")
    _check_shape(P, system)
    start = max(P.start, dstart)
    period = math.lcm(P.length, dlen)
    if depth < start + period:
        raise ValidationError(f"depth {depth} is shorter than one full period ({start + period})")

    violations = []
    for n in range(1, start + period + 1):
        col = P.column(n)
        for e in range(1, len(col)):
            if not col[e] * col[e - 1] < 0:
                violations.append((n, e))

    seqs = []
    for name, factor in (("first", first), ("last", last)):
        values, acc = [], Fraction(1)
        for n in range(1, depth + 1):
            acc *= factor(n)
            values.append(acc)
        r, verdict = _product_verdict(values, start, period, threshold)
        seqs.append(ProductSequence(name, tuple(values), r, verdict))
    return ConditionReport(not violations, tuple(violations), (seqs[0], seqs[1]))


def cylinder_ratio(P: PMatrix, D: CantorBase, prefix: Sequence[int]) -> Fraction:
    """prod_{k<=n} d_k p_{e_k,k}: F-increment over the cylinder divided by its length."""
    out = Fraction(1)
    for k, e in enumerate(prefix, 1):
        col = P.column(k)
        if len(col) != D[k]:
            raise ValidationError(f"column {k} of P has {len(col)} weights but d_{k} = {D[k]}")
        if not 0 <= e < D[k]:
            raise ValidationError(f"digit {e} at position {k} outside 0..{D[k] - 1}")
        out *= D[k] * col[e]
    return out
