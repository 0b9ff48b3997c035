"""Exact verification machinery: integrals, jumps, counts and probes."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import itertools
import math
import os
import random
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .errors import RefusalError, ValidationError
from .maps import (
    BlockPermutation,
    BushWunderlich,
    DigitMap,
    LambdaSFunction,
    Shape,
    TableMap,
    fplus,
    fplusinv,
    table_map_fij,
    ternary_f,
)
from .numbers import (
    DigitString,
    Kind,
    NumberSystem,
    canonicalize,
    complement,
    cylinder,
    format_rational,
    nega_q_digits,
    parse_rational,
    representations,
    to_digits,
)

DEFAULT_MAX_RANK = 12


def max_rank() -> int:
    """Rank guard; DIGITFN_MAX_RANK overrides the default."""
    raw = os.environ.get("DIGITFN_MAX_RANK")
    if raw is None:
        return DEFAULT_MAX_RANK
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValidationError(f"DIGITFN_MAX_RANK must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValidationError(f"DIGITFN_MAX_RANK must be positive, got {value}")
    return value


def _guard(rank: int, limit: int | None) -> None:
    limit = max_rank() if limit is None else limit
    if rank < 1:
        raise ValidationError(f"rank must be positive, got {rank}")
    if rank > limit:
        raise RefusalError(f"rank {rank} exceeds the guard {limit}")


# -- reports -------------------------------------------------------------------


@dataclass(frozen=True)
class JumpReport:
    point: Fraction
    left_limit: Fraction
    right_limit: Fraction
    value: Fraction
    jump: Fraction


@dataclass(frozen=True)
class DimensionEstimate:
    """Exact counts N(m) at ranks 1..m and a log-slope fit.

    The fit uses only ranks divisible by ``stride``, where the counting law is
    exactly geometric.
    """

    radix: int
    counts: tuple[tuple[int, int], ...]
    slope: float | None
    exact_law: str | None = None
    stride: int = 1
    empty: bool = False


@dataclass(frozen=True)
class QuotientProbe:
    point: Fraction
    depth: int
    quotients: tuple[Fraction, ...]
    positions: tuple[tuple[int, int], ...]  # (digit position, +1 or -1)
    verdict: str  # oscillating-divergent | sign-alternating | inconclusive
    sign_flips: int


def _fit(radix: int, counts: Sequence[tuple[int, int]], stride: int) -> float | None:
    pts = [(m * math.log(radix), math.log(n)) for m, n in counts if m % stride == 0]
    if len(pts) < 2:
        return None
    xs, ys = zip(*pts)
    return statistics.linear_regression(xs, ys).slope


def _estimate(radix: int, counts: list[tuple[int, int]], law: str | None, stride: int = 1) -> DimensionEstimate:
    return DimensionEstimate(radix, tuple(counts), _fit(radix, counts, stride), law, stride)


# -- helpers over map shapes --------------------------------------------------------


def _unwrap(m: DigitMap) -> tuple[int, BlockPermutation | TableMap | None, LambdaSFunction | None]:
    """(radix, digit substitution or None, chain or None)."""
    if isinstance(m, (BlockPermutation, TableMap)):
        return m.s, m, None
    if isinstance(m, LambdaSFunction):
        return m.s, m.perm, m
    raise RefusalError(f"{type(m).__name__} is not a digit-substitution map")


def _block_len(sub) -> int:
    return sub.k if isinstance(sub, BlockPermutation) else 1


def _sub_block(sub, block: tuple[int, ...]) -> tuple[int, ...]:
    if sub is None:
        return block
    if isinstance(sub, BlockPermutation):
        return sub.block_image(block)
    return tuple(sub.table[a] for a in block)


def _all_blocks(s: int, k: int):
    return itertools.product(range(s), repeat=k)


# -- integrals -----------------------------------------------------------------


def exact_integral(m: DigitMap) -> Fraction:
    """Integral of m over its domain interval (which has length 1).

    Digits of a uniformly random point are independent and uniform, so the
    integral is sum_n E[image digit n] * w_n with w_n = s^-n or (-1/s)^n.
    """
    s, sub, chain = _unwrap(m)
    k = _block_len(sub)
    c = Fraction(-1, s) if chain is not None and chain.codomain.kind is Kind.NEGA_SADIC else Fraction(1, s)
    blocks = list(_all_blocks(s, k))
    means = [Fraction(sum(_sub_block(sub, b)[i] for b in blocks), len(blocks)) for i in range(k)]
    return sum((means[i] * c ** (i + 1) for i in range(k)), Fraction(0)) / (1 - c**k)


def riemann_sum(m: DigitMap, rank: int) -> Fraction:
    """Sum of m(x) * |cylinder| over rank-``rank`` cylinders, x = prefix followed by zeros."""
    _guard(rank, None)
    dom = m.domain
    s = dom.radix
    if isinstance(m, (BlockPermutation, TableMap)) and rank % _block_len(m) == 0:
        # image of prefix+zeros is image(prefix) followed by image(zeros)
        k = _block_len(m)
        tail = m.value_at(DigitString(dom, ()))
        total = 0
        for prefix in _all_blocks(s, rank):
            n = 0
            for i in range(0, rank, k):
                for y in _sub_block(m, prefix[i : i + k]):
                    n = n * s + y
            total += n
        return (Fraction(total, s**rank) + tail) / s**rank
    total = Fraction(0)
    for prefix in _all_blocks(s, rank):
        total += m.value_at(DigitString(dom, prefix))
    return total / s**rank


# -- one-sided limits -----------------------------------------------------------


def one_sided_limits(m: DigitMap, x0) -> JumpReport:
    """Limits at an s-adic rational from its two representations, evaluated formally."""
    x0 = parse_rational(x0)
    dom = m.domain
    if dom.kind not in (Kind.SADIC, Kind.NEGA_SADIC):
        raise RefusalError("one-sided limits need an s-adic or nega-s-adic domain")
    reps = representations(x0, dom)
    if len(reps) < 2:
        raise RefusalError(f"{x0} has a single {dom.label} representation; the map is continuous there or it is an endpoint")
    right = left = None
    for rep in reps:
        depth = len(rep.prefix) + len(rep.tail) + 2
        lo, hi = cylinder(rep.digits(depth), dom)
        if lo == x0:
            right = rep
        elif hi == x0:
            left = rep
    if right is None or left is None:
        raise AssertionError(f"could not orient the representations of {x0}")
    rl, ll = m.value_at(right), m.value_at(left)
    return JumpReport(x0, ll, rl, m.value_at(reps[0]), rl - ll)


# -- counting dimensions ----------------------------------------------------------


def _partial_images(sub, s: int, k: int, t: int) -> int:
    """Sum over partial blocks p of length t of the number of distinct t-prefixes of their images."""
    total = 0
    for p in _all_blocks(s, t):
        total += len({_sub_block(sub, p + c)[:t] for c in _all_blocks(s, k - t)})
    return total


def graph_box_count(m: DigitMap, rank: int, guard: int | None = None) -> DimensionEstimate:
    """Rank-r squares (x-cylinder x y-cylinder) meeting the graph, r = 1..rank.

    Whole blocks of an x-prefix fix the corresponding image digits, so only a
    trailing partial block can spread over several y-cylinders.
    """
    _guard(rank, guard)
    if isinstance(m, BushWunderlich):
        raise RefusalError("graph box counting needs a digit-substitution map over a single radix")
    s, sub, _ = _unwrap(m)
    k = _block_len(sub)
    counts = []
    for r in range(1, rank + 1):
        q, t = divmod(r, k)
        n = s ** (q * k) * (_partial_images(sub, s, k, t) if t else 1)
        counts.append((r, n))
    law = f"{s}^m" if all(n == s**r for r, n in counts) else None
    return _estimate(s, counts, law)


def level_set_count(m: TableMap, y0, rank: int, guard: int | None = None) -> DimensionEstimate:
    """Rank-r x-cylinders whose image digits match the canonical digits of y0."""
    _guard(rank, guard)
    if not isinstance(m, TableMap):
        raise RefusalError("level-set counting is defined for digit tables such as f01, f02, f12")
    y0 = parse_rational(y0)
    d = to_digits(y0, m.codomain)
    pre = [m.table.count(a) for a in range(m.s)]
    seen = set(d.prefix) | set(d.tail) | ({0} if not d.tail else set())
    if any(pre[a] == 0 for a in seen):
        return DimensionEstimate(m.s, (), None, "empty", 1, True)
    counts, n = [], 1
    for r in range(1, rank + 1):
        n *= pre[d.digit(r)]
        counts.append((r, n))
    law = "2^z(m), z(m) = zeros among the first m digits of y0" if sorted(pre) == [0, 1, 2] else None
    return _estimate(m.s, counts, law)


def invariant_prefix_count(m: DigitMap, rank: int, guard: int | None = None) -> DimensionEstimate:
    """Rank-r cylinders holding a digit-level fixed point of m, r = 1..rank."""
    _guard(rank, guard)
    if isinstance(m, LambdaSFunction) and m.shape.stages in (("fplus",), ("fplusinv",)):
        s = m.s
        # x - f+(x) = sum over odd n of 2 a_n s^-n: odd digits must vanish
        counts = [(r, s ** (r // 2)) for r in range(1, rank + 1)]
        return _estimate(s, counts, f"{s}^floor(m/2)", stride=2)
    if isinstance(m, LambdaSFunction) and m.shape.stages == ("fsk",):
        m = m.perm
    if not isinstance(m, BlockPermutation):
        raise RefusalError("invariant counting supports fplus, fplusinv and block permutations")
    fixed = m.fixed_blocks()
    j, k = len(fixed), m.k
    counts = []
    for r in range(1, rank + 1):
        q, t = divmod(r, k)
        heads = len({b[:t] for b in fixed})
        counts.append((r, j**q * heads))
    if j == 0:
        return DimensionEstimate(m.s, tuple(counts), None, "empty", k, True)
    return _estimate(m.s, counts, f"{j}^floor(m/{k})", stride=k)


# -- identities ------------------------------------------------------------------


def random_rational(rng: random.Random, s: int = 3, max_exp: int = 6) -> Fraction:
    """k/s^j or k/(s^j - 1) in [0, 1]: terminating or purely periodic digits."""
    j = rng.randint(1, max_exp)
    den = s**j if rng.random() < 0.5 else s**j - 1
    return Fraction(rng.randint(0, den), den)


IDENTITY_NAMES = (
    "f = 2x - 3f01",
    "f = 3/2 - x - 3f12",
    "f = x/2 + (3/2)f02",
    "f(x) - f(1-x) = f01 - f12",
    "f(x) + f(1-x) = 1/2 + 3f02",
    "f01 + f02 + f12 = 1/2",
    "2f01 + f02 = x",
    "f01 - f12 = x - 1/2",
    "f+(x) + f+(1-x) = -(s-1)/(s+1)",
    "f+^-1(y) + f+^-1(-(s-1)/(s+1) - y) = 1",
    "identity block map = x",
    "complement block map = 1 - x",
    "nega complement chain = -(s-1)/(s+1) - y",
)


def identity_checks(x: Fraction, s: int = 3) -> dict[str, bool]:
    """Evaluate every identity at x on formal strings; 1-x is the digit complement of x."""
    d = to_digits(x, NumberSystem.sadic(3))
    c = complement(d)
    f, f01, f02, f12 = ternary_f(), table_map_fij(0, 1), table_map_fij(0, 2), table_map_fij(1, 2)
    fx, a, b, g = f.value_at(d), f01.value_at(d), f02.value_at(d), f12.value_at(d)
    fc = f.value_at(c)
    half = Fraction(1, 2)
    out = {
        IDENTITY_NAMES[0]: fx == 2 * x - 3 * a,
        IDENTITY_NAMES[1]: fx == Fraction(3, 2) - x - 3 * g,
        IDENTITY_NAMES[2]: fx == x / 2 + Fraction(3, 2) * b,
        IDENTITY_NAMES[3]: fx - fc == a - g,
        IDENTITY_NAMES[4]: fx + fc == half + 3 * b,
        IDENTITY_NAMES[5]: a + b + g == half,
        IDENTITY_NAMES[6]: 2 * a + b == x,
        IDENTITY_NAMES[7]: a - g == x - half,
    }
    sad, neg = NumberSystem.sadic(s), NumberSystem.nega_sadic(s)
    ds = to_digits(x, sad)
    const = Fraction(-(s - 1), s + 1)
    fp, fpi = fplus(s), fplusinv(s)
    out[IDENTITY_NAMES[8]] = fp.value_at(ds) + fp.value_at(complement(ds)) == const
    # y = f+(x) read as a nega string, paired with its digit complement
    e = ds.with_system(neg)
    y = e.value
    ce = complement(e)
    out[IDENTITY_NAMES[9]] = ce.value == const - y and fpi.value_at(e) + fpi.value_at(ce) == 1
    ident, comp = BlockPermutation.identity(s), BlockPermutation.complement(s)
    out[IDENTITY_NAMES[10]] = ident.value_at(ds) == x
    out[IDENTITY_NAMES[11]] = comp.value_at(ds) == 1 - x
    chain = LambdaSFunction(s, Shape.FPLUS_FSK_FPLUSINV, comp)
    out[IDENTITY_NAMES[12]] = chain.value_at(e) == const - y
    return out


@dataclass(frozen=True)
class IdentityReport:
    samples: int
    seed: int
    passes: dict[str, int]
    failures: dict[str, list[Fraction]]

    @property
    def ok(self) -> bool:
        return all(v == self.samples for v in self.passes.values())


def identity_suite(samples: int = 1000, seed: int = 0, s: int = 3) -> IdentityReport:
    if samples < 1:
        raise ValidationError(f"samples must be positive, got {samples}")
    rng = random.Random(seed)
    passes = {name: 0 for name in IDENTITY_NAMES}
    failures: dict[str, list[Fraction]] = {}
    for _ in range(samples):
        x = random_rational(rng)
        for name, ok in identity_checks(x, s).items():
            if ok:
                passes[name] += 1
            else:
                failures.setdefault(name, []).append(x)
    return IdentityReport(samples, seed, passes, failures)


# -- difference quotients ----------------------------------------------------------


def _domain_digits(m: DigitMap, x: Fraction) -> DigitString:
    dom = m.domain
    if dom.kind is Kind.NEGA_Q:
        d = nega_q_digits(x, dom.matrix)
        if not isinstance(d, DigitString):
            raise RefusalError(f"nega-Q̃ digits of {x} are not eventually periodic")
        return d
    return to_digits(x, dom)


def derivative_probe(m: DigitMap, x, depth: int = 40, bound: Fraction = Fraction(10**6)) -> QuotientProbe:
    """Quotients (m(x') - m(x)) / (x' - x) where x' bumps digit n of x by +-1."""
    if depth < 2:
        raise ValidationError(f"depth must be at least 2, got {depth}")
    x = parse_rational(x)
    d = _domain_digits(m, x)
    dom = d.system
    fx = m.value_at(d)
    quotients, positions = [], []
    for n in range(1, depth + 1):
        digit = d.digit(n)
        for step in (1, -1):
            new = digit + step
            if not 0 <= new < dom.size(n):
                continue
            bumped = canonicalize(d.replace(n, new))
            h = bumped.value - x
            if h == 0:
                continue
            quotients.append((m.value_at(bumped) - fx) / h)
            positions.append((n, step))
    signs = [q > 0 for q in quotients if q != 0]
    flips = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    pos, neg = signs.count(True), signs.count(False)
    if pos >= 3 and neg >= 3:
        verdict = "oscillating-divergent" if max(abs(q) for q in quotients) > bound else "sign-alternating"
    else:
        verdict = "inconclusive"
    return QuotientProbe(x, depth, tuple(quotients), tuple(positions), verdict, flips)


# -- serialization ------------------------------------------------------------------


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types; rationals become ``p/q`` strings."""
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, DigitString):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def counts_csv(est: DimensionEstimate) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "N", "logN"])
    for m, n in est.counts:
        w.writerow([m, n, f"{math.log(n):.12g}"])
    return buf.getvalue()
