"""Digit-substitution functions.

Every map here acts on digit strings: a table or block permutation
rewrites the digits, ``fplus`` reads s-adic digits as nega-s-adic ones,
``fplusinv`` does the reverse. Values are obtained by resumming the image.
Arguments are always taken in canonical form.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .errors import DomainError, RefusalError, ValidationError
from .numbers import DigitString, Kind, NumberSystem, from_digits, parse_rational, to_digits


class DigitMap:
    """Common surface: ``domain``, ``codomain``, ``image(d)``, ``value_at(d)``, ``__call__(x)``."""

    domain: NumberSystem
    codomain: NumberSystem

    def image(self, d: DigitString) -> DigitString:
        raise NotImplementedError

    def value_at(self, d: DigitString) -> Fraction:
        return from_digits(self.image(d))

    def __call__(self, x) -> Fraction:
        return evaluate(self, x)


def _check_radix(d: DigitString, s: int, kinds=(Kind.SADIC, Kind.NEGA_SADIC)) -> None:
    if d.system.kind not in kinds or d.system.radix != s:
        raise ValidationError(f"map over radix {s} applied to a {d.system.label} string")


@dataclass(frozen=True)
class TableMap(DigitMap):
    """Digitwise substitution alpha -> table[alpha]; need not be a bijection."""

    s: int
    table: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", tuple(int(t) for t in self.table))
        if len(self.table) != self.s:
            raise ValidationError(f"table needs {self.s} entries, got {len(self.table)}")
        if any(not 0 <= t < self.s for t in self.table):
            raise ValidationError(f"table entries must lie in 0..{self.s - 1}")

    @property
    def domain(self) -> NumberSystem:
        return NumberSystem.sadic(self.s)

    codomain = domain

    def image(self, d: DigitString) -> DigitString:
        _check_radix(d, self.s)
        prefix, tail = d.expanded()
        return DigitString(
            d.system, tuple(self.table[a] for a in prefix), tuple(self.table[a] for a in tail)
        )


def _block_index(block: Sequence[int], s: int) -> int:
    idx = 0
    for g in block:
        idx = idx * s + g
    return idx


def _block_digits(idx: int, s: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        idx, r = divmod(idx, s)
        out.append(r)
    return tuple(reversed(out))


@dataclass(frozen=True)
class BlockPermutation(DigitMap):
    """Bijection theta on A^k applied to consecutive k-digit blocks.

    ``table[i]`` is the index of theta(block i), blocks indexed big-endian.
    """

    s: int
    k: int
    table: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", tuple(int(t) for t in self.table))
        if self.s < 2 or self.k < 1:
            raise ValidationError(f"need s >= 2 and k >= 1, got s={self.s}, k={self.k}")
        n = self.s**self.k
        if sorted(self.table) != list(range(n)):
            raise ValidationError(f"theta must be a permutation of the {n} blocks of A^{self.k}")

    @classmethod
    def identity(cls, s: int, k: int = 1) -> BlockPermutation:
        return cls(s, k, tuple(range(s**k)), name="identity")

    @classmethod
    def complement(cls, s: int, k: int = 1) -> BlockPermutation:
        n = s**k
        return cls(s, k, tuple(n - 1 - i for i in range(n)), name="complement")

    @classmethod
    def from_blocks(cls, s: int, k: int, mapping: dict[tuple[int, ...], tuple[int, ...]], name: str = "") -> BlockPermutation:
        table = list(range(s**k))
        for src, dst in mapping.items():
            if len(src) != k or len(dst) != k:
                raise ValidationError(f"blocks must have length {k}: {src} -> {dst}")
            if any(not 0 <= g < s for g in src + dst):
                raise ValidationError(f"block digits must lie in 0..{s - 1}")
            table[_block_index(src, s)] = _block_index(dst, s)
        return cls(s, k, tuple(table), name=name)

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> BlockPermutation:
        try:
            s, k = int(obj["s"]), int(obj["k"])
            rows = obj["theta"]
            mapping = {}
            for src, dst in rows:
                mapping[_parse_block(src)] = _parse_block(dst)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed map config: {exc}") from exc
        if len(mapping) != s**k or len(rows) != s**k:
            raise ValidationError(f"theta must list each of the {s**k} blocks exactly once")
        return cls.from_blocks(s, k, mapping, name=obj.get("name", "theta"))

    def to_json(self) -> dict[str, Any]:
        def show(i: int) -> str:
            return "".join(map(str, _block_digits(i, self.s, self.k)))

        return {"s": self.s, "k": self.k, "theta": [[show(i), show(t)] for i, t in enumerate(self.table)]}

    @property
    def domain(self) -> NumberSystem:
        return NumberSystem.sadic(self.s)

    codomain = domain

    def block_image(self, block: Sequence[int]) -> tuple[int, ...]:
        return _block_digits(self.table[_block_index(block, self.s)], self.s, self.k)

    def image(self, d: DigitString) -> DigitString:
        _check_radix(d, self.s)
        prefix, tail = d.expanded(multiple=self.k)
        while len(prefix) % self.k:
            prefix.append(tail[0])
            tail = tail[1:] + tail[:1]

        def blocks(seq: list[int]) -> tuple[int, ...]:
            out: list[int] = []
            for i in range(0, len(seq), self.k):
                out.extend(self.block_image(seq[i : i + self.k]))
            return tuple(out)

        return DigitString(d.system, blocks(prefix), blocks(tail))

    def fixed_blocks(self) -> list[tuple[int, ...]]:
        return [_block_digits(i, self.s, self.k) for i, t in enumerate(self.table) if i == t]

    def is_identity(self) -> bool:
        return all(i == t for i, t in enumerate(self.table))


def _parse_block(b) -> tuple[int, ...]:
    if isinstance(b, str):
        if not b.isdigit():
            raise ValueError(f"block {b!r} is not a digit string")
        return tuple(int(c) for c in b)
    return tuple(int(c) for c in b)


def apply_map(m: DigitMap, d: DigitString) -> DigitString:
    """Digitwise / blockwise image of a digit string (no canonicalization)."""
    return m.image(d)


def compose(a: BlockPermutation, b: BlockPermutation) -> BlockPermutation:
    """The map a o b (apply b first)."""
    if (a.s, a.k) != (b.s, b.k):
        raise ValidationError(f"cannot compose maps on A^{a.k} (s={a.s}) and A^{b.k} (s={b.s})")
    return BlockPermutation(a.s, a.k, tuple(a.table[i] for i in b.table))


def inverse(a: BlockPermutation) -> BlockPermutation:
    table = [0] * len(a.table)
    for i, t in enumerate(a.table):
        table[t] = i
    return BlockPermutation(a.s, a.k, tuple(table))


# -- the ternary family --------------------------------------------------------

F_TABLES = {
    1: (0, 1, 2),
    2: (0, 2, 1),
    3: (1, 0, 2),
    4: (1, 2, 0),
    5: (2, 0, 1),
    6: (2, 1, 0),
}


def phi(i: int) -> int:
    """(-3i^2 + 7i)/2: swaps the ternary digits 1 and 2, keeps 0."""
    return (-3 * i * i + 7 * i) // 2


def ternary_f() -> BlockPermutation:
    table = tuple(phi(i) for i in range(3))
    if table != F_TABLES[2]:
        raise AssertionError("phi does not reproduce the digit swap 0->0, 1->2, 2->1")
    return BlockPermutation(3, 1, table, name="f")


def f_m(index: int) -> BlockPermutation:
    if index not in F_TABLES:
        raise ValidationError(f"f_m index must be in 1..6, got {index}")
    return BlockPermutation(3, 1, F_TABLES[index], name=f"f{index}")


def table_map_fij(i: int, j: int) -> TableMap:
    """Ternary map sending digits i and j to 0 and the remaining digit to 1."""
    if {i, j} - {0, 1, 2} or i == j:
        raise ValidationError(f"f_ij needs distinct ternary digits, got i={i}, j={j}")
    table = tuple(0 if a in (i, j) else 1 for a in range(3))
    lo, hi = sorted((i, j))
    return TableMap(3, table, name=f"f{lo}{hi}")


# -- the Lambda_s class --------------------------------------------------------


class Shape(enum.Enum):
    """Composite shapes; stages are applied right to left."""

    FSK = ("fsk",)
    FPLUS = ("fplus",)
    FPLUSINV = ("fplusinv",)
    FPLUS_FSK = ("fplus", "fsk")
    FSK_FPLUSINV = ("fsk", "fplusinv")
    FPLUS_FSK_FPLUSINV = ("fplus", "fsk", "fplusinv")

    @property
    def stages(self) -> tuple[str, ...]:
        return self.value

    @classmethod
    def parse(cls, text: str) -> Shape:
        key = text.strip().lower().replace("∘", "_").replace("o", "_").replace("-", "_")
        for shape in cls:
            if "_".join(shape.stages) == key or shape.name.lower() == key:
                return shape
        raise ValidationError(f"unknown chain shape {text!r}")


@dataclass(frozen=True)
class LambdaSFunction(DigitMap):
    s: int
    shape: Shape
    perm: BlockPermutation | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        needs = "fsk" in self.shape.stages
        if needs != (self.perm is not None):
            raise ValidationError(
                f"shape {self.shape.name} {'needs' if needs else 'takes no'} block permutation"
            )
        if self.perm is not None and self.perm.s != self.s:
            raise ValidationError(f"permutation radix {self.perm.s} differs from s={self.s}")

    @property
    def domain(self) -> NumberSystem:
        if self.shape.stages[-1] == "fplusinv":
            return NumberSystem.nega_sadic(self.s)
        return NumberSystem.sadic(self.s)

    @property
    def codomain(self) -> NumberSystem:
        if self.shape.stages[0] == "fplus":
            return NumberSystem.nega_sadic(self.s)
        return NumberSystem.sadic(self.s)

    def image(self, d: DigitString) -> DigitString:
        if d.system != self.domain:
            raise ValidationError(f"{self.shape.name} expects {self.domain.label} digits, got {d.system.label}")
        for stage in reversed(self.shape.stages):
            if stage == "fplusinv":
                d = d.with_system(NumberSystem.sadic(self.s))
            elif stage == "fplus":
                d = d.with_system(NumberSystem.nega_sadic(self.s))
            else:
                d = self.perm.image(d)
        return d


def fplus(s: int) -> LambdaSFunction:
    return LambdaSFunction(s, Shape.FPLUS, name="fplus")


def fplusinv(s: int) -> LambdaSFunction:
    return LambdaSFunction(s, Shape.FPLUSINV, name="fplusinv")


def evaluate(m: DigitMap, x) -> Fraction:
    """m(x): canonical digits of x in the map's domain, image, exact resummation."""
    x = parse_rational(x)
    return m.value_at(to_digits(x, m.domain))


# -- group structure and invariant sets ----------------------------------------


@dataclass(frozen=True)
class GroupReport:
    s: int
    k: int
    order: int
    closure_ok: bool
    inverses_ok: bool


def group_enumerate(s: int, k: int, guard: int = 8) -> GroupReport:
    """Enumerate every f^s_k and check the group axioms exhaustively."""
    n = s**k
    if n > guard:
        raise RefusalError(f"s^k = {n} exceeds the enumeration guard {guard}")
    perms = set(itertools.permutations(range(n)))

    def comp(a, b):
        return tuple(a[i] for i in b)

    if len(perms) <= 1000:
        closure = all(comp(a, b) in perms for a in perms for b in perms)
    else:
        # every permutation is a word in these two generators, so closing under
        # right multiplication by them closes the whole set by induction
        gens = [tuple(range(1, n)) + (0,), (1, 0) + tuple(range(2, n))]
        closure = all(g in perms for g in gens) and all(comp(a, g) in perms for a in perms for g in gens)
    ident = tuple(range(n))
    inverses = True
    for a in perms:
        inv = [0] * n
        for i, t in enumerate(a):
            inv[t] = i
        inv = tuple(inv)
        if inv not in perms or comp(a, inv) != ident or comp(inv, a) != ident:
            inverses = False
            break
    order = len(perms)
    if order != math.factorial(n):
        raise AssertionError("enumeration missed permutations")
    return GroupReport(s, k, order, closure, inverses)


def fixed_blocks(theta: BlockPermutation) -> list[tuple[int, ...]]:
    return theta.fixed_blocks()


@dataclass(frozen=True)
class InvariantSetDimension:
    """Hausdorff dimension (1/k) log_s j kept symbolically as (j, s, k)."""

    kind: str  # "continuum" | "finite" | "empty"
    j: int
    s: int
    k: int

    @property
    def value(self) -> float | None:
        if self.kind == "empty":
            return None
        return math.log(self.j) / (self.k * math.log(self.s))


def invariant_set_dimension(theta: BlockPermutation) -> InvariantSetDimension:
    j = len(theta.fixed_blocks())
    kind = "continuum" if j >= 2 else "finite" if j == 1 else "empty"
    return InvariantSetDimension(kind, j, theta.s, theta.k)


# -- Bush / Wunderlich -----------------------------------------------------------


@dataclass(frozen=True)
class BushWunderlich(DigitMap):
    """Binary flip sequence: phi_1 = [a_1 != 0], phi_j flips when a_j != a_(j-1)."""

    s: int = 3

    def __post_init__(self) -> None:
        if self.s < 3:
            raise ValidationError(f"the Bush function needs s >= 3, got {self.s}")

    @property
    def domain(self) -> NumberSystem:
        return NumberSystem.sadic(self.s)

    @property
    def codomain(self) -> NumberSystem:
        return NumberSystem.sadic(2)

    def image(self, d: DigitString) -> DigitString:
        _check_radix(d, self.s, kinds=(Kind.SADIC,))
        prefix, tail = d.expanded()
        seq = prefix + tail * 3
        out = []
        prev = None
        bit = 0
        for a in seq:
            bit = (0 if a == 0 else 1) if prev is None else (bit if a == prev else 1 - bit)
            out.append(bit)
            prev = a
        cut = len(prefix) + len(tail)
        return DigitString(self.codomain, tuple(out[:cut]), tuple(out[cut:]))


def bush_wunderlich(s: int, x) -> Fraction:
    x = parse_rational(x)
    if not 0 <= x <= 1:
        raise DomainError(f"Bush/Wunderlich functions are defined on [0, 1], got {x}")
    return evaluate(BushWunderlich(s), x)


# -- names ---------------------------------------------------------------------

BUILTIN_NAMES = (
    "f", "f01", "f02", "f12", "f1", "f2", "f3", "f4", "f5", "f6",
    "fplus", "fplusinv", "bush", "wunderlich", "identity", "complement",
)


def builtin_map(name: str, s: int = 3) -> DigitMap:
    """Look up a named map; ``s`` applies to the radix-generic ones."""
    if name == "f":
        return ternary_f()
    if name in ("f01", "f02", "f12"):
        return table_map_fij(int(name[1]), int(name[2]))
    if len(name) == 2 and name[0] == "f" and name[1].isdigit():
        return f_m(int(name[1]))
    if name == "fplus":
        return fplus(s)
    if name == "fplusinv":
        return fplusinv(s)
    if name == "bush":
        return BushWunderlich(s)
    if name == "wunderlich":
        return BushWunderlich(3)
    if name == "identity":
        return BlockPermutation.identity(s)
    if name == "complement":
        return BlockPermutation.complement(s)
    raise ValidationError(f"unknown map {name!r}; known: {', '.join(BUILTIN_NAMES)}")


def map_from_json(obj: dict[str, Any]) -> DigitMap:
    """Block-map file, optionally wrapped in a chain: ``{"s":..,"k":..,"theta":..,"shape":"fplus_fsk"}``."""
    if not isinstance(obj, dict):
        raise ValidationError("map config must be a JSON object")
    perm = BlockPermutation.from_json(obj)
    if "shape" not in obj:
        return perm
    shape = Shape.parse(str(obj["shape"]))
    return LambdaSFunction(perm.s, shape, perm if "fsk" in shape.stages else None)
