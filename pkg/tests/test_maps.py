import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from digitfn.errors import DomainError, RefusalError, ValidationError
from digitfn.maps import (
    BlockPermutation,
    BushWunderlich,
    LambdaSFunction,
    Shape,
    TableMap,
    apply_map,
    builtin_map,
    bush_wunderlich,
    compose,
    evaluate,
    f_m,
    fixed_blocks,
    fplus,
    fplusinv,
    group_enumerate,
    inverse,
    invariant_set_dimension,
    map_from_json,
    phi,
    table_map_fij,
    ternary_f,
)
from digitfn.numbers import DigitString, NumberSystem, parse_digits, random_digit_string, to_digits

import oracles

T3 = NumberSystem.sadic(3)
EXAMPLE_F22 = {"s": 2, "k": 2, "theta": [["00", "10"], ["01", "11"], ["10", "00"], ["11", "01"]]}


def test_phi_formula_reproduces_table():
    assert [phi(i) for i in range(3)] == [0, 2, 1]
    assert ternary_f().table == (0, 2, 1)


def test_f_family_tables():
    assert f_m(1).is_identity()
    assert f_m(6).table == (2, 1, 0)
    assert table_map_fij(0, 1).table == (0, 0, 1)
    assert table_map_fij(1, 0) == table_map_fij(0, 1)
    assert table_map_fij(0, 2).table == (0, 1, 0)
    assert table_map_fij(1, 2).table == (1, 0, 0)
    with pytest.raises(ValidationError):
        f_m(7)
    with pytest.raises(ValidationError):
        table_map_fij(1, 1)


def test_fij_tables_match_quadratics():
    # closed forms for the three non-bijective tables
    for i in range(3):
        assert table_map_fij(0, 1).table[i] == (i * i - i) // 2
        assert table_map_fij(1, 2).table[i] == (i * i - 3 * i + 2) // 2
        assert table_map_fij(0, 2).table[i] == -i * i + 2 * i


def test_apply_map_examples():
    f = ternary_f()
    assert str(apply_map(f, parse_digits("Δ3:1()"))) == "Δ3:2()"
    assert str(apply_map(f, parse_digits("Δ3:(2,0)"))) == "Δ3:(1,0)"
    d = parse_digits("Δ3:1,0(2,1,1)")
    assert apply_map(BlockPermutation.identity(3), d) == d


def test_apply_map_radix_mismatch():
    with pytest.raises(ValidationError):
        apply_map(ternary_f(), parse_digits("Δ2:1()"))


def test_block_map_replicates_tail():
    theta = BlockPermutation.from_json(EXAMPLE_F22)
    d = DigitString(NumberSystem.sadic(2), (1,), (1,))  # 1,1,1,...
    # blocks 11 -> 01 repeated
    assert apply_map(theta, d) == DigitString(NumberSystem.sadic(2), (), (0, 1))
    d = DigitString(NumberSystem.sadic(2), (0,), (1, 0, 1))  # odd prefix, odd tail
    img = apply_map(theta, d)
    word = d.digits(12)
    expect = []
    for i in range(0, 12, 2):
        expect.extend(theta.block_image(word[i : i + 2]))
    assert img.digits(12) == tuple(expect)


def test_eval_examples():
    f = ternary_f()
    assert evaluate(f, F(1, 3)) == F(2, 3)
    assert evaluate(f, F(3, 4)) == F(3, 8)
    assert evaluate(f, F(1, 4)) == F(1, 8)
    assert evaluate(fplus(3), F(3, 4)) == F(-3, 4)
    assert evaluate(fplus(3), F(0)) == 0
    assert evaluate(fplusinv(3), F(-3, 4)) == F(3, 4)
    with pytest.raises(DomainError):
        evaluate(f, F(5, 4))


def test_f_non_bijective_witness():
    f = ternary_f()
    assert f(F(1, 6)) == f(F(2, 3)) == F(1, 3)


def test_compose_and_inverse():
    f = ternary_f()
    assert compose(f, f).is_identity()
    assert compose(f_m(3), BlockPermutation.identity(3)) == f_m(3)
    assert inverse(f_m(4)) == f_m(5)
    assert compose(f_m(4), f_m(5)).is_identity()
    with pytest.raises(ValidationError):
        compose(f, BlockPermutation.identity(3, 2))


def test_group_orders():
    assert group_enumerate(2, 1).order == 2
    assert group_enumerate(3, 1).order == 6
    r = group_enumerate(2, 2)
    assert (r.order, r.closure_ok, r.inverses_ok) == (24, True, True)
    with pytest.raises(RefusalError):
        group_enumerate(3, 2)


def test_fixed_blocks_and_dimension():
    assert fixed_blocks(ternary_f()) == [(0,)]
    assert invariant_set_dimension(ternary_f()).kind == "finite"
    ident = invariant_set_dimension(BlockPermutation.identity(3))
    assert (ident.kind, ident.j, ident.value) == ("continuum", 3, pytest.approx(1.0))
    # swap 01 <-> 10 and 02 <-> 20 on A^2 for s = 3: seven fixed blocks
    theta = BlockPermutation.from_blocks(3, 2, {(0, 1): (1, 0), (1, 0): (0, 1)})
    dim = invariant_set_dimension(theta)
    assert dim.j == 7 and dim.value == pytest.approx(0.5 * 1.7712437491614221)
    assert invariant_set_dimension(BlockPermutation.complement(2)).kind == "empty"


def test_block_permutation_validation():
    with pytest.raises(ValidationError):
        BlockPermutation(3, 1, (0, 0, 1))
    with pytest.raises(ValidationError):
        BlockPermutation.from_json({"s": 2, "k": 2, "theta": [["00", "00"]]})
    with pytest.raises(ValidationError):
        BlockPermutation.from_json({"s": 2})


def test_example_block_map_roundtrip():
    theta = BlockPermutation.from_json(EXAMPLE_F22)
    assert theta.to_json() == EXAMPLE_F22
    assert map_from_json(dict(EXAMPLE_F22, shape="fplus_fsk")).shape is Shape.FPLUS_FSK


def test_lambda_chain_payload_rule():
    with pytest.raises(ValidationError):
        LambdaSFunction(3, Shape.FSK)
    with pytest.raises(ValidationError):
        LambdaSFunction(3, Shape.FPLUS, ternary_f())
    chain = LambdaSFunction(3, Shape.FPLUS_FSK_FPLUSINV, ternary_f())
    assert chain.domain == NumberSystem.nega_sadic(3)
    assert chain.codomain == NumberSystem.nega_sadic(3)


def test_bush_wunderlich_examples():
    assert bush_wunderlich(3, F(0)) == 0
    assert bush_wunderlich(3, F(1, 3)) == F(1, 2)
    assert bush_wunderlich(3, F(1, 2)) == 1
    with pytest.raises(DomainError):
        bush_wunderlich(3, F(2))
    with pytest.raises(ValidationError):
        BushWunderlich(2)


def test_bush_wunderlich_against_direct_recursion():
    rng = random.Random(5)
    for _ in range(200):
        d = random_digit_string(rng, T3)
        img = BushWunderlich(3).image(d)
        bits, prev, bit = [], None, 0
        for a in d.digits(40):
            bit = (a != 0) if prev is None else (bit if a == prev else 1 - bit)
            bits.append(int(bit))
            prev = a
        assert img.digits(40) == tuple(bits)


def test_builtin_names():
    for name in ("f", "f01", "f02", "f12", "f1", "f6", "fplus", "fplusinv", "bush", "wunderlich"):
        builtin_map(name)
    with pytest.raises(ValidationError):
        builtin_map("g")


def test_monotonicity_violation_on_rank3_endpoints():
    f = ternary_f()
    prefixes = list(itertools.product(range(3), repeat=3))
    reversing = preserving = 0
    for a, b in itertools.combinations(prefixes, 2):
        x1 = oracles.sadic_value(a, (), 3)
        x2 = oracles.sadic_value(b, (), 3)
        fa, fb = f(x1), f(x2)
        first = next(i for i in range(3) if a[i] != b[i])
        if {a[first], b[first]} == {1, 2}:
            assert (fa - fb) * (x1 - x2) < 0
            reversing += 1
        elif 0 in (a[first], b[first]):
            assert (fa - fb) * (x1 - x2) > 0
            preserving += 1
    assert reversing and preserving


def test_non_bijective_by_enumeration():
    f = ternary_f()
    values: dict[F, set] = {}
    for n in range(1, 5):
        for word in itertools.product(range(3), repeat=n):
            for tail in ((), (1,)):
                x = DigitString(T3, word, tail).value
                values.setdefault(f(x), set()).add(x)
    assert any(len(xs) > 1 for xs in values.values())
    assert {F(1, 6), F(2, 3)} <= values[F(1, 3)]


@given(st.integers(0, 10**9))
def test_involution_on_values(seed):
    rng = random.Random(seed)
    d = random_digit_string(rng, T3)
    f = ternary_f()
    assert f.image(f.image(d)) == d


@given(st.fractions(min_value=0, max_value=1, max_denominator=400))
def test_fm_values_match_oracle(x):
    d = to_digits(x, T3)
    pre, tail = d.expanded()
    for i in range(1, 7):
        t = f_m(i).table
        assert evaluate(f_m(i), x) == oracles.sadic_value([t[a] for a in pre], [t[a] for a in tail], 3)


@given(st.integers(2, 5), st.integers(0, 10**9))
def test_identity_and_complement_are_linear(s, seed):
    rng = random.Random(seed)
    d = random_digit_string(rng, NumberSystem.sadic(s))
    x = d.value
    assert BlockPermutation.identity(s).value_at(d) == x
    assert BlockPermutation.complement(s).value_at(d) == 1 - x
    e = d.with_system(NumberSystem.nega_sadic(s))
    chain = LambdaSFunction(s, Shape.FPLUS_FSK_FPLUSINV, BlockPermutation.complement(s))
    assert chain.value_at(e) == F(-(s - 1), s + 1) - e.value


def test_table_map_not_required_bijective():
    m = TableMap(3, (0, 0, 0))
    assert m(F(1, 2)) == 0
    with pytest.raises(ValidationError):
        TableMap(3, (0, 3, 0))
