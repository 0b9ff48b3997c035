import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from digitfn.errors import DomainError, ValidationError
from digitfn.numbers import (
    CantorBase,
    DigitString,
    NumberSystem,
    QMatrix,
    canonicalize,
    cantor_dual,
    complement,
    cylinder,
    dp_map,
    format_digits,
    format_rational,
    from_digits,
    nega_q_digits,
    parse_digits,
    parse_rational,
    random_digit_string,
    representations,
    to_digits,
)

import oracles

T3 = NumberSystem.sadic(3)
N3 = NumberSystem.nega_sadic(3)
D23 = CantorBase((), (2, 3))
UNIFORM_Q = QMatrix.uniform(3)


# -- parsing -------------------------------------------------------------------


def test_parse_rational_forms():
    assert parse_rational("3/6") == F(1, 2)
    assert parse_rational(" -2 / 4 ") == F(-1, 2)
    assert parse_rational("5") == F(5)
    assert format_rational(F(4, 1)) == "4/1"


@pytest.mark.parametrize("bad", ["", "1/0", "a/b", "1.5", "1/-2", "//"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValidationError):
        parse_rational(bad)


def test_digit_text_roundtrip():
    d = parse_digits("Δ3:1,2(0,1)")
    assert format_digits(d) == "Δ3:1,2(0,1)"
    assert str(parse_digits("Δ-3:(0,2)")) == "Δ-3:(0,2)"
    with pytest.raises(ValidationError):
        parse_digits("Δ3:3()")
    with pytest.raises(ValidationError):
        parse_digits("ΔD:1()")  # needs the base


# -- s-adic and nega-s-adic ----------------------------------------------------------


@pytest.mark.parametrize(
    "text, value",
    [("Δ3:1()", F(1, 3)), ("Δ3:(1)", F(1, 2)), ("Δ3:(2,0)", F(3, 4)), ("Δ3:(0,2)", F(1, 4)), ("Δ3:(2)", F(1))],
)
def test_sadic_values(text, value):
    assert from_digits(parse_digits(text)) == value


@pytest.mark.parametrize(
    "text, value",
    [("Δ-3:1()", F(-1, 3)), ("Δ-3:(0,2)", F(1, 4)), ("Δ-3:(2,0)", F(-3, 4)), ("Δ-3:(2)", F(-1, 2))],
)
def test_nega_values(text, value):
    assert from_digits(parse_digits(text)) == value


def test_to_digits_examples():
    assert str(to_digits(F(1, 3), T3)) == "Δ3:1()"
    assert str(to_digits(F(1, 2), T3)) == "Δ3:(1)"
    assert str(to_digits(F(1), T3)) == "Δ3:(2)"
    assert str(to_digits(F(-1, 3), N3)) == "Δ-3:1()"
    assert str(to_digits(F(1, 4), N3)) == "Δ-3:(0,2)"


def test_to_digits_domain_errors():
    with pytest.raises(DomainError):
        to_digits(F(3, 2), T3)
    with pytest.raises(DomainError):
        to_digits(F(1, 2), N3)  # above 1/(s+1)


def test_interval_endpoints_nega():
    assert from_digits(to_digits(F(-3, 4), N3)) == F(-3, 4)
    assert from_digits(to_digits(F(1, 4), N3)) == F(1, 4)


def test_representations_twins():
    assert [str(r) for r in representations(F(1, 3), T3)] == ["Δ3:1()", "Δ3:0(2)"]
    assert [str(r) for r in representations(F(-1, 12), N3)] == ["Δ-3:1(2,0)", "Δ-3:0(0,2)"]
    assert len(representations(F(1, 2), T3)) == 1
    assert len(representations(F(0), T3)) == 1


def test_canonicalize():
    assert str(canonicalize(parse_digits("Δ3:0(2)"))) == "Δ3:1()"
    assert str(canonicalize(parse_digits("Δ3:1,2(2)"))) == "Δ3:2()"
    assert str(canonicalize(parse_digits("Δ3:(2)"))) == "Δ3:(2)"  # x = 1 has no twin
    assert str(canonicalize(parse_digits("Δ-3:0(0,2)"))) == "Δ-3:1(2,0)"


def test_cylinders():
    assert cylinder((1,), T3) == (F(1, 3), F(2, 3))
    assert cylinder((2, 0), T3) == (F(2, 3), F(7, 9))
    # the nega-3-adic cylinder of prefix (1) is [-5/12, -1/12]
    assert cylinder((1,), N3) == (F(-5, 12), F(-1, 12))


def test_normal_form_equality():
    a = DigitString(T3, (1, 2, 1, 2), (1, 2, 1, 2))
    b = DigitString(T3, (), (1, 2))
    assert a == b and a.prefix == () and a.tail == (1, 2)
    assert DigitString(T3, (1, 0, 0), ()) == DigitString(T3, (1,), (0, 0))


# -- Cantor series ----------------------------------------------------------------


def test_cantor_values_against_oracle():
    sysm = NumberSystem.cantor(D23)
    d = DigitString(sysm, (1, 2), (1, 0))
    # bases 2,3,2,3,...; prefix then tail digits at positions 3, 4
    digits = [1, 2] + [1, 0] * 40
    bases = [2, 3] * 41
    assert abs(from_digits(d) - oracles.cantor_value(digits, bases)) < F(1, 6**38)


def test_alternating_cantor_examples():
    alt = NumberSystem.alternating_cantor(CantorBase.constant(3))
    assert from_digits(parse_digits("Δ-D:1(2,0)", alt)) == F(1, 3)
    assert str(to_digits(F(1, 3), alt)) == "Δ-D:1(2,0)"
    assert str(cantor_dual(parse_digits("ΔD:1()", NumberSystem.cantor(CantorBase.constant(3))))) == "Δ-D:1(2,0)"


def test_dp_map_switches_system():
    c = NumberSystem.cantor(CantorBase.constant(3))
    d = dp_map(parse_digits("ΔD:1()", c))
    assert d.system.kind.value == "alternating-cantor"
    assert d.digits(3) == (1, 0, 2)


def test_cantor_base_validation():
    with pytest.raises(ValidationError):
        CantorBase((), (1,))
    with pytest.raises(ValidationError):
        CantorBase((), ())
    assert CantorBase.from_json({"period": [2, 3]}) == D23


# -- nega-Q -----------------------------------------------------------------------


def test_nega_q_twin_strings():
    sysm = NumberSystem.nega_q(UNIFORM_Q)
    a = parse_digits("Δ-Q:1(2,0)", sysm)
    b = parse_digits("Δ-Q:0(0,2)", sysm)
    assert from_digits(a) == from_digits(b) == F(1, 3)
    assert canonicalize(a) == b


def test_nega_q_binary_string_value():
    q = QMatrix.uniform(2)
    d = parse_digits("Δ-Q:1()", NumberSystem.nega_q(q))
    assert from_digits(d) == F(5, 6)


def test_nega_q_digits_periodic_roundtrip():
    for x in (F(0), F(1, 7), F(2, 5), F(5, 6), F(1, 3)):
        d = nega_q_digits(x, UNIFORM_Q)
        assert from_digits(d) == x


def test_nega_q_domain():
    with pytest.raises(DomainError):
        nega_q_digits(F(1), UNIFORM_Q)


def test_qmatrix_validation():
    with pytest.raises(ValidationError):
        QMatrix(((F(1, 2), F(1, 3)),))
    with pytest.raises(ValidationError):
        QMatrix(((F(0), F(1)),))
    with pytest.raises(ValidationError):
        QMatrix.from_json({"columns": [{"m": 2, "q": ["1/2", "1/2"]}]})


# -- properties ---------------------------------------------------------------------

radix = st.integers(2, 7)
digit_lists = st.lists(st.integers(0, 6), max_size=6)


@given(radix, digit_lists, digit_lists)
def test_sadic_resum_matches_geometric_oracle(s, prefix, tail):
    prefix = [a % s for a in prefix]
    tail = [a % s for a in tail]
    assert from_digits(DigitString(NumberSystem.sadic(s), prefix, tail)) == oracles.sadic_value(prefix, tail, s)
    assert from_digits(DigitString(NumberSystem.nega_sadic(s), prefix, tail)) == oracles.nega_value(prefix, tail, s)


@given(radix, st.integers(0, 10**6), st.integers(1, 10**6))
def test_to_digits_matches_long_division(s, a, b):
    x = F(a % b, b)
    prefix, tail = oracles.long_division_digits(x, s)
    assert to_digits(x, NumberSystem.sadic(s)) == DigitString(NumberSystem.sadic(s), prefix, tail)


@given(radix, st.fractions(min_value=0, max_value=1, max_denominator=500))
def test_sadic_roundtrip(s, x):
    for d in representations(x, NumberSystem.sadic(s)):
        assert from_digits(d) == x


@given(radix, st.fractions(min_value=-1, max_value=1, max_denominator=500))
def test_nega_roundtrip(s, x):
    sysm = NumberSystem.nega_sadic(s)
    if not sysm.contains(x):
        return
    reps = representations(x, sysm)
    assert all(from_digits(d) == x for d in reps)
    assert canonicalize(reps[-1]) == reps[0]


@given(st.integers(0, 10**9))
def test_canonicalize_preserves_value(seed):
    rng = random.Random(seed)
    for sysm in (T3, N3, NumberSystem.cantor(D23), NumberSystem.alternating_cantor(D23), NumberSystem.nega_q(UNIFORM_Q)):
        d = random_digit_string(rng, sysm)
        c = canonicalize(d)
        assert from_digits(c) == from_digits(d)
        assert canonicalize(c) == c


@given(st.integers(0, 10**9))
def test_complement_value(seed):
    rng = random.Random(seed)
    d = random_digit_string(rng, T3)
    assert from_digits(complement(d)) == 1 - from_digits(d)
    n = d.with_system(N3)
    assert from_digits(complement(n)) == F(-1, 2) - from_digits(n)


@given(st.integers(0, 10**9))
def test_to_digits_of_random_string_value(seed):
    rng = random.Random(seed)
    for sysm in (NumberSystem.cantor(D23), NumberSystem.alternating_cantor(D23), NumberSystem.nega_q(UNIFORM_Q)):
        d = random_digit_string(rng, sysm)
        x = from_digits(d)
        if not sysm.contains(x):
            continue
        assert to_digits(x, sysm) == canonicalize(d)


@given(radix, digit_lists, digit_lists)
def test_radix_fast_path_matches_generic_resum(s, prefix, tail):
    from digitfn.numbers import resum

    prefix = [a % s for a in prefix]
    tail = [a % s for a in tail]
    for sysm in (NumberSystem.sadic(s), NumberSystem.nega_sadic(s)):
        assert from_digits(DigitString(sysm, prefix, tail)) == resum(prefix, tail, sysm.affine)
