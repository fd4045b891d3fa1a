from fractions import Fraction

import numpy as np
import pytest

from dcu import (
    AE_TOLERANCE, PUBLISHED_AE, SHIFT_COMBOS, DividerSelect, approx_divide, approx_divide_array,
    approx_factor, approximation_error, dcu_table, decay_array, decay_step, shift_combo,
)
from fixedpoint import Fixed, Q7_8, Q15_16, from_real

DIVIDERS = sorted(SHIFT_COMBOS)

def test_combo_table():
    assert str(shift_combo(7)) == "3,6,9"
    assert shift_combo(DividerSelect(3)).shifts == (2, 4, 6, 8)
    assert approx_factor(7) == Fraction(73, 512)
    assert float(approx_factor(7)) == 0.142578125

@pytest.mark.parametrize("d", [0, 1, 9, -2])
def test_unsupported_divider(d):
    with pytest.raises(ValueError):
        DividerSelect(d)
    with pytest.raises(ValueError):
        approx_divide(1024, d)

def test_approx_divide_examples():
    x = 123456
    assert approx_divide(x, 7) == (x >> 3) + (x >> 6) + (x >> 9)
    assert approx_divide(65536, 4) == 16384
    for d in DIVIDERS:
        assert approx_divide(0, d) == 0

@pytest.mark.parametrize("d", [2, 4, 8])
def test_power_of_two_dividers_are_exact(d):
    for x in range(-4096, 4096, d * 3):
        assert approx_divide(x, d) == x // d

@pytest.mark.parametrize("d", DIVIDERS)
def test_approx_divide_error_bound(d):
    rng = np.random.default_rng(d)
    ae = approximation_error(d) / 100
    n_shifts = len(SHIFT_COMBOS[d])
    for x in rng.integers(-(1 << 31), 1 << 31, size=2000).tolist():
        assert abs(approx_divide(x, d) * d - x) <= d * ae * abs(x) + d * n_shifts

def test_approximation_error_values():
    assert approximation_error(2) == 0
    assert approximation_error(7) == Fraction(100, 512)
    assert float(approximation_error(7)) == 0.1953125
    for d in (3, 5, 6):
        assert approximation_error(d) == Fraction(100, 256)

@pytest.mark.parametrize("d", [2, 3, 4, 5, 7, 8])
def test_published_errors_reproduced(d):
    assert abs(float(approximation_error(d)) - PUBLISHED_AE[d]) <= AE_TOLERANCE
    assert approximation_error(d) < Fraction(1, 2)

def test_div6_published_value_is_flagged():
    table = dcu_table().set_index('divider')
    assert table.loc['/6', 'note'] == '*'
    assert table.loc['/6', 'ae_percent'] == pytest.approx(0.390625)
    assert (table.drop('/6')['note'] == '').all()

def test_table_layout():
    table = dcu_table()
    assert list(table.columns) == ['divider', 'shifts', 'factor', 'ae_percent',
                                   'published_ae_percent', 'note']
    assert table['divider'].tolist() == [f"/{d}" for d in DIVIDERS]
    assert table.set_index('divider').loc['/7', 'ae_percent'] == pytest.approx(0.1953125)

def test_decay_examples():
    assert decay_step(from_real(0.0, Q15_16), 5, 0).raw == 0
    result = decay_step(from_real(16.0, Q15_16), 2, 0)
    assert abs(result.to_real() - 12.0) <= 2 * Q15_16.lsb
    result = decay_step(from_real(16.0, Q15_16), 2, 1)
    assert result.to_real() == 15.0

def test_decay_requires_q15_16():
    with pytest.raises(ValueError):
        decay_step(Fixed(256, Q7_8), 2, 0)
    with pytest.raises(ValueError):
        decay_step(Fixed(256, Q15_16), 2, 2)

@pytest.mark.parametrize("d", DIVIDERS)
@pytest.mark.parametrize("h_select", [0, 1])
def test_decay_sign_symmetry(d, h_select):
    # arithmetic shifts floor, so each shift in the combo can cost an LSB
    bound = len(SHIFT_COMBOS[d]) + 1
    rng = np.random.default_rng(40 + d)
    for x in rng.integers(-(1 << 30), 1 << 30, size=500).tolist() + list(range(-20, 21)):
        pos = decay_step(Fixed(x, Q15_16), d, h_select).raw
        neg = decay_step(Fixed(-x, Q15_16), d, h_select).raw
        assert abs(pos + neg) <= bound

@pytest.mark.parametrize("d", DIVIDERS)
@pytest.mark.parametrize("h_select", [0, 1])
def test_decay_contracts(d, h_select):
    rng = np.random.default_rng(d * 10 + h_select)
    values = np.concatenate([rng.integers(-(1 << 31), (1 << 31) - 1, size=5000),
                             np.arange(-64, 65)])
    decayed = decay_array(values, d, h_select)
    assert (np.abs(decayed) <= np.abs(values) + 1).all()
    positive = values > 0
    assert (decayed[positive] <= values[positive]).all()

@pytest.mark.parametrize("d", DIVIDERS)
def test_repeated_decay_settles_near_zero(d):
    h_select = 1
    current = np.array([1 << 20, 16 << 16, 12345], dtype=np.int64)
    previous = current
    for _ in range(5000):
        current = decay_array(current, d, h_select)
        assert (current <= previous).all()
        previous = current
    floor = 1 << (max(SHIFT_COMBOS[d]) + 3)
    assert (current >= 0).all() and (current < floor).all()

def test_array_matches_scalar():
    rng = np.random.default_rng(21)
    values = rng.integers(-(1 << 31), (1 << 31) - 1, size=3000)
    for d in DIVIDERS:
        assert approx_divide_array(values, d).tolist() == [approx_divide(int(x), d) for x in values]
        for h_select in (0, 1):
            expected = [decay_step(Fixed(int(x), Q15_16), d, h_select).raw for x in values]
            assert decay_array(values, d, h_select).tolist() == expected
