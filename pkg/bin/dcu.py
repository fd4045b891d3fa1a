#!/usr/bin/env python3
"""
IzhiRISC-V Neuron Decay Unit - golden model
Shift-and-add division approximator for dividers /2../8 and the one-step
exponential decay of a Q15.16 synaptic current built on it.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple, Union

import numpy as np
import pandas as pd

from fixedpoint import Fixed, Q15_16, saturate, saturate_array

# Divider -> arithmetic right shifts summed by the approximator
SHIFT_COMBOS: Dict[int, Tuple[int, ...]] = {
    2: (1,),
    3: (2, 4, 6, 8),
    4: (2,),
    5: (3, 4, 7, 8),
    6: (3, 5, 7, 9),
    7: (3, 6, 9),
    8: (3,),
}

# Approximation errors in percent as printed in the published divider table
PUBLISHED_AE: Dict[int, float] = {
    2: 0.0,
    3: 0.3906,
    4: 0.0,
    5: 0.3906,
    6: 12.1093,
    7: 0.1953,
    8: 0.0,
}

AE_TOLERANCE = 0.0001

@dataclass(frozen=True)
class DividerSelect:
    d: int

    def __post_init__(self):
        if self.d not in SHIFT_COMBOS:
            raise ValueError(f"unsupported divider /{self.d}; expected 2..8")

@dataclass(frozen=True)
class ShiftCombo:
    shifts: Tuple[int, ...]

    @property
    def factor(self) -> Fraction:
        return sum((Fraction(1, 1 << k) for k in self.shifts), Fraction(0))

    def __str__(self):
        return ",".join(str(k) for k in self.shifts)

DividerLike = Union[int, DividerSelect]

def _divider(d: DividerLike) -> int:
    return d.d if isinstance(d, DividerSelect) else DividerSelect(int(d)).d

def shift_combo(d: DividerLike) -> ShiftCombo:
    return ShiftCombo(SHIFT_COMBOS[_divider(d)])

def approx_factor(d: DividerLike) -> Fraction:
    return shift_combo(d).factor

def approx_divide(x: int, d: DividerLike) -> int:
    return sum(x >> k for k in SHIFT_COMBOS[_divider(d)])

def approx_divide_array(x: np.ndarray, d: DividerLike) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    total = np.zeros_like(x)
    for k in SHIFT_COMBOS[_divider(d)]:
        total += x >> k
    return total

def approximation_error(d: DividerLike) -> Fraction:
    """Relative error of the shift combo against 1/d, in percent, exact"""
    exact = Fraction(1, _divider(d))
    return abs(approx_factor(d) - exact) / exact * 100

def _h_shift(h_select: int) -> int:
    if h_select not in (0, 1):
        raise ValueError("h_select is a single bit")
    return 3 if h_select else 1

def decay_step(i_syn: Fixed, d: DividerLike, h_select: int) -> Fixed:
    """Decayed current i - (i/d)*h, not the delta"""
    if i_syn.fmt != Q15_16:
        raise ValueError("i_syn must be Q15.16")
    decrement = approx_divide(i_syn.raw, d) >> _h_shift(h_select)
    return Fixed(saturate(i_syn.raw - decrement, Q15_16), Q15_16)

def decay_array(i_syn: np.ndarray, d: DividerLike, h_select: int) -> np.ndarray:
    decrement = approx_divide_array(i_syn, d) >> _h_shift(h_select)
    return saturate_array(np.asarray(i_syn, dtype=np.int64) - decrement, Q15_16)

def dcu_table() -> pd.DataFrame:
    """Divider table with computed and published approximation errors"""
    rows = []
    for d in sorted(SHIFT_COMBOS):
        combo = shift_combo(d)
        ae = float(approximation_error(d))
        published = PUBLISHED_AE[d]
        rows.append({
            'divider': f"/{d}",
            'shifts': str(combo),
            'factor': float(combo.factor),
            'ae_percent': round(ae, 7),
            'published_ae_percent': published,
            'note': '*' if abs(ae - published) > AE_TOLERANCE else '',
        })
    return pd.DataFrame(rows)
