#!/usr/bin/env python3
"""
IzhiRISC-V fixed-point arithmetic
Signed Q-format values for the three operand formats of the neuron extension
(Q4.11, Q7.8, Q15.16) with round-to-nearest-even on every width reduction and
saturation on overflow. Scalar helpers work on Python ints, the *_array
helpers on int64 numpy arrays and produce bit-identical results.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

class FixedPointRangeError(ValueError):
    """Real value does not fit the requested format"""

class FormatMismatchError(ValueError):
    """Operands of add/sub carry different formats"""

_SUPPORTED = {(4, 11, 16), (7, 8, 16), (15, 16, 32)}

@dataclass(frozen=True)
class QFormat:
    """Qm.n: 1 sign bit + m integer bits + n fraction bits"""
    int_bits: int
    frac_bits: int
    total_bits: int

    def __post_init__(self):
        if (self.int_bits, self.frac_bits, self.total_bits) not in _SUPPORTED:
            raise ValueError(
                f"Unsupported format Q{self.int_bits}.{self.frac_bits} "
                f"({self.total_bits} bits)"
            )

    @property
    def name(self) -> str:
        return f"Q{self.int_bits}.{self.frac_bits}"

    @property
    def raw_min(self) -> int:
        return -(1 << (self.total_bits - 1))

    @property
    def raw_max(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    @property
    def lsb(self) -> float:
        return 2.0 ** -self.frac_bits

    def __str__(self):
        return self.name

Q4_11 = QFormat(4, 11, 16)
Q7_8 = QFormat(7, 8, 16)
Q15_16 = QFormat(15, 16, 32)

def saturate(raw: int, fmt: QFormat) -> int:
    if raw > fmt.raw_max:
        return fmt.raw_max
    if raw < fmt.raw_min:
        return fmt.raw_min
    return raw

def round_shift(value: int, shift: int) -> int:
    """Divide by 2**shift rounding to nearest, ties to even. Negative shift scales up."""
    if shift <= 0:
        return value << -shift
    quotient, remainder = divmod(value, 1 << shift)
    half = 1 << (shift - 1)
    if remainder > half or (remainder == half and quotient & 1):
        quotient += 1
    return quotient

@dataclass(frozen=True)
class Fixed:
    raw: int
    fmt: QFormat

    def __post_init__(self):
        if not self.fmt.raw_min <= self.raw <= self.fmt.raw_max:
            raise FixedPointRangeError(f"raw {self.raw} does not fit {self.fmt}")

    def to_real(self) -> float:
        return self.raw / (1 << self.fmt.frac_bits)

    def to_fraction(self) -> Fraction:
        return Fraction(self.raw, 1 << self.fmt.frac_bits)

    def __float__(self):
        return self.to_real()

    def __str__(self):
        return f"raw={self.raw} fmt={self.fmt.name} val={self.to_real()!r}"

def from_real(x: Union[float, int, Fraction], fmt: QFormat) -> Fixed:
    scaled = Fraction(x) * (1 << fmt.frac_bits)
    raw = round(scaled)  # Fraction rounding is half-even
    if not fmt.raw_min <= raw <= fmt.raw_max:
        raise FixedPointRangeError(f"{float(x)} is outside the range of {fmt}")
    return Fixed(raw, fmt)

def from_raw(raw: int, fmt: QFormat) -> Fixed:
    """Interpret the low total_bits of raw as a two's complement word"""
    mask = (1 << fmt.total_bits) - 1
    raw &= mask
    if raw > fmt.raw_max:
        raw -= 1 << fmt.total_bits
    return Fixed(raw, fmt)

def to_word(value: Fixed) -> int:
    return value.raw & ((1 << value.fmt.total_bits) - 1)

def mul(a: Fixed, b: Fixed, out: QFormat) -> Fixed:
    product = a.raw * b.raw
    shift = a.fmt.frac_bits + b.fmt.frac_bits - out.frac_bits
    return Fixed(saturate(round_shift(product, shift), out), out)

def add(a: Fixed, b: Fixed) -> Fixed:
    if a.fmt != b.fmt:
        raise FormatMismatchError(f"cannot add {a.fmt} and {b.fmt}")
    return Fixed(saturate(a.raw + b.raw, a.fmt), a.fmt)

def sub(a: Fixed, b: Fixed) -> Fixed:
    if a.fmt != b.fmt:
        raise FormatMismatchError(f"cannot subtract {b.fmt} from {a.fmt}")
    return Fixed(saturate(a.raw - b.raw, a.fmt), a.fmt)

def convert(a: Fixed, out: QFormat) -> Fixed:
    shift = a.fmt.frac_bits - out.frac_bits
    return Fixed(saturate(round_shift(a.raw, shift), out), out)

def shr(a: Fixed, k: int) -> Fixed:
    if not 1 <= k <= 9:
        raise ValueError(f"shift amount must be in 1..9, got {k}")
    return Fixed(a.raw >> k, a.fmt)

# Vectorized raw helpers

def round_shift_array(values: np.ndarray, shift: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    if shift <= 0:
        return values << -shift
    quotient = values >> shift
    remainder = values & ((1 << shift) - 1)
    half = 1 << (shift - 1)
    round_up = (remainder > half) | ((remainder == half) & ((quotient & 1) == 1))
    return quotient + round_up.astype(np.int64)

def saturate_array(values: np.ndarray, fmt: QFormat) -> np.ndarray:
    return np.clip(np.asarray(values, dtype=np.int64), fmt.raw_min, fmt.raw_max)

def quantize_array(values, fmt: QFormat, clip: bool = False) -> np.ndarray:
    """Quantize reals to raws; np.rint rounds half to even and scaling by 2**n is exact"""
    scaled = np.rint(np.asarray(values, dtype=np.float64) * (1 << fmt.frac_bits))
    if clip:
        scaled = np.clip(scaled, fmt.raw_min, fmt.raw_max)
    elif scaled.size and (scaled.min() < fmt.raw_min or scaled.max() > fmt.raw_max):
        raise FixedPointRangeError(f"values outside the range of {fmt}")
    return scaled.astype(np.int64)

def raws_to_real(raws: np.ndarray, fmt: QFormat) -> np.ndarray:
    return np.asarray(raws, dtype=np.float64) / (1 << fmt.frac_bits)
