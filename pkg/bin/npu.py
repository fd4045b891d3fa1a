#!/usr/bin/env python3
"""
IzhiRISC-V Neuron Processing Unit - golden model
One forward-Euler Izhikevich update per call, in fixed point:

    v' = (0.04 v^2 + 5 v + 140 - u + I) h + v
    u' = a h (b v - u) + u

Spike detection runs on the incoming v (v > 30 mV): a spiking step only
resets (v <- c, u <- u + d). With the pin bit set, the integrated v is floored
at c. A double-precision oracle with the same rules is provided for comparison.
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, List, Tuple, Union

import numpy as np

from fixedpoint import (
    Fixed, Q4_11, Q7_8, Q15_16, from_raw, from_real, to_word,
    round_shift, saturate, round_shift_array, saturate_array,
)

logger = logging.getLogger(__name__)

V_TH = from_real(30.0, Q7_8)

# 0.04 held at frac 16 (raw 2621); all other constants are exact integers
COEF_004_RAW = 2621
COEF_004_FRAC = 16

H_SHIFTS = {0: 1, 1: 3}   # h_select -> right shift (0.5 ms, 0.125 ms)
H_VALUES = {0: 0.5, 1: 0.125}

@dataclass(frozen=True)
class NeuronParams:
    a: Fixed
    b: Fixed
    c: Fixed
    d: Fixed

    def __post_init__(self):
        for name, fmt in (('a', Q4_11), ('b', Q4_11), ('c', Q7_8), ('d', Q4_11)):
            if getattr(self, name).fmt != fmt:
                raise ValueError(f"parameter {name} must be {fmt}")

    @classmethod
    def from_real(cls, a: float, b: float, c: float, d: float) -> 'NeuronParams':
        return cls(from_real(a, Q4_11), from_real(b, Q4_11),
                   from_real(c, Q7_8), from_real(d, Q4_11))

    def as_real(self) -> Tuple[float, float, float, float]:
        return (self.a.to_real(), self.b.to_real(), self.c.to_real(), self.d.to_real())

@dataclass(frozen=True)
class NmConfig:
    """NPU/DCU configuration registers"""
    params: NeuronParams
    h_select: int = 0
    pin: int = 0

    def __post_init__(self):
        if self.h_select not in (0, 1) or self.pin not in (0, 1):
            raise ValueError("h_select and pin are single bits")

    @property
    def h_shift(self) -> int:
        return H_SHIFTS[self.h_select]

    @property
    def h(self) -> float:
        return H_VALUES[self.h_select]

    def to_words(self) -> Tuple[int, int, int]:
        """Register images for nmldl rs1 (b:a), nmldl rs2 (d:c) and nmldh rs1"""
        p = self.params
        ab = (to_word(p.b) << 16) | to_word(p.a)
        dc = (to_word(p.d) << 16) | to_word(p.c)
        return ab, dc, (self.pin << 1) | self.h_select

    @classmethod
    def from_words(cls, ab: int, dc: int, hp: int = 0) -> 'NmConfig':
        params = params_from_words(ab, dc)
        return cls(params, hp & 1, (hp >> 1) & 1)

def params_from_words(ab: int, dc: int) -> NeuronParams:
    return NeuronParams(
        a=from_raw(ab & 0xFFFF, Q4_11),
        b=from_raw((ab >> 16) & 0xFFFF, Q4_11),
        c=from_raw(dc & 0xFFFF, Q7_8),
        d=from_raw((dc >> 16) & 0xFFFF, Q4_11),
    )

def default_config() -> NmConfig:
    return NmConfig(NeuronParams.from_real(0.02, 0.2, -65.0, 8.0))

def load_params(cfg: NmConfig, a: Fixed, b: Fixed, c: Fixed, d: Fixed) -> NmConfig:
    return replace(cfg, params=NeuronParams(a, b, c, d))

def load_h(cfg: NmConfig, h_select: int, pin: int) -> NmConfig:
    return replace(cfg, h_select=h_select, pin=pin)

@dataclass(frozen=True)
class VUWord:
    v: Fixed
    u: Fixed

    def pack(self) -> int:
        return (to_word(self.v) << 16) | to_word(self.u)

    @classmethod
    def unpack(cls, word: int) -> 'VUWord':
        return cls(from_raw((word >> 16) & 0xFFFF, Q7_8), from_raw(word & 0xFFFF, Q7_8))

    @classmethod
    def from_real(cls, v: float, u: float) -> 'VUWord':
        return cls(from_real(v, Q7_8), from_real(u, Q7_8))

@dataclass(frozen=True)
class StepResult:
    vu: VUWord
    spike: bool

def _v_accumulator(v, u, i_syn, h_shift):
    """Integrated v at frac 32 + h_shift, exact (no bits dropped)"""
    rate = (COEF_004_RAW * v * v
            + ((5 * v - u) << 24)
            + (140 << 32)
            + (i_syn << 16))
    return rate + (v << (24 + h_shift))

def _u_accumulator(v, u, a, b, h_shift):
    """Integrated u at frac 30 + h_shift, exact"""
    drive = b * v - (u << 11)
    return a * drive + (u << (22 + h_shift))

def izh_step(vu: VUWord, i_syn: Fixed, cfg: NmConfig) -> StepResult:
    if i_syn.fmt != Q15_16:
        raise ValueError("i_syn must be Q15.16")
    p = cfg.params
    v, u = vu.v.raw, vu.u.raw

    if v > V_TH.raw:
        d_q78 = round_shift(p.d.raw, Q4_11.frac_bits - Q7_8.frac_bits)
        u_new = saturate(u + d_q78, Q7_8)
        return StepResult(VUWord(p.c, Fixed(u_new, Q7_8)), True)

    h_shift = cfg.h_shift
    v_new = saturate(round_shift(_v_accumulator(v, u, i_syn.raw, h_shift), 24 + h_shift), Q7_8)
    u_new = saturate(round_shift(_u_accumulator(v, u, p.a.raw, p.b.raw, h_shift), 22 + h_shift), Q7_8)
    if cfg.pin and v_new < p.c.raw:
        v_new = p.c.raw
    return StepResult(VUWord(Fixed(v_new, Q7_8), Fixed(u_new, Q7_8)), False)

def izh_step_array(v: np.ndarray, u: np.ndarray, i_syn: np.ndarray,
                   a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray,
                   h_shift: int, pin: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized izh_step over raw int64 arrays; bit-identical to the scalar path"""
    v = np.asarray(v, dtype=np.int64)
    u = np.asarray(u, dtype=np.int64)
    i_syn = np.asarray(i_syn, dtype=np.int64)

    spike = v > V_TH.raw
    v_new = saturate_array(round_shift_array(_v_accumulator(v, u, i_syn, h_shift), 24 + h_shift), Q7_8)
    u_new = saturate_array(round_shift_array(_u_accumulator(v, u, a, b, h_shift), 22 + h_shift), Q7_8)
    if pin:
        v_new = np.maximum(v_new, c)

    u_reset = saturate_array(u + round_shift_array(d, Q4_11.frac_bits - Q7_8.frac_bits), Q7_8)
    v_out = np.where(spike, c, v_new)
    u_out = np.where(spike, u_reset, u_new)
    return v_out, u_out, spike

def izh_step_oracle(v: float, u: float, i_syn: float,
                    params: Tuple[float, float, float, float], h: float,
                    pin: bool = False) -> Tuple[float, float, bool]:
    a, b, c, d = params
    if v > 30.0:
        return c, u + d, True
    v_new = (0.04 * v * v + 5.0 * v + 140.0 - u + i_syn) * h + v
    u_new = a * h * (b * v - u) + u
    if pin and v_new < c:
        v_new = c
    return v_new, u_new, False

def izh_step_oracle_array(v, u, i_syn, a, b, c, d, h: float, pin: bool = False):
    spike = v > 30.0
    v_new = (0.04 * v * v + 5.0 * v + 140.0 - u + i_syn) * h + v
    u_new = a * h * (b * v - u) + u
    if pin:
        v_new = np.maximum(v_new, c)
    return np.where(spike, c, v_new), np.where(spike, u + d, u_new), spike

# Test vectors: "vu_in i_syn ab:dc:hp vu_out spike", hexadecimal raws

TestVector = Tuple[VUWord, Fixed, NmConfig, StepResult]

def format_test_vector(vu: VUWord, i_syn: Fixed, cfg: NmConfig, result: StepResult) -> str:
    ab, dc, hp = cfg.to_words()
    return (f"{vu.pack():08x} {to_word(i_syn):08x} {ab:08x}:{dc:08x}:{hp:x} "
            f"{result.vu.pack():08x} {int(result.spike)}")

def parse_test_vector(line: str) -> TestVector:
    fields = line.split()
    if len(fields) != 5:
        raise ValueError(f"expected 5 fields, got {len(fields)}: {line!r}")
    ab, dc, hp = (int(part, 16) for part in fields[2].split(':'))
    return (VUWord.unpack(int(fields[0], 16)),
            from_raw(int(fields[1], 16), Q15_16),
            NmConfig.from_words(ab, dc, hp),
            StepResult(VUWord.unpack(int(fields[3], 16)), fields[4] == '1'))

def write_test_vectors(path: Union[str, Path], vectors: Iterable[TestVector]) -> int:
    count = 0
    with open(path, 'w') as f:
        f.write("# vu_in i_syn ab:dc:hp vu_out spike\n")
        for vu, i_syn, cfg, result in vectors:
            f.write(format_test_vector(vu, i_syn, cfg, result) + "\n")
            count += 1
    logger.info(f"Wrote {count} NPU test vectors to {path}")
    return count

def read_test_vectors(path: Union[str, Path]) -> List[TestVector]:
    vectors = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith('#'):
                vectors.append(parse_test_vector(line))
    return vectors

def random_test_vectors(rng: np.random.Generator, count: int) -> List[TestVector]:
    """Random states and parameters across the full operand ranges, with golden results"""
    vectors = []
    for _ in range(count):
        params = NeuronParams(
            a=Fixed(int(rng.integers(0, 512)), Q4_11),
            b=Fixed(int(rng.integers(0, 1024)), Q4_11),
            c=Fixed(int(rng.integers(-80 * 256, -40 * 256)), Q7_8),
            d=Fixed(int(rng.integers(0, 1 << 15)), Q4_11),
        )
        cfg = NmConfig(params, int(rng.integers(0, 2)), int(rng.integers(0, 2)))
        vu = VUWord(Fixed(int(rng.integers(-80 * 256, 40 * 256)), Q7_8),
                    Fixed(int(rng.integers(-30 * 256, 30 * 256)), Q7_8))
        i_syn = Fixed(int(rng.integers(-40 << 16, 40 << 16)), Q15_16)
        vectors.append((vu, i_syn, cfg, izh_step(vu, i_syn, cfg)))
    return vectors
