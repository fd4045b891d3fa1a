#!/usr/bin/env python3
"""
IzhiRISC-V network simulator
Direct-mode SNN engine that drives the NPU/DCU golden models over whole
networks, in fixed point or in double precision for comparison.

Workloads:
  - 80-20 cortical network: 800 excitatory + 200 inhibitory neurons, all-to-all
    random weights, Gaussian thalamic input, two 0.5 ms substeps per 1 ms tick
  - Sudoku solver: 729-neuron layered winner-takes-all network, one neuron per
    (row, column, digit), inhibiting its cell, row, column and box competitors

Per tick, for every neuron:
  1. i_syn decays through the DCU when a divider is configured, else restarts at 0
  2. external input, then the previous tick's presynaptic spikes in ascending
     index order, are added with Q15.16 saturation
  3. the NPU update runs `substeps` times; a spike ends the neuron's tick
"""

import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from dcu import SHIFT_COMBOS, decay_array
from fixedpoint import (
    Q4_11, Q7_8, Q15_16, quantize_array, round_shift_array, saturate, saturate_array,
)
from npu import H_SHIFTS, H_VALUES, izh_step_array, izh_step_oracle_array

logger = logging.getLogger(__name__)

MODES = ('fixed', 'oracle')
SUBSTEPS_PER_TICK = {0: 2, 1: 8}   # h_select -> NPU updates per 1 ms tick

class PuzzleError(ValueError):
    """Malformed or self-contradictory Sudoku puzzle"""

# Random numbers

class NetRandom:
    """Seedable stream: PCG64 raw 64-bit words, 53-bit uniforms, Box-Muller normals

    Uniform = (raw >> 11) * 2**-53 in [0, 1). Normals consume uniforms in pairs
    (u1, u2): z0 = sqrt(-2 ln(1 - u1)) cos(2 pi u2), z1 = ... sin(2 pi u2).
    """

    def __init__(self, seed: int, stream: int = 0):
        sequence = np.random.SeedSequence(seed, spawn_key=(stream,))
        self._bitgen = np.random.PCG64(sequence)

    def raw(self, count: int) -> np.ndarray:
        return self._bitgen.random_raw(count)

    def uniform(self, count: int) -> np.ndarray:
        return (self.raw(count) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53

    def normal(self, count: int) -> np.ndarray:
        pairs = (count + 1) // 2
        u1 = self.uniform(pairs)
        u2 = self.uniform(pairs)
        radius = np.sqrt(-2.0 * np.log1p(-u1))
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:count]

# Network description

@dataclass
class InputModel:
    """Per-tick external current: gauss*N(0,1) + uniform*U[0,1) + offset + bias"""
    gauss: np.ndarray
    uniform: np.ndarray
    offset: np.ndarray
    bias: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> 'InputModel':
        return cls(np.zeros(n), np.zeros(n), np.zeros(n), np.zeros(n))

    def draw(self, rng: NetRandom) -> np.ndarray:
        n = len(self.bias)
        current = self.bias + self.offset
        if self.gauss.any():
            current = current + self.gauss * rng.normal(n)
        if self.uniform.any():
            current = current + self.uniform * rng.uniform(n)
        return current

@dataclass
class NetworkSpec:
    """Topology, parameters and drive; raw arrays for fixed mode, reals for oracle mode

    weights[i, j] is the synapse from presynaptic j to postsynaptic i.
    """
    name: str
    n: int
    params_raw: Dict[str, np.ndarray]
    params_real: Dict[str, np.ndarray]
    weights_raw: np.ndarray
    weights_real: np.ndarray
    inputs: InputModel
    v0_raw: np.ndarray
    u0_raw: np.ndarray
    v0_real: np.ndarray
    u0_real: np.ndarray
    decay: Optional[int] = None
    h_select: int = 0
    pin: int = 0
    substeps: int = 2
    seed: int = 0
    groups: Dict[str, Tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.weights_raw.shape != (self.n, self.n) or self.weights_real.shape != (self.n, self.n):
            raise ValueError(f"weights must be {self.n}x{self.n}")
        if self.decay is not None and self.decay not in SHIFT_COMBOS:
            raise ValueError(f"unsupported decay divider /{self.decay}")
        if SUBSTEPS_PER_TICK[self.h_select] != self.substeps:
            raise ValueError(
                f"{self.substeps} substeps do not cover 1 ms at h={H_VALUES[self.h_select]} ms"
            )
        for key in ('a', 'b', 'c', 'd'):
            if len(self.params_raw[key]) != self.n or len(self.params_real[key]) != self.n:
                raise ValueError(f"parameter {key} must have {self.n} entries")

@dataclass
class NetState:
    v: np.ndarray
    u: np.ndarray
    i_syn: np.ndarray
    spiked: np.ndarray
    t: int = 0
    mode: str = 'fixed'

    def vu_words(self) -> np.ndarray:
        if self.mode != 'fixed':
            raise ValueError("VU words exist only in fixed mode")
        return ((self.v & 0xFFFF) << 16) | (self.u & 0xFFFF)

def initial_state(spec: NetworkSpec, mode: str = 'fixed') -> NetState:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == 'fixed':
        return NetState(spec.v0_raw.copy(), spec.u0_raw.copy(), np.zeros(spec.n, dtype=np.int64),
                        np.zeros(spec.n, dtype=bool), 0, mode)
    return NetState(spec.v0_real.copy(), spec.u0_real.copy(), np.zeros(spec.n),
                    np.zeros(spec.n, dtype=bool), 0, mode)

def _initial_u_raw(b_raw: np.ndarray, v0_raw: np.ndarray) -> np.ndarray:
    # b (Q4.11) * v (Q7.8) -> Q7.8
    return saturate_array(round_shift_array(b_raw * v0_raw, Q4_11.frac_bits), Q7_8)

# Stepping

def accumulate_synaptic(i_syn: np.ndarray, weights: np.ndarray, fired: np.ndarray) -> np.ndarray:
    """Add weights[:, j] for each fired j in ascending order with Q15.16 saturation after every add"""
    if len(fired) == 0:
        return i_syn
    contributions = weights[:, fired]
    prefix = np.cumsum(contributions, axis=1) + i_syn[:, None]
    exact = (prefix.max(axis=1) <= Q15_16.raw_max) & (prefix.min(axis=1) >= Q15_16.raw_min)
    result = prefix[:, -1].copy()
    # rows that touched a bound need the sequential saturating order
    for row in np.flatnonzero(~exact):
        acc = int(i_syn[row])
        for w in contributions[row]:
            acc = saturate(acc + int(w), Q15_16)
        result[row] = acc
    return result

def step_network(spec: NetworkSpec, state: NetState, rng: NetRandom) -> Tuple[NetState, np.ndarray]:
    """Advance one 1 ms tick; returns the new state and the ascending indices that spiked"""
    fired_prev = np.flatnonzero(state.spiked)
    external = spec.inputs.draw(rng)

    if state.mode == 'fixed':
        p = spec.params_raw
        if spec.decay is not None:
            i_syn = decay_array(state.i_syn, spec.decay, spec.h_select)
        else:
            i_syn = np.zeros(spec.n, dtype=np.int64)
        i_syn = saturate_array(i_syn + quantize_array(external, Q15_16, clip=True), Q15_16)
        i_syn = accumulate_synaptic(i_syn, spec.weights_raw, fired_prev)
        h_shift = H_SHIFTS[spec.h_select]

        def update(v, u):
            return izh_step_array(v, u, i_syn, p['a'], p['b'], p['c'], p['d'], h_shift, spec.pin)
    else:
        p = spec.params_real
        h = H_VALUES[spec.h_select]
        if spec.decay is not None:
            i_syn = state.i_syn - state.i_syn / spec.decay * h
        else:
            i_syn = np.zeros(spec.n)
        i_syn = i_syn + external
        if len(fired_prev):
            i_syn = i_syn + spec.weights_real[:, fired_prev].sum(axis=1)

        def update(v, u):
            return izh_step_oracle_array(v, u, i_syn, p['a'], p['b'], p['c'], p['d'], h, bool(spec.pin))

    v, u = state.v, state.u
    active = np.ones(spec.n, dtype=bool)
    spiked = np.zeros(spec.n, dtype=bool)
    for _ in range(spec.substeps):
        v_new, u_new, spike = update(v, u)
        v = np.where(active, v_new, v)
        u = np.where(active, u_new, u)
        spike &= active
        spiked |= spike
        active &= ~spike

    new_state = NetState(v, u, i_syn, spiked, state.t + 1, state.mode)
    return new_state, np.flatnonzero(spiked)

# Rasters and analysis

@dataclass
class SpikeRaster:
    """Spike events sorted by tick, then neuron index"""
    t: np.ndarray
    neuron: np.ndarray
    n: int = 0
    ticks: int = 0

    def __len__(self):
        return len(self.t)

    @classmethod
    def from_ticks(cls, per_tick: Sequence[np.ndarray], n: int) -> 'SpikeRaster':
        if not per_tick:
            return cls(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), n, 0)
        t = np.concatenate([np.full(len(s), k, dtype=np.int64) for k, s in enumerate(per_tick)])
        neuron = np.concatenate([np.asarray(s, dtype=np.int64) for s in per_tick])
        return cls(t, neuron, n, len(per_tick))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'t': self.t, 'neuron': self.neuron})

def run_simulation(spec: NetworkSpec, ticks: int, mode: str = 'fixed') -> SpikeRaster:
    """Run `ticks` 1 ms ticks; both modes consume the same input stream for a given seed"""
    rng = NetRandom(spec.seed, stream=1)
    state = initial_state(spec, mode)
    per_tick: List[np.ndarray] = []
    for _ in range(ticks):
        state, spikes = step_network(spec, state, rng)
        per_tick.append(spikes)
    raster = SpikeRaster.from_ticks(per_tick, spec.n)
    logger.info(f"{spec.name} ({mode}): {ticks} ticks, {len(raster)} spikes")
    return raster

def isi_histogram(raster: SpikeRaster, bin_ms: float = 5.0, max_ms: float = 200.0) -> pd.DataFrame:
    """Pooled per-neuron inter-spike intervals, binned over [0, max_ms], unit mass"""
    if bin_ms <= 0:
        raise ValueError("bin_ms must be positive")
    n_bins = int(np.ceil(max_ms / bin_ms))
    edges = np.arange(n_bins + 1) * float(bin_ms)
    order = np.lexsort((raster.t, raster.neuron))
    t = raster.t[order]
    neuron = raster.neuron[order]
    same = neuron[1:] == neuron[:-1]
    isis = (t[1:] - t[:-1])[same]
    counts, _ = np.histogram(isis, bins=edges)
    total = counts.sum()
    mass = counts / total if total else np.zeros(n_bins)
    return pd.DataFrame({'bin_start_ms': edges[:-1], 'mass': mass})

def histogram_distance(h1: pd.DataFrame, h2: pd.DataFrame) -> float:
    """L1 distance between two unit-mass histograms over the same bins"""
    if not np.array_equal(h1['bin_start_ms'].to_numpy(), h2['bin_start_ms'].to_numpy()):
        raise ValueError("histograms use different bins")
    return float(np.abs(h1['mass'].to_numpy() - h2['mass'].to_numpy()).sum())

def population_rates(raster: SpikeRaster, groups: Dict[str, Tuple[int, int]]) -> Dict[str, float]:
    """Mean firing rate in Hz per [start, stop) neuron group"""
    rates = {}
    seconds = raster.ticks / 1000.0
    for name, (start, stop) in groups.items():
        count = int(((raster.neuron >= start) & (raster.neuron < stop)).sum())
        rates[name] = count / ((stop - start) * seconds) if seconds else 0.0
    return rates

# 80-20 network

N_EXCITATORY = 800
N_INHIBITORY = 200

def excitatory_params(r: np.ndarray) -> Dict[str, np.ndarray]:
    """Regular spiking at r=0 shading to chattering at r=1"""
    return {'a': np.full_like(r, 0.02), 'b': np.full_like(r, 0.2),
            'c': -65.0 + 15.0 * r ** 2, 'd': 8.0 - 6.0 * r ** 2}

def inhibitory_params(r: np.ndarray) -> Dict[str, np.ndarray]:
    """Fast spiking at r=0 shading to low-threshold spiking at r=1"""
    return {'a': 0.02 + 0.08 * r, 'b': 0.25 - 0.05 * r,
            'c': np.full_like(r, -65.0), 'd': np.full_like(r, 2.0)}

def _quantize_params(real: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    return {
        'a': quantize_array(real['a'], Q4_11),
        'b': quantize_array(real['b'], Q4_11),
        'c': quantize_array(real['c'], Q7_8),
        'd': quantize_array(real['d'], Q4_11),
    }

def build_8020(seed: int = 0) -> NetworkSpec:
    rng = NetRandom(seed, stream=0)
    n = N_EXCITATORY + N_INHIBITORY
    re = rng.uniform(N_EXCITATORY)
    ri = rng.uniform(N_INHIBITORY)
    w_exc = 0.5 * rng.uniform(n * N_EXCITATORY).reshape(n, N_EXCITATORY)
    w_inh = -rng.uniform(n * N_INHIBITORY).reshape(n, N_INHIBITORY)
    weights_real = np.hstack([w_exc, w_inh])

    exc, inh = excitatory_params(re), inhibitory_params(ri)
    params_real = {k: np.concatenate([exc[k], inh[k]]) for k in ('a', 'b', 'c', 'd')}
    params_raw = _quantize_params(params_real)

    inputs = InputModel.zeros(n)
    inputs.gauss[:N_EXCITATORY] = 5.0
    inputs.gauss[N_EXCITATORY:] = 2.0

    v0_real = np.full(n, -65.0)
    v0_raw = quantize_array(v0_real, Q7_8)
    spec = NetworkSpec(
        name='80-20', n=n,
        params_raw=params_raw, params_real=params_real,
        weights_raw=quantize_array(weights_real, Q15_16), weights_real=weights_real,
        inputs=inputs,
        v0_raw=v0_raw, u0_raw=_initial_u_raw(params_raw['b'], v0_raw),
        v0_real=v0_real, u0_real=params_real['b'] * v0_real,
        decay=None, h_select=0, pin=0, substeps=2, seed=seed,
        groups={'excitatory': (0, N_EXCITATORY), 'inhibitory': (N_EXCITATORY, n)},
    )
    logger.info(f"Built 80-20 network (seed {seed}): {N_EXCITATORY} excitatory, {N_INHIBITORY} inhibitory")
    return spec

# Sudoku network

SUDOKU_NEURONS = 729

@dataclass(frozen=True)
class SudokuPuzzle:
    cells: Tuple[int, ...]

    def __post_init__(self):
        if len(self.cells) != 81 or any(not 0 <= c <= 9 for c in self.cells):
            raise PuzzleError("a puzzle has 81 cells holding 0..9")

    @classmethod
    def from_string(cls, text: str) -> 'SudokuPuzzle':
        text = text.strip()
        if len(text) != 81:
            raise PuzzleError(f"expected 81 characters, got {len(text)}")
        cells = []
        for ch in text:
            if ch in '.0':
                cells.append(0)
            elif ch in '123456789':
                cells.append(int(ch))
            else:
                raise PuzzleError(f"unexpected character {ch!r}")
        return cls(tuple(cells))

    def to_string(self) -> str:
        return ''.join(str(c) if c else '.' for c in self.cells)

    @property
    def n_clues(self) -> int:
        return sum(1 for c in self.cells if c)

    def is_consistent(self) -> bool:
        return _units_ok(self.cells, allow_blank=True)

def _units() -> List[List[int]]:
    rows = [[r * 9 + c for c in range(9)] for r in range(9)]
    cols = [[r * 9 + c for r in range(9)] for c in range(9)]
    boxes = [[(br * 3 + r) * 9 + bc * 3 + c for r in range(3) for c in range(3)]
             for br in range(3) for bc in range(3)]
    return rows + cols + boxes

UNITS = _units()

def _units_ok(cells: Sequence[int], allow_blank: bool) -> bool:
    for unit in UNITS:
        values = [cells[i] for i in unit if cells[i]]
        if len(values) != len(set(values)):
            return False
        if not allow_blank and len(values) != 9:
            return False
    return True

def neuron_index(row: int, col: int, digit: int) -> int:
    return (row * 9 + col) * 9 + (digit - 1)

def inhibition_targets(row: int, col: int, digit: int) -> List[int]:
    """Competitors of (row, col, digit): the cell's other digits, then same digit in row, column, box"""
    targets = [neuron_index(row, col, k) for k in range(1, 10) if k != digit]
    targets += [neuron_index(row, c, digit) for c in range(9) if c != col]
    targets += [neuron_index(r, col, digit) for r in range(9) if r != row]
    br, bc = 3 * (row // 3), 3 * (col // 3)
    targets += [neuron_index(r, c, digit) for r in range(br, br + 3) for c in range(bc, bc + 3)
                if r != row and c != col]
    return targets

@dataclass(frozen=True)
class SudokuDrive:
    """Tuned drive constants for the Sudoku network"""
    version: str = '2'
    a: float = 0.1
    b: float = 0.2
    c: float = -65.0
    d: float = 2.0
    inhibitory_weight: float = -16.0
    clue_bias: float = 12.0
    noise_scale: float = 8.0
    noise_offset: float = 0.0
    decay_divider: int = 2
    h_select: int = 0
    substeps: int = 2
    pin: int = 1
    window: int = 50
    stable_windows: int = 3
    max_ticks: int = 50_000

    def __post_init__(self):
        if self.decay_divider not in SHIFT_COMBOS:
            raise ValueError(f"unsupported decay divider /{self.decay_divider}")
        if self.h_select not in SUBSTEPS_PER_TICK or self.pin not in (0, 1):
            raise ValueError("h_select and pin are single bits")
        if SUBSTEPS_PER_TICK[self.h_select] != self.substeps:
            raise ValueError(f"{self.substeps} substeps do not cover 1 ms at h={H_VALUES[self.h_select]} ms")
        for key in ('window', 'stable_windows', 'max_ticks'):
            if getattr(self, key) <= 0:
                raise ValueError(f"{key} must be positive")

def load_drive(path: Union[str, Path]) -> SudokuDrive:
    """Read `key<TAB>value` lines; `version` is mandatory, unknown keys are an error"""
    types = {f.name: type(f.default) for f in fields(SudokuDrive)}
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected key and value")
            key, value = parts
            if key not in types:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = types[key](value.strip())
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: {key} expects {types[key].__name__}, got {value.strip()!r}"
                ) from None
    if 'version' not in values:
        raise ValueError(f"{path}: missing version key")
    try:
        drive = SudokuDrive(**values)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    logger.debug(f"Loaded Sudoku drive version {drive.version} from {path}")
    return drive

def build_sudoku(puzzle: SudokuPuzzle, drive: SudokuDrive = SudokuDrive(), seed: int = 0) -> NetworkSpec:
    if not puzzle.is_consistent():
        raise PuzzleError("clues repeat a digit within a row, column or box")
    n = SUDOKU_NEURONS
    w_raw = int(quantize_array([drive.inhibitory_weight], Q15_16)[0])
    weights_raw = np.zeros((n, n), dtype=np.int64)
    for row in range(9):
        for col in range(9):
            for digit in range(1, 10):
                weights_raw[inhibition_targets(row, col, digit), neuron_index(row, col, digit)] = w_raw
    weights_real = weights_raw / float(1 << Q15_16.frac_bits)

    params_real = {k: np.full(n, getattr(drive, k)) for k in ('a', 'b', 'c', 'd')}
    params_raw = _quantize_params(params_real)

    inputs = InputModel.zeros(n)
    for cell, clue in enumerate(puzzle.cells):
        neurons = slice(cell * 9, cell * 9 + 9)
        if clue:
            inputs.bias[cell * 9 + clue - 1] = drive.clue_bias
        else:
            inputs.uniform[neurons] = drive.noise_scale
            inputs.offset[neurons] = drive.noise_offset

    v0_real = np.full(n, drive.c)
    v0_raw = quantize_array(v0_real, Q7_8)
    return NetworkSpec(
        name='sudoku', n=n,
        params_raw=params_raw, params_real=params_real,
        weights_raw=weights_raw, weights_real=weights_real,
        inputs=inputs,
        v0_raw=v0_raw, u0_raw=_initial_u_raw(params_raw['b'], v0_raw),
        v0_real=v0_real, u0_real=params_real['b'] * v0_real,
        decay=drive.decay_divider, h_select=drive.h_select, pin=drive.pin,
        substeps=drive.substeps, seed=seed,
    )

def window_counts(raster: SpikeRaster, start: int, stop: int) -> np.ndarray:
    mask = (raster.t >= start) & (raster.t < stop)
    return np.bincount(raster.neuron[mask], minlength=raster.n or SUDOKU_NEURONS)

def extract_solution(window: Union[np.ndarray, SpikeRaster], puzzle: SudokuPuzzle,
                     window_ticks: int = 50) -> Optional[np.ndarray]:
    """Per cell, the digit that spiked most in the window

    None if any cell is silent or tied, or a clue cell decodes to another digit.
    A raster is reduced to its trailing `window_ticks` ticks.
    """
    if isinstance(window, SpikeRaster):
        window = window_counts(window, window.ticks - window_ticks, window.ticks)
    counts = np.asarray(window).reshape(81, 9)
    top = counts.max(axis=1)
    if (top == 0).any() or ((counts == top[:, None]).sum(axis=1) > 1).any():
        return None
    grid = counts.argmax(axis=1) + 1
    clues = np.asarray(puzzle.cells)
    if ((clues != 0) & (clues != grid)).any():
        return None
    return grid

def validate_solution(grid: Optional[Sequence[int]], puzzle: SudokuPuzzle) -> bool:
    """Complete, unit-unique and clue-preserving"""
    if grid is None:
        return False
    cells = [int(g) for g in np.asarray(grid).ravel()]
    if len(cells) != 81 or any(not 1 <= g <= 9 for g in cells):
        return False
    if any(clue and clue != g for clue, g in zip(puzzle.cells, cells)):
        return False
    return _units_ok(cells, allow_blank=False)

@dataclass
class SudokuResult:
    puzzle: SudokuPuzzle
    solved: bool
    ticks: int
    grid: Optional[np.ndarray] = None
    n_spikes: int = 0

    @property
    def solution(self) -> str:
        return ''.join(str(int(g)) for g in self.grid) if self.grid is not None else ''

def solve_sudoku(puzzle: SudokuPuzzle, drive: SudokuDrive = SudokuDrive(), seed: int = 0,
                 max_ticks: Optional[int] = None) -> SudokuResult:
    """Run the WTA network until the decoded grid is valid and unchanged for stable_windows windows"""
    spec = build_sudoku(puzzle, drive, seed)
    max_ticks = drive.max_ticks if max_ticks is None else max_ticks
    rng = NetRandom(seed, stream=1)
    state = initial_state(spec, 'fixed')
    counts = np.zeros(spec.n, dtype=np.int64)
    previous: Optional[np.ndarray] = None
    stable = 0
    n_spikes = 0

    for tick in range(1, max_ticks + 1):
        state, spikes = step_network(spec, state, rng)
        counts[spikes] += 1
        n_spikes += len(spikes)
        if tick % drive.window:
            continue
        grid = extract_solution(counts, puzzle)
        if grid is not None and validate_solution(grid, puzzle):
            stable = stable + 1 if previous is not None and np.array_equal(grid, previous) else 1
        else:
            stable = 0
        previous = grid
        logger.debug(f"tick {tick}: window spikes {int(counts.sum())}, stable windows {stable}")
        counts[:] = 0
        if stable >= drive.stable_windows:
            logger.info(f"Sudoku converged after {tick} ticks")
            return SudokuResult(puzzle, True, tick, grid, n_spikes)

    logger.warning(f"Sudoku did not converge within {max_ticks} ticks")
    return SudokuResult(puzzle, False, max_ticks, None, n_spikes)

class PuzzleEntry(NamedTuple):
    lineno: int
    text: str
    puzzle: Optional[SudokuPuzzle]
    solution: Optional[str]
    error: Optional[str]

def read_puzzles(path: Union[str, Path]) -> List[PuzzleEntry]:
    """One puzzle per line with an optional known solution after it; bad lines are kept as errors"""
    entries = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            try:
                puzzle = SudokuPuzzle.from_string(tokens[0])
                if not puzzle.is_consistent():
                    raise PuzzleError("clues repeat a digit within a row, column or box")
                solution = tokens[1] if len(tokens) > 1 else None
                entries.append(PuzzleEntry(lineno, tokens[0], puzzle, solution, None))
            except PuzzleError as exc:
                entries.append(PuzzleEntry(lineno, tokens[0], None, None, str(exc)))
    return entries
