#!/usr/bin/env python3
"""
IzhiRISC-V machine
RV32IM execution engine with the neuron extension, flat little-endian
memory, the NPU/DCU configuration registers and a cycle-approximate model
of the 3-stage pipeline: one cycle per retired instruction, a fixed stall
whenever an instruction reads the register its predecessor writes, and a
pipeline-fill charge on the first instruction.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import pandas as pd

import dcu
import npu
from fixedpoint import Q15_16, from_raw, to_word
from isa import ABI_NAMES, IllegalInstructionError, Instruction, Program, decode, disassemble

logger = logging.getLogger(__name__)

N_IZHOP = 19               # scalar operations credited per nmpn
DEFAULT_MEMORY_SIZE = 4 * 1024 * 1024
DEFAULT_STALL_CYCLES = 1
DEFAULT_PIPELINE_FILL = 2
MASK32 = 0xFFFFFFFF

class MachineError(RuntimeError):
    """Base class for execution faults"""

class MachineTrap(MachineError):
    def __init__(self, pc: int, word: Optional[int], cause: str):
        self.pc = pc
        self.word = word
        self.cause = cause
        word_text = f" word=0x{word:08x}" if word is not None else ""
        super().__init__(f"trap at pc=0x{pc:08x}{word_text}: {cause}")

class BudgetExhausted(MachineError):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"instruction budget of {budget} exhausted before halt")

@dataclass
class CpuState:
    x: List[int] = field(default_factory=lambda: [0] * 32)
    pc: int = 0
    mem: bytearray = field(default_factory=lambda: bytearray(DEFAULT_MEMORY_SIZE))
    nm: npu.NmConfig = field(default_factory=npu.default_config)
    halted: bool = False

@dataclass
class PerfCounters:
    n_cycles: int = 0
    n_instr: int = 0
    n_reginstr: int = 0
    n_updates: int = 0
    n_decays: int = 0
    n_config_instr: int = 0
    n_hazard_stalls: int = 0

    def to_frame(self) -> pd.DataFrame:
        rows = [{'counter': k, 'value': v} for k, v in asdict(self).items()]
        if self.n_cycles:
            rows.append({'counter': 'ipc', 'value': ipc(self)})
            rows.append({'counter': 'ipc_eff', 'value': ipc_eff(self)})
            rows.append({'counter': 'hazard_stall_percent', 'value': hazard_stall_percent(self)})
        return pd.DataFrame(rows)

def ipc(c: PerfCounters) -> float:
    if c.n_cycles <= 0:
        raise ValueError("IPC is undefined for zero cycles")
    return c.n_instr / c.n_cycles

def ipc_eff(c: PerfCounters) -> float:
    if c.n_cycles <= 0:
        raise ValueError("effective IPC is undefined for zero cycles")
    return (c.n_reginstr + c.n_updates * N_IZHOP) / c.n_cycles

def hazard_stall_percent(c: PerfCounters) -> float:
    if c.n_cycles <= 0:
        raise ValueError("stall share is undefined for zero cycles")
    return 100.0 * c.n_hazard_stalls / c.n_cycles

def cycle_model(prev: Optional[Instruction], nxt: Instruction,
                stall_cycles: int = DEFAULT_STALL_CYCLES) -> int:
    """Stall cycles charged to nxt when it reads the register prev writes"""
    if prev is None:
        return 0
    dest = prev.destination()
    if dest is not None and dest in nxt.sources():
        return stall_cycles
    return 0

def _signed(value: int) -> int:
    return value - (1 << 32) if value & 0x80000000 else value

def _div(a: int, b: int) -> int:
    if b == 0:
        return -1
    if a == -(1 << 31) and b == -1:
        return a
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q

def _rem(a: int, b: int) -> int:
    if b == 0:
        return a
    if a == -(1 << 31) and b == -1:
        return 0
    return a - _div(a, b) * b

_ALU = {
    'add': lambda a, b: a + b,
    'sub': lambda a, b: a - b,
    'sll': lambda a, b: a << (b & 31),
    'slt': lambda a, b: int(_signed(a) < _signed(b)),
    'sltu': lambda a, b: int(a < b),
    'xor': lambda a, b: a ^ b,
    'srl': lambda a, b: a >> (b & 31),
    'sra': lambda a, b: _signed(a) >> (b & 31),
    'or': lambda a, b: a | b,
    'and': lambda a, b: a & b,
    'mul': lambda a, b: a * b,
    'mulh': lambda a, b: (_signed(a) * _signed(b)) >> 32,
    'mulhsu': lambda a, b: (_signed(a) * b) >> 32,
    'mulhu': lambda a, b: (a * b) >> 32,
    'div': lambda a, b: _div(_signed(a), _signed(b)),
    'divu': lambda a, b: a // b if b else MASK32,
    'rem': lambda a, b: _rem(_signed(a), _signed(b)),
    'remu': lambda a, b: a % b if b else a,
}
_ALU_IMM = {'addi': 'add', 'slti': 'slt', 'sltiu': 'sltu', 'xori': 'xor', 'ori': 'or',
            'andi': 'and', 'slli': 'sll', 'srli': 'srl', 'srai': 'sra'}
_BRANCH = {
    'beq': lambda a, b: a == b,
    'bne': lambda a, b: a != b,
    'blt': lambda a, b: _signed(a) < _signed(b),
    'bge': lambda a, b: _signed(a) >= _signed(b),
    'bltu': lambda a, b: a < b,
    'bgeu': lambda a, b: a >= b,
}
_LOAD = {'lb': (1, True), 'lh': (2, True), 'lw': (4, True), 'lbu': (1, False), 'lhu': (2, False)}
_STORE = {'sb': 1, 'sh': 2, 'sw': 4}

class Machine:
    """Single-hart IzhiRISC-V machine; not thread-safe, one driver at a time"""

    def __init__(self, memory_size: int = DEFAULT_MEMORY_SIZE,
                 stall_cycles: int = DEFAULT_STALL_CYCLES,
                 pipeline_fill: int = DEFAULT_PIPELINE_FILL):
        self.state = CpuState(mem=bytearray(memory_size))
        self.counters = PerfCounters()
        self.stall_cycles = stall_cycles
        self.pipeline_fill = pipeline_fill
        self._prev: Optional[Instruction] = None

    # Memory

    def _check_access(self, address: int, size: int):
        if address % size:
            raise MachineTrap(self.state.pc, None, f"misaligned {size}-byte access at 0x{address:08x}")
        if address + size > len(self.state.mem):
            raise MachineTrap(self.state.pc, None, f"access at 0x{address:08x} outside memory")

    def read(self, address: int, size: int = 4, signed: bool = False) -> int:
        self._check_access(address, size)
        value = int.from_bytes(self.state.mem[address:address + size], 'little')
        if signed and value & (1 << (8 * size - 1)):
            value -= 1 << (8 * size)
        return value & MASK32

    def write(self, address: int, value: int, size: int = 4):
        self._check_access(address, size)
        self.state.mem[address:address + size] = (value & ((1 << (8 * size)) - 1)).to_bytes(size, 'little')

    def load_program(self, program: Program):
        for address, word in program.words:
            self.write(address, word)
        self.state.pc = program.entry
        logger.debug(f"Loaded {len(program)} words, entry 0x{program.entry:08x}")

    def load_image(self, data: bytes, base: int = 0):
        if base + len(data) > len(self.state.mem):
            raise MachineError(f"image of {len(data)} bytes does not fit at 0x{base:08x}")
        self.state.mem[base:base + len(data)] = data

    # Registers

    def reg(self, index: int) -> int:
        return self.state.x[index]

    def set_reg(self, index: int, value: int):
        if index:
            self.state.x[index] = value & MASK32

    # Execution

    def step(self) -> Instruction:
        """Execute one instruction; raises MachineTrap and halts on faults"""
        s = self.state
        if s.halted:
            raise MachineError("machine is halted")
        pc = s.pc
        try:
            if pc % 4:
                raise MachineTrap(pc, None, "misaligned pc")
            word = self.read(pc)
            try:
                insn = decode(word)
            except IllegalInstructionError as exc:
                raise MachineTrap(pc, word, str(exc)) from None
            next_pc = self._execute(insn, pc, word)
        except MachineTrap:
            s.halted = True
            raise

        stall = cycle_model(self._prev, insn, self.stall_cycles)
        c = self.counters
        cycle = c.n_cycles + stall + (self.pipeline_fill if c.n_instr == 0 else 0)
        c.n_cycles = cycle + 1
        c.n_hazard_stalls += stall
        c.n_instr += 1
        if insn.name == 'nmpn':
            c.n_updates += 1
        elif insn.name == 'nmdec':
            c.n_decays += 1
        elif insn.name in ('nmldl', 'nmldh'):
            c.n_config_instr += 1
        else:
            c.n_reginstr += 1
        self._prev = insn

        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("%8d %08x %08x %s", cycle, pc, word, disassemble(word))
        s.pc = next_pc & MASK32
        return insn

    def _execute(self, insn: Instruction, pc: int, word: int) -> int:
        s = self.state
        x = s.x
        name, fmt = insn.name, insn.fmt
        rs1, rs2 = x[insn.rs1], x[insn.rs2]
        next_pc = pc + 4

        if fmt == 'R':
            self.set_reg(insn.rd, _ALU[name](rs1, rs2))
        elif fmt in ('I', 'SH'):
            self.set_reg(insn.rd, _ALU[_ALU_IMM[name]](rs1, insn.imm & MASK32))
        elif fmt == 'L':
            size, signed = _LOAD[name]
            self.set_reg(insn.rd, self.read((rs1 + insn.imm) & MASK32, size, signed))
        elif fmt == 'S':
            self.write((rs1 + insn.imm) & MASK32, rs2, _STORE[name])
        elif fmt == 'B':
            if _BRANCH[name](rs1, rs2):
                next_pc = pc + insn.imm
        elif name == 'lui':
            self.set_reg(insn.rd, insn.imm << 12)
        elif name == 'auipc':
            self.set_reg(insn.rd, pc + (insn.imm << 12))
        elif name in ('jal', 'jalr'):
            next_pc = pc + insn.imm if name == 'jal' else (rs1 + insn.imm) & ~1
            # the link register is only written once the target is known to be legal
            self._check_target(pc, word, next_pc)
            self.set_reg(insn.rd, pc + 4)
        elif name == 'fence':
            pass
        elif name == 'ebreak':
            s.halted = True
        elif name == 'ecall':
            raise MachineTrap(pc, word, "ecall is not supported")
        elif name == 'nmldl':
            s.nm = npu.NmConfig(npu.params_from_words(rs1, rs2), s.nm.h_select, s.nm.pin)
            self.set_reg(insn.rd, 1)
        elif name == 'nmldh':
            s.nm = npu.load_h(s.nm, rs1 & 1, (rs1 >> 1) & 1)
            self.set_reg(insn.rd, 1)
        elif name == 'nmpn':
            address = x[insn.rd]
            try:
                self._check_access(address, 4)
            except MachineTrap as exc:
                raise MachineTrap(pc, word, f"nmpn: {exc.cause}") from None
            result = npu.izh_step(npu.VUWord.unpack(rs1), from_raw(rs2, Q15_16), s.nm)
            self.write(address, result.vu.pack())
            self.set_reg(insn.rd, int(result.spike))
        elif name == 'nmdec':
            if rs2 not in dcu.SHIFT_COMBOS:
                raise MachineTrap(pc, word, f"nmdec: divider select {rs2} outside 2..8")
            decayed = dcu.decay_step(from_raw(rs1, Q15_16), rs2, s.nm.h_select)
            self.set_reg(insn.rd, to_word(decayed))
        else:
            raise MachineTrap(pc, word, f"no execution rule for {name}")

        self._check_target(pc, word, next_pc)
        return next_pc

    @staticmethod
    def _check_target(pc: int, word: int, next_pc: int):
        if next_pc % 4:
            raise MachineTrap(pc, word, f"misaligned jump target 0x{next_pc & MASK32:08x}")

    def run(self, max_instructions: int = 10_000_000) -> Tuple[CpuState, PerfCounters]:
        """Run until ebreak; budget exhaustion raises BudgetExhausted, faults MachineTrap"""
        executed = 0
        while not self.state.halted:
            if executed >= max_instructions:
                raise BudgetExhausted(max_instructions)
            self.step()
            executed += 1
        logger.debug(f"Halted after {self.counters.n_instr} instructions, {self.counters.n_cycles} cycles")
        return self.state, self.counters

def format_registers(state: CpuState) -> str:
    lines = []
    for row in range(8):
        cells = []
        for col in range(4):
            i = row * 4 + col
            cells.append(f"x{i:<2d} {ABI_NAMES[i]:>4s} = 0x{state.x[i]:08x}")
        lines.append("   ".join(cells))
    lines.append(f"pc = 0x{state.pc:08x}")
    return "\n".join(lines)

def run_program(program: Program, memory_size: int = DEFAULT_MEMORY_SIZE,
                max_instructions: int = 10_000_000, **timing) -> Machine:
    machine = Machine(memory_size, **timing)
    machine.load_program(program)
    machine.run(max_instructions)
    return machine
