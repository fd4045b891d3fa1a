#!/usr/bin/env python3
"""
IzhiRISC-V instruction set
Encoder, decoder, two-pass assembler and disassembler for RV32IM plus the
four neuron instructions on the custom-0 opcode (0b0001011):

    funct3 000  nmldl rd, rs1, rs2   load a,b (rs1) and c,d (rs2)
    funct3 001  nmldh rd, rs1        load h-select (bit 0) and pin (bit 1)
    funct3 010  nmpn  rd, rs1, rs2   neuron update; rd holds the VU address
    funct3 011  nmdec rd, rs1, rs2   synaptic current decay, divider in rs2

All four use the R-type field layout. funct7 is ignored on decode and zero
on encode.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

logger = logging.getLogger(__name__)

CUSTOM0_OPCODE = 0b0001011

ABI_NAMES = [
    'zero', 'ra', 'sp', 'gp', 'tp', 't0', 't1', 't2',
    's0', 's1', 'a0', 'a1', 'a2', 'a3', 'a4', 'a5',
    'a6', 'a7', 's2', 's3', 's4', 's5', 's6', 's7',
    's8', 's9', 's10', 's11', 't3', 't4', 't5', 't6',
]
REGISTERS: Dict[str, int] = {name: i for i, name in enumerate(ABI_NAMES)}
REGISTERS.update({f"x{i}": i for i in range(32)})
REGISTERS['fp'] = 8

class IllegalInstructionError(ValueError):
    def __init__(self, word: int, reason: str = "illegal instruction"):
        self.word = word
        super().__init__(f"{reason}: 0x{word:08x}")

class AssemblyError(ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")

class InsnSpec(NamedTuple):
    fmt: str
    opcode: int
    funct3: int = 0
    funct7: int = 0

# fmt: R, I (alu immediate), SH (shift immediate), L (load), JALR, S, B, U, J,
# SYS, FENCE, N (custom, rd rs1 rs2), NH (custom, rd rs1)
INSTRUCTIONS: Dict[str, InsnSpec] = {
    'lui': InsnSpec('U', 0x37),
    'auipc': InsnSpec('U', 0x17),
    'jal': InsnSpec('J', 0x6F),
    'jalr': InsnSpec('JALR', 0x67, 0),
    'beq': InsnSpec('B', 0x63, 0), 'bne': InsnSpec('B', 0x63, 1),
    'blt': InsnSpec('B', 0x63, 4), 'bge': InsnSpec('B', 0x63, 5),
    'bltu': InsnSpec('B', 0x63, 6), 'bgeu': InsnSpec('B', 0x63, 7),
    'lb': InsnSpec('L', 0x03, 0), 'lh': InsnSpec('L', 0x03, 1), 'lw': InsnSpec('L', 0x03, 2),
    'lbu': InsnSpec('L', 0x03, 4), 'lhu': InsnSpec('L', 0x03, 5),
    'sb': InsnSpec('S', 0x23, 0), 'sh': InsnSpec('S', 0x23, 1), 'sw': InsnSpec('S', 0x23, 2),
    'addi': InsnSpec('I', 0x13, 0), 'slti': InsnSpec('I', 0x13, 2), 'sltiu': InsnSpec('I', 0x13, 3),
    'xori': InsnSpec('I', 0x13, 4), 'ori': InsnSpec('I', 0x13, 6), 'andi': InsnSpec('I', 0x13, 7),
    'slli': InsnSpec('SH', 0x13, 1, 0x00), 'srli': InsnSpec('SH', 0x13, 5, 0x00),
    'srai': InsnSpec('SH', 0x13, 5, 0x20),
    'add': InsnSpec('R', 0x33, 0, 0x00), 'sub': InsnSpec('R', 0x33, 0, 0x20),
    'sll': InsnSpec('R', 0x33, 1, 0x00), 'slt': InsnSpec('R', 0x33, 2, 0x00),
    'sltu': InsnSpec('R', 0x33, 3, 0x00), 'xor': InsnSpec('R', 0x33, 4, 0x00),
    'srl': InsnSpec('R', 0x33, 5, 0x00), 'sra': InsnSpec('R', 0x33, 5, 0x20),
    'or': InsnSpec('R', 0x33, 6, 0x00), 'and': InsnSpec('R', 0x33, 7, 0x00),
    'mul': InsnSpec('R', 0x33, 0, 0x01), 'mulh': InsnSpec('R', 0x33, 1, 0x01),
    'mulhsu': InsnSpec('R', 0x33, 2, 0x01), 'mulhu': InsnSpec('R', 0x33, 3, 0x01),
    'div': InsnSpec('R', 0x33, 4, 0x01), 'divu': InsnSpec('R', 0x33, 5, 0x01),
    'rem': InsnSpec('R', 0x33, 6, 0x01), 'remu': InsnSpec('R', 0x33, 7, 0x01),
    'fence': InsnSpec('FENCE', 0x0F, 0),
    'ecall': InsnSpec('SYS', 0x73),
    'ebreak': InsnSpec('SYS', 0x73),
    'nmldl': InsnSpec('N', CUSTOM0_OPCODE, 0b000),
    'nmldh': InsnSpec('NH', CUSTOM0_OPCODE, 0b001),
    'nmpn': InsnSpec('N', CUSTOM0_OPCODE, 0b010),
    'nmdec': InsnSpec('N', CUSTOM0_OPCODE, 0b011),
}

CUSTOM_INSTRUCTIONS = ('nmldl', 'nmldh', 'nmpn', 'nmdec')
SYSTEM_WORDS = {'ecall': 0x00000073, 'ebreak': 0x00100073}

_R_TABLE = {(s.funct3, s.funct7): n for n, s in INSTRUCTIONS.items() if s.fmt == 'R'}
_BY_OPCODE_F3: Dict[Tuple[int, int], str] = {
    (s.opcode, s.funct3): n for n, s in INSTRUCTIONS.items()
    if s.fmt in ('I', 'L', 'JALR', 'S', 'B', 'N', 'NH', 'FENCE')
}
_SHIFT_TABLE = {(s.funct3, s.funct7): n for n, s in INSTRUCTIONS.items() if s.fmt == 'SH'}

# Register fields read by each format
SOURCE_FIELDS = {
    'R': ('rs1', 'rs2'), 'I': ('rs1',), 'SH': ('rs1',), 'L': ('rs1',), 'JALR': ('rs1',),
    'S': ('rs1', 'rs2'), 'B': ('rs1', 'rs2'), 'U': (), 'J': (), 'SYS': (), 'FENCE': (),
    'N': ('rs1', 'rs2'), 'NH': ('rs1',),
}
WRITES_RD = {'R', 'I', 'SH', 'L', 'JALR', 'U', 'J', 'N', 'NH'}

@dataclass(frozen=True)
class Instruction:
    """Decoded instruction; unused fields stay 0"""
    name: str
    rd: int = 0
    rs1: int = 0
    rs2: int = 0
    imm: int = 0

    @property
    def spec(self) -> InsnSpec:
        return INSTRUCTIONS[self.name]

    @property
    def fmt(self) -> str:
        return self.spec.fmt

    @property
    def is_custom(self) -> bool:
        return self.name in CUSTOM_INSTRUCTIONS

    def sources(self) -> Tuple[int, ...]:
        regs = tuple(getattr(self, f) for f in SOURCE_FIELDS[self.fmt])
        if self.name == 'nmpn':
            # rd carries the VU address into the instruction
            regs += (self.rd,)
        return regs

    def destination(self) -> Optional[int]:
        if self.fmt in WRITES_RD and self.rd != 0:
            return self.rd
        return None

    def __str__(self):
        return disassemble_instruction(self)

def _sext(value: int, bits: int) -> int:
    sign = 1 << (bits - 1)
    return (value & (sign - 1)) - (value & sign)

# Decoding

def decode(word: int) -> Instruction:
    word &= 0xFFFFFFFF
    opcode = word & 0x7F
    rd = (word >> 7) & 0x1F
    funct3 = (word >> 12) & 0x7
    rs1 = (word >> 15) & 0x1F
    rs2 = (word >> 20) & 0x1F
    funct7 = word >> 25

    if opcode == 0x33:
        name = _R_TABLE.get((funct3, funct7))
        if name is None:
            raise IllegalInstructionError(word)
        return Instruction(name, rd, rs1, rs2)

    if opcode == 0x13 and funct3 in (1, 5):
        name = _SHIFT_TABLE.get((funct3, funct7))
        if name is None:
            raise IllegalInstructionError(word)
        return Instruction(name, rd, rs1, imm=rs2)

    if opcode in (0x37, 0x17):
        name = 'lui' if opcode == 0x37 else 'auipc'
        return Instruction(name, rd, imm=word >> 12)

    if opcode == 0x6F:
        imm = (((word >> 31) & 1) << 20 | ((word >> 12) & 0xFF) << 12
               | ((word >> 20) & 1) << 11 | ((word >> 21) & 0x3FF) << 1)
        return Instruction('jal', rd, imm=_sext(imm, 21))

    if opcode == 0x73:
        for name, system_word in SYSTEM_WORDS.items():
            if word == system_word:
                return Instruction(name)
        raise IllegalInstructionError(word)

    name = _BY_OPCODE_F3.get((opcode, funct3))
    if name is None:
        raise IllegalInstructionError(word)
    fmt = INSTRUCTIONS[name].fmt

    if fmt in ('I', 'L', 'JALR'):
        return Instruction(name, rd, rs1, imm=_sext(word >> 20, 12))
    if fmt == 'S':
        imm = (funct7 << 5) | rd
        return Instruction(name, rs1=rs1, rs2=rs2, imm=_sext(imm, 12))
    if fmt == 'B':
        imm = (((word >> 31) & 1) << 12 | ((word >> 7) & 1) << 11
               | ((word >> 25) & 0x3F) << 5 | ((word >> 8) & 0xF) << 1)
        return Instruction(name, rs1=rs1, rs2=rs2, imm=_sext(imm, 13))
    if fmt == 'FENCE':
        if rd or rs1:
            raise IllegalInstructionError(word)
        return Instruction(name, imm=word >> 20)
    if fmt == 'NH':
        # rs2 is reserved
        return Instruction(name, rd, rs1)
    return Instruction(name, rd, rs1, rs2)

# Encoding

def _check_reg(value: int, what: str):
    if not 0 <= value <= 31:
        raise ValueError(f"{what} must be in 0..31, got {value}")

def _check_imm(value: int, lo: int, hi: int, what: str, align: int = 1):
    if not lo <= value <= hi:
        raise ValueError(f"{what} {value} out of range [{lo}, {hi}]")
    if value % align:
        raise ValueError(f"{what} {value} is not a multiple of {align}")

def encode(insn: Instruction) -> int:
    spec = INSTRUCTIONS.get(insn.name)
    if spec is None:
        raise ValueError(f"unknown instruction {insn.name!r}")
    for f in ('rd', 'rs1', 'rs2'):
        _check_reg(getattr(insn, f), f)
    rd, rs1, rs2, imm = insn.rd, insn.rs1, insn.rs2, insn.imm
    fmt, op, f3, f7 = spec

    if fmt in ('R', 'N'):
        return f7 << 25 | rs2 << 20 | rs1 << 15 | f3 << 12 | rd << 7 | op
    if fmt == 'NH':
        return rs1 << 15 | f3 << 12 | rd << 7 | op
    if fmt in ('I', 'L', 'JALR'):
        _check_imm(imm, -2048, 2047, 'immediate')
        return (imm & 0xFFF) << 20 | rs1 << 15 | f3 << 12 | rd << 7 | op
    if fmt == 'SH':
        _check_imm(imm, 0, 31, 'shift amount')
        return f7 << 25 | imm << 20 | rs1 << 15 | f3 << 12 | rd << 7 | op
    if fmt == 'S':
        _check_imm(imm, -2048, 2047, 'offset')
        imm &= 0xFFF
        return (imm >> 5) << 25 | rs2 << 20 | rs1 << 15 | f3 << 12 | (imm & 0x1F) << 7 | op
    if fmt == 'B':
        _check_imm(imm, -4096, 4094, 'branch offset', 2)
        imm &= 0x1FFF
        return (((imm >> 12) & 1) << 31 | ((imm >> 5) & 0x3F) << 25 | rs2 << 20 | rs1 << 15
                | f3 << 12 | ((imm >> 1) & 0xF) << 8 | ((imm >> 11) & 1) << 7 | op)
    if fmt == 'U':
        _check_imm(imm, 0, 0xFFFFF, 'upper immediate')
        return imm << 12 | rd << 7 | op
    if fmt == 'J':
        _check_imm(imm, -(1 << 20), (1 << 20) - 2, 'jump offset', 2)
        imm &= 0x1FFFFF
        return (((imm >> 20) & 1) << 31 | ((imm >> 1) & 0x3FF) << 21 | ((imm >> 11) & 1) << 20
                | ((imm >> 12) & 0xFF) << 12 | rd << 7 | op)
    if fmt == 'FENCE':
        _check_imm(imm, 0, 0xFFF, 'fence operand')
        return imm << 20 | op
    return SYSTEM_WORDS[insn.name]

# Disassembly

def _r(index: int) -> str:
    return ABI_NAMES[index]

def disassemble_instruction(insn: Instruction) -> str:
    name, fmt = insn.name, insn.fmt
    if fmt in ('R', 'N'):
        return f"{name} {_r(insn.rd)}, {_r(insn.rs1)}, {_r(insn.rs2)}"
    if fmt == 'NH':
        return f"{name} {_r(insn.rd)}, {_r(insn.rs1)}"
    if fmt in ('I', 'SH'):
        if name == 'addi' and insn.rd == 0 and insn.rs1 == 0 and insn.imm == 0:
            return "nop"
        return f"{name} {_r(insn.rd)}, {_r(insn.rs1)}, {insn.imm}"
    if fmt in ('L', 'JALR'):
        return f"{name} {_r(insn.rd)}, {insn.imm}({_r(insn.rs1)})"
    if fmt == 'S':
        return f"{name} {_r(insn.rs2)}, {insn.imm}({_r(insn.rs1)})"
    if fmt == 'B':
        return f"{name} {_r(insn.rs1)}, {_r(insn.rs2)}, {insn.imm}"
    if fmt == 'U':
        return f"{name} {_r(insn.rd)}, 0x{insn.imm:x}"
    if fmt == 'J':
        return f"{name} {_r(insn.rd)}, {insn.imm}"
    if fmt == 'FENCE':
        return "fence" if insn.imm == 0x0FF else f"fence 0x{insn.imm:x}"
    return name

def disassemble(word: int) -> str:
    """Canonical text for word; anything that does not re-encode to itself is .word"""
    word &= 0xFFFFFFFF
    try:
        insn = decode(word)
    except IllegalInstructionError:
        return f".word 0x{word:08x}"
    if encode(insn) != word:
        return f".word 0x{word:08x}"
    return disassemble_instruction(insn)

# Program images

@dataclass
class Program:
    words: List[Tuple[int, int]] = field(default_factory=list)
    entry: int = 0
    symbols: Dict[str, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.words)

    def to_hex_text(self) -> str:
        lines = []
        expected = None
        for address, word in self.words:
            if address != expected:
                lines.append(f"@{address:08x}")
            lines.append(f"{word:08x}")
            expected = address + 4
        return "\n".join(lines) + "\n"

    @classmethod
    def from_hex_text(cls, text: str) -> 'Program':
        words = []
        address = 0
        for raw_line in text.splitlines():
            line = raw_line.split('#', 1)[0].strip()
            if not line:
                continue
            if line.startswith('@'):
                address = int(line[1:], 16)
                continue
            words.append((address, int(line, 16) & 0xFFFFFFFF))
            address += 4
        return cls(words, entry=words[0][0] if words else 0)

    def to_binary(self) -> bytes:
        """Flat little-endian image from the lowest address; gaps are zero-filled"""
        if not self.words:
            return b""
        base = self.words[0][0]
        image = bytearray(self.words[-1][0] + 4 - base)
        for address, word in self.words:
            offset = address - base
            image[offset:offset + 4] = word.to_bytes(4, 'little')
        return bytes(image)

    @classmethod
    def from_binary(cls, data: bytes, base: int = 0) -> 'Program':
        if len(data) % 4:
            raise ValueError("binary image length must be a multiple of 4")
        words = [(base + i, int.from_bytes(data[i:i + 4], 'little')) for i in range(0, len(data), 4)]
        return cls(words, entry=base)

def load_program(path: Union[str, Path], base: int = 0) -> Program:
    """Load a program from assembly (.s/.S/.asm), hex text (.hex) or flat binary"""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in ('.s', '.asm'):
        return assemble(path.read_text())
    if suffix == '.hex':
        return Program.from_hex_text(path.read_text())
    return Program.from_binary(path.read_bytes(), base)

# Assembly

_MEM_OPERAND = re.compile(r'^(?P<offset>[^()]*)\((?P<reg>[^()]+)\)$')
_LABEL = re.compile(r'^[A-Za-z_.$][\w.$]*$')

class _Line(NamedTuple):
    lineno: int
    address: int
    mnemonic: str
    operands: List[str]

def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token.replace('_', ''), 0)
    except ValueError:
        try:
            return int(token, 10)
        except ValueError:
            raise AssemblyError(lineno, f"invalid number {token!r}") from None

def _li_parts(value: int) -> Tuple[int, int]:
    """Split a 32-bit constant into lui/addi parts"""
    value &= 0xFFFFFFFF
    upper = ((value + 0x800) >> 12) & 0xFFFFF
    lower = _sext(value & 0xFFF, 12)
    return upper, lower

def _instruction_size(mnemonic: str, operands: List[str], lineno: int) -> int:
    if mnemonic == 'li':
        if len(operands) != 2:
            raise AssemblyError(lineno, "li expects 2 operands")
        value = _sext(_parse_int(operands[1], lineno) & 0xFFFFFFFF, 32)
        if -2048 <= value <= 2047:
            return 4
        return 4 if _li_parts(value)[1] == 0 else 8
    return 4

class Assembler:
    """Two-pass assembler: pass one lays out addresses and labels, pass two encodes"""

    def __init__(self):
        self.symbols: Dict[str, int] = {}
        self.lines: List[_Line] = []
        self.data: List[Tuple[int, int, List[str]]] = []

    def assemble(self, text: str) -> Program:
        self._layout(text)
        words: List[Tuple[int, int]] = []
        for lineno, address, values in self.data:
            for i, token in enumerate(values):
                words.append((address + 4 * i, self._value(token, lineno) & 0xFFFFFFFF))
        for line in self.lines:
            for i, word in enumerate(self._encode_line(line)):
                words.append((line.address + 4 * i, word))
        words.sort()
        for (a1, _), (a2, _) in zip(words, words[1:]):
            if a1 == a2:
                raise AssemblyError(0, f"overlapping output at 0x{a1:08x}")
        entry = self.symbols.get('_start', words[0][0] if words else 0)
        logger.debug(f"Assembled {len(words)} words, {len(self.symbols)} symbols")
        return Program(words, entry, dict(self.symbols))

    def _layout(self, text: str):
        address = 0
        for lineno, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.split('#', 1)[0].strip()
            while line:
                head, sep, rest = line.partition(':')
                if sep and _LABEL.match(head.strip()):
                    label = head.strip()
                    if label in self.symbols:
                        raise AssemblyError(lineno, f"duplicate label {label!r}")
                    self.symbols[label] = address
                    line = rest.strip()
                else:
                    break
            if not line:
                continue
            parts = line.split(None, 1)
            mnemonic = parts[0].lower()
            operands = [op.strip() for op in parts[1].split(',')] if len(parts) > 1 else []
            if any(not op for op in operands):
                raise AssemblyError(lineno, "empty operand")

            if mnemonic == '.org':
                if len(operands) != 1:
                    raise AssemblyError(lineno, ".org expects one address")
                target = _parse_int(operands[0], lineno)
                if target % 4 or target < address:
                    raise AssemblyError(lineno, f".org 0x{target:x} must be word-aligned and not move backwards")
                address = target
            elif mnemonic == '.word':
                if not operands:
                    raise AssemblyError(lineno, ".word expects at least one value")
                self.data.append((lineno, address, operands))
                address += 4 * len(operands)
            elif mnemonic.startswith('.'):
                raise AssemblyError(lineno, f"unknown directive {mnemonic}")
            else:
                self.lines.append(_Line(lineno, address, mnemonic, operands))
                address += _instruction_size(mnemonic, operands, lineno)

    def _value(self, token: str, lineno: int) -> int:
        if token in self.symbols:
            return self.symbols[token]
        if _LABEL.match(token) and not token[0].isdigit():
            raise AssemblyError(lineno, f"undefined label {token!r}")
        return _parse_int(token, lineno)

    def _reg(self, token: str, lineno: int) -> int:
        reg = REGISTERS.get(token.lower())
        if reg is None:
            raise AssemblyError(lineno, f"unknown register {token!r}")
        return reg

    def _mem(self, token: str, lineno: int) -> Tuple[int, int]:
        match = _MEM_OPERAND.match(token.replace(' ', ''))
        if not match:
            raise AssemblyError(lineno, f"expected offset(register), got {token!r}")
        offset = match.group('offset')
        return (_parse_int(offset, lineno) if offset else 0), self._reg(match.group('reg'), lineno)

    def _target(self, token: str, line: _Line) -> int:
        """Label -> pc-relative offset; numbers are taken as offsets already"""
        if token in self.symbols:
            return self.symbols[token] - line.address
        return self._value(token, line.lineno)

    def _encode_line(self, line: _Line) -> List[int]:
        try:
            return [encode(insn) for insn in self._expand(line)]
        except AssemblyError:
            raise
        except (ValueError, IndexError) as exc:
            raise AssemblyError(line.lineno, f"{line.mnemonic}: {exc}") from None

    def _expect(self, line: _Line, count: int):
        if len(line.operands) != count:
            raise AssemblyError(line.lineno, f"{line.mnemonic} expects {count} operands, got {len(line.operands)}")

    def _expand(self, line: _Line) -> List[Instruction]:
        m, ops, n = line.mnemonic, line.operands, line.lineno
        def reg(token):
            return self._reg(token, n)

        # Pseudo-instructions
        if m == 'nop':
            self._expect(line, 0)
            return [Instruction('addi')]
        if m == 'li':
            rd = reg(ops[0])
            value = _sext(_parse_int(ops[1], n) & 0xFFFFFFFF, 32)
            if -2048 <= value <= 2047:
                return [Instruction('addi', rd, 0, imm=value)]
            upper, lower = _li_parts(value)
            insns = [Instruction('lui', rd, imm=upper)]
            if lower:
                insns.append(Instruction('addi', rd, rd, imm=lower))
            return insns
        if m == 'mv':
            self._expect(line, 2)
            return [Instruction('addi', reg(ops[0]), reg(ops[1]))]
        if m == 'j':
            self._expect(line, 1)
            return [Instruction('jal', 0, imm=self._target(ops[0], line))]
        if m == 'ret':
            self._expect(line, 0)
            return [Instruction('jalr', 0, 1)]
        if m in ('beqz', 'bnez'):
            self._expect(line, 2)
            return [Instruction('beq' if m == 'beqz' else 'bne', rs1=reg(ops[0]),
                                imm=self._target(ops[1], line))]
        if m in SYSTEM_WORDS:
            self._expect(line, 0)
            return [Instruction(m)]

        spec = INSTRUCTIONS.get(m)
        if spec is None:
            raise AssemblyError(n, f"unknown mnemonic {m!r}")
        fmt = spec.fmt

        if fmt in ('R', 'N'):
            self._expect(line, 3)
            return [Instruction(m, reg(ops[0]), reg(ops[1]), reg(ops[2]))]
        if fmt == 'NH':
            self._expect(line, 2)
            return [Instruction(m, reg(ops[0]), reg(ops[1]))]
        if fmt in ('I', 'SH'):
            self._expect(line, 3)
            return [Instruction(m, reg(ops[0]), reg(ops[1]), imm=_parse_int(ops[2], n))]
        if fmt == 'L':
            self._expect(line, 2)
            offset, base = self._mem(ops[1], n)
            return [Instruction(m, reg(ops[0]), base, imm=offset)]
        if fmt == 'JALR':
            if len(ops) == 1:
                return [Instruction(m, 1, reg(ops[0]))]
            self._expect(line, 2)
            offset, base = self._mem(ops[1], n)
            return [Instruction(m, reg(ops[0]), base, imm=offset)]
        if fmt == 'S':
            self._expect(line, 2)
            offset, base = self._mem(ops[1], n)
            return [Instruction(m, rs1=base, rs2=reg(ops[0]), imm=offset)]
        if fmt == 'B':
            self._expect(line, 3)
            return [Instruction(m, rs1=reg(ops[0]), rs2=reg(ops[1]), imm=self._target(ops[2], line))]
        if fmt == 'U':
            self._expect(line, 2)
            upper = _parse_int(ops[1], n)
            if -(1 << 19) <= upper < 0:
                upper &= 0xFFFFF
            return [Instruction(m, reg(ops[0]), imm=upper)]
        if fmt == 'J':
            if len(ops) == 1:
                return [Instruction(m, 1, imm=self._target(ops[0], line))]
            self._expect(line, 2)
            return [Instruction(m, reg(ops[0]), imm=self._target(ops[1], line))]
        if fmt == 'FENCE':
            return [Instruction(m, imm=_parse_int(ops[0], n) if ops else 0x0FF)]
        raise AssemblyError(n, f"cannot assemble {m!r}")

def assemble(text: str) -> Program:
    return Assembler().assemble(text)
