import numpy as np
import pytest

from isa import (
    CUSTOM0_OPCODE, INSTRUCTIONS, AssemblyError, IllegalInstructionError, Instruction, Program,
    assemble, decode, disassemble, encode, load_program,
)

UPDATE_SNIPPET = """\
lw a6, 4(a3)
lw a7, 8(a3)
nmldl x0, a6, a7 #load a,b,c,d parameters
lw t5, (a4) #read the thalamic
lw a7, (a0) #read current
lw a6, (a3) #read vu
add a7, a7, t5
add a2, x0, a3
nmpn a2, a6, a7 #process neuron, get spike/nospike, store VU word
"""

def words_of(program):
    return [word for _, word in program.words]

def random_instruction(rng, name):
    fmt = INSTRUCTIONS[name].fmt
    reg = lambda: int(rng.integers(0, 32))
    if fmt in ('R', 'N'):
        return Instruction(name, reg(), reg(), reg())
    if fmt == 'NH':
        return Instruction(name, reg(), reg())
    if fmt in ('I', 'L', 'JALR'):
        return Instruction(name, reg(), reg(), imm=int(rng.integers(-2048, 2048)))
    if fmt == 'SH':
        return Instruction(name, reg(), reg(), imm=int(rng.integers(0, 32)))
    if fmt == 'S':
        return Instruction(name, rs1=reg(), rs2=reg(), imm=int(rng.integers(-2048, 2048)))
    if fmt == 'B':
        return Instruction(name, rs1=reg(), rs2=reg(), imm=2 * int(rng.integers(-2048, 2048)))
    if fmt == 'U':
        return Instruction(name, reg(), imm=int(rng.integers(0, 1 << 20)))
    if fmt == 'J':
        return Instruction(name, reg(), imm=2 * int(rng.integers(-(1 << 19), 1 << 19)))
    if fmt == 'FENCE':
        return Instruction(name, imm=int(rng.integers(0, 1 << 12)))
    return Instruction(name)

def test_reference_encodings():
    assert encode(Instruction('add', 1, 2, 3)) == 0x003100B3
    assert decode(0x00000013) == Instruction('addi', 0, 0, 0, 0)
    assert encode(Instruction('nmpn', 12, 16, 17)) == 0x0118260B
    assert decode(0x00100073) == Instruction('ebreak')

def test_custom_field_layout():
    word = encode(Instruction('nmdec', 12, 10, 11))
    assert word & 0x7F == CUSTOM0_OPCODE
    assert (word >> 12) & 0x7 == 0b011
    assert decode(encode(Instruction('nmldl', 0, 16, 17))) == Instruction('nmldl', 0, 16, 17)

@pytest.mark.parametrize("funct3", [4, 5, 6, 7])
def test_unassigned_custom_slots_are_illegal(funct3):
    word = funct3 << 12 | CUSTOM0_OPCODE
    with pytest.raises(IllegalInstructionError) as excinfo:
        decode(word)
    assert excinfo.value.word == word

@pytest.mark.parametrize("word", [0xFFFFFFFF, 0x00000000, 0x02000073, 0x40001033])
def test_illegal_words(word):
    with pytest.raises(IllegalInstructionError):
        decode(word)

def test_custom_funct7_is_ignored_on_decode():
    base = encode(Instruction('nmpn', 12, 16, 17))
    assert decode(base | 0x7F << 25) == decode(base)
    nmldh = encode(Instruction('nmldh', 0, 11))
    assert decode(nmldh | 5 << 20) == Instruction('nmldh', 0, 11)

def test_custom_roundtrip_exhaustive():
    for name in ('nmldl', 'nmpn', 'nmdec'):
        for rd in range(32):
            for rs1 in range(32):
                for rs2 in range(32):
                    insn = Instruction(name, rd, rs1, rs2)
                    assert decode(encode(insn)) == insn
    for rd in range(32):
        for rs1 in range(32):
            insn = Instruction('nmldh', rd, rs1)
            assert decode(encode(insn)) == insn

def test_standard_roundtrip_fuzz():
    rng = np.random.default_rng(2718)
    for name in INSTRUCTIONS:
        for _ in range(300):
            insn = random_instruction(rng, name)
            assert decode(encode(insn)) == insn, name

def test_decodable_words_reencode():
    rng = np.random.default_rng(31)
    decoded = 0
    for word in rng.integers(0, 1 << 32, size=50_000, dtype=np.uint64).tolist():
        try:
            insn = decode(word)
        except IllegalInstructionError:
            continue
        decoded += 1
        if insn.is_custom:
            continue
        assert encode(insn) == word
    assert decoded > 0

def test_encode_rejects_out_of_range_fields():
    with pytest.raises(ValueError):
        encode(Instruction('addi', 1, 0, imm=2048))
    with pytest.raises(ValueError):
        encode(Instruction('add', 32, 0, 0))
    with pytest.raises(ValueError):
        encode(Instruction('beq', rs1=1, rs2=2, imm=3))

def test_register_usage():
    assert Instruction('nmpn', 12, 16, 17).sources() == (16, 17, 12)
    assert Instruction('nmpn', 12, 16, 17).destination() == 12
    assert Instruction('nmldh', 0, 11).sources() == (11,)
    assert Instruction('sw', rs1=2, rs2=3).destination() is None
    assert Instruction('beq', rs1=2, rs2=3).destination() is None
    assert Instruction('add', 0, 1, 2).destination() is None
    assert Instruction('lui', 5, imm=1).sources() == ()

def test_disassemble_examples():
    assert disassemble(encode(Instruction('nmpn', 12, 16, 17))) == "nmpn a2, a6, a7"
    assert disassemble(0x00000013) == "nop"
    assert disassemble(0xFFFFFFFF) == ".word 0xffffffff"
    assert disassemble(encode(Instruction('lw', 16, 13, imm=4))) == "lw a6, 4(a3)"
    assert disassemble(encode(Instruction('nmldh', 0, 11))) == "nmldh zero, a1"
    # reserved bits set: decodes, but has no canonical text
    word = encode(Instruction('nmpn', 12, 16, 17)) | 1 << 25
    assert disassemble(word) == f".word 0x{word:08x}"

def test_assemble_nop():
    assert words_of(assemble("nop")) == [0x00000013]

def test_update_snippet_assembles():
    program = assemble(UPDATE_SNIPPET)
    assert len(program) == 9
    assert sum(1 for w in words_of(program) if w & 0x7F == CUSTOM0_OPCODE) == 2
    assert words_of(assemble("nmldl x0, a6, a7")) == [encode(Instruction('nmldl', 0, 16, 17))]
    assert words_of(program)[-1] == 0x0118260B

def test_reassembly_of_disassembly_is_stable():
    source = UPDATE_SNIPPET + """\
loop:
    addi t0, t0, -1
    bnez t0, loop
    lui a0, 0x12345
    jal ra, done
    srai t1, t1, 3
    sw a2, -8(sp)
    fence
    mul a5, a6, a7
done:
    nmdec a5, a5, a4
    nmldh zero, a1
    ebreak
"""
    first = assemble(source)
    text = "\n".join(disassemble(word) for word in words_of(first))
    second = assemble(text)
    assert second.words == first.words
    assert assemble("\n".join(disassemble(w) for w in words_of(second))).words == second.words

def test_labels_and_pseudo_instructions():
    program = assemble("""\
_start:
    li a0, 0x1014
    li a1, 0x1000
    li a2, -1
    mv a3, a0
back:
    beqz a3, back
    j _start
    ret
""")
    assert program.symbols == {'_start': 0, 'back': 20}
    assert [disassemble(w) for w in words_of(program)] == [
        "lui a0, 0x1", "addi a0, a0, 20",
        "lui a1, 0x1",
        "addi a2, zero, -1",
        "addi a3, a0, 0",
        "beq a3, zero, 0",
        "jal zero, -24",
        "jalr zero, 0(ra)",
    ]

def test_li_rounds_upper_part():
    program = assemble("li t0, 0x800\nli t1, 0x7ffff800")
    assert [disassemble(w) for w in words_of(program)] == [
        "lui t0, 0x1", "addi t0, t0, -2048",
        "lui t1, 0x80000", "addi t1, t1, -2048",
    ]

def test_data_directives():
    program = assemble("""\
    j end
.org 0x10
end:
    ebreak
table: .word end, 5, -1
""")
    assert program.words == [
        (0x00, encode(Instruction('jal', 0, imm=16))),
        (0x10, 0x00100073),
        (0x14, 0x10),
        (0x18, 5),
        (0x1C, 0xFFFFFFFF),
    ]
    assert program.symbols['table'] == 0x14

@pytest.mark.parametrize("source, lineno, fragment", [
    ("nop\nfrobnicate x1, x2", 2, "unknown mnemonic"),
    ("nop\nnop\nj nowhere", 3, "undefined label"),
    ("addi x1, x0, 5000", 1, "out of range"),
    ("add x1, x2, x99", 1, "unknown register"),
    ("nmpn a2, a6", 1, "expects 3 operands"),
    ("a:\na:\nnop", 2, "duplicate label"),
    (".org 0x10\nnop\n.org 0x8", 3, ".org"),
    ("lw a0, a1", 1, "offset(register)"),
])
def test_assembly_errors_carry_line_numbers(source, lineno, fragment):
    with pytest.raises(AssemblyError) as excinfo:
        assemble(source)
    assert excinfo.value.lineno == lineno
    assert str(excinfo.value).startswith(f"line {lineno}:")
    assert fragment in str(excinfo.value)

def test_kernel_source_assembles(config_dir):
    program = load_program(config_dir / "neuron_kernel.s")
    assert program.entry == 0
    code = [w for a, w in program.words if a < 0x1000]
    data = [w for a, w in program.words if a >= 0x1000]
    assert len(code) == 17
    assert data[:4] == [0x1F000000, 0x019A0029, 0x4000BF00, 0]
    assert program.symbols['neuron'] == 0x1000

def test_image_formats(tmp_path):
    program = assemble(UPDATE_SNIPPET + "ebreak\n")
    hex_path = tmp_path / "kernel.hex"
    hex_path.write_text(program.to_hex_text())
    assert load_program(hex_path).words == program.words

    bin_path = tmp_path / "kernel.bin"
    bin_path.write_bytes(program.to_binary())
    assert load_program(bin_path).words == program.words
    assert load_program(bin_path, base=0x200).words[0] == (0x200, program.words[0][1])

def test_hex_text_with_gaps():
    program = Program([(0, 0x13), (4, 0x13), (0x100, 0x00100073)])
    text = program.to_hex_text()
    assert text.splitlines() == ["@00000000", "00000013", "00000013", "@00000100", "00100073"]
    assert Program.from_hex_text(text).words == program.words
    assert len(program.to_binary()) == 0x104

def test_binary_length_must_be_word_multiple():
    with pytest.raises(ValueError):
        Program.from_binary(b"\x13\x00\x00")
