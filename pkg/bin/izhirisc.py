#!/usr/bin/env python3
"""
IzhiRISC-V command line
Workload runners, assembler/emulator driver and DCU table dump.

Usage:
    izhirisc.py run-8020 [--seed N] [--ticks N] [--mode fixed|oracle|both] [--out DIR]
    izhirisc.py solve-sudoku [--puzzles FILE] [--drive FILE] [--max-ticks N] [--out DIR]
    izhirisc.py run-asm SOURCE [--max-instructions N] [--out DIR]
    izhirisc.py dcu-table [--out DIR]
    izhirisc.py encode "nmpn a2, a6, a7"
    izhirisc.py decode 0x0118260b

Every run writes manifest.json (seed, configuration hash, input hashes and
package versions) before any result file. The default output directory comes
from $IZHIRISC_RESULTS, falling back to ./results.
"""

import argparse
import hashlib
import json
import logging
import os
import platform
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

import dcu
import netsim
from isa import AssemblyError, IllegalInstructionError, assemble, disassemble, load_program
from machine import (
    BudgetExhausted, Machine, MachineError, format_registers, ipc, ipc_eff,
)

BASE_DIR = Path(__file__).resolve().parent.parent
CONFIG_DIR = BASE_DIR / 'config'
DEFAULT_PUZZLES = CONFIG_DIR / 'sudoku_puzzles.txt'
DEFAULT_DRIVE = CONFIG_DIR / 'sudoku_drive.txt'
RESULTS_ENV = 'IZHIRISC_RESULTS'

def setup_logging(verbose=False):
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        format='%(asctime)s - %(levelname)s - %(message)s',
        level=level
    )
    return logging.getLogger(__name__)

logger = logging.getLogger(__name__)

@dataclass
class RunConfig:
    subcommand: str
    seed: int = 0
    ticks: int = 1000
    out_dir: str = 'results'
    mode: str = 'fixed'
    verbose: bool = False
    puzzles: Optional[str] = None
    drive: Optional[str] = None
    max_ticks: Optional[int] = None
    source: Optional[str] = None
    max_instructions: int = 10_000_000
    memory_size: int = 4 * 1024 * 1024
    bin_ms: float = 5.0
    max_isi_ms: float = 200.0
    words: List[str] = field(default_factory=list)

    def config_hash(self) -> str:
        payload = {k: v for k, v in asdict(self).items() if k not in ('out_dir', 'verbose')}
        return hashlib.md5(json.dumps(payload, sort_keys=True).encode()).hexdigest()

def _file_md5(path: Path) -> str:
    return hashlib.md5(Path(path).read_bytes()).hexdigest()

def write_manifest(cfg: RunConfig, out_dir: Path, inputs: Optional[List[Path]] = None) -> Path:
    """Manifest first, so every result directory can be traced to its configuration"""
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        'subcommand': cfg.subcommand,
        'seed': cfg.seed,
        'config': {k: v for k, v in asdict(cfg).items() if k not in ('out_dir', 'verbose')},
        'config_md5': cfg.config_hash(),
        'inputs': {str(p): _file_md5(p) for p in (inputs or [])},
        'versions': {
            'python': platform.python_version(),
            'numpy': np.__version__,
            'pandas': pd.__version__,
        },
    }
    path = out_dir / 'manifest.json'
    with open(path, 'w') as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path

def _write_summary(path: Path, items: Dict[str, object]):
    with open(path, 'w') as f:
        for key, value in items.items():
            if isinstance(value, float):
                value = f"{value:.6f}"
            f.write(f"{key}: {value}\n")

# Subcommands

def cmd_run_8020(cfg: RunConfig) -> int:
    out_dir = Path(cfg.out_dir)
    try:
        write_manifest(cfg, out_dir)
        spec = netsim.build_8020(cfg.seed)
        modes = ['fixed', 'oracle'] if cfg.mode == 'both' else [cfg.mode]
        summary: Dict[str, object] = {'network': spec.name, 'seed': cfg.seed, 'ticks': cfg.ticks}
        histograms = {}
        for mode in modes:
            suffix = f"_{mode}" if cfg.mode == 'both' else ''
            raster = netsim.run_simulation(spec, cfg.ticks, mode)
            hist = netsim.isi_histogram(raster, cfg.bin_ms, cfg.max_isi_ms)
            raster.to_frame().to_csv(out_dir / f"raster{suffix}.csv", index=False)
            hist.to_csv(out_dir / f"isi{suffix}.csv", index=False)
            histograms[mode] = hist
            summary[f"{mode}_spikes"] = len(raster)
            for group, rate in netsim.population_rates(raster, spec.groups).items():
                summary[f"{mode}_{group}_rate_hz"] = rate
        if len(histograms) == 2:
            summary['isi_l1_distance'] = netsim.histogram_distance(histograms['fixed'], histograms['oracle'])
        _write_summary(out_dir / 'summary.txt', summary)
    except OSError as e:
        logger.error(f"Cannot write results to {out_dir}: {e}")
        return 1
    logger.info(f"80-20 results written to {out_dir}")
    return 0

def cmd_solve_sudoku(cfg: RunConfig) -> int:
    out_dir = Path(cfg.out_dir)
    puzzles_path = Path(cfg.puzzles) if cfg.puzzles else DEFAULT_PUZZLES
    drive_path = Path(cfg.drive) if cfg.drive else DEFAULT_DRIVE
    try:
        write_manifest(cfg, out_dir, [puzzles_path, drive_path])
        drive = netsim.load_drive(drive_path)
        entries = netsim.read_puzzles(puzzles_path)
    except (OSError, ValueError) as e:
        logger.error(f"Cannot start Sudoku run: {e}")
        return 1

    rows = []
    failures = 0
    for entry in entries:
        if entry.error:
            logger.error(f"{puzzles_path}:{entry.lineno}: {entry.error}")
            rows.append({'line': entry.lineno, 'puzzle': entry.text, 'status': 'parse_error',
                         'ticks': 0, 'solution': ''})
            failures += 1
            continue
        try:
            result = netsim.solve_sudoku(entry.puzzle, drive, cfg.seed, cfg.max_ticks)
        except ValueError as e:
            logger.error(f"Cannot build Sudoku network from {drive_path}: {e}")
            return 1
        valid = result.solved and netsim.validate_solution(result.grid, entry.puzzle)
        status = 'solved' if valid else 'unconverged'
        if not valid:
            failures += 1
        logger.info(f"line {entry.lineno}: {status} after {result.ticks} ticks")
        rows.append({'line': entry.lineno, 'puzzle': entry.text, 'status': status,
                     'ticks': result.ticks, 'solution': result.solution})

    table = pd.DataFrame(rows, columns=['line', 'puzzle', 'status', 'ticks', 'solution'])
    try:
        table.to_csv(out_dir / 'sudoku_summary.csv', index=False)
    except OSError as e:
        logger.error(f"Cannot write Sudoku summary: {e}")
        return 1
    solved = int((table['status'] == 'solved').sum())
    print(table[['line', 'status', 'ticks']].to_string(index=False))
    if solved:
        print(f"mean ticks to convergence: {table.loc[table['status'] == 'solved', 'ticks'].mean():.1f}")
    print(f"solved {solved}/{len(table)}")
    return 0 if failures == 0 and len(table) else 1

def cmd_run_asm(cfg: RunConfig) -> int:
    source = Path(cfg.source)
    try:
        write_manifest(cfg, Path(cfg.out_dir), [source])
        program = load_program(source)
    except AssemblyError as e:
        logger.error(f"{source}: {e}")
        return 1
    except (OSError, ValueError) as e:
        logger.error(f"Cannot load {source}: {e}")
        return 1
    if not len(program):
        logger.error(f"{source}: no instructions")
        return 1

    machine = Machine(cfg.memory_size)
    try:
        machine.load_program(program)
        machine.run(cfg.max_instructions)
    except BudgetExhausted as e:
        logger.error(str(e))
        return 1
    except MachineError as e:
        logger.error(str(e))
        print(format_registers(machine.state))
        return 1

    counters = machine.counters
    print(format_registers(machine.state))
    print(counters.to_frame().to_string(index=False))
    print(f"ipc={ipc(counters):.4f} ipc_eff={ipc_eff(counters):.4f}")
    counters.to_frame().to_csv(Path(cfg.out_dir) / 'counters.csv', index=False)
    return 0

def cmd_dcu_table(cfg: RunConfig) -> int:
    table = dcu.dcu_table()
    try:
        write_manifest(cfg, Path(cfg.out_dir))
        table.to_csv(Path(cfg.out_dir) / 'dcu_table.csv', index=False)
    except OSError as e:
        logger.error(f"Cannot write DCU table: {e}")
        return 1
    print(table.to_string(index=False))
    flagged = table[table['note'] == '*']
    for _, row in flagged.iterrows():
        print(f"* {row['divider']}: computed {row['ae_percent']:.4f}% from shifts {row['shifts']}, "
              f"published table lists {row['published_ae_percent']:.4f}%")
    return 0

def cmd_encode(cfg: RunConfig) -> int:
    try:
        program = assemble("\n".join(cfg.words))
    except AssemblyError as e:
        logger.error(str(e))
        return 1
    for _, word in program.words:
        print(f"0x{word:08x}  {disassemble(word)}")
    return 0

def cmd_decode(cfg: RunConfig) -> int:
    try:
        words = [int(w, 16) & 0xFFFFFFFF for w in cfg.words]
    except ValueError as e:
        logger.error(f"Invalid hexadecimal word: {e}")
        return 1
    for word in words:
        print(f"0x{word:08x}  {disassemble(word)}")
    return 0

COMMANDS = {
    'run-8020': cmd_run_8020,
    'solve-sudoku': cmd_solve_sudoku,
    'run-asm': cmd_run_asm,
    'dcu-table': cmd_dcu_table,
    'encode': cmd_encode,
    'decode': cmd_decode,
}

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='IzhiRISC-V simulator and SNN workloads')
    parser.add_argument('--verbose', action='store_true', help='Enable verbose logging (includes instruction trace)')
    default_out = os.environ.get(RESULTS_ENV, 'results')
    sub = parser.add_subparsers(dest='subcommand', required=True)

    def verbose(p):
        p.add_argument('--verbose', action='store_true', default=argparse.SUPPRESS,
                       help='Enable verbose logging')

    def common(p):
        verbose(p)
        p.add_argument('--out', default=default_out, help=f'Output directory (default ${RESULTS_ENV} or ./results)')
        p.add_argument('--seed', type=int, default=0, help='Random seed')

    p = sub.add_parser('run-8020', help='Simulate the 80-20 cortical network')
    common(p)
    p.add_argument('--ticks', type=int, default=1000, help='Number of 1 ms ticks')
    p.add_argument('--mode', choices=['fixed', 'oracle', 'both'], default='fixed',
                   help='Fixed-point, double-precision, or both with histogram distance')
    p.add_argument('--bin-ms', type=float, default=5.0, help='ISI histogram bin width')
    p.add_argument('--max-isi-ms', type=float, default=200.0, help='ISI histogram range')

    p = sub.add_parser('solve-sudoku', help='Solve puzzles with the WTA network')
    common(p)
    p.add_argument('--puzzles', help='Puzzle file, one 81-character puzzle per line')
    p.add_argument('--drive', help='Drive constants file')
    p.add_argument('--max-ticks', type=int, help='Tick cap per puzzle (default from drive file)')

    p = sub.add_parser('run-asm', help='Assemble and run a program')
    common(p)
    p.add_argument('source', help='Assembly (.s), hex text (.hex) or flat binary image')
    p.add_argument('--max-instructions', type=int, default=10_000_000, help='Instruction budget')
    p.add_argument('--memory-size', type=int, default=4 * 1024 * 1024, help='Memory size in bytes')

    p = sub.add_parser('dcu-table', help='Print the DCU divider table')
    common(p)

    p = sub.add_parser('encode', help='Assemble instructions to words')
    verbose(p)
    p.add_argument('words', nargs='+', help='Assembly lines')

    p = sub.add_parser('decode', help='Disassemble hexadecimal words')
    verbose(p)
    p.add_argument('words', nargs='+', help='Hexadecimal words')
    return parser

def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(subcommand=args.subcommand, verbose=args.verbose)
    for name, attr in (('out', 'out_dir'), ('seed', 'seed'), ('ticks', 'ticks'), ('mode', 'mode'),
                       ('puzzles', 'puzzles'), ('drive', 'drive'), ('max_ticks', 'max_ticks'),
                       ('source', 'source'), ('max_instructions', 'max_instructions'),
                       ('memory_size', 'memory_size'), ('bin_ms', 'bin_ms'),
                       ('max_isi_ms', 'max_isi_ms'), ('words', 'words')):
        if hasattr(args, name):
            setattr(cfg, attr, getattr(args, name))
    return cfg

def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    cfg = config_from_args(args)
    logger.debug(f"Running {cfg.subcommand} with config {cfg.config_hash()}")
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except (IllegalInstructionError, netsim.PuzzleError) as e:
        logger.error(str(e))
        return 1

if __name__ == '__main__':
    sys.exit(main())
