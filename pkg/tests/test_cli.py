import json
import logging
import re
from pathlib import Path

import pandas as pd
import pytest

import izhirisc
from izhirisc import RunConfig, build_parser, config_from_args, main

COMPLETE = "532781469761945238984362517647253891815497623293816745159674382376128954428539176"

def read_lines(path):
    return path.read_text().splitlines()

def test_dcu_table(tmp_path, capsys):
    assert main(['dcu-table', '--out', str(tmp_path)]) == 0
    out = capsys.readouterr().out
    rows = {line.split()[0]: line for line in out.splitlines() if line.strip().startswith('/')}
    assert '0.1953' in rows['/7']
    for d in ('/2', '/4', '/8'):
        assert float(rows[d].split()[3]) == 0.0
    assert rows['/6'].rstrip().endswith('*')
    assert "* /6: computed 0.3906% from shifts 3,5,7,9, published table lists 12.1093%" in out
    table = pd.read_csv(tmp_path / 'dcu_table.csv')
    assert table['divider'].tolist() == [f"/{d}" for d in range(2, 9)]
    assert (tmp_path / 'manifest.json').exists()

def test_results_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(izhirisc.RESULTS_ENV, str(tmp_path / 'env_results'))
    assert main(['dcu-table']) == 0
    assert (tmp_path / 'env_results' / 'dcu_table.csv').exists()

def test_run_8020_without_ticks(tmp_path):
    assert main(['run-8020', '--ticks', '0', '--out', str(tmp_path)]) == 0
    assert read_lines(tmp_path / 'raster.csv') == ['t,neuron']
    isi = pd.read_csv(tmp_path / 'isi.csv')
    assert list(isi.columns) == ['bin_start_ms', 'mass']
    assert len(isi) == 40 and (isi['mass'] == 0).all()
    summary = read_lines(tmp_path / 'summary.txt')
    assert 'fixed_spikes: 0' in summary
    manifest = json.loads((tmp_path / 'manifest.json').read_text())
    assert manifest['seed'] == 0
    assert manifest['subcommand'] == 'run-8020'
    assert manifest['config']['ticks'] == 0

def test_run_8020_invalid_output_dir(tmp_path):
    blocker = tmp_path / 'not_a_dir'
    blocker.write_text('')
    assert main(['run-8020', '--ticks', '0', '--out', str(blocker / 'results')]) != 0

def test_run_8020_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / 'first', tmp_path / 'second'
    for out in (first, second):
        assert main(['run-8020', '--ticks', '20', '--mode', 'both', '--seed', '3', '--out', str(out)]) == 0
    names = sorted(p.name for p in first.iterdir())
    assert names == ['isi_fixed.csv', 'isi_oracle.csv', 'manifest.json',
                     'raster_fixed.csv', 'raster_oracle.csv', 'summary.txt']
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
    assert any(line.startswith('isi_l1_distance: ') for line in read_lines(first / 'summary.txt'))

def test_run_asm_kernel(config_dir, tmp_path, capsys):
    assert main(['run-asm', str(config_dir / 'neuron_kernel.s'), '--out', str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "x12   a2 = 0x00000001" in out
    assert "ipc=0.7083 ipc_eff=1.3750" in out
    counters = pd.read_csv(tmp_path / 'counters.csv').set_index('counter')['value']
    assert counters['n_cycles'] == 24
    assert counters['n_updates'] == 1

@pytest.mark.parametrize("source, message", [
    ("# nothing here\n", "no instructions"),
    ("nop\nj nowhere\n", "line 2: undefined label 'nowhere'"),
])
def test_run_asm_rejects_bad_sources(tmp_path, caplog, source, message):
    path = tmp_path / 'prog.s'
    path.write_text(source)
    assert main(['run-asm', str(path), '--out', str(tmp_path / 'out')]) == 1
    assert any(message in r.getMessage() for r in caplog.records if r.levelno == logging.ERROR)

def test_run_asm_reports_traps(tmp_path, capsys):
    path = tmp_path / 'trap.s'
    path.write_text("li a0, 3\necall\n")
    assert main(['run-asm', str(path), '--out', str(tmp_path / 'out')]) == 1
    assert "x10   a0 = 0x00000003" in capsys.readouterr().out

def test_run_asm_budget(tmp_path):
    path = tmp_path / 'loop.s'
    path.write_text("loop: j loop\n")
    assert main(['run-asm', str(path), '--max-instructions', '50', '--out', str(tmp_path / 'out')]) == 1

def test_encode_and_decode(capsys):
    assert main(['encode', 'nmpn a2, a6, a7', 'nop']) == 0
    assert capsys.readouterr().out.splitlines() == [
        "0x0118260b  nmpn a2, a6, a7",
        "0x00000013  nop",
    ]
    assert main(['decode', '0x0118260b', 'ffffffff']) == 0
    assert capsys.readouterr().out.splitlines() == [
        "0x0118260b  nmpn a2, a6, a7",
        "0xffffffff  .word 0xffffffff",
    ]
    assert main(['decode', 'zz']) == 1
    assert main(['encode', 'nmpn a2, a6']) == 1

def test_solve_sudoku_reports_each_line(tmp_path, capsys):
    puzzles = tmp_path / 'puzzles.txt'
    puzzles.write_text(f"{COMPLETE}\n{'.' * 80}\n")
    out = tmp_path / 'out'
    status = main(['solve-sudoku', '--puzzles', str(puzzles), '--max-ticks', '300', '--out', str(out)])
    assert status == 1
    table = pd.read_csv(out / 'sudoku_summary.csv', dtype={'solution': str})
    assert table['status'].tolist() == ['solved', 'parse_error']
    assert table.loc[0, 'ticks'] == 150
    assert table.loc[0, 'solution'] == COMPLETE
    assert "solved 1/2" in capsys.readouterr().out

def test_solve_sudoku_success(tmp_path):
    puzzles = tmp_path / 'puzzles.txt'
    puzzles.write_text(f"# one complete grid\n{COMPLETE}\n")
    assert main(['solve-sudoku', '--puzzles', str(puzzles), '--out', str(tmp_path / 'out')]) == 0
    manifest = json.loads((tmp_path / 'out' / 'manifest.json').read_text())
    assert str(puzzles) in manifest['inputs']

def test_solve_sudoku_missing_file(tmp_path):
    assert main(['solve-sudoku', '--puzzles', str(tmp_path / 'missing.txt'),
                 '--out', str(tmp_path / 'out')]) == 1

def test_config_hash_ignores_output_location():
    parser = build_parser()
    a = config_from_args(parser.parse_args(['run-8020', '--out', 'x', '--seed', '5']))
    b = config_from_args(parser.parse_args(['--verbose', 'run-8020', '--out', 'y', '--seed', '5']))
    c = config_from_args(parser.parse_args(['run-8020', '--out', 'x', '--seed', '6']))
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()
    assert isinstance(a, RunConfig) and a.seed == 5 and a.out_dir == 'x'

def test_subcommand_is_required():
    with pytest.raises(SystemExit):
        main([])

@pytest.mark.parametrize("argv", [
    ['--verbose', 'dcu-table'],
    ['dcu-table', '--verbose'],
    ['decode', '--verbose', '0x00000013'],
])
def test_verbose_before_or_after_subcommand(argv):
    assert build_parser().parse_args(argv).verbose is True
    quiet = [arg for arg in argv if arg != '--verbose']
    assert build_parser().parse_args(quiet).verbose is False

def test_solve_sudoku_rejects_bad_drive(tmp_path, caplog):
    puzzles = tmp_path / 'puzzles.txt'
    puzzles.write_text(f"{COMPLETE}\n")
    drive = tmp_path / 'drive.txt'
    drive.write_text("version\t9\ndecay_divider\t9\n")
    with caplog.at_level(logging.ERROR):
        assert main(['solve-sudoku', '--puzzles', str(puzzles), '--drive', str(drive),
                     '--out', str(tmp_path / 'out')]) == 1
    assert "unsupported decay divider /9" in caplog.text
    assert not (tmp_path / 'out' / 'sudoku_summary.csv').exists()

def test_requirements_are_installable_specifiers():
    path = Path(izhirisc.__file__).resolve().parent.parent / 'requirements.txt'
    lines = [line.split('#', 1)[0].strip() for line in path.read_text().splitlines()]
    requirements = [line for line in lines if line]
    assert {re.split(r'[<>=!~]', r, maxsplit=1)[0] for r in requirements} == {'numpy', 'pandas', 'pytest'}
    assert all(re.fullmatch(r'[A-Za-z0-9_.\-]+(\s*[<>=!~]=?\s*[\w.*]+)?', r) for r in requirements)
