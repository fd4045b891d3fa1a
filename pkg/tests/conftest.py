import sys
from pathlib import Path

import pytest

BIN_DIR = Path(__file__).resolve().parent.parent / 'bin'
sys.path.insert(0, str(BIN_DIR))

CONFIG_DIR = BIN_DIR.parent / 'config'

def backtrack_solve(cells):
    """Plain depth-first Sudoku solver, independent of the network code"""
    grid = list(cells)

    def allowed(pos, digit):
        r, c = divmod(pos, 9)
        br, bc = 3 * (r // 3), 3 * (c // 3)
        for k in range(9):
            if grid[r * 9 + k] == digit or grid[k * 9 + c] == digit:
                return False
            if grid[(br + k // 3) * 9 + bc + k % 3] == digit:
                return False
        return True

    def search():
        try:
            pos = grid.index(0)
        except ValueError:
            return True
        for digit in range(1, 10):
            if allowed(pos, digit):
                grid[pos] = digit
                if search():
                    return True
                grid[pos] = 0
        return False

    return grid if search() else None

@pytest.fixture(scope="session")
def config_dir():
    return CONFIG_DIR

@pytest.fixture
def oracle_solver():
    return backtrack_solve
