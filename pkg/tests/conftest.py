import functools

import numpy as np
import pytest

from goorgrow.solver import Grid1D, InitialCondition, SimulationConfig, simulate
from goorgrow.switching import FIGURE_PAIRS, SwitchingFunction, SwitchingPair

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}

DESK_GRID = Grid1D(1000.0, 4000)


def step_config(pair, t_end=400.0, every=5.0, grid=DESK_GRID, **kw):
    times = list(np.arange(every, t_end + 1e-9, every))
    return SimulationConfig(pair, grid, t_end, times, initial=InitialCondition.step(0.2, 100.0), **kw)


@functools.lru_cache(maxsize=None)
def desk_run(pair: SwitchingPair, t_end: float = 400.0, model: str = "full"):
    """Desk-scale step-data run, cached across test modules."""
    return simulate(step_config(pair, t_end, model=model))


@pytest.fixture(scope="session")
def fig1_runs():
    return {name: desk_run(pair, 500.0) for name, pair in FIGURE_PAIRS.items()}


def constant_pair(g1, g2):
    return SwitchingPair(SwitchingFunction.constant(g1), SwitchingFunction.constant(g2))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
