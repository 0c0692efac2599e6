import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from pltlgames.formula import parse_formula  # noqa: E402
from pltlgames.game import parse_arena  # noqa: E402
from pltlgames.solve import PltlGame  # noqa: E402

FIXTURES = HERE / "fixtures"


def load_arena(name: str):
    return parse_arena((FIXTURES / f"{name}.gm").read_text())


def game(arena: str, formula: str) -> PltlGame:
    return PltlGame(load_arena(arena), parse_formula(formula))


PHI1, PHI2, PHI3 = "F<=x p", "G(q -> F<=x p)", "G<=y p"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
