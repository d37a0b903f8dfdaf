"""The nine acceptance criteria, one test each (same code path as ``python -m wellpoised.acceptance``)."""
import pytest

from wellpoised.acceptance import CRITERIA, main, run_criterion


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA), ids=[f"{n}-{CRITERIA[n][0].replace(' ', '_')}" for n in sorted(CRITERIA)])
def test_criterion(number):
    out = run_criterion(number)
    print(out.line())
    assert out.passed, out.detail


def test_runner_prints_one_line_per_criterion(capsys):
    assert main(["7", "8"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2 and all(line.startswith("[PASS]") for line in lines)
