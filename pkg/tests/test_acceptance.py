"""Acceptance criteria 1-11, one test each, at the stated tolerances.

Every test prints a single ``criterion N PASS|FAIL`` line (collected in the
terminal summary).  Run standalone with ``python tests/test_acceptance.py``.
"""

import pytest

from scsparse.acceptance import CRITERIA, dense_complexes, truncation_errors
from scsparse.experiments import default_kid_parameters, geometric_grid, loglog_slope

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # standalone run
    ACCEPTANCE_LINES = []


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    res = CRITERIA[number]()
    line = res.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert res.passed, line


@pytest.mark.slow
def test_truncation_error_scales_like_inverse_m():
    """With exact moments (no probe noise) the error falls off about as 1/M."""
    _, _, c = dense_complexes((40,))[0]
    M_grid = geometric_grid(default_kid_parameters(c, 1, 0.1).M, 1.0, 6, odd=True)
    slope = loglog_slope(M_grid, truncation_errors(c, 1, M_grid))
    print(f"exact-moment slope vs M: {slope:.2f}")
    assert -1.5 <= slope <= -0.6


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        print(CRITERIA[n]().line(), flush=True)
