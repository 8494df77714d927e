"""Acceptance criteria, one pass/fail line each (also echoed in the pytest summary).

Tolerances live in :mod:`mlradon.acceptance`; criterion 8 is checked at the
command-line level by running ``verify --seed 7`` under two worker counts.
"""

import os
import subprocess
import sys

import pytest

from conftest import ACCEPTANCE_LINES
from mlradon import acceptance

SEED = 7

CRITERIA = [
    ("1", acceptance.check_symbolic),
    ("2", lambda seed: acceptance.check_polytopes()),
    ("3", acceptance.check_exponents),
    ("4", acceptance.check_ball_calibration),
    ("5", acceptance.check_scaling),
    ("6", acceptance.check_chart),
    ("7", acceptance.check_necessity),
]


def _record(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.mark.parametrize("number, check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(number, check):
    chk = check(seed=SEED)
    _record(f"criterion {number} [{'PASS' if chk.passed else 'FAIL'}] {chk.name} ({chk.seconds:.1f} s)")
    for d in chk.details:
        print("    " + d)
    assert chk.passed, "\n".join(chk.lines())


def _verify(threads: int) -> subprocess.CompletedProcess:
    env = dict(os.environ, MLRADON_THREADS=str(threads))
    return subprocess.run(
        [sys.executable, "-m", "mlradon.cli", "verify", "--seed", str(SEED)],
        capture_output=True,
        env=env,
        timeout=900,
    )


def test_criterion_8_verify_is_byte_identical():
    one, three = _verify(1), _verify(3)
    same = one.stdout == three.stdout
    passed = same and one.returncode == 0 and b"overall: PASS" in one.stdout
    _record(
        f"criterion 8 [{'PASS' if passed else 'FAIL'}] verify --seed {SEED} byte-identical with 1 and 3 workers "
        f"(identical: {'yes' if same else 'no'}, exit codes {one.returncode}/{three.returncode})"
    )
    print(one.stdout.decode())
    assert passed, one.stderr.decode() + three.stderr.decode()
