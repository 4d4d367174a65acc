import os
import shutil
import subprocess
from pathlib import Path

import pytest

from ptsem.solver import SOLVER_ENV_VAR, SolverConfig

REPO_ROOT = Path(__file__).resolve().parent.parent
WRAPPER = REPO_ROOT / "tools" / "z3smt.mjs"

_probe_result = None


def solver_command() -> str | None:
    """The external SMT command for this environment, probed once.

    Honors PTS_SOLVER_CMD; otherwise uses the bundled z3 WASM wrapper if
    node and the npm package are installed (see tools/).
    """
    global _probe_result
    if _probe_result is not None:
        return _probe_result or None
    candidate = os.environ.get(SOLVER_ENV_VAR)
    if not candidate:
        node = shutil.which("node")
        modules = WRAPPER.parent / "node_modules" / "z3-solver"
        if node and WRAPPER.exists() and modules.exists():
            candidate = f"{node} {WRAPPER}"
    if candidate:
        try:
            from ptsem.solver import run_script
            probe = run_script("(set-logic LRA)\n(check-sat)\n",
                               SolverConfig(command=candidate, timeout=60))
            if probe.status == "sat":
                _probe_result = candidate
                return candidate
        except Exception:
            pass
    _probe_result = ""
    return None


@pytest.fixture(scope="session")
def solver_cmd() -> str:
    command = solver_command()
    if command is None:
        pytest.skip("no SMT solver available (run `npm install` in tools/ "
                    "or set PTS_SOLVER_CMD)")
    return command


@pytest.fixture(scope="session")
def solver_config(solver_cmd) -> SolverConfig:
    return SolverConfig(command=solver_cmd, timeout=120)
