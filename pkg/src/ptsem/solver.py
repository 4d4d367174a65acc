"""Decision dispatch: internal quantifier elimination or an external solver.

A sentence that is linear (after constant propagation) is decided
in-process, exactly.  Anything else is shipped as an SMT-LIB script to a
user-configured solver command, one process per query; timeouts and
solver failures come back as Unknown verdicts, never exceptions.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import qe
from .arith import ArithFormula, emit_smtlib

SOLVER_ENV_VAR = "PTS_SOLVER_CMD"


@dataclass(frozen=True)
class SolverVerdict:
    status: str  # "sat" | "unsat" | "unknown"
    reason: Optional[str] = None
    model: Optional[dict[str, Fraction]] = None

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"

    @property
    def is_unsat(self) -> bool:
        return self.status == "unsat"

    @property
    def is_unknown(self) -> bool:
        return self.status == "unknown"


@dataclass(frozen=True)
class SolverConfig:
    command: Optional[str] = None  # template; {script} or appended path
    timeout: float = 30.0
    want_model: bool = False

    @classmethod
    def from_env(cls, command: Optional[str] = None, timeout: float = 30.0,
                 want_model: bool = False) -> "SolverConfig":
        return cls(command or os.environ.get(SOLVER_ENV_VAR) or None,
                   timeout, want_model)


def linear_qe(phi: ArithFormula, want_model: bool = False) -> SolverVerdict:
    """Complete decision for multiplication-free sentences.

    Raises FragmentError when the sentence is genuinely nonlinear (a
    rational constant times a variable still counts as linear).
    """
    forced: dict[str, Fraction] = {}
    tree = qe.to_internal(phi, allow_poly=False, env_out=forced)
    truth = tree if isinstance(tree, bool) else qe.decide(tree)
    if not truth:
        return SolverVerdict("unsat")
    model = None
    if want_model:
        searched = {} if isinstance(tree, bool) else qe.find_model(tree)
        if searched is not None:
            model = {**forced, **searched} or None
    return SolverVerdict("sat", model=model)


def solve(phi: ArithFormula, config: SolverConfig | None = None) -> SolverVerdict:
    """Decide a closed sentence: internally when linear, else externally.

    The sentence is simplified first; compiled team checks routinely
    turn linear (or ground) once the team's constants propagate, in
    which case no solver process is ever launched.
    """
    config = config or SolverConfig()
    forced: dict[str, Fraction] = {}
    tree = qe.to_internal(phi, allow_poly=True, env_out=forced)
    if isinstance(tree, bool):
        model = (forced or None) if (tree and config.want_model) else None
        return SolverVerdict("sat" if tree else "unsat", model=model)
    if not qe.has_nonlinear_residue(tree):
        truth = qe.decide(tree)
        if not truth:
            return SolverVerdict("unsat")
        model = None
        if config.want_model:
            searched = qe.find_model(tree)
            if searched is not None:
                model = {**forced, **searched} or None
        return SolverVerdict("sat", model=model)
    if config.command is None:
        return SolverVerdict("unknown", reason="solver-missing")
    verdict = run_external(qe.to_arith(qe.flatten_exists(tree)), config)
    if verdict.is_sat and config.want_model and forced:
        return SolverVerdict("sat", model={**forced, **(verdict.model or {})})
    return verdict


def run_external(phi: ArithFormula, config: SolverConfig) -> SolverVerdict:
    script = emit_smtlib(phi, get_model=config.want_model)
    return run_script(script, config)


def run_script(script: str, config: SolverConfig) -> SolverVerdict:
    if config.command is None:
        return SolverVerdict("unknown", reason="solver-missing")
    with tempfile.NamedTemporaryFile(
            mode="w", suffix=".smt2", prefix="ptsem_", delete=False) as handle:
        handle.write(script)
        path = handle.name
    try:
        if "{script}" in config.command:
            argv = [part.replace("{script}", path)
                    for part in shlex.split(config.command)]
        else:
            argv = shlex.split(config.command) + [path]
        try:
            proc = subprocess.run(
                argv, capture_output=True, text=True, timeout=config.timeout)
        except subprocess.TimeoutExpired:
            return SolverVerdict("unknown", reason="timeout")
        except OSError as exc:
            return SolverVerdict("unknown", reason=f"solver failed to start: {exc}")
        return _parse_output(proc.stdout, proc.stderr, proc.returncode)
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass


def _parse_output(stdout: str, stderr: str, returncode: int) -> SolverVerdict:
    answer = None
    for line in stdout.splitlines():
        word = line.strip()
        if word in ("sat", "unsat", "unknown"):
            answer = word
            break
    if answer is None:
        detail = (stderr or stdout).strip().splitlines()
        head = detail[0] if detail else f"exit status {returncode}"
        return SolverVerdict("unknown", reason=f"solver-said-nothing: {head}")
    if answer == "unknown":
        return SolverVerdict("unknown", reason="solver-said-unknown")
    if answer == "sat":
        return SolverVerdict("sat", model=_parse_model(stdout))
    return SolverVerdict("unsat")


# --- model parsing -------------------------------------------------------------


def _tokenize_sexpr(text: str):
    out = []
    token = []
    for ch in text:
        if ch in "()":
            if token:
                out.append("".join(token))
                token = []
            out.append(ch)
        elif ch.isspace():
            if token:
                out.append("".join(token))
                token = []
        else:
            token.append(ch)
    if token:
        out.append("".join(token))
    return out


def _read_sexpr(tokens: list[str], pos: int):
    if tokens[pos] != "(":
        return tokens[pos], pos + 1
    out = []
    pos += 1
    while pos < len(tokens) and tokens[pos] != ")":
        node, pos = _read_sexpr(tokens, pos)
        out.append(node)
    return out, pos + 1


def _numeric(node) -> Optional[Fraction]:
    if isinstance(node, str):
        try:
            return Fraction(node)
        except (ValueError, ZeroDivisionError):
            return None
    if isinstance(node, list) and node:
        if node[0] == "/" and len(node) == 3:
            num, den = _numeric(node[1]), _numeric(node[2])
            if num is not None and den not in (None, 0):
                return num / den
        if node[0] == "-" and len(node) == 2:
            val = _numeric(node[1])
            return None if val is None else -val
    return None


def _parse_model(stdout: str) -> Optional[dict[str, Fraction]]:
    """Rational assignments from a (get-model) block; irrational values
    (algebraic roots) are skipped rather than approximated."""
    if "define-fun" not in stdout:
        return None
    tokens = _tokenize_sexpr(stdout[stdout.index("("):])
    try:
        tree, _ = _read_sexpr(tokens, 0)
    except IndexError:
        return None
    model: dict[str, Fraction] = {}
    nodes = tree if isinstance(tree, list) else []
    for entry in nodes:
        if (isinstance(entry, list) and len(entry) >= 5 and entry[0] == "define-fun"
                and entry[2] == [] and entry[3] == "Real"):
            value = _numeric(entry[4])
            if value is not None:
                model[entry[1]] = value
    return model or None
