"""Validity checks ``a => b`` over the finite valuation space of a model."""

from __future__ import annotations

import shlex
import subprocess
import threading

import numpy as np

from ..errors import DomainError, EvaluationError
from ..expr import Expr, to_smtlib
from ..model import SymbolicMdp

MAX_ENUMERATED_VALUATIONS = 1 << 22


class EnumerationEntailment:
    """Decides entailment by evaluating both sides on every valuation at once."""

    name = "enumeration"

    def __init__(self, model: SymbolicMdp):
        count = model.valuation_count()
        if count > MAX_ENUMERATED_VALUATIONS:
            raise DomainError(f"{count} valuations are too many to enumerate")
        self.model = model
        self.count = count
        self.arrays = model.valuation_arrays()
        self._masks: dict[Expr, np.ndarray] = {}
        self.queries = 0

    def mask(self, e: Expr) -> np.ndarray:
        """Boolean array: which valuations (in ``all_valuations`` order) satisfy ``e``."""
        m = self._masks.get(e)
        if m is None:
            try:
                raw = e.eval_vec(self.arrays)
            except EvaluationError as exc:
                raise DomainError(f"cannot evaluate {e}: {exc}") from exc
            m = np.broadcast_to(np.asarray(raw, dtype=bool), (self.count,))
            if len(self._masks) > 200_000:
                self._masks.clear()
            self._masks[e] = m
        return m

    def entails(self, a: Expr, b: Expr) -> bool:
        self.queries += 1
        return not np.any(self.mask(a) & ~self.mask(b))

    def close(self):
        pass


class SmtEntailment:
    """Entailment via an external SMT-LIB v2 solver process (e.g. ``z3 -in``).

    Variables are declared once with their range constraints; every query is
    wrapped in push/pop. One query is in flight at a time.
    """

    name = "smt"

    def __init__(self, model: SymbolicMdp, command: str):
        self.model = model
        self.command = command
        self._lock = threading.Lock()
        self.queries = 0
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise DomainError(f"cannot start SMT solver {command!r}: {exc}") from exc
        preamble = ["(set-logic QF_LIA)"]
        for d in model.variables:
            if d.kind == "bool":
                preamble.append(f"(declare-const |{d.name}| Bool)")
            else:
                preamble.append(f"(declare-const |{d.name}| Int)")
                lo = str(d.lo) if d.lo >= 0 else f"(- {-d.lo})"
                hi = str(d.hi) if d.hi >= 0 else f"(- {-d.hi})"
                preamble.append(f"(assert (and (<= {lo} |{d.name}|) (<= |{d.name}| {hi})))")
        self._send("\n".join(preamble) + "\n")

    def _send(self, text: str):
        try:
            self._proc.stdin.write(text)
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise DomainError(f"SMT solver I/O failure: {exc}") from exc

    def entails(self, a: Expr, b: Expr) -> bool:
        query = f"(push 1)\n(assert {to_smtlib(a)})\n(assert (not {to_smtlib(b)}))\n(check-sat)\n(pop 1)\n"
        with self._lock:
            self.queries += 1
            self._send(query)
            reply = self._proc.stdout.readline().strip()
        if reply == "unsat":
            return True
        if reply == "sat":
            return False
        raise DomainError(f"SMT solver answered {reply!r}")

    def close(self):
        if self._proc.poll() is None:
            try:
                self._proc.stdin.write("(exit)\n")
                self._proc.stdin.close()
            except (OSError, ValueError):
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()


class FallbackEntailment:
    """Ask ``primary``; on a DomainError switch to ``fallback`` for good."""

    def __init__(self, primary, fallback):
        self.primary = primary
        self.fallback = fallback
        self.failed = False
        self.name = f"{primary.name}+{fallback.name}"

    def entails(self, a: Expr, b: Expr) -> bool:
        if not self.failed:
            try:
                return self.primary.entails(a, b)
            except DomainError:
                self.failed = True
                self.primary.close()
        return self.fallback.entails(a, b)

    def close(self):
        self.primary.close()
        self.fallback.close()
