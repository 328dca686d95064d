"""Driving an external SMT-LIB 2 solver over its standard input and output."""

from __future__ import annotations

import os
import select
import shutil
import subprocess
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .encode import SmtScript
from .sexp import SExpError, complete_prefix, parse, parse_model, render

GRACE_MS = 500


class OutcomeKind(Enum):
    UNSAT = "unsat"
    SAT = "sat"
    UNKNOWN = "unknown"
    ERROR = "error"


@dataclass(frozen=True)
class SolverOutcome:
    kind: OutcomeKind
    model: dict[str, str] = field(default_factory=dict)   # symbol -> value text
    model_text: str = ""
    reason: str = ""
    stderr: str = ""
    exit_code: int | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind.value}
        if self.model:
            out["model"] = dict(sorted(self.model.items()))
        if self.reason:
            out["reason"] = self.reason
        if self.kind is OutcomeKind.ERROR:
            out["stderr"] = self.stderr
            out["exit_code"] = self.exit_code
        return out


@dataclass(frozen=True)
class SolverConfig:
    path: str = "z3"
    flags: tuple[str, ...] = ("-in", "-smt2")
    timeout_ms: int = 5000
    pool_size: int = 4
    seed: int | None = 0
    artifact_dir: Path | None = None

    def resolved_path(self) -> str | None:
        return shutil.which(self.path)


class OutcomeCache:
    """Script text -> outcome, shared between threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict[str, SolverOutcome] = {}
        self.hits = 0

    def get(self, key: str) -> SolverOutcome | None:
        with self._lock:
            found = self._data.get(key)
            if found is not None:
                self.hits += 1
            return found

    def put(self, key: str, outcome: SolverOutcome) -> None:
        with self._lock:
            self._data[key] = outcome

    def __len__(self) -> int:
        with self._lock:
            return len(self._data)


class _Session:
    """One solver process; responses are read with a wall-clock deadline."""

    def __init__(self, argv: list[str], deadline: float):
        self.deadline = deadline
        self.proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                     stderr=subprocess.PIPE)
        self.buffer = ""

    def send(self, text: str) -> None:
        assert self.proc.stdin is not None
        self.proc.stdin.write(text.encode())
        self.proc.stdin.flush()

    def read(self) -> str | None:
        """Next complete response, or None on timeout or end of output."""
        fd = self.proc.stdout.fileno()
        while True:
            end = complete_prefix(self.buffer)
            if end is not None:
                chunk, self.buffer = self.buffer[:end], self.buffer[end:]
                return chunk.strip()
            remaining = self.deadline - time.monotonic()
            if remaining <= 0:
                return None
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                return None
            data = os.read(fd, 65536)
            if not data:
                tail = self.buffer.strip()
                self.buffer = ""
                return tail or None
            self.buffer += data.decode(errors="replace")

    def close(self) -> tuple[str, int | None]:
        try:
            if self.proc.poll() is None:
                try:
                    self.send("(exit)\n")
                    self.proc.stdin.close()
                except OSError:
                    pass
                try:
                    self.proc.wait(timeout=0.5)
                except subprocess.TimeoutExpired:
                    self.kill()
            err = self.proc.stderr.read().decode(errors="replace") if self.proc.stderr else ""
        finally:
            for stream in (self.proc.stdout, self.proc.stderr):
                if stream:
                    stream.close()
        return err[-2000:], self.proc.returncode

    def kill(self) -> None:
        self.proc.kill()
        self.proc.wait()


def _error(message: str, stderr: str = "", code: int | None = None) -> SolverOutcome:
    return SolverOutcome(OutcomeKind.ERROR, reason=message, stderr=stderr, exit_code=code)


def _is_error(resp: str) -> bool:
    return resp.startswith("(error")


def run_solver(script: SmtScript, config: SolverConfig | None = None,
               cache: OutcomeCache | None = None) -> SolverOutcome:
    """Check ``script``; the process is killed once the timeout plus grace elapses."""
    config = config or SolverConfig()
    text = script.text(seed=config.seed, check=False)
    key = f"{config.path}\0{' '.join(config.flags)}\0{script.timeout_ms}\0{text}"
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    if config.artifact_dir is not None:
        folder = Path(config.artifact_dir)
        folder.mkdir(parents=True, exist_ok=True)
        (folder / f"{script.digest()}.smt2").write_text(script.text(seed=config.seed))

    exe = config.resolved_path()
    if exe is None:
        return _error(f"solver executable {config.path!r} not found")
    deadline = time.monotonic() + (script.timeout_ms + GRACE_MS) / 1000
    try:
        session = _Session([exe, *config.flags], deadline)
    except OSError as exc:
        return _error(f"could not start solver: {exc}")
    try:
        outcome = _converse(session, text)
    except (BrokenPipeError, OSError) as exc:
        session.kill()
        stderr, code = session.close()
        outcome = _error(f"solver pipe failed: {exc}", stderr, code)
    else:
        if outcome is None:
            session.kill()
            session.close()
            outcome = SolverOutcome(OutcomeKind.UNKNOWN, reason="timeout")
        elif outcome.kind is OutcomeKind.ERROR:
            stderr, code = session.close()
            outcome = _error(outcome.reason, stderr, code)
        else:
            session.close()
    if cache is not None and not (outcome.kind is OutcomeKind.UNKNOWN
                                  and outcome.reason == "timeout"):
        cache.put(key, outcome)
    return outcome


def _converse(session: _Session, text: str) -> SolverOutcome | None:
    session.send(text + "(check-sat)\n")
    answer = session.read()
    if answer is None:
        return None
    if _is_error(answer):
        return _error(answer)
    if answer == "unsat":
        return SolverOutcome(OutcomeKind.UNSAT)
    if answer == "sat":
        session.send("(get-model)\n")
        model_text = session.read()
        if model_text is None:
            return None
        if _is_error(model_text):
            return _error(model_text)
        try:
            model = {name: render(body) if not params else
                     f"(lambda ({' '.join(params)}) {render(body)})"
                     for name, (params, body) in parse_model(model_text).items()}
        except SExpError as exc:
            return _error(f"unreadable model: {exc}")
        return SolverOutcome(OutcomeKind.SAT, model, model_text)
    if answer == "unknown":
        session.send("(get-info :reason-unknown)\n")
        info = session.read()
        reason = "unknown"
        if info is not None and not _is_error(info):
            try:
                parsed = parse(info)
                if isinstance(parsed, list) and len(parsed) >= 2:
                    reason = parsed[1].strip('"')
            except SExpError:
                pass
        return SolverOutcome(OutcomeKind.UNKNOWN, reason=reason)
    return _error(f"unexpected solver response {answer[:200]!r}")


class SolverPool:
    """Bounded concurrent access to solver processes, sharing one cache."""

    def __init__(self, config: SolverConfig | None = None, cache: OutcomeCache | None = None):
        self.config = config or SolverConfig()
        self.cache = cache if cache is not None else OutcomeCache()
        self._slots = threading.BoundedSemaphore(max(1, self.config.pool_size))

    def run(self, script: SmtScript) -> SolverOutcome:
        with self._slots:
            return run_solver(script, self.config, self.cache)
