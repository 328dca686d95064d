"""End-to-end workflows behind the command line: verify, refine, select, bench."""

from __future__ import annotations

import json
import logging
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .config import Settings
from .context import Context, parse_context
from .critic import Critic, Overall, Report, make_feedback, select_solution
from .errors import ContextError, FormalizationFailed, ParseError, StepcheckError
from .formalizer import (
    Endpoint, FormalizationRequest, HttpEndpoint, MockEndpoint, build_generation_prompt,
    build_regeneration_prompt, formalize,
)

log = logging.getLogger(__name__)

GENERIC_FEEDBACK = ("The solution could not be translated into checkable steps. Write one "
                    "short claim per step with exact arithmetic.")
UNVERIFIED_FEEDBACK = ("Some steps could not be verified either way. Justify them with "
                       "smaller steps.")


def write_atomic(path: Path | str, text: str) -> None:
    """Write ``text`` to a temporary sibling, then rename it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def load_context(path: Path | str) -> Context:
    return parse_context(Path(path).read_text(encoding="utf-8"))


def verify_file(path: Path | str, settings: Settings, critic: Critic | None = None) -> Report:
    return (critic or Critic(settings.critic_config())).verify_context(load_context(path))


# -- mock scripts ----------------------------------------------------------------------


def mock_sidecar(problem_path: Path | str) -> dict:
    """``<problem>.mock.json`` next to a problem file: scripted replies per role."""
    path = Path(problem_path)
    sidecar = path.with_name(path.stem + ".mock.json")
    if not sidecar.is_file():
        raise FileNotFoundError(f"mock mode needs {sidecar}")
    return json.loads(sidecar.read_text(encoding="utf-8"))


def endpoints(settings: Settings, problem_path: Path | str | None = None
              ) -> tuple[Endpoint, Endpoint]:
    """(generator, formalizer), scripted under ``--mock``."""
    if settings.mock:
        script = mock_sidecar(problem_path) if problem_path is not None else {}
        gen = MockEndpoint(script.get("generator") or [""], settings.generator)
        form = MockEndpoint(script.get("formalizer") or [""], settings.formalizer)
        return gen, form
    return HttpEndpoint(settings.generator), HttpEndpoint(settings.formalizer)


# -- refinement ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Iteration:
    number: int
    solution: str
    report: Report | None
    feedback: tuple[str, ...]           # sent to the generator after this iteration
    formalization_attempts: int
    diagnostics: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"iteration": self.number, "solution": self.solution,
                "report": self.report.to_json() if self.report else None,
                "feedback": list(self.feedback),
                "formalization_attempts": self.formalization_attempts,
                "diagnostics": list(self.diagnostics)}


@dataclass(frozen=True)
class RefineOutcome:
    solution: str
    report: Report | None
    trace: tuple[Iteration, ...]
    generator_calls: int
    feedback_messages: int

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def exit_code(self) -> int:
        return self.report.exit_code if self.report is not None else 3

    def to_json(self) -> dict:
        return {"schema_version": 1, "iterations": self.iterations,
                "final_status": self.report.overall.value if self.report else None,
                "final_solution": self.solution, "generator_calls": self.generator_calls,
                "feedback_messages": self.feedback_messages,
                "trace": [it.to_json() for it in self.trace]}


def refine(problem: str, generator: Endpoint, formalizer: Endpoint, max_iter: int,
           critic: Critic, transcript_path: Path | str | None = None) -> RefineOutcome:
    """Generate, formalize, verify; feed failures back until valid or out of iterations."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    solution = generator.complete(build_generation_prompt(problem))
    calls, messages = 1, 0
    trace: list[Iteration] = []
    report: Report | None = None
    for number in range(1, max_iter + 1):
        attempts, diagnostics = 0, ()
        try:
            result = formalize(FormalizationRequest(problem, solution), formalizer,
                               transcript_path)
        except FormalizationFailed as exc:
            report, attempts, diagnostics = None, exc.attempts, tuple(exc.diagnostics)
            feedback = [GENERIC_FEEDBACK]
        else:
            attempts = result.attempts
            report = critic.verify_context(result.context)
            feedback = [f.render() for f in make_feedback(report)]
            if report.overall is Overall.INCONCLUSIVE and not feedback:
                feedback = [UNVERIFIED_FEEDBACK]
        done = report is not None and report.overall is Overall.ALL_VALID
        last = done or number == max_iter
        trace.append(Iteration(number, solution, report, () if last else tuple(feedback),
                               attempts, diagnostics))
        if last:
            break
        solution = generator.complete(build_regeneration_prompt(problem, solution, feedback))
        calls += 1
        messages += 1
    return RefineOutcome(solution, report, tuple(trace), calls, messages)


# -- selection ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SelectOutcome:
    chosen: int | None
    candidates: tuple[dict, ...]

    def to_json(self) -> dict:
        return {"schema_version": 1, "chosen": self.chosen, "candidates": list(self.candidates)}


def select(paths: Sequence[Path | str], critic: Critic) -> SelectOutcome:
    """Verify every candidate; unreadable ones are demoted, never fatal."""
    pairs: list[tuple[Context, Report | None]] = []
    rows = []
    for i, path in enumerate(paths):
        try:
            ctx = load_context(path)
            report = critic.verify_context(ctx)
        except (OSError, ParseError, ContextError, StepcheckError) as exc:
            log.warning("candidate %s demoted: %s", path, exc)
            pairs.append((Context(), None))
            rows.append({"index": i, "path": Path(path).name, "status": "error",
                         "statements": None, "error": str(exc)})
            continue
        pairs.append((ctx, report))
        rows.append({"index": i, "path": Path(path).name, "status": report.overall.value,
                     "statements": len(ctx.statements), "first_invalid": report.first_invalid})
    return SelectOutcome(select_solution(pairs), tuple(rows))


# -- benchmark ----------------------------------------------------------------------------


class EmptyCorpus(StepcheckError):
    pass


_STATUSES = {o.value for o in Overall}


def _label(ctx_path: Path) -> dict:
    data = json.loads(ctx_path.with_name(ctx_path.stem + ".label.json").read_text())
    if data.get("expected_status") not in _STATUSES:
        raise ValueError(f"bad expected_status {data.get('expected_status')!r}")
    step = data.get("first_error_step")
    if (data["expected_status"] == "HasInvalid") != isinstance(step, int):
        raise ValueError("first_error_step must be an id exactly for HasInvalid labels")
    return data


def _rate(num: int, den: int) -> float | None:
    return num / den if den else None


def bench(corpus_dir: Path | str, critic: Critic, record_latency: bool = True) -> dict:
    """Run every labeled fixture and summarise discrimination and cost."""
    corpus = Path(corpus_dir)
    if not corpus.is_dir():
        raise FileNotFoundError(f"corpus directory {corpus} not found")
    rows, skipped = [], []
    for path in sorted(corpus.glob("*.ctx")):
        try:
            label = _label(path)
            ctx = load_context(path)
        except (OSError, ValueError, ParseError, ContextError) as exc:
            log.warning("skipping fixture %s: %s", path.name, exc)
            skipped.append({"fixture": path.stem, "error": str(exc)})
            continue
        start = time.perf_counter()
        report = critic.verify_context(ctx)
        elapsed = time.perf_counter() - start
        rows.append({
            "fixture": path.stem,
            "expected_status": label["expected_status"],
            "first_error_step": label.get("first_error_step"),
            "status": report.overall.value,
            "first_invalid": report.first_invalid,
            "C1": report.cost.C1, "C2": report.cost.C2,
            "latency_s": round(elapsed, 4) if record_latency else None,
            "verdicts": {str(r.id): r.verdict.status.value for r in report.results},
        })
    if not rows:
        raise EmptyCorpus(f"no usable fixtures in {corpus}")
    seeded = [r for r in rows if r["expected_status"] == "HasInvalid"]
    correct = [r for r in rows if r["expected_status"] != "HasInvalid"]
    detected = sum(r["status"] == "HasInvalid" for r in seeded)
    alarms = sum(r["status"] == "HasInvalid" for r in correct)
    located = sum(r["first_invalid"] == r["first_error_step"] for r in seeded)
    sum_c1, sum_c2 = sum(r["C1"] for r in rows), sum(r["C2"] for r in rows)
    judged = sum(len(r["verdicts"]) for r in rows)
    latency = (round(sum(r["latency_s"] for r in rows) / judged, 4)
               if record_latency and judged else None)
    return {
        "schema_version": 1,
        "corpus": corpus.name,
        "fixtures": {"correct": len(correct), "seeded_error": len(seeded),
                     "skipped": len(skipped)},
        "detection_rate": _rate(detected, len(seeded)),
        "false_alarm_rate": _rate(alarms, len(correct)),
        "first_error_accuracy": _rate(located, len(seeded)),
        "mean_verdict_latency_s": latency,
        "C1_total": sum_c1, "C2_total": sum_c2,
        "savings_ratio": _rate(sum_c2, sum_c1),
        "label_agreement": sum(r["status"] == r["expected_status"]
                               and r["first_invalid"] == r["first_error_step"] for r in rows),
        "results": rows,
        "skipped": skipped,
    }


def bench_table(summary: dict) -> str:
    def pct(x):
        return "n/a" if x is None else f"{x:.3f}"

    lines = [f"{'fixture':<28} {'expected':<13} {'got':<13} {'step':>4} {'C1':>4} {'C2':>4}"]
    for r in summary["results"]:
        step = "" if r["first_invalid"] is None else str(r["first_invalid"])
        lines.append(f"{r['fixture']:<28} {r['expected_status']:<13} {r['status']:<13} "
                     f"{step:>4} {r['C1']:>4} {r['C2']:>4}")
    f = summary["fixtures"]
    lines.append(f"fixtures: {f['correct']} correct, {f['seeded_error']} seeded, "
                 f"{f['skipped']} skipped")
    lines.append(f"detection {pct(summary['detection_rate'])}  "
                 f"false alarm {pct(summary['false_alarm_rate'])}  "
                 f"first-error accuracy {pct(summary['first_error_accuracy'])}  "
                 f"savings C2/C1 {pct(summary['savings_ratio'])}")
    return "\n".join(lines) + "\n"


__all__ = [
    "EmptyCorpus", "Iteration", "RefineOutcome", "SelectOutcome", "bench", "bench_table",
    "dump_json", "endpoints", "load_context", "mock_sidecar", "refine", "select",
    "verify_file", "write_atomic",
]
