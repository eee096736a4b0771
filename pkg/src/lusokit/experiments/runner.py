"""Run-matrix execution against an external trainer command.

The trainer is any executable described by a command template with
placeholders for every run field. Contract: on success it prints a
line 'dev=<float> test=<float>' to stdout and exits 0. Anything else
is recorded as a failure for that run; the orchestrator keeps going.

Templates are split into argv tokens first and formatted per token
afterwards, so substituted values containing spaces stay single
arguments.
"""

from __future__ import annotations

import re
import shlex
import string
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from lusokit.benchmarks import TASKS, Metric
from lusokit.errors import ConfigurationError
from lusokit.experiments.grid import RunConfig, make_run_key
from lusokit.experiments.store import STATUS_FAILED, STATUS_OK, ResultsStore

REQUIRED_PLACEHOLDERS = (
    "model",
    "task",
    "lr",
    "dropout",
    "bf16",
    "seed",
    "split_seed",
    "run_key",
)

_SCORE_RE = re.compile(
    r"^dev=([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s+"
    r"test=([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*$"
)


def _placeholders_in(template: str) -> set[str]:
    names = set()
    for _, field_name, _, _ in string.Formatter().parse(template):
        if field_name is not None:
            names.add(field_name)
    return names


def validate_template(template: str) -> None:
    """Reject templates missing run fields or naming unknown ones."""
    try:
        tokens = shlex.split(template)
    except ValueError as exc:
        raise ConfigurationError(f"unparseable command template: {exc}") from None
    if not tokens:
        raise ConfigurationError("command template is empty")
    try:
        found = set().union(*(_placeholders_in(tok) for tok in tokens))
    except ValueError as exc:
        raise ConfigurationError(f"bad placeholder syntax: {exc}") from None
    missing = set(REQUIRED_PLACEHOLDERS) - found
    if missing:
        raise ConfigurationError(
            f"command template missing placeholders: {sorted(missing)}"
        )
    unknown = found - set(REQUIRED_PLACEHOLDERS)
    if unknown:
        raise ConfigurationError(
            f"command template has unknown placeholders: {sorted(unknown)}"
        )


def command_fields(cfg: RunConfig) -> dict[str, str]:
    model, task, lr, dropout, bf16, seed, split_seed = cfg.key_fields()
    return {
        "model": model,
        "task": task,
        "lr": lr,
        "dropout": dropout,
        "bf16": bf16,
        "seed": seed,
        "split_seed": split_seed,
        "run_key": make_run_key(cfg),
    }


def build_command(template: str, cfg: RunConfig) -> list[str]:
    """Split template into tokens, then substitute fields per token."""
    fields = command_fields(cfg)
    return [token.format(**fields) for token in shlex.split(template)]


def parse_scores(stdout: str) -> Optional[tuple[float, float]]:
    """Extract (dev, test) from trainer output; last score line wins."""
    found = None
    for line in stdout.splitlines():
        match = _SCORE_RE.match(line.strip())
        if match:
            found = (float(match.group(1)), float(match.group(2)))
    return found


def _metric_range(task_name: str) -> tuple[float, float]:
    spec = TASKS.get(task_name)
    if spec is not None and spec.metric is Metric.PEARSON:
        return (-1.0, 1.0)
    return (0.0, 1.0)


def run_one(
    cfg: RunConfig,
    template: str,
    timeout: Optional[float] = None,
) -> dict:
    """Execute one run and build its result record."""
    run_key = make_run_key(cfg)
    record = cfg.to_dict()
    cmd = build_command(template, cfg)
    try:
        proc = subprocess.run(
            cmd, capture_output=True, text=True, timeout=timeout
        )
    except FileNotFoundError:
        record.update(status=STATUS_FAILED, dev=None, test=None,
                      error=f"trainer executable not found: {cmd[0]}")
        return record
    except subprocess.TimeoutExpired:
        record.update(status=STATUS_FAILED, dev=None, test=None,
                      error=f"trainer timed out after {timeout}s")
        return record
    if proc.returncode != 0:
        tail = proc.stderr.strip().splitlines()[-1:] or ["(no stderr)"]
        record.update(status=STATUS_FAILED, dev=None, test=None,
                      error=f"exit {proc.returncode}: {tail[0][:200]}")
        return record
    scores = parse_scores(proc.stdout)
    if scores is None:
        record.update(status=STATUS_FAILED, dev=None, test=None,
                      error="no 'dev=<float> test=<float>' line in trainer output")
        return record
    dev, test = scores
    lo, hi = _metric_range(cfg.task)
    if not (lo <= dev <= hi and lo <= test <= hi):
        record.update(status=STATUS_FAILED, dev=None, test=None,
                      error=f"scores ({dev}, {test}) outside [{lo}, {hi}] for {cfg.task}")
        return record
    record.update(status=STATUS_OK, dev=dev, test=test, error=None)
    assert record["run_key"] == run_key
    return record


@dataclass(frozen=True)
class ExecutionSummary:
    """What one orchestration pass did."""

    attempted: int
    succeeded: int
    failed: int
    skipped_completed: int
    skipped_claimed: int

    @property
    def total(self) -> int:
        return (
            self.attempted + self.skipped_completed + self.skipped_claimed
        )


def run_matrix(
    configs: Sequence[RunConfig],
    template: str,
    store: ResultsStore,
    max_workers: int = 1,
    timeout: Optional[float] = None,
    progress: Optional[Callable[[dict], None]] = None,
) -> ExecutionSummary:
    """Execute all configs not yet completed, recording every outcome.

    Runs whose latest stored record is a success are skipped, so a
    rerun of the same matrix only touches unfinished work. Each run is
    claimed before execution and released afterwards; claims held by
    someone else skip the run for this pass.
    """
    if max_workers < 1:
        raise ConfigurationError(f"max_workers must be positive, got {max_workers}")
    validate_template(template)
    done = store.completed_keys()

    to_run: list[RunConfig] = []
    skipped_completed = 0
    for cfg in configs:
        if make_run_key(cfg) in done:
            skipped_completed += 1
        else:
            to_run.append(cfg)

    succeeded = 0
    failed = 0
    skipped_claimed = 0
    attempted = 0

    def execute(cfg: RunConfig) -> Optional[dict]:
        key = make_run_key(cfg)
        if not store.claim(key):
            return None
        try:
            record = run_one(cfg, template, timeout=timeout)
            store.append(record)
            return record
        finally:
            store.release(key)

    if max_workers == 1 or len(to_run) <= 1:
        outcomes = [execute(cfg) for cfg in to_run]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(execute, to_run))

    for record in outcomes:
        if record is None:
            skipped_claimed += 1
            continue
        attempted += 1
        if record["status"] == STATUS_OK:
            succeeded += 1
        else:
            failed += 1
        if progress is not None:
            progress(record)

    return ExecutionSummary(
        attempted=attempted,
        succeeded=succeeded,
        failed=failed,
        skipped_completed=skipped_completed,
        skipped_claimed=skipped_claimed,
    )
