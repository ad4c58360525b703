"""Seeded experiment runner with an append-only, resumable record stream.

Each trial draws a random relator from its own generator, seeded by a
stable mix of the master seed and the trial ordinal (SHA-256 of
"seed:ordinal", low 8 bytes), so trials reproduce independently of
execution order and parallelism.  Records go to a JSON-lines file, one
object per line; re-running the same config skips ordinals already on
disk, which makes interrupted runs resumable.  Wall-clock fields
(elapsed, total_elapsed) are the only nondeterministic parts of a
record.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import random
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .classify import (
    RANK_REDUCIBLE,
    UNRESOLVED,
    ClassifyOptions,
    Verdict,
    classify_relator,
)
from .lowindex import DEFAULT_NODE_BUDGET
from .words import cyclic_reduce, random_relator, word_from_text, word_to_text

RAW_LENGTH_DEFAULTS = {3: 18, 4: 14}
MAX_INDEX_DEFAULTS = {3: 9, 4: 6}

RECORDS_NAME = "records.jsonl"
SUMMARY_NAME = "summary.json"


@dataclass(frozen=True)
class ExperimentConfig:
    rank: int = 3
    trials: int = 0
    raw_length: int | None = None
    max_index: int | None = None
    seed: int = 0
    occurrence_filter: bool = True
    rank_reduction: bool = True
    primitivity_filter: bool = True
    fingerprint: bool = True
    bs_scan: bool = True
    node_budget: int = DEFAULT_NODE_BUDGET
    min_repeats: int = 3
    parallelism: int = 1
    output: str | None = None

    def __post_init__(self):
        if self.rank < 2:
            raise ValueError(f"rank must be >= 2, got {self.rank}")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if self.raw_length is None:
            object.__setattr__(
                self, "raw_length", RAW_LENGTH_DEFAULTS.get(self.rank, 18)
            )
        if self.max_index is None:
            object.__setattr__(
                self, "max_index", MAX_INDEX_DEFAULTS.get(self.rank, 9)
            )

    def options(self) -> ClassifyOptions:
        return ClassifyOptions(
            occurrence_filter=self.occurrence_filter,
            rank_reduction=self.rank_reduction,
            primitivity_filter=self.primitivity_filter,
            fingerprint=self.fingerprint,
            bs_scan=self.bs_scan,
            node_budget=self.node_budget,
            min_repeats=self.min_repeats,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**d)


@dataclass(frozen=True)
class TrialRecord:
    ordinal: int | None
    relator: str
    rank: int
    verdict: Verdict
    total_elapsed: float
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "ordinal": self.ordinal,
            "seed": self.seed,
            "relator": self.relator,
            "rank": self.rank,
            "verdict": self.verdict.to_dict(),
            "total_elapsed": self.total_elapsed,
        }


@dataclass(frozen=True)
class RunSummary:
    trials: int
    resolved: int
    unresolved: int
    resolved_fraction: float

    def __post_init__(self):
        if self.resolved + self.unresolved != self.trials:
            raise ValueError("resolved + unresolved must equal trials")

    def to_dict(self) -> dict:
        return asdict(self)


def trial_seed(master_seed: int, ordinal: int) -> int:
    """Stable per-trial seed: low 8 bytes of SHA-256("seed:ordinal")."""
    digest = hashlib.sha256(f"{master_seed}:{ordinal}".encode()).digest()
    return int.from_bytes(digest[-8:], "big")


def run_trial(cfg: ExperimentConfig, ordinal: int) -> dict:
    """Classify one freshly drawn relator; returns the record as a dict."""
    seed = trial_seed(cfg.seed, ordinal)
    rng = random.Random(seed)
    w = random_relator(cfg.rank, cfg.raw_length, rng)
    t0 = time.perf_counter()
    if w:
        verdict = classify_relator(w, cfg.rank, cfg.max_index, cfg.options())
    else:
        # total cancellation: the trivial relator misses every generator,
        # so the group is the whole free group
        verdict = Verdict(
            RANK_REDUCIBLE, absent_generators=tuple(range(1, cfg.rank + 1))
        )
    record = TrialRecord(
        ordinal=ordinal,
        relator=word_to_text(w),
        rank=cfg.rank,
        verdict=verdict,
        total_elapsed=time.perf_counter() - t0,
        seed=seed,
    )
    return record.to_dict()


def _worker(args) -> dict:
    cfg_dict, ordinal = args
    return run_trial(ExperimentConfig.from_dict(cfg_dict), ordinal)


def record_is_resolved(record: dict) -> bool:
    return record["verdict"]["kind"] != UNRESOLVED


def record_hit_budget(record: dict) -> bool:
    return any(a.get("exhausted") for a in record["verdict"].get("audit", ()))


def strip_timings(record: dict) -> dict:
    """The deterministic projection of a record (wall-clock fields out)."""
    out = json.loads(json.dumps(record))
    out.pop("total_elapsed", None)
    _strip_verdict(out.get("verdict", {}))
    return out


def _strip_verdict(verdict: dict) -> None:
    for a in verdict.get("audit", ()):
        a.pop("elapsed", None)
    sub = verdict.get("sub_verdict")
    if sub:
        _strip_verdict(sub)


def load_records(path) -> dict[int, dict]:
    """Records already on disk, keyed by ordinal.  A truncated final
    line (interrupted write) is ignored."""
    records: dict[int, dict] = {}
    path = Path(path)
    if not path.exists():
        return records
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                break
            records[rec["ordinal"]] = rec
    return records


def summarize(records) -> RunSummary:
    recs = list(records)
    resolved = sum(1 for r in recs if record_is_resolved(r))
    n = len(recs)
    return RunSummary(
        trials=n,
        resolved=resolved,
        unresolved=n - resolved,
        resolved_fraction=resolved / n if n else 0.0,
    )


def run_experiment(cfg: ExperimentConfig, progress=None) -> tuple[RunSummary, list[dict]]:
    """Run (or resume) the batch; returns the summary and all records.

    With an output path, records append to records.jsonl as they finish
    and the summary lands in summary.json next to it.  Ordinals already
    present in the stream are skipped, so rerunning the same config
    completes an interrupted run.
    """
    outdir = Path(cfg.output) if cfg.output else None
    existing: dict[int, dict] = {}
    stream = None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        existing = load_records(outdir / RECORDS_NAME)
        stream = (outdir / RECORDS_NAME).open("a")

    todo = [i for i in range(cfg.trials) if i not in existing]
    records = dict(existing)

    def emit(rec: dict):
        records[rec["ordinal"]] = rec
        if stream is not None:
            stream.write(json.dumps(rec, sort_keys=True) + "\n")
            stream.flush()
        if progress is not None:
            progress(rec)

    try:
        if cfg.parallelism == 1 or len(todo) <= 1:
            for ordinal in todo:
                emit(run_trial(cfg, ordinal))
        else:
            cfg_dict = cfg.to_dict()
            with multiprocessing.Pool(cfg.parallelism) as pool:
                jobs = [(cfg_dict, i) for i in todo]
                for rec in pool.imap_unordered(_worker, jobs):
                    emit(rec)
    finally:
        if stream is not None:
            stream.close()

    ordered = [records[i] for i in sorted(records) if i < cfg.trials]
    summary = summarize(ordered)
    if outdir is not None:
        payload = {"config": cfg.to_dict(), "summary": summary.to_dict()}
        (outdir / SUMMARY_NAME).write_text(json.dumps(payload, indent=2) + "\n")
    return summary, ordered


def classify_one(
    word_text: str,
    rank: int | None = None,
    max_index: int | None = None,
    options: ClassifyOptions | None = None,
) -> TrialRecord:
    """Classify a single relator given in text form."""
    w = word_from_text(word_text, rank)
    if rank is None:
        rank = max((abs(x) for x in w), default=1)
    w = cyclic_reduce(w)
    if max_index is None:
        max_index = MAX_INDEX_DEFAULTS.get(rank, 9)
    if not w:
        verdict = Verdict(
            RANK_REDUCIBLE, absent_generators=tuple(range(1, rank + 1))
        )
        return TrialRecord(None, "", rank, verdict, 0.0)
    t0 = time.perf_counter()
    verdict = classify_relator(w, rank, max_index, options)
    return TrialRecord(
        ordinal=None,
        relator=word_to_text(w),
        rank=rank,
        verdict=verdict,
        total_elapsed=time.perf_counter() - t0,
    )
