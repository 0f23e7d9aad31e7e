"""Experiment orchestration: seeded embedding sweeps with CSV/JSON output.

A sweep is described by an ExperimentConfig; each seed becomes one trial
(host draw, tree draw, one embed_spanning call).  Results go to a CSV with
a fixed column set plus one JSON report per trial keyed by seed, so reruns
of the same config are diff-able: everything except the time_ms column is
deterministic.

The output directory defaults to the TREEBED_OUT environment variable and
then to ./runs.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from .embed.embedding import validate_embedding
from .embed.params import PipelineParams
from .embed.pipeline import embed_spanning
from .errors import EmbedError, TreebedError
from .generators import gen_binomial, gen_hab, gen_random_ktree
from .io import write_embedding

__all__ = ["CSV_COLUMNS", "ENV_OUT", "ExperimentConfig", "TrialRecord",
           "run_experiment", "resolve_out_dir"]

CSV_COLUMNS = ("trial", "seed", "k", "n", "delta1", "host_kind",
               "min_codegree", "method", "success", "stage", "time_ms",
               "retries")

ENV_OUT = "TREEBED_OUT"

_HOST_KINDS = ("binomial", "hab", "complete")
_METHODS = ("hybrid", "strict", "brute")


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: a host family, a tree family, a method, and seeds."""

    host_kind: str = "binomial"
    k: int = 3
    n: int = 30
    p: float = 0.9
    a: int | None = None          # H(A, B) class sizes
    b: int | None = None
    max_degree: int = 3
    method: str = "hybrid"
    params: PipelineParams = field(default_factory=PipelineParams)
    seeds: tuple = (0,)
    codegree_floor: float | None = None   # resample binomial hosts until
                                          # min_codegree >= floor * n
    out_dir: str | None = None
    write_maps: bool = True

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.host_kind not in _HOST_KINDS:
            raise ValueError(f"unknown host kind {self.host_kind!r}")
        if self.host_kind == "hab" and (self.a is None or self.b is None):
            raise ValueError("host kind 'hab' needs class sizes a and b")
        if self.host_kind == "binomial" and not (0 < self.p <= 1):
            raise ValueError(f"p must be in (0, 1], got {self.p}")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    k: int
    n: int
    delta1: int
    host_kind: str
    min_codegree: int
    method: str
    success: bool
    stage: str
    time_ms: float
    retries: int

    def row(self) -> list:
        return [self.trial, self.seed, self.k, self.n, self.delta1,
                self.host_kind, self.min_codegree, self.method,
                str(self.success).lower(), self.stage,
                f"{self.time_ms:.2f}", self.retries]


def resolve_out_dir(explicit=None) -> Path:
    return Path(explicit or os.environ.get(ENV_OUT) or "runs")


def _make_host(cfg: ExperimentConfig, seed: int):
    if cfg.host_kind == "hab":
        n = cfg.a + cfg.b
        return gen_hab(cfg.k, range(cfg.a), range(cfg.a, n))
    if cfg.host_kind == "complete":
        return gen_binomial(cfg.k, cfg.n, 1.0, seed=seed)
    s = seed
    H = gen_binomial(cfg.k, cfg.n, cfg.p, seed=s)
    if cfg.codegree_floor is not None:
        floor = cfg.codegree_floor * cfg.n
        for _ in range(64):
            if H.min_codegree() >= floor:
                break
            s += 9973
            H = gen_binomial(cfg.k, cfg.n, cfg.p, seed=s)
        else:
            raise TreebedError(
                f"no host with min_codegree >= {floor:.1f} in 64 draws "
                f"(seed {seed})")
    return H


def _stage_reached(report: dict, success: bool, error) -> str:
    if success:
        return "done"
    if error is not None and getattr(error, "stage", None):
        return error.stage
    stages = report.get("stages", {})
    if stages:
        return next(reversed(stages))
    return "setup"


def _run_trial(cfg: ExperimentConfig, trial: int, seed: int):
    H = _make_host(cfg, seed)
    T = gen_random_ktree(cfg.k, H.n, max_degree=cfg.max_degree,
                         seed=seed ^ 0x5BD1)
    params = cfg.params.with_(seed=seed)
    report: dict = {}
    err = None
    emb = None
    t0 = time.perf_counter()
    try:
        emb = embed_spanning(H, T, params, method=cfg.method, report=report)
    except EmbedError as ex:
        err = ex
    elapsed = (time.perf_counter() - t0) * 1000.0
    success = emb is not None
    if success:
        bad = validate_embedding(H, T, emb.phi)
        if bad is not None:            # the pipeline gates this already
            success, emb, err = False, None, EmbedError(bad, stage="validate")
    rec = TrialRecord(trial=trial, seed=seed, k=cfg.k, n=H.n,
                      delta1=T.delta1, host_kind=cfg.host_kind,
                      min_codegree=H.min_codegree(), method=cfg.method,
                      success=success,
                      stage=_stage_reached(report, success, err),
                      time_ms=elapsed, retries=report.get("retries", 0))
    return rec, report, emb, err


def run_experiment(config: ExperimentConfig) -> list:
    """Run all trials, write CSV + per-trial JSON, return the records."""
    out = resolve_out_dir(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for trial, seed in enumerate(config.seeds):
        rec, report, emb, err = _run_trial(config, trial, seed)
        records.append(rec)
        payload = {
            "trial": trial,
            "seed": seed,
            "success": rec.success,
            "stage": rec.stage,
            "error": str(err) if err else None,
            "report": _jsonable(report),
        }
        with open(out / f"report-{seed}.json", "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
        if emb is not None and config.write_maps:
            write_embedding(emb.phi, out / f"map-{seed}.txt")
    records.sort(key=lambda r: (r.trial, r.seed))
    with open(out / "results.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(rec.row())
    return records


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return repr(obj)
