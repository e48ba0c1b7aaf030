"""Experiment orchestration: seeded Monte-Carlo campaigns over the
(algorithm x target) grid, with resumable per-trial output files and
summary/diversity/cluster analysis written alongside.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import analytics
from .chemistry import DEFAULT_BATCH, BatchParams, RecipeFitness, SrmMode, TargetProfile
from .ingredients import Inventory, InventoryError, dump_catalog, load_catalog, parse_catalog
from .optimizers import Algorithm, OptimizerConfig, SearchSpace, TrialRecord, run

TARGET_COLUMNS = ["name", "abv", "ibu", "srm", "target_error"]


def default_inventory() -> Inventory:
    text = resources.files("brewopt.data").joinpath("inventory.csv").read_text("utf-8")
    return parse_catalog(text)


def default_targets() -> list[TargetProfile]:
    text = resources.files("brewopt.data").joinpath("targets.csv").read_text("utf-8")
    return parse_targets(text)


def load_inventory(path) -> Inventory:
    return load_catalog(path)


def parse_targets(text: str) -> list[TargetProfile]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return []
    missing = [c for c in TARGET_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise InventoryError(f"missing column(s): {', '.join(missing)}", line=1)
    targets = []
    for row in reader:
        line = reader.line_num
        try:
            targets.append(
                TargetProfile(
                    name=(row.get("name") or "").strip(),
                    abv=float(row["abv"]),
                    ibu=float(row["ibu"]),
                    srm=float(row["srm"]),
                    target_error=float(row["target_error"]),
                )
            )
        except (TypeError, ValueError) as exc:
            raise InventoryError(f"bad target record: {exc}", line=line) from None
        if not targets[-1].name:
            raise InventoryError("empty target name", line=line)
    return targets


def load_targets(path) -> list[TargetProfile]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_targets(fh.read())


@dataclass(frozen=True)
class ExperimentPlan:
    inventory: Inventory
    targets: tuple[TargetProfile, ...]
    algorithms: tuple[Algorithm, ...] = (Algorithm.PSO, Algorithm.DFO, Algorithm.DE)
    trials: int = 50
    population: int = 100
    max_fes: int = 150_000
    master_seed: int = 2023
    batch: BatchParams = DEFAULT_BATCH
    srm_mode: SrmMode = SrmMode.AGGREGATE_MOREY
    # Optional overrides for the algorithm constants (chi, c1, c2, delta, f, cr).
    constants: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.targets:
            raise ValueError("plan needs at least one target")
        if not self.algorithms:
            raise ValueError("plan needs at least one algorithm")
        allowed = {"chi", "c1", "c2", "delta", "f", "cr"}
        bad = [k for k, _ in self.constants if k not in allowed]
        if bad:
            raise ValueError(f"unknown constant override(s): {', '.join(bad)}")


def derive_seed(master_seed: int, algorithm: Algorithm, target_name: str, trial: int) -> int:
    """Stable per-trial seed; independent across cells and trial indices."""
    key = f"{master_seed}:{algorithm.value}:{target_name}:{trial}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def slugify(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")


def cell_dir(out_dir: Path, algorithm: Algorithm, target: TargetProfile) -> Path:
    return Path(out_dir) / f"{algorithm.value.lower()}__{slugify(target.name)}"


def run_trial(
    inventory: Inventory,
    target: TargetProfile,
    algorithm: Algorithm,
    seed: int,
    *,
    population: int = 100,
    max_fes: int = 150_000,
    batch: BatchParams = DEFAULT_BATCH,
    srm_mode: SrmMode = SrmMode.AGGREGATE_MOREY,
    constants: dict[str, float] | None = None,
    on_iteration: Callable | None = None,
) -> TrialRecord:
    fitness = RecipeFitness(inventory, target, batch, srm_mode)
    space = SearchSpace.from_inventory(inventory)
    config = OptimizerConfig(
        algorithm=algorithm,
        n=population,
        max_fes=max_fes,
        target_error=target.target_error,
        rng_seed=seed,
        **(constants or {}),
    )
    return run(space, config, fitness, on_iteration=on_iteration)


def _trial_worker(args: tuple) -> tuple[int, dict]:
    (catalog_text, target_tuple, algorithm_name, seed, population, max_fes,
     batch_tuple, srm_mode_value, constants, index) = args
    inventory = parse_catalog(catalog_text)
    target = TargetProfile(*target_tuple)
    batch = BatchParams(*batch_tuple)
    record = run_trial(
        inventory,
        target,
        Algorithm(algorithm_name),
        seed,
        population=population,
        max_fes=max_fes,
        batch=batch,
        srm_mode=SrmMode(srm_mode_value),
        constants=dict(constants),
    )
    return index, record.as_dict()


def _record_line(index: int, target: TargetProfile, record_dict: dict) -> str:
    payload = {"trial": index, "target": target.name, **record_dict}
    return json.dumps(payload, separators=(",", ":"))


def _completed_trials(path: Path) -> int:
    if not path.exists():
        return 0
    with open(path, "r", encoding="utf-8") as fh:
        return sum(1 for line in fh if line.strip())


def read_trials(path: Path) -> list[TrialRecord]:
    """Read a trials.jsonl file back into TrialRecords (ordered by trial index)."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                data = json.loads(line)
                records.append((data["trial"], TrialRecord.from_dict(data)))
    records.sort(key=lambda t: t[0])
    return [r for _, r in records]


@dataclass
class CampaignResult:
    out_dir: Path
    cells: dict[tuple[str, str], list[TrialRecord]] = field(default_factory=dict)

    def trials_for(self, algorithm: Algorithm, target_name: str) -> list[TrialRecord]:
        return self.cells[(algorithm.value, target_name)]


def run_campaign(
    plan: ExperimentPlan,
    out_dir,
    *,
    workers: int = 1,
    progress: Callable[[str], None] | None = None,
) -> CampaignResult:
    """Execute the full (algorithm x target) grid of seeded trials.

    Per-trial records append to <cell>/trials.jsonl as they complete, so an
    interrupted campaign resumes from the completed-trial count and produces
    byte-identical output. Summaries are recomputed from file at the end.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_manifest(plan, out_dir)
    result = CampaignResult(out_dir=out_dir)
    catalog_text = dump_catalog(plan.inventory)
    batch_tuple = (
        plan.batch.batch_size,
        plan.batch.boil_size,
        plan.batch.boil_time,
        plan.batch.brewer_efficiency,
    )
    for algorithm in plan.algorithms:
        for target in plan.targets:
            cell = cell_dir(out_dir, algorithm, target)
            cell.mkdir(parents=True, exist_ok=True)
            trials_path = cell / "trials.jsonl"
            done = _completed_trials(trials_path)
            pending = range(done, plan.trials)
            if progress and done:
                progress(f"{cell.name}: resuming at trial {done}")
            jobs = [
                (
                    catalog_text,
                    (target.name, target.abv, target.ibu, target.srm, target.target_error),
                    algorithm.value,
                    derive_seed(plan.master_seed, algorithm, target.name, i),
                    plan.population,
                    plan.max_fes,
                    batch_tuple,
                    plan.srm_mode.value,
                    plan.constants,
                    i,
                )
                for i in pending
            ]
            if workers > 1 and jobs:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    outcomes = dict(pool.map(_trial_worker, jobs))
                with open(trials_path, "a", encoding="utf-8") as fh:
                    for i in pending:
                        fh.write(_record_line(i, target, outcomes[i]) + "\n")
                        if progress:
                            progress(f"{cell.name}: trial {i} done")
            else:
                with open(trials_path, "a", encoding="utf-8") as fh:
                    for job in jobs:
                        i, record_dict = _trial_worker(job)
                        fh.write(_record_line(i, target, record_dict) + "\n")
                        fh.flush()
                        if progress:
                            progress(f"{cell.name}: trial {i} done")
            records = read_trials(trials_path)
            result.cells[(algorithm.value, target.name)] = records
            _write_cell_summary(cell, records)
    return result


def _write_manifest(plan: ExperimentPlan, out_dir: Path) -> None:
    manifest = {
        "version": 1,
        "algorithms": [a.value for a in plan.algorithms],
        "targets": [
            {
                "name": t.name,
                "abv": t.abv,
                "ibu": t.ibu,
                "srm": t.srm,
                "target_error": t.target_error,
            }
            for t in plan.targets
        ],
        "trials": plan.trials,
        "population": plan.population,
        "max_fes": plan.max_fes,
        "master_seed": plan.master_seed,
        "batch": {
            "batch_size": plan.batch.batch_size,
            "boil_size": plan.batch.boil_size,
            "boil_time": plan.batch.boil_time,
            "brewer_efficiency": plan.batch.brewer_efficiency,
        },
        "srm_mode": plan.srm_mode.value,
        "constants": dict(plan.constants),
        "inventory": [item.name for item in plan.inventory],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    (out_dir / "inventory.csv").write_text(dump_catalog(plan.inventory), encoding="utf-8")


def _write_cell_summary(cell: Path, records: Sequence[TrialRecord]) -> None:
    summary = analytics.summarize_trials(records)
    (cell / "summary.json").write_text(
        json.dumps(summary.as_dict(), indent=2) + "\n", encoding="utf-8"
    )


def analyze_campaign(out_dir, *, k_range=range(2, 7), raster_iterations: int = 300) -> dict:
    """Produce tables, matrices, rasters and cluster reports for a campaign dir.

    Returns the written analysis as one dict (also saved as analysis.json).
    """
    out_dir = Path(out_dir)
    manifest = json.loads((out_dir / "manifest.json").read_text("utf-8"))
    algorithms = manifest["algorithms"]
    targets = manifest["targets"]

    analysis: dict = {"cells": {}, "comparisons": {}}
    cell_records: dict[tuple[str, str], list[TrialRecord]] = {}
    for alg in algorithms:
        for tgt in targets:
            cell = out_dir / f"{alg.lower()}__{slugify(tgt['name'])}"
            records = read_trials(cell / "trials.jsonl")
            cell_records[(alg, tgt["name"])] = records
            entry: dict = {"summary": analytics.summarize_trials(records).as_dict()}

            solutions = [r.best_recipe for r in records if r.success]
            labels = [i for i, r in enumerate(records) if r.success]
            if len(solutions) >= 2:
                matrix = analytics.distance_matrix(solutions, labels)
                entry["distance_summary"] = _jsonable(analytics.distance_summary(matrix))
                np.savetxt(cell / "distance_matrix.csv", matrix.entries, delimiter=",")
                density, edges = analytics.distance_density(matrix)
                with open(cell / "distance_density.csv", "w", encoding="utf-8") as fh:
                    writer = csv.writer(fh, lineterminator="\n")
                    writer.writerow(["bin_left", "bin_right", "density"])
                    for left, right, d in zip(edges[:-1], edges[1:], density):
                        writer.writerow([left, right, d])
                report = analytics.select_k_majority(
                    solutions, k_range, np.random.default_rng(0)
                )
                entry["clusters"] = report.as_dict()
                (cell / "clusters.json").write_text(
                    json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8"
                )
            raster = analytics.improvement_raster(records, raster_iterations)
            np.savetxt(cell / "improvement_raster.csv", raster, fmt="%d", delimiter=",")
            _write_cell_summary(cell, records)
            analysis["cells"][f"{alg}/{tgt['name']}"] = entry

    for tgt in targets:
        name = tgt["name"]
        analysis["comparisons"][name] = _pairwise_comparisons(
            {alg: cell_records[(alg, name)] for alg in algorithms}
        )
    (out_dir / "analysis.json").write_text(
        json.dumps(analysis, indent=2) + "\n", encoding="utf-8"
    )
    return analysis


def _pairwise_comparisons(records_by_alg: dict[str, list[TrialRecord]]) -> dict:
    """Error/efficiency significance marks and reliability comparison per pair."""
    algs = list(records_by_alg)
    out: dict = {"error": {}, "efficiency": {}, "reliability": {}}
    for i, a in enumerate(algs):
        for b in algs[i + 1 :]:
            pair = f"{a} -- {b}"
            err_a = [t.best_error for t in records_by_alg[a]]
            err_b = [t.best_error for t in records_by_alg[b]]
            out["error"][pair] = _mark(analytics.wilcoxon_1x1(err_a, err_b))
            fes_a = [t.fes_used for t in records_by_alg[a] if t.success]
            fes_b = [t.fes_used for t in records_by_alg[b] if t.success]
            if fes_a and fes_b:
                out["efficiency"][pair] = _mark(analytics.wilcoxon_1x1(fes_a, fes_b))
            else:
                out["efficiency"][pair] = "--"
            rel_a = analytics.reliability(records_by_alg[a])
            rel_b = analytics.reliability(records_by_alg[b])
            if rel_a == rel_b:
                out["reliability"][pair] = "--"
            else:
                out["reliability"][pair] = "0 -- 1" if rel_a < rel_b else "1 -- 0"
    return out


def _mark(sig: analytics.Significance) -> str:
    if sig is analytics.Significance.LEFT:
        return "X -- o"
    if sig is analytics.Significance.RIGHT:
        return "o -- X"
    return "--"


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value
