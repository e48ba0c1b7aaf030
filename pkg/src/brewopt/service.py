"""HTTP facade for the control panel: submit optimisations, poll progress,
and edit the active ingredient catalog.

Jobs persist in the campaign result-directory layout, so the CLI ``analyze``
command works on service output unchanged.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import analytics, harness
from .chemistry import RecipeFitness, TargetProfile
from .ingredients import (
    Inventory,
    InventoryError,
    inventory_from_records,
    inventory_to_records,
)
from .optimizers import Algorithm

JOB_WORKERS = 2
PROGRESS_EVERY_ITERS = 1  # snapshot granularity: every population batch


class TargetPayload(BaseModel):
    name: str = "custom"
    abv: float
    ibu: float
    srm: float
    target_error: float = Field(default=0.05, gt=0)

    def to_profile(self) -> TargetProfile:
        if min(self.abv, self.ibu, self.srm) < 0:
            raise InventoryError("targets must be >= 0")
        return TargetProfile(
            name=self.name,
            abv=self.abv,
            ibu=self.ibu,
            srm=self.srm,
            target_error=self.target_error,
        )


class OptimizeOptions(BaseModel):
    trials: int = Field(default=1, ge=1, le=50)
    population: int = Field(default=100, ge=4)
    max_fes: int = Field(default=150_000, ge=1)
    seed: int | None = None


class OptimizeRequest(BaseModel):
    target: TargetPayload
    algorithm: str = "DFO"
    options: OptimizeOptions = OptimizeOptions()


class Job:
    def __init__(self, job_id: str, plan: harness.ExperimentPlan, job_dir: Path):
        self.id = job_id
        self.plan = plan
        self.dir = job_dir
        self.status = "queued"
        self.error: str | None = None
        self.progress = {"fes_used": 0, "best_error": None, "best_recipe": None}
        self.results: dict | None = None
        self.cancel = threading.Event()
        self.lock = threading.Lock()

    def snapshot(self) -> dict:
        with self.lock:
            target = self.plan.targets[0]
            return {
                "id": self.id,
                "status": self.status,
                "plan": {
                    "target": {
                        "name": target.name,
                        "abv": target.abv,
                        "ibu": target.ibu,
                        "srm": target.srm,
                        "target_error": target.target_error,
                    },
                    "algorithm": self.plan.algorithms[0].value,
                    "trials": self.plan.trials,
                    "population": self.plan.population,
                    "max_fes": self.plan.max_fes,
                    "master_seed": self.plan.master_seed,
                },
                "progress": dict(self.progress),
                "results": self.results,
                "error": self.error,
            }


def _execute_job(job: Job) -> None:
    with job.lock:
        if job.cancel.is_set():
            job.status = "failed"
            job.error = "canceled"
            return
        job.status = "running"
    plan = job.plan
    target = plan.targets[0]
    algorithm = plan.algorithms[0]
    try:
        job.dir.mkdir(parents=True, exist_ok=True)
        harness._write_manifest(plan, job.dir)
        cell = harness.cell_dir(job.dir, algorithm, target)
        cell.mkdir(parents=True, exist_ok=True)
        trials_path = cell / "trials.jsonl"

        names = plan.inventory.names()
        fitness = RecipeFitness(plan.inventory, target, plan.batch, plan.srm_mode)
        records = []
        with open(trials_path, "w", encoding="utf-8") as fh:
            for i in range(plan.trials):
                if job.cancel.is_set():
                    break
                seed = harness.derive_seed(plan.master_seed, algorithm, target.name, i)

                def on_iteration(_iteration, pop):
                    if job.cancel.is_set():
                        raise StopIteration
                    with job.lock:
                        best = job.progress["best_error"]
                        if best is None or pop.elite_error < best:
                            job.progress["best_error"] = float(pop.elite_error)
                            job.progress["best_recipe"] = {
                                n: float(q) for n, q in zip(names, pop.elite_position)
                            }
                        job.progress["fes_used"] = _completed_fes(records) + pop.fes

                record = harness.run_trial(
                    plan.inventory,
                    target,
                    algorithm,
                    seed,
                    population=plan.population,
                    max_fes=plan.max_fes,
                    batch=plan.batch,
                    srm_mode=plan.srm_mode,
                    on_iteration=on_iteration,
                )
                if job.cancel.is_set():
                    break
                fh.write(harness._record_line(i, target, record.as_dict()) + "\n")
                fh.flush()
                records.append(record)
        if job.cancel.is_set():
            with job.lock:
                job.status = "failed"
                job.error = "canceled"
            return
        harness._write_cell_summary(cell, records)
        results = _job_results(records, names, fitness)
        with job.lock:
            job.results = results
            job.status = "done"
    except Exception as exc:  # surfaced to the client on the job record
        with job.lock:
            job.status = "failed"
            job.error = str(exc)


def _completed_fes(records) -> int:
    return int(sum(r.fes_used for r in records))


def _job_results(records, names, fitness: RecipeFitness) -> dict:
    solutions = []
    vectors = []
    for i, record in enumerate(records):
        if not record.success:
            continue
        metrics = fitness.metrics_arrays(record.best_recipe)
        solutions.append(
            {
                "trial": i,
                "seed": record.seed,
                "error": record.best_error,
                "fes_used": record.fes_used,
                "recipe": {n: float(q) for n, q in zip(names, record.best_recipe)},
                "metrics": {k: float(v[0]) for k, v in metrics.items()},
            }
        )
        vectors.append(record.best_recipe)
    results: dict = {"solutions": solutions, "distance_summary": None, "cluster_report": None}
    if len(vectors) >= 2:
        matrix = analytics.distance_matrix(vectors, [s["trial"] for s in solutions])
        summary = analytics.distance_summary(matrix)
        summary["farthest_pair"] = list(summary["farthest_pair"])
        results["distance_summary"] = summary
        if len(vectors) >= 3:
            report = analytics.select_k_majority(
                vectors, range(2, min(6, len(vectors)) + 1), np.random.default_rng(0)
            )
            results["cluster_report"] = report.as_dict()
    return results


def create_app(out_dir="jobs", inventory: Inventory | None = None) -> FastAPI:
    app = FastAPI(title="brewopt service", version="0.1.0")
    state = {
        "inventory": inventory if inventory is not None else harness.default_inventory(),
        "jobs": {},
        "out_dir": Path(out_dir),
    }
    executor = ThreadPoolExecutor(max_workers=JOB_WORKERS)
    table_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_request: Request, exc: RequestValidationError):
        errors = [
            {"field": ".".join(str(p) for p in err["loc"] if p != "body"), "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": errors})

    @app.post("/api/optimize", status_code=202)
    def post_optimize(request: OptimizeRequest):
        try:
            algorithm = Algorithm(request.algorithm)
        except ValueError:
            raise HTTPException(400, detail=[{"field": "algorithm",
                                              "message": f"unknown algorithm {request.algorithm!r}"}])
        with table_lock:
            active_inventory = state["inventory"]
        if active_inventory.dims == 0:
            raise HTTPException(400, detail=[{"field": "inventory",
                                              "message": "active inventory is empty"}])
        try:
            target = request.target.to_profile()
        except (InventoryError, ValueError) as exc:
            raise HTTPException(400, detail=[{"field": "target", "message": str(exc)}])
        opts = request.options
        seed = opts.seed if opts.seed is not None else int(uuid.uuid4().int % 2**32)
        try:
            plan = harness.ExperimentPlan(
                inventory=active_inventory,
                targets=(target,),
                algorithms=(algorithm,),
                trials=opts.trials,
                population=opts.population,
                max_fes=opts.max_fes,
                master_seed=seed,
            )
        except ValueError as exc:
            raise HTTPException(400, detail=[{"field": "options", "message": str(exc)}])
        job_id = uuid.uuid4().hex
        job = Job(job_id, plan, state["out_dir"] / job_id)
        with table_lock:
            state["jobs"][job_id] = job
        executor.submit(_execute_job, job)
        return {"id": job_id}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        with table_lock:
            job = state["jobs"].get(job_id)
        if job is None:
            raise HTTPException(404, detail="unknown job id")
        return job.snapshot()

    @app.delete("/api/jobs/{job_id}", status_code=204)
    def delete_job(job_id: str):
        with table_lock:
            job = state["jobs"].pop(job_id, None)
        if job is None:
            raise HTTPException(404, detail="unknown job id")
        job.cancel.set()
        return None

    @app.get("/api/inventory")
    def get_inventory():
        with table_lock:
            return {"ingredients": inventory_to_records(state["inventory"])}

    @app.put("/api/inventory")
    def put_inventory(payload: dict):
        records = payload.get("ingredients")
        if not isinstance(records, list):
            raise HTTPException(400, detail=[{"field": "ingredients",
                                              "message": "expected a list of ingredient records"}])
        try:
            new_inventory = inventory_from_records(records)
        except InventoryError as exc:
            raise HTTPException(400, detail=[{"field": "ingredients", "message": str(exc)}])
        with table_lock:
            state["inventory"] = new_inventory
        return {"ingredients": inventory_to_records(new_inventory)}

    @app.get("/api/targets/presets")
    def get_presets():
        return {
            "presets": [
                {
                    "name": t.name,
                    "abv": t.abv,
                    "ibu": t.ibu,
                    "srm": t.srm,
                    "target_error": t.target_error,
                }
                for t in harness.default_targets()
            ]
        }

    frontend_dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if frontend_dist.is_dir():  # serve the control panel when it has been built
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dist, html=True), name="panel")

    return app
