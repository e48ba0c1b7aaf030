"""Command-line interface.

Exit codes: 0 success, 1 validation/parse error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .chemistry import BatchParams, DEFAULT_BATCH, SrmMode, TargetProfile, evaluate, fitness_error, srm_color_name
from .ingredients import InventoryError, load_catalog
from .optimizers import Algorithm

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _add_batch_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--batch-size", type=float, default=DEFAULT_BATCH.batch_size)
    parser.add_argument("--boil-size", type=float, default=DEFAULT_BATCH.boil_size)
    parser.add_argument("--boil-time", type=float, default=DEFAULT_BATCH.boil_time)
    parser.add_argument(
        "--efficiency", type=float, default=DEFAULT_BATCH.brewer_efficiency,
        help="brewer efficiency as a fraction (default 0.70)",
    )


def _batch_from_args(args) -> BatchParams:
    return BatchParams(
        batch_size=args.batch_size,
        boil_size=args.boil_size,
        boil_time=args.boil_time,
        brewer_efficiency=args.efficiency,
    )


def _inventory_from_args(args):
    if args.inventory:
        return load_catalog(args.inventory)
    return harness.default_inventory()


def _target_from_args(args) -> TargetProfile:
    if args.target:
        for preset in harness.default_targets():
            if preset.name.lower() == args.target.lower():
                return preset
        raise InventoryError(f"unknown target preset {args.target!r}")
    if None in (args.abv, args.ibu, args.srm):
        raise InventoryError("provide --target or all of --abv/--ibu/--srm")
    return TargetProfile(
        name="custom",
        abv=args.abv,
        ibu=args.ibu,
        srm=args.srm,
        target_error=args.target_error,
    )


def _load_recipe(path: str, inventory) -> np.ndarray:
    data = json.loads(Path(path).read_text("utf-8"))
    if isinstance(data, dict) and "quantities" in data:
        data = data["quantities"]
    if isinstance(data, list):
        return np.asarray(data, dtype=float)
    if isinstance(data, dict):
        names = inventory.names()
        unknown = [k for k in data if k not in names]
        if unknown:
            raise InventoryError(f"recipe names not in inventory: {', '.join(unknown)}")
        return np.array([float(data.get(name, 0.0)) for name in names])
    raise InventoryError("recipe file must be a JSON list or name->quantity object")


def cmd_evaluate(args) -> int:
    inventory = _inventory_from_args(args)
    batch = _batch_from_args(args)
    if args.recipe:
        recipe = _load_recipe(args.recipe, inventory)
    else:
        recipe = np.zeros(inventory.dims)
    metrics = evaluate(recipe, inventory, batch, SrmMode(args.srm_mode))
    out = metrics.as_dict()
    out["srm_color"] = srm_color_name(metrics.srm)
    if args.target or args.abv is not None:
        target = _target_from_args(args)
        out["target"] = target.name
        out["error"] = fitness_error(metrics, target)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_optimize(args) -> int:
    inventory = _inventory_from_args(args)
    if inventory.dims == 0:
        raise InventoryError("inventory is empty; nothing to optimise")
    batch = _batch_from_args(args)
    target = _target_from_args(args)
    record = harness.run_trial(
        inventory,
        target,
        Algorithm(args.algorithm),
        args.seed,
        population=args.population,
        max_fes=args.max_fes,
        batch=batch,
        srm_mode=SrmMode(args.srm_mode),
    )
    payload = record.as_dict()
    payload["target"] = target.name
    payload["recipe_by_name"] = {
        name: qty for name, qty in zip(inventory.names(), payload["best_recipe"])
    }
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    brief = {
        "target": target.name,
        "algorithm": record.algorithm.value,
        "best_error": record.best_error,
        "success": record.success,
        "fes_used": record.fes_used,
        "recipe": payload["recipe_by_name"],
    }
    print(json.dumps(brief, indent=2))
    return EXIT_OK


def _plan_from_args(args) -> harness.ExperimentPlan:
    if args.plan:
        spec = json.loads(Path(args.plan).read_text("utf-8"))
    else:
        spec = {}
    inventory = (
        load_catalog(spec["inventory"])
        if spec.get("inventory")
        else _inventory_from_args(args)
    )
    targets = (
        harness.load_targets(spec["targets"])
        if spec.get("targets")
        else harness.default_targets()
    )
    batch_spec = spec.get("batch", {})
    batch = BatchParams(
        batch_size=batch_spec.get("batch_size", args.batch_size),
        boil_size=batch_spec.get("boil_size", args.boil_size),
        boil_time=batch_spec.get("boil_time", args.boil_time),
        brewer_efficiency=batch_spec.get("brewer_efficiency", args.efficiency),
    )
    algorithms = tuple(
        Algorithm(a) for a in spec.get("algorithms", args.algorithms.split(","))
    )
    return harness.ExperimentPlan(
        inventory=inventory,
        targets=tuple(targets),
        algorithms=algorithms,
        trials=spec.get("trials", args.trials),
        population=spec.get("population", args.population),
        max_fes=spec.get("max_fes", args.max_fes),
        master_seed=spec.get("master_seed", args.seed),
        batch=batch,
        srm_mode=SrmMode(spec.get("srm_mode", args.srm_mode)),
        constants=tuple(sorted(spec.get("constants", {}).items())),
    )


def cmd_campaign(args) -> int:
    plan = _plan_from_args(args)
    progress = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    result = harness.run_campaign(plan, args.out_dir, workers=args.workers, progress=progress)
    for (alg, target_name), records in result.cells.items():
        ok = sum(1 for r in records if r.success)
        print(f"{alg} / {target_name}: {ok}/{len(records)} successful")
    return EXIT_OK


def cmd_analyze(args) -> int:
    analysis = harness.analyze_campaign(args.out_dir)
    print(json.dumps({"cells": sorted(analysis["cells"])}, indent=2))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(out_dir=args.out_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brewopt",
        description="Inverse recipe design for brewing via population-based search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--inventory", help="ingredient catalog CSV (default: shipped stock list)")
    common.add_argument("--srm-mode", choices=[m.value for m in SrmMode],
                        default=SrmMode.AGGREGATE_MOREY.value)
    _add_batch_args(common)

    target_args = argparse.ArgumentParser(add_help=False)
    target_args.add_argument("--target", help="preset target name (see shipped targets)")
    target_args.add_argument("--abv", type=float)
    target_args.add_argument("--ibu", type=float)
    target_args.add_argument("--srm", type=float)
    target_args.add_argument("--target-error", type=float, default=0.05)

    p_eval = sub.add_parser("evaluate", parents=[common, target_args],
                            help="compute metrics for a recipe file")
    p_eval.add_argument("--recipe", help="JSON recipe (list or name->quantity); default all-zero")
    p_eval.set_defaults(func=cmd_evaluate)

    p_opt = sub.add_parser("optimize", parents=[common, target_args],
                           help="run a single seeded optimisation")
    p_opt.add_argument("--algorithm", choices=[a.value for a in Algorithm], default="DFO")
    p_opt.add_argument("--seed", type=int, default=0)
    p_opt.add_argument("--population", type=int, default=100)
    p_opt.add_argument("--max-fes", type=int, default=150_000)
    p_opt.add_argument("--out", help="write the full trial record JSON here")
    p_opt.set_defaults(func=cmd_optimize)

    p_camp = sub.add_parser("campaign", parents=[common],
                            help="run the full (algorithm x target) Monte-Carlo grid")
    p_camp.add_argument("--plan", help="plan JSON file; flags fill unspecified fields")
    p_camp.add_argument("--algorithms", default="PSO,DFO,DE")
    p_camp.add_argument("--trials", type=int, default=50)
    p_camp.add_argument("--population", type=int, default=100)
    p_camp.add_argument("--max-fes", type=int, default=150_000)
    p_camp.add_argument("--seed", type=int, default=2023)
    p_camp.add_argument("--workers", type=int, default=1)
    p_camp.add_argument("--out-dir", required=True)
    p_camp.add_argument("--verbose", action="store_true")
    p_camp.set_defaults(func=cmd_campaign)

    p_an = sub.add_parser("analyze", help="analyse a completed campaign directory")
    p_an.add_argument("--out-dir", required=True)
    p_an.set_defaults(func=cmd_analyze)

    p_srv = sub.add_parser("serve", help="start the HTTP control-panel service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--out-dir", default="jobs")
    p_srv.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InventoryError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
