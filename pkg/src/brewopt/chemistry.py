"""Forward brewing model: recipe + batch parameters -> physico-chemical metrics.

All operations are pure. Quantities are stored metric (hops g, fermentables kg,
yeast mL); the gravity, color and fermentable-bitterness formulas are defined
in lb/gal, so imperial conversions happen inside those operations. Hop
bitterness works directly in grams and litres.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ingredients import Fermentable, Hop, Inventory, validate_recipe

KG_PER_LB = 0.45359237
L_PER_GAL = 3.785411784

# Points-per-pound-per-gallon of a 100%-yield extract.
PPG_FULL_YIELD = 46.0

SRM_TO_EBC = 1.97

# Simple ABV formula is swapped for the high-gravity one above this value.
ABV_SWITCH = 6.0

# SRM color-name brackets: (lower SRM bound, name), ascending.
SRM_COLOR_TABLE = (
    (2.0, "Pale Straw"),
    (3.0, "Straw"),
    (4.0, "Pale Gold"),
    (6.0, "Deep Gold"),
    (9.0, "Pale Amber"),
    (12.0, "Medium Amber"),
    (15.0, "Deep Amber"),
    (18.0, "Amber-Brown"),
    (20.0, "Brown"),
    (24.0, "Ruby Brown"),
    (30.0, "Deep Brown"),
    (40.0, "Black"),
)


class SrmMode(enum.Enum):
    """How the 0.6859 color exponent is applied.

    AGGREGATE_MOREY raises the summed malt-color units to the exponent
    (the standard Morey curve, default). LITERAL applies the exponent to
    each grain weight before summing.
    """

    AGGREGATE_MOREY = "aggregate-morey"
    LITERAL = "literal-eq7"


@dataclass(frozen=True)
class BatchParams:
    batch_size: float  # litres, the volume entering every formula
    boil_size: float = 24.0  # litres, reported only
    boil_time: float = 60.0  # minutes, shared by all hop additions
    brewer_efficiency: float = 0.70  # fraction of laboratory extract obtained

    def __post_init__(self):
        if self.batch_size <= 0:
            raise ValueError("batch_size must be > 0")
        if self.boil_size < self.batch_size:
            raise ValueError("boil_size must be >= batch_size")
        if self.boil_time < 0:
            raise ValueError("boil_time must be >= 0")
        if not 0 < self.brewer_efficiency <= 1:
            raise ValueError("brewer_efficiency must be in (0, 1]")


DEFAULT_BATCH = BatchParams(batch_size=20.0, boil_size=24.0, boil_time=60.0, brewer_efficiency=0.70)


@dataclass(frozen=True)
class TargetProfile:
    """Desired ABV/IBU/SRM triple plus the per-product termination error."""

    name: str
    abv: float
    ibu: float
    srm: float
    target_error: float

    def __post_init__(self):
        if min(self.abv, self.ibu, self.srm) < 0:
            raise ValueError("targets must be >= 0")
        if self.target_error <= 0:
            raise ValueError("target_error must be > 0")


@dataclass(frozen=True)
class BrewMetrics:
    og: float
    fg: float
    abv: float
    ibu: float
    ibu_gu: float
    mcu: float
    srm: float
    ebc: float

    def as_dict(self) -> dict:
        return {
            "og": self.og,
            "fg": self.fg,
            "abv": self.abv,
            "ibu": self.ibu,
            "ibu_gu": self.ibu_gu,
            "mcu": self.mcu,
            "srm": self.srm,
            "ebc": self.ebc,
        }


def compute_og(recipe, inventory: Inventory, batch: BatchParams) -> float:
    """Original gravity from the gravity-points model.

    og = 1 + sum(w_lb * ppg * efficiency) / (v_gal * 1000), ppg = 46 * yield/100.
    """
    q = validate_recipe(recipe, inventory)
    v_gal = batch.batch_size / L_PER_GAL
    points = 0.0
    for qty, item in zip(q, inventory):
        if isinstance(item, Fermentable):
            w_lb = qty / KG_PER_LB
            ppg = PPG_FULL_YIELD * item.yield_pct / 100.0
            points += w_lb * ppg * batch.brewer_efficiency
    return 1.0 + points / (v_gal * 1000.0)


def compute_fg(og: float, yeast) -> float:
    """Final gravity via linear attenuation of the gravity drop."""
    attenuation = getattr(yeast, "attenuation", yeast)
    return og - (og - 1.0) * attenuation / 100.0


def compute_abv(og: float, fg: float) -> float:
    """Alcohol by volume; switches to the high-gravity formula above 6%."""
    if fg > og:
        raise ValueError(f"fg ({fg}) must not exceed og ({og})")
    simple = 131.25 * (og - fg)
    if simple <= ABV_SWITCH:
        return simple
    if og >= 1.775:
        raise ValueError(f"og {og} at or beyond the 1.775 singularity of the high-gravity formula")
    return 76.08 * (og - fg) * fg / (0.794 * (1.775 - og))


def hop_ibu(hop_additions: Sequence[tuple[Hop, float]], og: float, batch: BatchParams) -> float:
    """Hop bitterness: per-hop alpha-acid utilisation scaled by wort gravity.

    Each addition is (hop, weight in grams); every hop boils for
    batch.boil_time minutes.
    """
    if og < 1.0:
        raise ValueError("og must be >= 1.0")
    bigness = 1.65 * math.pow(0.000125, og - 1.0)
    boil_factor = 1.0 - math.exp(-0.04 * batch.boil_time)
    total = 0.0
    for hop, grams in hop_additions:
        total += 10.0 * grams * hop.alpha * boil_factor / (4.15 * batch.batch_size) * bigness
    return total


def fermentable_ibu(recipe, inventory: Inventory, batch: BatchParams) -> float:
    """Bitterness contributed by fermentables (hopped extracts): sum g*w_lb/v_gal."""
    q = validate_recipe(recipe, inventory)
    v_gal = batch.batch_size / L_PER_GAL
    total = 0.0
    for qty, item in zip(q, inventory):
        if isinstance(item, Fermentable):
            total += item.ibu_gal_per_lb * (qty / KG_PER_LB) / v_gal
    return total


def total_ibu(recipe, inventory: Inventory, og: float, batch: BatchParams) -> float:
    q = validate_recipe(recipe, inventory)
    additions = [
        (item, qty) for qty, item in zip(q, inventory) if isinstance(item, Hop)
    ]
    return hop_ibu(additions, og, batch) + fermentable_ibu(recipe, inventory, batch)


def ibu_gu(ibu: float, og: float) -> float:
    """Bitterness-to-gravity-units ratio: ibu / (1000 * (og - 1))."""
    if og <= 1.0:
        raise ValueError("ibu/gu is undefined at or below og 1.000")
    return ibu / (1000.0 * (og - 1.0))


def compute_mcu(recipe, inventory: Inventory, batch: BatchParams) -> float:
    """Malt colour units: sum of color * w_lb / v_gal over fermentables."""
    q = validate_recipe(recipe, inventory)
    v_gal = batch.batch_size / L_PER_GAL
    total = 0.0
    for qty, item in zip(q, inventory):
        if isinstance(item, Fermentable):
            total += item.color * (qty / KG_PER_LB) / v_gal
    return total


def compute_srm(
    recipe,
    inventory: Inventory,
    batch: BatchParams,
    mode: SrmMode = SrmMode.AGGREGATE_MOREY,
) -> float:
    if mode is SrmMode.AGGREGATE_MOREY:
        return 1.4922 * math.pow(compute_mcu(recipe, inventory, batch), 0.6859)
    q = validate_recipe(recipe, inventory)
    v_gal = batch.batch_size / L_PER_GAL
    total = 0.0
    for qty, item in zip(q, inventory):
        if isinstance(item, Fermentable):
            total += item.color * math.pow(qty / KG_PER_LB, 0.6859)
    return 1.4922 * total / v_gal


def srm_to_ebc(srm: float) -> float:
    return srm * SRM_TO_EBC


def srm_color_name(srm: float) -> str:
    """Nearest lower bracket of the SRM color table; below 2 reads Pale Straw."""
    name = SRM_COLOR_TABLE[0][1]
    for lower, bracket_name in SRM_COLOR_TABLE:
        if srm >= lower:
            name = bracket_name
        else:
            break
    return name


def evaluate(
    recipe,
    inventory: Inventory,
    batch: BatchParams = DEFAULT_BATCH,
    mode: SrmMode = SrmMode.AGGREGATE_MOREY,
) -> BrewMetrics:
    """Full forward model for one recipe. Pure and deterministic.

    ibu/gu is reported as 0 for an unfermented (og = 1.000) zero-bitterness
    wort and +inf when bitterness exists with no gravity units.
    """
    q = validate_recipe(recipe, inventory)
    og = compute_og(q, inventory, batch)
    yeasts = inventory.yeasts
    fg = compute_fg(og, yeasts[0]) if yeasts else og
    abv = compute_abv(og, fg)
    ibu = total_ibu(q, inventory, og, batch)
    if og > 1.0:
        ratio = ibu_gu(ibu, og)
    else:
        ratio = 0.0 if ibu == 0.0 else math.inf
    mcu = compute_mcu(q, inventory, batch)
    srm = compute_srm(q, inventory, batch, mode)
    return BrewMetrics(
        og=og,
        fg=fg,
        abv=abv,
        ibu=ibu,
        ibu_gu=ratio,
        mcu=mcu,
        srm=srm,
        ebc=srm_to_ebc(srm),
    )


def fitness_error(metrics: BrewMetrics, target: TargetProfile) -> float:
    """Sum of absolute deviations over the three optimised parameters."""
    return (
        abs(metrics.abv - target.abv)
        + abs(metrics.ibu - target.ibu)
        + abs(metrics.srm - target.srm)
    )


class RecipeFitness:
    """Vectorised fitness oracle for the optimisers.

    Precomputes per-slot coefficient vectors so a whole population evaluates
    with a handful of matrix operations. Calling the instance with an (M, D)
    batch (or a single D-vector) returns the fitness error per row; recipes
    whose gravity reaches the 1.775 singularity score +inf instead of raising.
    """

    def __init__(
        self,
        inventory: Inventory,
        target: TargetProfile,
        batch: BatchParams = DEFAULT_BATCH,
        mode: SrmMode = SrmMode.AGGREGATE_MOREY,
    ):
        self.inventory = inventory
        self.target = target
        self.batch = batch
        self.mode = mode

        d = inventory.dims
        v_gal = batch.batch_size / L_PER_GAL
        hop_coef = np.zeros(d)
        points_coef = np.zeros(d)
        gibu_coef = np.zeros(d)
        mcu_coef = np.zeros(d)
        color_literal = np.zeros(d)
        boil_factor = 1.0 - math.exp(-0.04 * batch.boil_time)
        for i, item in enumerate(inventory):
            if isinstance(item, Hop):
                hop_coef[i] = 10.0 * item.alpha * boil_factor / (4.15 * batch.batch_size)
            elif isinstance(item, Fermentable):
                ppg = PPG_FULL_YIELD * item.yield_pct / 100.0
                points_coef[i] = ppg * batch.brewer_efficiency / (KG_PER_LB * v_gal * 1000.0)
                gibu_coef[i] = item.ibu_gal_per_lb / (KG_PER_LB * v_gal)
                mcu_coef[i] = item.color / (KG_PER_LB * v_gal)
                color_literal[i] = item.color
        self._hop_coef = hop_coef
        self._points_coef = points_coef
        self._gibu_coef = gibu_coef
        self._mcu_coef = mcu_coef
        self._color_literal = color_literal
        self._v_gal = v_gal
        yeasts = inventory.yeasts
        self._attenuation = yeasts[0].attenuation if yeasts else 0.0

    def metrics_arrays(self, batch_q: np.ndarray) -> dict[str, np.ndarray]:
        """Per-row og/fg/abv/ibu/mcu/srm for an (M, D) quantity matrix."""
        q = np.atleast_2d(np.asarray(batch_q, dtype=float))
        og = 1.0 + q @ self._points_coef
        fg = og - (og - 1.0) * self._attenuation / 100.0
        diff = og - fg
        simple = 131.25 * diff
        denom = 0.794 * (1.775 - og)
        with np.errstate(divide="ignore", invalid="ignore"):
            high = np.where(denom > 0, 76.08 * diff * fg / np.where(denom > 0, denom, 1.0), np.inf)
        abv = np.where(simple <= ABV_SWITCH, simple, high)
        bigness = 1.65 * np.power(0.000125, og - 1.0)
        ibu = (q @ self._hop_coef) * bigness + q @ self._gibu_coef
        mcu = q @ self._mcu_coef
        if self.mode is SrmMode.AGGREGATE_MOREY:
            srm = 1.4922 * np.power(mcu, 0.6859)
        else:
            w_lb = q / KG_PER_LB
            srm = 1.4922 * (np.power(w_lb, 0.6859) @ self._color_literal) / self._v_gal
        return {"og": og, "fg": fg, "abv": abv, "ibu": ibu, "mcu": mcu, "srm": srm}

    def __call__(self, batch_q: np.ndarray) -> np.ndarray:
        single = np.asarray(batch_q).ndim == 1
        m = self.metrics_arrays(batch_q)
        err = (
            np.abs(m["abv"] - self.target.abv)
            + np.abs(m["ibu"] - self.target.ibu)
            + np.abs(m["srm"] - self.target.srm)
        )
        return float(err[0]) if single else err
