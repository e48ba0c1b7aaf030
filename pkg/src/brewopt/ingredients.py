"""Ingredient domain types and the catalog file format.

An inventory is an ordered list of ingredients; each ingredient contributes
one dimension to the recipe search space, bounded by its in-stock quantity.
Hops are stocked in grams, fermentables in kilograms, yeasts in millilitres,
and recipe vectors use the same unit as the ingredient's stock.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

HOP = "hop"
FERMENTABLE = "fermentable"
YEAST = "yeast"

_STOCK_UNITS = {HOP: "g", FERMENTABLE: "kg", YEAST: "ml"}

CATALOG_COLUMNS = [
    "kind",
    "name",
    "stock",
    "stock_unit",
    "alpha",
    "beta",
    "color",
    "yield",
    "ibu_gal_per_lb",
    "moisture",
    "diastatic_power",
    "attenuation",
    "min_temp",
    "max_temp",
]


class InventoryError(ValueError):
    """Raised on malformed or inconsistent catalog data."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        prefix = f"line {line}: " if line is not None else ""
        suffix = f" (field '{field}')" if field else ""
        super().__init__(f"{prefix}{message}{suffix}")


@dataclass(frozen=True)
class Hop:
    name: str
    alpha: float  # alpha acid, percent
    beta: float  # beta acid, percent (stored, unused by the fitness model)
    stock: float  # grams

    def __post_init__(self):
        if self.alpha < 0:
            raise InventoryError(f"hop '{self.name}': alpha must be >= 0", field="alpha")
        if self.stock < 0:
            raise InventoryError(f"hop '{self.name}': stock must be >= 0", field="stock")

    @property
    def kind(self) -> str:
        return HOP


@dataclass(frozen=True)
class Fermentable:
    name: str
    color: float  # degrees Lovibond
    yield_pct: float  # percent extract
    ibu_gal_per_lb: float  # bitterness factor for hopped extracts
    moisture: float  # percent (stored, unused)
    diastatic_power: float  # degrees Lintner (stored, unused)
    stock: float  # kilograms

    def __post_init__(self):
        if self.color < 0:
            raise InventoryError(f"fermentable '{self.name}': color must be >= 0", field="color")
        if not 0 <= self.yield_pct <= 100:
            raise InventoryError(
                f"fermentable '{self.name}': yield must be in [0, 100]", field="yield"
            )
        if self.ibu_gal_per_lb < 0:
            raise InventoryError(
                f"fermentable '{self.name}': ibu_gal_per_lb must be >= 0",
                field="ibu_gal_per_lb",
            )
        if self.stock < 0:
            raise InventoryError(f"fermentable '{self.name}': stock must be >= 0", field="stock")

    @property
    def kind(self) -> str:
        return FERMENTABLE


@dataclass(frozen=True)
class Yeast:
    name: str
    attenuation: float  # percent of gravity drop the strain achieves
    min_temp: float  # Celsius (stored, unused)
    max_temp: float  # Celsius (stored, unused)
    stock: float  # millilitres

    def __post_init__(self):
        if not 0 < self.attenuation <= 100:
            raise InventoryError(
                f"yeast '{self.name}': attenuation must be in (0, 100]", field="attenuation"
            )
        if self.stock < 0:
            raise InventoryError(f"yeast '{self.name}': stock must be >= 0", field="stock")

    @property
    def kind(self) -> str:
        return YEAST


Ingredient = Hop | Fermentable | Yeast


@dataclass(frozen=True)
class Inventory:
    """Ordered ingredient list; slot order defines the recipe vector layout."""

    items: tuple[Ingredient, ...] = field(default_factory=tuple)

    def __post_init__(self):
        seen: set[str] = set()
        for item in self.items:
            if item.name in seen:
                raise InventoryError(f"duplicate ingredient name '{item.name}'")
            seen.add(item.name)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i: int) -> Ingredient:
        return self.items[i]

    @property
    def dims(self) -> int:
        return len(self.items)

    @property
    def hops(self) -> tuple[Hop, ...]:
        return tuple(x for x in self.items if isinstance(x, Hop))

    @property
    def fermentables(self) -> tuple[Fermentable, ...]:
        return tuple(x for x in self.items if isinstance(x, Fermentable))

    @property
    def yeasts(self) -> tuple[Yeast, ...]:
        return tuple(x for x in self.items if isinstance(x, Yeast))

    def stocks(self) -> np.ndarray:
        """Per-slot stock, i.e. the recipe upper bounds (native units)."""
        return np.array([x.stock for x in self.items], dtype=float)

    def names(self) -> list[str]:
        return [x.name for x in self.items]


def _parse_float(row: dict, key: str, line: int, *, required: bool) -> float:
    raw = (row.get(key) or "").strip()
    if not raw:
        if required:
            raise InventoryError("missing required value", line=line, field=key)
        return 0.0
    try:
        return float(raw)
    except ValueError:
        raise InventoryError(f"not a number: {raw!r}", line=line, field=key) from None


def _record_to_ingredient(row: dict, line: int) -> Ingredient:
    kind = (row.get("kind") or "").strip().lower()
    name = (row.get("name") or "").strip()
    if kind not in _STOCK_UNITS:
        raise InventoryError(f"unknown kind {kind!r}", line=line, field="kind")
    if not name:
        raise InventoryError("empty ingredient name", line=line, field="name")

    unit = (row.get("stock_unit") or "").strip().lower()
    if unit != _STOCK_UNITS[kind]:
        raise InventoryError(
            f"{kind} stock must be given in {_STOCK_UNITS[kind]!r}, got {unit!r}",
            line=line,
            field="stock_unit",
        )
    stock = _parse_float(row, "stock", line, required=True)
    if stock < 0:
        raise InventoryError("stock must be >= 0", line=line, field="stock")

    try:
        if kind == HOP:
            return Hop(
                name=name,
                alpha=_parse_float(row, "alpha", line, required=True),
                beta=_parse_float(row, "beta", line, required=False),
                stock=stock,
            )
        if kind == FERMENTABLE:
            return Fermentable(
                name=name,
                color=_parse_float(row, "color", line, required=True),
                yield_pct=_parse_float(row, "yield", line, required=True),
                ibu_gal_per_lb=_parse_float(row, "ibu_gal_per_lb", line, required=False),
                moisture=_parse_float(row, "moisture", line, required=False),
                diastatic_power=_parse_float(row, "diastatic_power", line, required=False),
                stock=stock,
            )
        return Yeast(
            name=name,
            attenuation=_parse_float(row, "attenuation", line, required=True),
            min_temp=_parse_float(row, "min_temp", line, required=False),
            max_temp=_parse_float(row, "max_temp", line, required=False),
            stock=stock,
        )
    except InventoryError as exc:
        if exc.line is None:
            raise InventoryError(str(exc), line=line) from None
        raise


def parse_catalog(text: str) -> Inventory:
    """Parse a catalog CSV into an Inventory, validating every record.

    Raises InventoryError with a 1-based line number on the first bad record.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return Inventory(())
    unknown = [c for c in reader.fieldnames if c not in CATALOG_COLUMNS]
    if unknown:
        raise InventoryError(f"unknown column(s): {', '.join(unknown)}", line=1)
    for required in ("kind", "name", "stock", "stock_unit"):
        if required not in reader.fieldnames:
            raise InventoryError(f"missing column '{required}'", line=1)

    items: list[Ingredient] = []
    for row in reader:
        line = reader.line_num
        if all(not (v or "").strip() for v in row.values()):
            continue
        items.append(_record_to_ingredient(row, line))
    return Inventory(tuple(items))


def load_catalog(path) -> Inventory:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_catalog(fh.read())


def _ingredient_record(item: Ingredient) -> dict:
    rec = {c: "" for c in CATALOG_COLUMNS}
    rec["kind"] = item.kind
    rec["name"] = item.name
    rec["stock"] = repr(item.stock)
    rec["stock_unit"] = _STOCK_UNITS[item.kind]
    if isinstance(item, Hop):
        rec["alpha"] = repr(item.alpha)
        rec["beta"] = repr(item.beta)
    elif isinstance(item, Fermentable):
        rec["color"] = repr(item.color)
        rec["yield"] = repr(item.yield_pct)
        rec["ibu_gal_per_lb"] = repr(item.ibu_gal_per_lb)
        rec["moisture"] = repr(item.moisture)
        rec["diastatic_power"] = repr(item.diastatic_power)
    else:
        rec["attenuation"] = repr(item.attenuation)
        rec["min_temp"] = repr(item.min_temp)
        rec["max_temp"] = repr(item.max_temp)
    return rec


def dump_catalog(inventory: Inventory) -> str:
    """Serialize an Inventory back to catalog CSV (parse round-trips)."""
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CATALOG_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for item in inventory:
        writer.writerow(_ingredient_record(item))
    return out.getvalue()


def inventory_from_records(records: Iterable[dict]) -> Inventory:
    """Build an Inventory from already-structured records (e.g. JSON payloads)."""
    items = []
    for i, rec in enumerate(records, start=1):
        row = {c: "" for c in CATALOG_COLUMNS}
        for key, value in rec.items():
            if key not in CATALOG_COLUMNS:
                raise InventoryError(f"unknown field {key!r}", line=i)
            row[key] = "" if value is None else str(value)
        items.append(_record_to_ingredient(row, i))
    return Inventory(tuple(items))


def inventory_to_records(inventory: Inventory) -> list[dict]:
    records = []
    for item in inventory:
        rec = _ingredient_record(item)
        records.append(
            {
                k: (float(v) if k not in ("kind", "name", "stock_unit") and v != "" else v)
                for k, v in rec.items()
                if v != ""
            }
        )
    return records


def validate_recipe(quantities: Sequence[float] | np.ndarray, inventory: Inventory) -> np.ndarray:
    """Check a recipe vector against the inventory bounds; returns it as an array."""
    q = np.asarray(quantities, dtype=float)
    if q.ndim != 1 or q.shape[0] != inventory.dims:
        raise ValueError(
            f"recipe has {q.shape} quantities, inventory has {inventory.dims} slots"
        )
    stocks = inventory.stocks()
    if np.any(q < 0) or np.any(q > stocks):
        bad = int(np.argmax((q < 0) | (q > stocks)))
        raise ValueError(
            f"quantity for '{inventory[bad].name}' out of range: "
            f"{q[bad]} not in [0, {stocks[bad]}]"
        )
    return q
