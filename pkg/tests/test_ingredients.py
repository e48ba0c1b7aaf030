"""Catalog parsing, validation, and round-trip tests."""

import pytest

from brewopt.ingredients import (
    Fermentable,
    Hop,
    Inventory,
    InventoryError,
    Yeast,
    dump_catalog,
    inventory_from_records,
    inventory_to_records,
    parse_catalog,
    validate_recipe,
)

HEADER = (
    "kind,name,stock,stock_unit,alpha,beta,color,yield,ibu_gal_per_lb,"
    "moisture,diastatic_power,attenuation,min_temp,max_temp\n"
)


def test_parse_minimal_catalog():
    text = HEADER + (
        "hop,Cascade,100,g,4.5,6.0,,,,,,,,\n"
        "fermentable,Pale,7,kg,,,3.0,78,0,4,45,,,\n"
        "yeast,S-04,11,ml,,,,,,,,78,15,20\n"
    )
    inv = parse_catalog(text)
    assert inv.dims == 3
    assert isinstance(inv[0], Hop) and inv[0].alpha == 4.5
    assert isinstance(inv[1], Fermentable) and inv[1].yield_pct == 78
    assert isinstance(inv[2], Yeast) and inv[2].attenuation == 78
    assert list(inv.stocks()) == [100.0, 7.0, 11.0]


def test_empty_catalog_accepted():
    assert parse_catalog(HEADER).dims == 0
    assert parse_catalog("").dims == 0


def test_error_carries_line_number():
    text = HEADER + (
        "hop,Cascade,100,g,4.5,6.0,,,,,,,,\n"
        "hop,Broken,100,g,not-a-number,6.0,,,,,,,,\n"
    )
    with pytest.raises(InventoryError) as exc:
        parse_catalog(text)
    assert exc.value.line == 3
    assert "not-a-number" in str(exc.value)


def test_negative_stock_rejected():
    with pytest.raises(InventoryError):
        parse_catalog(HEADER + "hop,Cascade,-1,g,4.5,6.0,,,,,,,,\n")


def test_wrong_stock_unit_rejected():
    with pytest.raises(InventoryError) as exc:
        parse_catalog(HEADER + "hop,Cascade,100,kg,4.5,6.0,,,,,,,,\n")
    assert "stock_unit" in str(exc.value)


def test_unknown_kind_rejected():
    with pytest.raises(InventoryError):
        parse_catalog(HEADER + "adjunct,Spice,1,kg,,,,,,,,,,\n")


def test_unknown_column_rejected():
    with pytest.raises(InventoryError):
        parse_catalog("kind,name,stock,stock_unit,mystery\nhop,Cascade,100,g,1\n")


def test_duplicate_names_rejected():
    text = HEADER + (
        "hop,Cascade,100,g,4.5,6.0,,,,,,,,\n"
        "hop,Cascade,50,g,5.0,6.0,,,,,,,,\n"
    )
    with pytest.raises(InventoryError) as exc:
        parse_catalog(text)
    assert "duplicate" in str(exc.value)


def test_missing_required_field():
    with pytest.raises(InventoryError) as exc:
        parse_catalog(HEADER + "fermentable,Pale,7,kg,,,,78,,,,,,\n")
    assert exc.value.field == "color"


def test_invariant_violations():
    with pytest.raises(InventoryError):
        Hop("h", alpha=-1.0, beta=0.0, stock=10)
    with pytest.raises(InventoryError):
        Fermentable("f", color=1.0, yield_pct=150.0, ibu_gal_per_lb=0, moisture=0,
                    diastatic_power=0, stock=1)
    with pytest.raises(InventoryError):
        Yeast("y", attenuation=0.0, min_temp=15, max_temp=20, stock=1)


def test_dump_parse_round_trip():
    inv = Inventory(
        (
            Hop("Cascade", 4.5, 6.0, 100.0),
            Fermentable("Pale", 3.0, 78.0, 0.0, 4.0, 45.0, 7.0),
            Yeast("S-04", 78.0, 15.0, 20.0, 11.0),
        )
    )
    assert parse_catalog(dump_catalog(inv)) == inv


def test_records_round_trip():
    inv = Inventory(
        (
            Hop("Cascade", 4.5, 6.0, 100.0),
            Fermentable("Pale", 3.0, 78.0, 0.0, 4.0, 45.0, 7.0),
        )
    )
    assert inventory_from_records(inventory_to_records(inv)) == inv


def test_records_reject_unknown_field():
    with pytest.raises(InventoryError):
        inventory_from_records([{"kind": "hop", "name": "x", "stock": 1,
                                 "stock_unit": "g", "alpha": 1, "surprise": 2}])


def test_validate_recipe_bounds():
    inv = Inventory((Hop("Cascade", 4.5, 6.0, 100.0),))
    validate_recipe([50.0], inv)
    with pytest.raises(ValueError):
        validate_recipe([150.0], inv)
    with pytest.raises(ValueError):
        validate_recipe([-1.0], inv)
    with pytest.raises(ValueError):
        validate_recipe([1.0, 2.0], inv)
