from fractions import Fraction as F

import pytest

from ftcluster import resources as res
from ftcluster.pauli import NoiseModel


def test_level1_base():
    v = res.level1_base(1, 1)
    assert [v[(o, 1)] for o in ("0", "+", "S", "D")] == [69, 72, 159, 615]
    assert res.level1_base(F(1, 2), 1)[("0", 1)] == 138
    with pytest.raises(ValueError):
        res.level1_base(0, 1)


def test_step_from_level1():
    v = res.recurrence_step(1, res.level1_base(), res.SuccessTable.unit())
    assert v[("h", 2)] == 2623
    # 6*159 + 7*615 + 11*72 + 15*7
    assert v[("0", 2)] == 6156
    assert v[("+", 2)] == 5303


def test_halving_hexa_probability_only_touches_hexa():
    t = res.SuccessTable.unit()
    half = res.SuccessTable.unit()
    half.set("h", 2, F(1, 2))
    a = res.recurrence_step(1, res.level1_base(), t)
    b = res.recurrence_step(1, res.level1_base(), half)
    assert b[("h", 2)] == 2 * a[("h", 2)]
    assert b[("0", 2)] == a[("0", 2)] and b[("+", 2)] == a[("+", 2)]


def test_unit_table_gives_integers_and_dominance():
    v = res.resources_up_to(6, res.SuccessTable.unit())
    for level in range(1, 7):
        assert all(x.denominator == 1 for x in v.level(level).values())
    for level in range(2, 7):
        assert v[("0", level)] > v[("h", level)] and v[("0", level)] > v[("+", level)]
    # the physical base cases put |+> above |0> at level 1
    assert v[("+", 1)] > v[("0", 1)]


def test_rb_is_fixed():
    v = res.ResourceVector()
    assert v[("b", 5)] == 7**5
    with pytest.raises(ValueError):
        v[("b", 1)] = 3
    with pytest.raises(KeyError):
        v[("h", 2)]


def test_missing_low_level_probability_raises():
    t = res.SuccessTable()
    with pytest.raises(res.MissingSuccessProbability):
        t.get("0", 2)
    assert t.get("0", 3) == 1 and t.source("0", 3) == "asymptotic-one"
    with pytest.raises(ValueError):
        t.set("0", 2, 0)


def test_success_table_csv():
    t = res.SuccessTable.from_csv("alpha,level,p,source\n0,1,0.9,monte-carlo\n+,1,1\n0,2,1/2\n+,2,1\nh,2,1\n")
    assert t.get("0", 2) == F(1, 2) and t.source("0", 1) == "monte-carlo"
    assert res.SuccessTable.from_csv(t.to_csv()).entries == t.entries
    with pytest.raises(ValueError, match="line 2"):
        res.SuccessTable.from_csv("alpha,level,p\nq,1,0.5\n")


def test_resources_for_small_computation_is_level1():
    out = res.resources_for_computation("1e1", NoiseModel(F(1, 1000)), res.SuccessTable.unit())
    assert out.l_bar == 1 and out.headline_R0 == 69 and out.vector.top_level == 1
    with pytest.raises(ValueError):
        res.resources_for_computation("1e1", NoiseModel(0.05), res.SuccessTable.unit())


def test_curve_is_a_step_function():
    grid = [f"1e{k}" for k in range(1, 51)]
    rows = res.resource_curve(grid, [1e-3], res.SuccessTable.unit())
    r0 = [r["R_0"] for r in rows]
    lb = [r["l_bar"] for r in rows]
    assert all(b >= a for a, b in zip(r0, r0[1:]))
    jumps = [i for i in range(1, len(rows)) if r0[i] != r0[i - 1]]
    assert jumps == [i for i in range(1, len(rows)) if lb[i] != lb[i - 1]]
    assert len(jumps) + 1 == len(set(lb))


def test_higher_noise_costs_more():
    grid = [f"1e{k}" for k in range(1, 51, 3)]
    rows = res.resource_curve(grid, [1e-2, 1e-3], res.SuccessTable.unit())
    hi, lo = rows[:len(grid)], rows[len(grid):]
    assert all(a["R_0"] >= b["R_0"] for a, b in zip(hi, lo))


def test_sub_unit_table_costs_more():
    t = res.SuccessTable.unit()
    t.set("0", 1, F(9, 10))
    unit = res.resource_curve(["1e30"], [1e-3], res.SuccessTable.unit())[0]
    lossy = res.resource_curve(["1e30"], [1e-3], t)[0]
    assert lossy["R_0"] > unit["R_0"]


def test_curve_csv_and_overlay():
    rows = res.resource_curve(["1e6"], [1e-3], res.SuccessTable.unit())
    text = res.curve_to_csv(rows)
    assert text.splitlines()[0] == ",".join(res.CURVE_COLUMNS)
    assert ",2623," in text
    overlay = res.parse_overlay("N,R\n1e6,123.5\n# comment\n1e9,400\n")
    assert overlay == [("1e6", 123.5), ("1e9", 400.0)]
    assert res.curve_to_csv(rows, overlay).count("overlay") == 2
    with pytest.raises(ValueError, match="line 3"):
        res.parse_overlay("N,R\n1e6,1\n1e9\n")
    with pytest.raises(ValueError, match="line 1"):
        res.parse_overlay("n,r\n")
