from fractions import Fraction
from itertools import product

import pytest

import boxlb


def test_field_arithmetic():
    f = boxlb.Field(2, 2)
    assert f.q == 4
    assert f.mul(2, 3) == 1
    assert f.add(3, 3) == 0
    g = boxlb.Field(7)
    for a in range(1, 7):
        assert g.mul(a, g.inv(a)) == 1
    with pytest.raises(boxlb.FieldError):
        boxlb.Field(4)
    with pytest.raises(ValueError):
        g.add(7, 1)


def test_lines_and_independence():
    f = boxlb.Field(3)
    assert boxlb.linearly_independent(f, [1, 0], [0, 1])
    assert not boxlb.linearly_independent(f, [1, 2], [2, 1])
    base, direction = boxlb.affine_line_through(f, [1, 1], [2, 2])
    assert direction == [1, 1]
    assert base == [0, 0]


def test_form_evaluation_and_text():
    f = boxlb.Field(3)
    form = boxlb.Form(f, [2, 2], [0, 1, 2, 0])
    # x0*y1 + 2*x1*y0
    for x, y in product(product(range(3), repeat=2), repeat=2):
        expected = (x[0] * y[1] + 2 * x[1] * y[0]) % 3
        assert form([list(x), list(y)]) == expected
    text = str(form)
    assert text.startswith("boxlb.form.v1 p=3 k=1")
    assert boxlb.Form.parse(text) == form
    with pytest.raises(boxlb.FieldError):
        boxlb.Form.parse("boxlb.form.v1 p=3\n")


def test_restriction_and_interpolant():
    f = boxlb.Field(2)
    form = boxlb.Form.random(f, [3, 3], seed=4)
    restricted = form.restrict([[[1, 0, 0], [0, 1, 1]], [[0, 0, 1], [1, 1, 0]]])
    assert restricted.dims == [2, 2]
    assert restricted([[1, 0], [0, 1]]) == form([[1, 0, 0], [1, 1, 0]])
    pairs = [([1, 0], [0, 1]), ([1, 1], [0, 1])]
    for a in pairs[0]:
        for b in pairs[1]:
            assert boxlb.corner_interpolant_value(f, pairs, [a, b]) == 1


def test_bounds():
    assert boxlb.deletion_alpha(3) == Fraction(7, 3)
    assert boxlb.grs_alpha(6) is None
    assert boxlb.grs_alpha(3) == (5, Fraction(5, 2))
    assert boxlb.new_alpha(22) == (1, 190651, Fraction(190651))
    rows = boxlb.comparison_table(2, 8)
    assert [r["d"] for r in rows] == list(range(2, 9))
    assert rows[0]["new"] == 2
    assert boxlb.check_params(3, 1, 3) and not boxlb.check_params(3, 1, 4)


def test_construction_is_box_free():
    params = boxlb.Params(d=2, r=1, s=2, p=3)
    forms = boxlb.sample_forms(params, seed=11)
    result = boxlb.construct(params, forms)
    edges = {tuple(e) for e in result["edges"]}
    bad = {tuple(e) for e in result["bad"]}
    kept = {tuple(e) for e in result["kept"]}
    assert bad <= edges
    assert kept == edges - bad
    assert boxlb.find_box(params, result["kept"]) is None
    assert result["boxes"] == boxlb.count_boxes(params, forms)
    assert result["boxes"] == result["lines"] * 9 * 4


def test_planted_box_is_found():
    params = boxlb.Params(d=2, r=1, s=2, p=2)
    planted = [[a, b] for a in (1, 2) for b in (2, 3)]
    found = boxlb.find_box(params, planted)
    assert found is not None
    assert sorted(found[0]) == [1, 2] and sorted(found[1]) == [2, 3]


def test_exact_means():
    params = boxlb.Params(d=2, r=1, s=2, p=2)
    stats = boxlb.run_trials(params, mode="exact")
    assert len(stats["records"]) == 16
    assert stats["mean_edges"] == Fraction(9, 2) == params.expected_edges
    assert stats["mean_boxes"] == Fraction(9, 4) == params.expected_boxes


def test_sampled_trials_deterministic():
    params = boxlb.Params(d=2, r=1, s=2, p=5)
    a = boxlb.run_trials(params, trials=5, seed=3)
    b = boxlb.run_trials(params, trials=5, seed=3, workers=2)
    assert a["records"] == b["records"]
    assert all(r["box_free"] for r in a["records"])


def test_budget_and_cli():
    with pytest.raises(boxlb.BudgetExceeded):
        boxlb.run_trials(boxlb.Params(d=3, r=1, s=3, p=3), mode="exact")
    code, out, _ = boxlb.cli(["table", "2", "2"])
    assert code == 0
    assert out == "2  1.50  2.00  2.00\n"
    assert boxlb.cli(["table", "5", "4"])[0] == 1
