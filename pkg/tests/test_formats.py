import json

import numpy as np
import pytest

from objper import EuclideanSpace, ObjectSeries, ParseError, SphereSpace, ValidationError, parse_series, write_series
from objper import simulation as sim
from objper.formats import (
    atomic_write,
    curves_to_quantiles,
    read_table,
    write_adjacency,
    write_compositions,
)


@pytest.mark.parametrize("family", sim.FAMILIES)
def test_round_trip_is_exact(tmp_path, family):
    series = sim.generate(sim.make_config(family, T=30, seed=2))
    path = tmp_path / "s.dat"
    write_series(path, series)
    kind = {"dirichlet": "sphere", "network": "laplacian", "distribution": "wasserstein1d"}[family]
    back = parse_series(path, kind)
    assert back.points.tobytes() == series.points.tobytes()
    assert back.space == series.space


def test_euclidean_round_trip_with_header(tmp_path, rng):
    series = ObjectSeries(EuclideanSpace(2), rng.standard_normal((5, 2)) * 1e-7)
    write_series(tmp_path / "e.csv", series, header=["x", "y"])
    header, _ = read_table(tmp_path / "e.csv")
    assert header == ["x", "y"]
    assert parse_series(tmp_path / "e.csv", "euclidean").points.tobytes() == series.points.tobytes()


def test_compositions_become_sphere_points(tmp_path):
    comps = np.array([[0.25, 0.25, 0.5], [1.0, 0.0, 0.0], [0.2, 0.3, 0.5]])
    write_compositions(tmp_path / "c.csv", comps, header=["coal", "gas", "other"])
    series = parse_series(tmp_path / "c.csv", "sphere-composition")
    assert series.T == 3 and isinstance(series.space, SphereSpace)
    np.testing.assert_array_equal(series.points, np.sqrt(comps))


def test_bad_composition_row_names_the_row(tmp_path):
    (tmp_path / "c.csv").write_text("a,b\n0.5,0.5\n0.7,0.7\n")
    with pytest.raises(ValidationError) as info:
        parse_series(tmp_path / "c.csv", "sphere-composition")
    assert info.value.invariant == "simplex"
    assert "row 3" in str(info.value)


@pytest.mark.parametrize(
    "text, row",
    [("1,2\n3,x\n", 2), ("1,2\n3\n", 2), ("# comment\n1,2\n\n3,4,5\n", 4), ("1,nan\n", 1)],
)
def test_malformed_csv(tmp_path, text, row):
    (tmp_path / "bad.csv").write_text(text)
    with pytest.raises(ParseError) as info:
        parse_series(tmp_path / "bad.csv", "euclidean")
    assert info.value.row == row


def test_empty_csv(tmp_path):
    (tmp_path / "e.csv").write_text("a,b\n")
    with pytest.raises(ParseError):
        parse_series(tmp_path / "e.csv", "euclidean")


def test_adjacency_stack(tmp_path):
    write_adjacency(tmp_path / "a.json", [[[0, 1], [1, 0]], [[0, 2], [2, 0]]])
    series = parse_series(tmp_path / "a.json", "laplacian")
    np.testing.assert_array_equal(series.points[0], [[1, -1], [-1, 1]])
    np.testing.assert_array_equal(series.points[1], [[2, -2], [-2, 2]])


def test_bad_adjacency_is_a_validation_error(tmp_path):
    write_adjacency(tmp_path / "a.json", [[[0, 1], [-1, 0]], [[0, 1], [1, 0]]])
    with pytest.raises(ValidationError):
        parse_series(tmp_path / "a.json", "laplacian")


@pytest.mark.parametrize(
    "doc",
    ['{"format": "graphs"}', '[1, 2]', '{"format": "laplacian", "matrices": [1, 2]}', "{not json"],
)
def test_bad_json_documents(tmp_path, doc):
    (tmp_path / "x.json").write_text(doc)
    with pytest.raises(ParseError):
        parse_series(tmp_path / "x.json", "laplacian")


def test_curves_to_quantiles_uniform():
    grid = np.linspace(0.0, 2.0, 201)
    q = curves_to_quantiles(grid, [np.ones_like(grid)], 100)[0]
    np.testing.assert_allclose(q, 2 * (np.arange(1, 101) - 0.5) / 100, atol=1e-12)


def test_curves_to_quantiles_gaussian():
    grid = np.linspace(-8, 8, 4001)
    dens = np.exp(-0.5 * (grid - 1.0) ** 2)
    q = curves_to_quantiles(grid, [3.0 * dens], 100)[0]
    np.testing.assert_allclose(q, 1.0 + sim.standard_normal_quantiles(100), atol=2e-3)


def test_curve_file(tmp_path):
    grid = list(range(24))
    doc = {"format": "curves", "grid": grid, "curves": [[1.0] * 24, [float(h) for h in grid]], "M": 20}
    (tmp_path / "c.json").write_text(json.dumps(doc))
    series = parse_series(tmp_path / "c.json", "wasserstein1d")
    assert series.points.shape == (2, 20)


def test_negative_mass_curve(tmp_path):
    doc = {"format": "curves", "grid": [0, 1, 2], "curves": [[1, -1, 1], [1, 1, 1]]}
    (tmp_path / "c.json").write_text(json.dumps(doc))
    with pytest.raises(ValidationError) as info:
        parse_series(tmp_path / "c.json", "wasserstein1d")
    assert info.value.invariant == "nonnegative density"


def test_zero_mass_and_bad_grid():
    with pytest.raises(ValidationError):
        curves_to_quantiles([0, 1, 2], [[0, 0, 0]])
    with pytest.raises(ValidationError):
        curves_to_quantiles([0, 2, 1], [[1, 1, 1]])


def test_unknown_kind(tmp_path):
    with pytest.raises(ValueError):
        parse_series(tmp_path / "x", "torus")


def test_atomic_write_replaces(tmp_path):
    p = tmp_path / "out.txt"
    p.write_text("old")
    atomic_write(p, "new")
    assert p.read_text() == "new"
    assert [f.name for f in tmp_path.iterdir()] == ["out.txt"]
