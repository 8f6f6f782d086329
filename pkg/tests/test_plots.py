import math

import pytest

from synthqa.errors import EmptySeries
from synthqa.marginals import count_marginal, enumerate_tuples
from synthqa.metrics import POINT_MEAN, VARIABLE_L1
from synthqa.plots import (
    MAX_RENDER_POINTS,
    QQSeries,
    ScatterPoint,
    qq_series,
    qq_series_for_pair,
    render_qq,
    render_scatter,
    scatter_points,
)
from synthqa.schema import CATEGORICAL, NUMERICAL, Schema
from synthqa.table import TableData, align_dictionaries

import oracles
from conftest import random_schema, random_table, table_rows
from test_marginals import make_pair


def test_scatter_points_classes_and_probs(rng):
    schema = random_schema(rng, max_cols=4, kinds=(CATEGORICAL,))
    pair = make_pair(rng, schema)
    for k in (1, 2):
        vts = enumerate_tuples(schema, k, CATEGORICAL)
        tables = [count_marginal(pair, vt) for vt in vts]
        pts = scatter_points(tables, k)
        by_table = sum(t.n_cells for t in tables)
        assert len(pts) == by_table
        for p in pts:
            assert 0.0 <= p.x <= 1.0 and 0.0 <= p.y <= 1.0
            if p.cls == "real_only":
                assert p.y == 0.0 and p.x > 0.0
            elif p.cls == "synth_only":
                assert p.x == 0.0 and p.y > 0.0
            else:
                assert p.x > 0.0 and p.y > 0.0


def test_scatter_points_reproduce_tuple_metrics(rng):
    # recomputing the metrics from the point cloud must agree with the tables
    for trial in range(20):
        schema = random_schema(rng, max_cols=5, kinds=(CATEGORICAL,))
        pair = make_pair(rng, schema, n_real=rng.randint(1, 100),
                         n_synth=rng.randint(1, 100))
        for k in (1, 2):
            vts = enumerate_tuples(schema, k, CATEGORICAL)
            tables = [t for t in (count_marginal(pair, vt) for vt in vts)
                      if t.n_cells]
            if not tables:
                continue
            pts = scatter_points(tables, k)
            groups = {}
            for p in pts:
                groups.setdefault(tuple(p.columns), []).append(p)
            from synthqa.metrics import coverage, invented, mae

            for t in tables:
                g = groups[tuple(t.names)]
                want_mae = math.fsum(abs(p.x - p.y) for p in g) / len(g)
                assert mae(t, POINT_MEAN) == pytest.approx(want_mae, abs=1e-12)
                real_pts = [p for p in g if p.x > 0]
                covered = sum(1 for p in real_pts if p.y > 0)
                assert coverage(t) == pytest.approx(
                    covered / len(real_pts), abs=1e-12)
                inv_mass = math.fsum(p.y for p in g if p.x == 0)
                assert invented(t) == pytest.approx(inv_mass, abs=1e-12)


def test_scatter_svg_deterministic(rng):
    schema = random_schema(rng, max_cols=4, kinds=(CATEGORICAL,))
    pair = make_pair(rng, schema)
    tables = [count_marginal(pair, vt)
              for vt in enumerate_tuples(schema, 1, CATEGORICAL)]
    pts = scatter_points(tables, 1)
    a = render_scatter(pts, "t")
    b = render_scatter(pts, "t")
    assert a == b
    assert "<svg" in a
    assert 'width="640"' in a and 'height="640"' in a


def test_scatter_log_scale_renders():
    pts = [ScatterPoint(("c",), ("x",), 1e-7, 0.5, "shared"),
           ScatterPoint(("c",), ("y",), 0.3, 0.0, "real_only")]
    svg = render_scatter(pts, "log demo", log_scale=True)
    assert "<svg" in svg


def test_scatter_subsample_cap(np_rng):
    n = MAX_RENDER_POINTS + 5000
    xs = np_rng.random(n)
    ys = np_rng.random(n)
    pts = [ScatterPoint(("c",), (str(i),), float(x), float(y), "shared")
           for i, (x, y) in enumerate(zip(xs, ys))]
    svg_a = render_scatter(pts, "cap", seed=1)
    svg_b = render_scatter(pts, "cap", seed=1)
    assert svg_a == svg_b
    assert svg_a.count("<circle") <= MAX_RENDER_POINTS


def test_qq_series_normalization():
    schema = Schema.of([("x", NUMERICAL)])
    real = TableData.from_columns(schema, {"x": [0.0, 5.0, 10.0]})
    synth = TableData.from_columns(schema, {"x": [0.0, 5.0, 10.0]})
    series = qq_series_for_pair(real, synth)
    assert len(series) == 1
    s = series[0]
    assert s.real_q[0] == 0.0 and s.real_q[-1] == 1.0
    assert s.real_q == s.synth_q


def test_qq_series_shift_visible():
    schema = Schema.of([("x", NUMERICAL)])
    real = TableData.from_columns(schema, {"x": [0.0, 10.0]})
    synth = TableData.from_columns(schema, {"x": [5.0, 15.0]})
    (s,) = qq_series_for_pair(real, synth)
    # synth sits half a real-range above
    assert all(b - a == pytest.approx(0.5) for a, b in zip(s.real_q, s.synth_q))


def test_qq_constant_real_column():
    schema = Schema.of([("x", NUMERICAL)])
    real = TableData.from_columns(schema, {"x": [2.0, 2.0]})
    synth = TableData.from_columns(schema, {"x": [1.0, 3.0]})
    (s,) = qq_series_for_pair(real, synth)
    assert all(v == 0.5 for v in s.real_q)


def test_qq_svg_deterministic_and_empty_rejected():
    schema = Schema.of([("x", NUMERICAL), ("y", NUMERICAL)])
    real = TableData.from_columns(schema, {"x": [0.0, 1.0, 2.0],
                                           "y": [5.0, 6.0, 7.0]})
    synth = TableData.from_columns(schema, {"x": [0.1, 1.1, 1.9],
                                            "y": [5.5, 6.5, 7.5]})
    series = qq_series_for_pair(real, synth)
    a = render_qq(series, "qq")
    assert a == render_qq(series, "qq")
    with pytest.raises(EmptySeries):
        render_qq([], "empty")


def test_scatter_point_round_trip():
    p = ScatterPoint(("a", "b"), ("x", "y"), 0.25, 0.5, "shared")
    q = ScatterPoint.from_dict(p.to_dict())
    assert q == p
    assert p.to_dict()["class"] == "shared"
