import math
import random

import pytest

import fairspace


def square_measure(seed, count=600):
    rng = random.Random(seed)
    pts = [[rng.uniform(-1, 1), rng.uniform(-1, 1)] for _ in range(count)]
    w = [1.0 / count] * count
    return fairspace.make_measure(2, pts, w)


def test_measure_from_spec():
    mu = fairspace.measure(
        {"kind": "points", "dim": 2, "points": [[0, 0], [1, 0]], "weights": [0.25, 0.75]}
    )
    assert mu.dim == 2
    assert mu.count == 2
    assert abs(sum(mu.weights) - 1.0) < 1e-12


def test_equalize_weights_balances_masses():
    mu = square_measure(7)
    lambdas, masses = fairspace.equalize_weights(mu, [[-0.5, 0.0], [0.5, 0.0]], tol=1e-3)
    assert len(lambdas) == 2
    assert abs(sum(lambdas)) < 1e-9
    assert all(abs(m - 0.5) <= 2e-3 + 2.0 / mu.count for m in masses)


def test_solve_and_verify_roundtrip():
    measures = [square_measure(s) for s in (1, 2)]
    space = {
        "kind": "join",
        "direction": [1.0, 0.0],
        "left": {"kind": "trivial", "dim": 2},
        "right": {"kind": "trivial", "dim": 2},
    }
    out = fairspace.solve_envy_free(space, measures, eps=5e-2, seed=3, restarts=4)
    cert = out["certificate"]
    assert cert["kind"] == "envy"
    assert cert["feasible"] is True
    ok, violations = fairspace.verify(out["partition"], cert, measures=measures)
    assert ok, violations


def test_verify_flags_corruption():
    measures = [square_measure(s) for s in (1, 2)]
    space = {
        "kind": "join",
        "direction": [0.0, 1.0],
        "left": {"kind": "trivial", "dim": 2},
        "right": {"kind": "trivial", "dim": 2},
    }
    out = fairspace.solve_envy_free(space, measures, eps=5e-2, seed=3, restarts=4)
    cert = dict(out["certificate"])
    cert["value_table"] = [[v + 0.2 for v in row] for row in cert["value_table"]]
    ok, violations = fairspace.verify(out["partition"], cert, measures=measures)
    assert not ok
    assert violations


def test_render_svg_shape():
    measures = [square_measure(5)]
    space = {
        "kind": "join",
        "direction": [1.0, 0.0],
        "left": {"kind": "trivial", "dim": 2},
        "right": {"kind": "trivial", "dim": 2},
    }
    out = fairspace.solve_envy_free(space, measures + [square_measure(6)], eps=5e-2, seed=1)
    svg = fairspace.render_svg(out["partition"], measures)
    assert svg.startswith("<svg")
    assert svg.rstrip().endswith("</svg>")
    assert "path" in svg


def test_error_maps_to_python_exception():
    with pytest.raises(fairspace.FairspaceError):
        fairspace.measure({"kind": "points", "dim": 2, "points": [], "weights": []})


def test_simultaneous_identical_measures():
    base = square_measure(11, count=900)
    group = [square_measure(11, count=900), square_measure(11, count=900)]
    out = fairspace.solve_simultaneous(
        base, [group], 2, eps_schedule=[0.05, 0.025], restarts=3, max_evals=60, seed=2
    )
    cert = out["certificate"]
    assert cert["kind"] == "simultaneous"
    assert math.isfinite(cert["residual"])
    if cert["feasible"]:
        ok, violations = fairspace.verify(
            out["partition"], cert, base=base, groups=[group]
        )
        assert ok, violations
