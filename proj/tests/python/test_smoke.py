import math

import pytest

import specflow

INTERVAL = {"dim": 1, "boxes": [{"lo": [0], "hi": [10]}]}


def shift_1d(x, lo, hi, K, v, L=math.inf):
    return x + min(x - lo, hi - x, L) / K * v


def test_commands_listed():
    assert set(specflow.command_names()) == {"toast", "gridflow", "suspend", "katok", "lipschitz"}


def test_shift_maps_match_closed_form():
    for x in [0.0, 0.5, 1.0, 3.0, 5.0, 7.25, 10.0]:
        assert specflow.shift_f(INTERVAL, 5, [1], [x])[0] == pytest.approx(shift_1d(x, 0, 10, 5, 1), abs=1e-14)
        assert specflow.shift_h(INTERVAL, 5, [1], [x], L=2)[0] == pytest.approx(
            shift_1d(x, 0, 10, 5, 1, 2), abs=1e-14
        )


def test_shift_rejects_long_vector():
    with pytest.raises(ValueError):
        specflow.shift_f(INTERVAL, 1, [1], [3.0])


def test_grid_constants():
    for alpha in [1.01, 1.1, 1.25, 2.0]:
        R, K = specflow.choose_constants(alpha)
        assert R == 0.5
        k = 1
        while not alpha * (2 * k - 1) > 2 * k:
            k *= 2
        assert K == k
    with pytest.raises(ValueError):
        specflow.choose_constants(1.0)


def test_snap_rounds_halves_down():
    assert specflow.snap_vector([0.25, -0.75]) == [-0.25, -0.25]
    assert specflow.snap_vector([0.5, -0.5]) == [-0.5, -0.5]


def test_suspension_against_prefix_sums():
    ceiling = lambda i: 1.0 + (i % 3) * 0.25
    # From (0, 0.5) forward by 3: f(0) = 1 leaves 2.5, f(1) = 1.25 leaves 1.25,
    # f(2) = 1.5 exceeds it.
    assert specflow.suspend1d(ceiling, 1.0, 1000, 0, 0.5, 3.0) == (2, 1.25)
    z, t = specflow.suspend1d(ceiling, 1.0, 1000, 0, 0.5, -1.0)
    assert (z, t) == (-1, ceiling(-1) - 0.5)


def test_run_toast_report():
    report, artifacts = specflow.run("toast", {"d": 1, "levels": 1, "seed": 3})
    assert report["schema"] == 1
    assert report["command"] == "toast"
    assert report["status"] == "pass"
    assert all(c["status"] == "pass" for c in report["checks"])
    assert "timing" not in report


def test_run_is_deterministic():
    a, _ = specflow.run("suspend", "d = 1\nseed = 5\n")
    b, _ = specflow.run("suspend", "d = 1\nseed = 5\n")
    assert a == b and a["status"] == "pass"


def test_bad_config_names_field():
    with pytest.raises(ValueError, match="alpha"):
        specflow.run("katok", {"alpha": 0.9})
