import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symwalk import (
    Distribution,
    Topology,
    distribution,
    fit_scaling_exponent,
    hadamard,
    make_config,
    std_dev,
    symmetry_verdict,
    time_average,
    total_variation,
    uniformity_deviation,
)


def _line(probs):
    probs = np.asarray(probs, dtype=float)
    return Distribution(Topology.line(len(probs) // 2), probs)


def test_std_dev_two_point():
    d = _line([0.5, 0, 0, 0, 0.5])
    assert std_dev(d) == pytest.approx(2.0)
    assert std_dev(_line([0, 1, 0])) == 0.0


def test_std_dev_rejects_cycle():
    with pytest.raises(ValueError):
        std_dev(Distribution(Topology.cycle(3), np.ones(3) / 3))


def test_total_variation_and_verdict():
    a = _line([0.5, 0.5, 0])
    b = _line([0.5, 0.25, 0.25])
    assert total_variation(a, b) == pytest.approx(0.25)
    v = symmetry_verdict(a, b, tol=0.1)
    assert v.max_abs_diff == pytest.approx(0.25)
    assert not v.holds
    assert v.line() == "max_abs_diff=0.25 tol=0.1 holds=false"
    assert symmetry_verdict(a, a).line().endswith("holds=true")


def test_topology_mismatch():
    with pytest.raises(ValueError):
        total_variation(_line([0, 1, 0]), Distribution(Topology.cycle(3), np.array([0, 1, 0.0])))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.1, 100.0))
def test_fit_recovers_power_law(exponent, scale):
    pts = [(n, scale * n**exponent) for n in (10, 20, 40, 80)]
    assert fit_scaling_exponent(pts) == pytest.approx(exponent, rel=1e-9)


@pytest.mark.parametrize("pts", [
    [(10, 1.0), (20, 2.0)],
    [(5, 1.0), (20, 2.0), (40, 3.0)],
    [(10, 1.0), (20, 0.0), (40, 3.0)],
    [(10, 1.0), (20, float("nan")), (40, 3.0)],
])
def test_fit_rejects_bad_input(pts):
    with pytest.raises(ValueError):
        fit_scaling_exponent(pts)


def test_hadamard_spreads_ballistically():
    pts = [(n, std_dev(distribution(make_config(n, hadamard())))) for n in (25, 50, 100)]
    assert fit_scaling_exponent(pts) == pytest.approx(1.0, abs=0.02)


def test_uniformity():
    assert uniformity_deviation(Distribution(Topology.cycle(4), np.full(4, 0.25))) == 0.0
    assert uniformity_deviation(Distribution(Topology.cycle(4), np.array([1.0, 0, 0, 0]))) == 0.75
    with pytest.raises(ValueError):
        uniformity_deviation(_line([0, 1, 0]))


def test_time_average():
    a = _line([1.0, 0, 0])
    b = _line([0, 0, 1.0])
    np.testing.assert_allclose(time_average([a, b]).probs, [0.5, 0, 0.5])
    with pytest.raises(ValueError):
        time_average([])
