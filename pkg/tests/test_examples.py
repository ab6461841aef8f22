"""Small worked cases with answers known by hand or by a reference computation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symwalk import (
    CoinParams,
    DephasingPhysicalParams,
    Distribution,
    GadPhysicalParams,
    InitialState,
    PureState,
    QubitBloch,
    ShiftKind,
    Topology,
    augment,
    bit_flip,
    build_coin,
    distribution,
    evolve_density,
    evolve_pure,
    fit_scaling_exponent,
    gad_channel,
    gad_closed_form,
    gad_from_physical,
    hadamard,
    make_config,
    phase_flip,
    spatial_inversion,
    std_dev,
    symmetry_verdict,
    time_average,
    total_variation,
    uniformity_deviation,
    verify_symmetry_trajectorywise,
)
from symwalk.channels import dephasing_p
from symwalk.coins import gate, reflect_params, variant_matrix
from symwalk.engine import apply_shift
from symwalk.lattice import new_pure, position_distribution, to_density
from symwalk.trajectories import iter_unravelings, sample_monte_carlo

S = 1 / math.sqrt(2)


# --- states -----------------------------------------------------------------------


def test_basis_start_placement():
    psi = new_pure(InitialState.basis(0), Topology.line(5))
    expected = np.zeros((2, 11))
    expected[0, 5] = 1
    np.testing.assert_array_equal(psi.amplitudes, expected)


def test_cycle_start_column():
    psi = new_pure(InitialState((0.6, 0.8j), x0=3), Topology.cycle(7))
    nz = np.argwhere(psi.amplitudes != 0)
    assert set(nz[:, 1]) == {3}


def test_symmetric_start_density_block():
    rho = to_density(new_pure(InitialState.symmetric(), Topology.line(1))).matrix
    n = 3
    assert rho[1, 1] == pytest.approx(0.5) and rho[n + 1, n + 1] == pytest.approx(0.5)
    assert rho[1, n + 1] == pytest.approx(-0.5j) and rho[n + 1, 1] == pytest.approx(0.5j)
    assert np.count_nonzero(np.abs(rho) > 1e-15) == 4
    assert to_density(new_pure(InitialState.symmetric(), Topology.line(1))).purity() == pytest.approx(1.0)


def test_one_symmetric_hadamard_step():
    d = distribution(make_config(1, hadamard()))
    assert d[-1] == pytest.approx(0.5) and d[1] == pytest.approx(0.5)


def test_zero_steps_is_delta():
    d = distribution(make_config(0, hadamard(), initial=InitialState.basis(1, x0=0)))
    assert d[0] == 1.0 and d.total() == 1.0


# --- coins ------------------------------------------------------------------------


@pytest.mark.parametrize("deg,want", [
    ((0, 45, 0), S * np.array([[1, 1], [1, -1]])),
    ((0, 0, 0), np.array([[1, 0], [0, -1]])),
    ((0, 90, 0), np.array([[0, 1], [1, 0]])),
])
def test_coin_special_cases(deg, want):
    np.testing.assert_allclose(build_coin(CoinParams.degrees(*deg)).matrix, want, atol=1e-15)


def test_variant_examples():
    h = hadamard().matrix
    np.testing.assert_allclose(variant_matrix(h, 1, math.pi), S * np.array([[1, 1], [-1, 1]]), atol=1e-15)
    for j in range(1, 5):
        np.testing.assert_array_equal(variant_matrix(h, j, 0.0), h)
    b = build_coin(CoinParams(0.3, 0.5, 0.7)).matrix
    flipped = b.copy()
    flipped[:, 1] *= -1
    np.testing.assert_allclose(variant_matrix(b, 2, math.pi), flipped, atol=1e-15)


def test_reflection_examples():
    h = reflect_params(CoinParams.degrees(0, 45, 0))
    assert math.degrees(h.theta) == pytest.approx(45)
    r = reflect_params(CoinParams.degrees(0, 30, 0))
    assert math.degrees(r.theta) == pytest.approx(60)
    assert r.xi == 0 and r.zeta == 0


def test_gate_examples():
    np.testing.assert_array_equal(gate("PhaseShift", 0.0).matrix, np.eye(2))


# --- shift and steps --------------------------------------------------------------


def _basis(topo, c, x):
    amps = np.zeros((2, topo.site_count), dtype=complex)
    amps[c, topo.index(x)] = 1
    return PureState(topo, amps)


def test_forward_moves_zero_left_and_wraps_on_cycle():
    out = apply_shift(_basis(Topology.line(2), 0, 0), ShiftKind.FORWARD)
    assert out.amplitude(0, -1) == 1
    out = apply_shift(_basis(Topology.cycle(5), 1, 4), ShiftKind.FORWARD)
    assert out.amplitude(1, 0) == 1


def test_flip_shift():
    topo = Topology.line(2)
    assert apply_shift(_basis(topo, 0, 0), ShiftKind.FLIP).amplitude(1, -1) == 1
    assert apply_shift(_basis(topo, 1, 0), ShiftKind.FLIP).amplitude(0, 1) == 1


@pytest.mark.parametrize("c,sign", [(0, 1), (1, -1)])
def test_single_hadamard_step_amplitudes(c, sign):
    psi = evolve_pure(make_config(1, hadamard(), initial=InitialState.basis(c)))
    assert psi.amplitude(0, -1) == pytest.approx(S)
    assert psi.amplitude(1, 1) == pytest.approx(sign * S)


def test_symmetric_hadamard_is_even():
    d = distribution(make_config(100, hadamard()))
    np.testing.assert_allclose(d.probs, d.probs[::-1], atol=1e-10)


@pytest.mark.parametrize("channel", [phase_flip(0.0), bit_flip(0.0), gad_channel(0.0, 0.7)])
def test_zero_noise_matches_pure(channel):
    coin = build_coin(CoinParams.degrees(0, 30, 0))
    a = distribution(make_config(30, coin, channel=channel))
    b = position_distribution(evolve_pure(make_config(30, coin)))
    np.testing.assert_allclose(a.probs, b.probs, atol=1e-12)


def test_classical_limits():
    d = {th: {ch: distribution(make_config(100, build_coin(CoinParams.degrees(0, th, 0)), channel=f(0.5)))
              for ch, f in (("phase", phase_flip), ("bit", bit_flip))} for th in (30, 60)}
    np.testing.assert_allclose(d[30]["bit"].probs, d[60]["bit"].probs, atol=1e-8)
    assert np.max(np.abs(d[30]["phase"].probs - d[60]["phase"].probs)) > 1e-3


def test_inversion_examples():
    t = Topology.line(3)
    delta = Distribution(t, np.eye(7)[6])
    assert spatial_inversion(delta)[-3] == 1.0
    rng = np.random.default_rng(0)
    d = Distribution(t, rng.random(7))
    np.testing.assert_array_equal(spatial_inversion(spatial_inversion(d)).probs, d.probs)


# --- channels ---------------------------------------------------------------------


def test_phase_flip_examples():
    plus = np.full((2, 2), 0.5)
    np.testing.assert_allclose(phase_flip(0.5).apply_qubit(plus), np.eye(2) / 2, atol=1e-15)
    diag = np.diag([0.3, 0.7])
    np.testing.assert_allclose(phase_flip(0.3).apply_qubit(diag), diag)
    np.testing.assert_allclose(phase_flip(0.0).apply_qubit(plus), plus)


def test_bit_flip_examples():
    zero = np.diag([1.0, 0.0])
    np.testing.assert_allclose(bit_flip(1.0).apply_qubit(zero), np.diag([0, 1.0]))
    np.testing.assert_allclose(bit_flip(0.5).apply_qubit(zero), np.eye(2) / 2)


def test_gad_examples():
    ops = gad_channel(0.0, 0.8).operators
    assert np.allclose(ops[1], 0) and np.allclose(ops[3], 0)
    assert gad_channel(0.0, 0.8).is_identity
    zero_t = gad_channel(0.4, 1.0).operators
    assert np.allclose(zero_t[2], 0) and np.allclose(zero_t[3], 0)


def test_gad_physical_examples():
    p = GadPhysicalParams(1.0, 0.0, math.log(2))
    assert p.p == pytest.approx(0.5) and p.chi == 1.0
    assert GadPhysicalParams(1.0, 1e9, 1.0).chi == pytest.approx(0.5)
    assert gad_from_physical(GadPhysicalParams(1.0, 2.0, 0.0)).is_identity


def test_closed_form_limits():
    start = QubitBloch(0.3, 0.1 + 0.2j)
    same = gad_closed_form(start, GadPhysicalParams(1.0, 0.5, 0.0))
    assert same.s3 == pytest.approx(0.3) and same.s_minus == pytest.approx(0.1 + 0.2j)
    end = gad_closed_form(start, GadPhysicalParams(1.0, 0.0, 60.0))
    assert end.s3 == pytest.approx(-1.0) and abs(end.s_minus) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 5), st.floats(0, 5), st.floats(0, 5))
def test_dephasing_level_monotone_and_bounded(w, g1, g2):
    lo, hi = sorted((g1, g2))
    a = dephasing_p(DephasingPhysicalParams(w, lo))
    b = dephasing_p(DephasingPhysicalParams(w, hi))
    assert 0.0 <= a <= b <= 0.5


def test_channel_keeps_walk_trace():
    rho = evolve_density(make_config(10, hadamard(), channel=gad_channel(0.3, 0.6)))
    assert abs(rho.trace() - 1) < 1e-12


# --- trajectories -----------------------------------------------------------------


def test_zero_step_enumeration():
    from symwalk import enumerate_exact
    assert enumerate_exact(make_config(0, hadamard(), channel=phase_flip(0.2)))[0] == pytest.approx(1.0)


@pytest.mark.parametrize("channel", [phase_flip(0.3), bit_flip(0.2)])
def test_unitary_proportional_branch_weights(channel):
    p = channel.params["p"]
    cfg = make_config(5, build_coin(CoinParams.degrees(10, 30, 20)), channel=channel)
    for branch in iter_unravelings(cfg):
        flips = sum(branch.kraus_indices)
        assert branch.weight == pytest.approx(p**flips * (1 - p) ** (5 - flips), rel=1e-12)


def test_monte_carlo_error_shrinks_with_samples():
    cfg = make_config(6, build_coin(CoinParams.degrees(0, 30, 0)), channel=phase_flip(0.3))
    small = sample_monte_carlo(cfg, 2000, seed=1)
    large = sample_monte_carlo(cfg, 8000, seed=1)
    ratio = np.max(small.std_error) / np.max(large.std_error)
    assert 1.7 < ratio < 2.3


def test_x_alone_is_not_a_symmetry_of_the_biased_noisy_walk():
    cfg = make_config(8, build_coin(CoinParams.degrees(0, 30, 0)), channel=bit_flip(0.2))
    assert verify_symmetry_trajectorywise(cfg, "X").aggregate_discrepancy > 1e-3


def test_trajectorywise_z_and_prx():
    coin = build_coin(CoinParams.degrees(0, 30, 0))
    assert verify_symmetry_trajectorywise(make_config(8, coin, channel=phase_flip(0.2)), "Z").aggregate_discrepancy < 1e-10
    assert verify_symmetry_trajectorywise(make_config(6, coin, channel=gad_channel(0.3, 0.8)), "PRX").aggregate_discrepancy < 1e-10


# --- analysis ---------------------------------------------------------------------


def test_metric_examples():
    t = Topology.line(1)
    a, b = Distribution(t, [0.5, 0.5, 0]), Distribution(t, [0, 0.5, 0.5])
    assert total_variation(a, b) == 0.5
    assert total_variation(a, a) == 0.0
    assert total_variation(Distribution(t, [1.0, 0, 0]), Distribution(t, [0, 0, 1.0])) == 1.0
    assert std_dev(Distribution(t, [0.5, 0, 0.5])) == 1.0
    assert std_dev(Distribution(t, [0, 1.0, 0])) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_total_variation_is_a_metric(seed):
    rng = np.random.default_rng(seed)
    t = Topology.line(3)
    d = [Distribution(t, v / v.sum()) for v in rng.random((3, 7))]
    assert total_variation(d[0], d[1]) == pytest.approx(total_variation(d[1], d[0]))
    assert total_variation(d[0], d[2]) <= total_variation(d[0], d[1]) + total_variation(d[1], d[2]) + 1e-15
    v1, v2 = symmetry_verdict(d[0], d[1]), symmetry_verdict(d[1], d[0])
    assert v1 == v2


@pytest.mark.parametrize("power", [1.0, 0.5])
def test_fit_synthetic(power):
    pts = [(n, 3.0 * n**power) for n in (25, 50, 100, 200)]
    assert fit_scaling_exponent(pts) == pytest.approx(power, abs=1e-9)


def test_uniformity_delta():
    d = Distribution(Topology.cycle(101), np.eye(101)[0])
    assert uniformity_deviation(d) == pytest.approx(1 - 1 / 101)


def test_time_average_single():
    d = Distribution(Topology.cycle(3), np.array([0.2, 0.3, 0.5]))
    np.testing.assert_array_equal(time_average([d]).probs, d.probs)


def test_noiseless_biased_line_verdicts():
    coin = build_coin(CoinParams.degrees(0, 30, 0))
    cfg = make_config(100, coin)
    base = distribution(cfg)
    for sym in ("Z", "Phi(77)", "PRX", "B1(77)", "B3(77)", "B2(180)", "B4(180)"):
        assert symmetry_verdict(base, distribution(augment(cfg, sym))).holds, sym
    assert not symmetry_verdict(base, distribution(augment(cfg, "X"))).holds
    mirrored = spatial_inversion(distribution(make_config(100, build_coin(CoinParams.degrees(0, 60, 0)))))
    assert symmetry_verdict(distribution(augment(cfg, "X")), mirrored).holds
