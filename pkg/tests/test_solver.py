"""Tests for the weighted-least-squares lateration solver."""

import math

import numpy as np
import pytest

from pinchloc import (
    CarrierConfig,
    LinearSystem,
    NoiseModel,
    RankDeficiencyError,
    Room,
    Scenario,
    SolveError,
    TxConfig,
    UserPosition,
    WaveguideMaterial,
    WeightSpec,
    build_system,
    clean_received_power,
    estimate_distance,
    even_pa_placement,
    locate,
    monte_carlo,
    propagation_constants_approx,
    recover_position,
    solve_wls,
)

CARRIER = CarrierConfig(f_c=2.8e9)
MATERIAL = WaveguideMaterial(eps_r=2.08, tan_delta=0.0004)
CONSTANTS = propagation_constants_approx(MATERIAL, CARRIER)
TX = TxConfig(power=0.1)
UNIFORM = WeightSpec(mode="uniform")


def _noiseless_measurements(ys, user, h=3.0):
    out = []
    for i, y in enumerate(ys):
        power = clean_received_power(y, user, h, TX, CONSTANTS, CARRIER)
        out.append(estimate_distance(power, TX.power, y, CONSTANTS.alpha, CARRIER, pa_index=i))
    return out


def test_build_system_hand_checked_rhs():
    """PAs at y = 2 and 8, user (3, 5): both distances sqrt(27)."""
    system = build_system(_noiseless_measurements((2.0, 8.0), UserPosition(3.0, 5.0)), 3.0, UNIFORM)
    assert system.a_matrix.tolist() == [[-4.0, 1.0], [-16.0, 1.0]]
    assert system.b_vector == pytest.approx([14.0, -46.0], abs=1e-9)
    assert system.weights.tolist() == [1.0, 1.0]


def test_build_system_rejects_single_measurement():
    m = _noiseless_measurements((2.0,), UserPosition(3.0, 5.0))
    with pytest.raises(RankDeficiencyError):
        build_system(m, 3.0, UNIFORM)


def test_build_system_rejects_identical_coordinates():
    m = _noiseless_measurements((2.0, 2.0, 2.0), UserPosition(3.0, 5.0))
    # bypass PaLayout's duplicate check by building measurements directly
    with pytest.raises(RankDeficiencyError, match="identical"):
        build_system(m, 3.0, UNIFORM)


def test_build_system_allows_duplicates_with_two_distinct():
    m = _noiseless_measurements((2.0, 2.0, 8.0), UserPosition(3.0, 5.0))
    system = build_system(m, 3.0, UNIFORM)
    assert len(system.b_vector) == 3


def test_snr_weights_are_power_over_noise():
    measurements = _noiseless_measurements((2.0, 8.0), UserPosition(3.0, 5.0))
    spec = WeightSpec(mode="snr", noise_powers=(1e-7, 2e-7))
    w = spec.weights(measurements)
    assert w[0] == pytest.approx(measurements[0].effective_power / 1e-7, rel=1e-12)
    assert w[1] == pytest.approx(measurements[1].effective_power / 2e-7, rel=1e-12)


def test_solve_hand_checked_system():
    system = build_system(_noiseless_measurements((2.0, 8.0), UserPosition(3.0, 5.0)), 3.0, UNIFORM)
    y_hat, v_hat, residual = solve_wls(system)
    assert y_hat == pytest.approx(5.0, abs=1e-9)
    assert v_hat == pytest.approx(34.0, abs=1e-9)
    assert residual == pytest.approx(0.0, abs=1e-9)


def test_solve_overdetermined_consistent_system():
    ys = even_pa_placement(Room(6, 10, 3), 5).y_positions
    system = build_system(_noiseless_measurements(ys, UserPosition(3.0, 5.0)), 3.0, UNIFORM)
    y_hat, v_hat, _ = solve_wls(system)
    assert y_hat == pytest.approx(5.0, abs=1e-9)
    assert v_hat == pytest.approx(34.0, abs=1e-9)


def test_weight_scale_invariance():
    measurements = _noiseless_measurements((1.0, 4.0, 7.0), UserPosition(2.0, 6.0))
    base = build_system(measurements, 3.0, WeightSpec(mode="snr", noise_powers=(1e-7,) * 3))
    y0, v0, _ = solve_wls(base)
    for scale in (1e-6, 3.7, 1e9):
        scaled = LinearSystem(base.a_matrix, base.b_vector, base.weights * scale)
        y1, v1, _ = solve_wls(scaled)
        assert y1 == pytest.approx(y0, abs=1e-12)
        assert v1 == pytest.approx(v0, abs=1e-12)


def test_solve_rejects_singular_normal_matrix():
    a = np.array([[-4.0, 1.0], [-4.0, 1.0]])
    system = LinearSystem(a, np.array([14.0, -46.0]), np.ones(2))
    with pytest.raises(SolveError):
        solve_wls(system)


def test_solution_is_local_minimum_of_weighted_residual():
    """Perturbing the WLS solution strictly increases the weighted cost."""
    rng = np.random.default_rng(21)
    ys = (1.0, 3.0, 5.0, 7.0, 9.0)
    a = np.column_stack([-2.0 * np.array(ys), np.ones(5)])
    for _ in range(10):
        b = rng.normal(size=5) * 10.0
        w = rng.uniform(0.5, 5.0, size=5)
        system = LinearSystem(a, b, w)
        y_hat, v_hat, _ = solve_wls(system)

        def cost(y, v):
            r = a @ np.array([y, v]) - b
            return float(np.sum(w * r * r))

        base = cost(y_hat, v_hat)
        for dy, dv in ((1e-6, 0.0), (-1e-6, 0.0), (0.0, 1e-6), (0.0, -1e-6),
                       (1e-6, 1e-6), (-1e-6, 1e-6)):
            assert cost(y_hat + dy, v_hat + dv) > base


def test_uniform_weights_match_ordinary_least_squares():
    rng = np.random.default_rng(22)
    for _ in range(25):
        count = int(rng.integers(2, 9))
        ys = np.sort(rng.uniform(0.0, 10.0, size=count))
        while np.unique(ys).size < 2:
            ys = np.sort(rng.uniform(0.0, 10.0, size=count))
        a = np.column_stack([-2.0 * ys, np.ones(count)])
        b = rng.normal(size=count) * 20.0
        system = LinearSystem(a, b, np.ones(count))
        y_hat, v_hat, _ = solve_wls(system)
        oracle, *_ = np.linalg.lstsq(a, b, rcond=None)
        assert y_hat == pytest.approx(oracle[0], abs=1e-10)
        assert v_hat == pytest.approx(oracle[1], abs=1e-10)


def test_recover_position_hand_checked():
    estimate = recover_position(5.0, 34.0)
    assert estimate.x == pytest.approx(3.0, abs=1e-12)
    assert estimate.y == 5.0
    assert not estimate.v_clamped


def test_recover_position_wall_boundary():
    estimate = recover_position(4.0, 16.0)
    assert estimate.x == 0.0
    assert not estimate.v_clamped


def test_recover_position_clamps_negative_gap():
    estimate = recover_position(4.0, 15.0)
    assert estimate.x == 0.0
    assert estimate.v_clamped


def test_locate_hand_checked_pipeline():
    estimate = locate(_noiseless_measurements((2.0, 8.0), UserPosition(3.0, 5.0)), 3.0, UNIFORM)
    assert estimate.x == pytest.approx(3.0, abs=1e-9)
    assert estimate.y == pytest.approx(5.0, abs=1e-9)
    assert not estimate.range_clamped


def test_locate_wall_user_exact():
    estimate = locate(_noiseless_measurements((2.0, 8.0), UserPosition(0.0, 7.0)), 3.0, UNIFORM)
    assert estimate.x == pytest.approx(0.0, abs=1e-9)
    assert estimate.y == pytest.approx(7.0, abs=1e-9)


def test_locate_weights_agree_on_noiseless_data():
    measurements = _noiseless_measurements((1.0, 5.0, 9.0), UserPosition(4.0, 2.0))
    snr = locate(measurements, 3.0, WeightSpec(mode="snr", noise_powers=(1e-7,) * 3))
    uni = locate(measurements, 3.0, UNIFORM)
    assert snr.x == pytest.approx(uni.x, abs=1e-9)
    assert snr.y == pytest.approx(uni.y, abs=1e-9)


def test_locate_noiseless_exactness_property():
    rng = np.random.default_rng(23)
    room = Room(6.0, 10.0, 3.0)
    for _ in range(100):
        count = int(rng.integers(2, 11))
        layout = even_pa_placement(room, count)
        user = UserPosition(float(rng.uniform(0, 6)), float(rng.uniform(0, 10)))
        estimate = locate(
            _noiseless_measurements(layout.y_positions, user), room.h, UNIFORM
        )
        assert math.hypot(estimate.x - user.x, estimate.y - user.y) < 1e-9


def test_discard_policy_drops_clamped_rows():
    user = UserPosition(3.0, 5.0)
    clean = _noiseless_measurements((2.0, 5.0, 8.0), user)
    # corrupt the middle antenna into a clamped reading
    bad = estimate_distance(-1e-9, TX.power, 5.0, CONSTANTS.alpha, CARRIER, pa_index=1)
    mixed = [clean[0], bad, clean[2]]
    dropped = locate(mixed, 3.0, UNIFORM, clamp_policy="discard")
    assert dropped.range_clamped
    assert dropped.x == pytest.approx(3.0, abs=1e-9)
    assert dropped.y == pytest.approx(5.0, abs=1e-9)
    kept = locate(mixed, 3.0, UNIFORM, clamp_policy="floor")
    assert math.hypot(kept.x - 3.0, kept.y - 5.0) > 1e-6


def test_discard_policy_falls_back_when_too_few_clean_rows():
    bad0 = estimate_distance(-1e-9, TX.power, 2.0, CONSTANTS.alpha, CARRIER, pa_index=0)
    bad1 = estimate_distance(-2e-9, TX.power, 8.0, CONSTANTS.alpha, CARRIER, pa_index=1)
    estimate = locate([bad0, bad1], 3.0, UNIFORM, clamp_policy="discard")
    assert estimate.range_clamped
    assert math.isfinite(estimate.x) and math.isfinite(estimate.y)


def _scenario_with_count(count: int) -> Scenario:
    room = Room(6.0, 10.0, 3.0)
    return Scenario(
        room=room,
        pa_layout=even_pa_placement(room, count),
        users=(UserPosition(3.0, 5.0),),
        carrier=CARRIER,
        material=MATERIAL,
        tx=TX,
        noise=NoiseModel(sigma2_dbm=-40.0),
    )


def test_mean_error_non_increasing_in_antenna_count():
    """More antennas never hurt the mean error (paired seeds, pinned default)."""
    means = [
        monte_carlo(_scenario_with_count(count), trials=1000).summary.mean_error
        for count in (2, 3, 5, 7, 9, 10)
    ]
    assert all(b <= a for a, b in zip(means, means[1:])), means


def test_error_variance_non_increasing_in_antenna_count():
    variances = [
        monte_carlo(_scenario_with_count(count), trials=1000).summary.variance
        for count in (2, 3, 5, 7, 9, 10)
    ]
    assert all(b <= a for a, b in zip(variances, variances[1:])), variances
