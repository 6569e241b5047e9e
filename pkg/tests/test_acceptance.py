"""End-to-end acceptance checks.

Each test exercises one headline guarantee of the library at its stated
tolerance and prints a single pass/fail line (run with `pytest -s` to
see the lines for passing tests too; failures always show them).
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from pinchloc import (
    CarrierConfig,
    NoiseModel,
    RankDeficiencyError,
    Room,
    Scenario,
    TxConfig,
    UserPosition,
    WaveguideMaterial,
    WeightSpec,
    LinearSystem,
    build_system,
    clean_received_power,
    estimate_distance,
    even_pa_placement,
    heatmap,
    locate,
    monte_carlo,
    noise_sweep,
    propagation_constants_approx,
    propagation_constants_exact,
    run_trial,
    solve_wls,
)
from pinchloc.cli import main

ROOM = Room(6.0, 10.0, 3.0)
CARRIER = CarrierConfig(f_c=2.8e9)
MATERIAL = WaveguideMaterial(eps_r=2.08, tan_delta=0.0004)
TX = TxConfig(power=0.1)


def _report(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" :: {detail}"
    print(line)


def _scenario(count: int, sigma2_dbm: float = -40.0, user=(3.0, 5.0)) -> Scenario:
    return Scenario(
        room=ROOM,
        pa_layout=even_pa_placement(ROOM, count),
        users=(UserPosition(*user),),
        carrier=CARRIER,
        material=MATERIAL,
        tx=TX,
        noise=NoiseModel(sigma2_dbm=sigma2_dbm),
    )


def test_noiseless_localization_is_exact():
    """1000 random users and layouts localize to < 1e-9 m without noise."""
    rng = np.random.default_rng(314159)
    start = time.perf_counter()
    worst = 0.0
    for trial in range(1000):
        count = int(rng.integers(2, 11))
        user = (float(rng.uniform(0.0, 6.0)), float(rng.uniform(0.0, 10.0)))
        scenario = _scenario(count, sigma2_dbm=-math.inf, user=user)
        worst = max(worst, run_trial(scenario, trial_index=trial).error)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 5.0
    _report("noiseless exactness over 1000 random users", ok,
            f"worst error {worst:.2e} m, {elapsed:.2f} s")
    assert worst < 1e-9
    assert elapsed < 5.0, f"runtime {elapsed:.2f} s exceeds 5 s"


def test_guide_constants_match_independent_evaluation():
    """alpha and beta match their known values and a scalar recomputation."""
    constants = propagation_constants_approx(MATERIAL, CARRIER)
    lam = 299792458.0 / 2.8e9
    alpha_ref = math.pi * math.sqrt(2.08) * 0.0004 / lam
    beta_ref = 2.0 * math.pi * math.sqrt(2.08) / lam
    ok_alpha = abs(constants.alpha - 0.016927) / 0.016927 < 1e-4
    ok_beta = abs(constants.beta - 84.637) / 84.637 < 1e-4
    ok_indep = (
        abs(constants.alpha - alpha_ref) / alpha_ref < 1e-12
        and abs(constants.beta - beta_ref) / beta_ref < 1e-12
    )
    exact = propagation_constants_exact(MATERIAL, CARRIER)
    ok_exact = (
        abs(exact.alpha - constants.alpha) / constants.alpha < 1e-12
        and abs(exact.beta - constants.beta) / constants.beta < 1e-12
    )
    ok = ok_alpha and ok_beta and ok_indep and ok_exact
    _report("guide constants alpha/beta", ok,
            f"alpha={constants.alpha:.6f} Np/m, beta={constants.beta:.3f} rad/m")
    assert ok_alpha and ok_beta, (constants.alpha, constants.beta)
    assert ok_indep
    assert ok_exact


def test_hand_solved_two_antenna_oracle():
    """PAs at y = 2 and 8, user (3, 5): b = [14, -46], solution (5, 34) -> (3, 5)."""
    user = UserPosition(3.0, 5.0)
    measurements = []
    for i, pa_y in enumerate((2.0, 8.0)):
        constants = propagation_constants_approx(MATERIAL, CARRIER)
        power = clean_received_power(pa_y, user, 3.0, TX, constants, CARRIER)
        measurements.append(
            estimate_distance(power, TX.power, pa_y, constants.alpha, CARRIER, pa_index=i)
        )
    system = build_system(measurements, 3.0, WeightSpec(mode="uniform"))
    y_hat, v_hat, _ = solve_wls(system)
    estimate = locate(measurements, 3.0, WeightSpec(mode="uniform"))
    ok = (
        abs(system.b_vector[0] - 14.0) < 1e-9
        and abs(system.b_vector[1] + 46.0) < 1e-9
        and abs(y_hat - 5.0) < 1e-9
        and abs(v_hat - 34.0) < 1e-9
        and abs(estimate.x - 3.0) < 1e-9
        and abs(estimate.y - 5.0) < 1e-9
    )
    _report("hand-solved two-antenna oracle", ok,
            f"b={system.b_vector.round(9).tolist()}, estimate=({estimate.x:.9f}, {estimate.y:.9f})")
    assert ok, (system.b_vector, y_hat, v_hat, estimate)


def test_robustness_statistics_within_expected_bands():
    """Mean error bands at -40 dBm: I=3 in [0.37, 1.48] m, I=9 in [0.15, 0.60] m."""
    start = time.perf_counter()
    mean3 = monte_carlo(_scenario(3), trials=1000).summary.mean_error
    mean9 = monte_carlo(_scenario(9), trials=1000).summary.mean_error
    elapsed = time.perf_counter() - start
    ok = 0.37 <= mean3 <= 1.48 and 0.15 <= mean9 <= 0.60 and mean9 < mean3 and elapsed < 30.0
    _report("robustness statistics bands", ok,
            f"mean(I=3)={mean3:.3f} m, mean(I=9)={mean9:.3f} m, {elapsed:.1f} s")
    assert 0.37 <= mean3 <= 1.48, mean3
    assert 0.15 <= mean9 <= 0.60, mean9
    assert mean9 < mean3
    assert elapsed < 30.0, f"runtime {elapsed:.1f} s exceeds 30 s"


def test_error_trends_over_noise_and_antenna_count():
    """Paired-trial means rise with noise, fall with antennas, diminishing returns."""
    levels = [-50.0, -45.0, -40.0, -35.0, -30.0]
    counts = [2, 3, 5, 7, 10]
    result = noise_sweep(_scenario(3), levels, counts, trials=200)
    mean = {(p.noise_dbm, p.pa_count): p.mean_error for p in result.points}
    ok_noise = all(
        mean[(levels[j], count)] <= mean[(levels[j + 1], count)]
        for count in counts
        for j in range(len(levels) - 1)
    )
    ok_count = all(
        mean[(level, counts[k + 1])] <= mean[(level, counts[k])]
        for level in levels
        for k in range(len(counts) - 1)
    )
    ok_marginal = all(
        mean[(level, 7)] - mean[(level, 10)] < mean[(level, 2)] - mean[(level, 5)]
        for level in levels
    )
    ok = ok_noise and ok_count and ok_marginal
    _report("error trends over noise and antenna count", ok,
            f"noise-monotone={ok_noise}, count-monotone={ok_count}, "
            f"diminishing-returns={ok_marginal}")
    assert ok_noise, mean
    assert ok_count, mean
    assert ok_marginal, mean


def test_spatial_error_map_trends():
    """Error is lower between the outermost antennas; hot area shrinks with I."""
    start = time.perf_counter()
    scenario3 = _scenario(3)
    scenario9 = _scenario(9)
    grid3 = heatmap(scenario3, nx=30, ny=50, trials_per_cell=20)
    grid9 = heatmap(scenario9, nx=30, ny=50, trials_per_cell=20)
    elapsed = time.perf_counter() - start

    def between_outside(grid, layout):
        lo, hi = layout.y_positions[0], layout.y_positions[-1]
        between = (grid.y_centers >= lo) & (grid.y_centers <= hi)
        return grid.mean_error[between, :].mean(), grid.mean_error[~between, :].mean()

    b3, o3 = between_outside(grid3, scenario3.pa_layout)
    b9, o9 = between_outside(grid9, scenario9.pa_layout)
    # both maps on one color scale: normalize by the shared maximum
    shared_max = max(grid3.mean_error.max(), grid9.mean_error.max())
    frac3 = float((grid3.mean_error / shared_max > 0.5).mean())
    frac9 = float((grid9.mean_error / shared_max > 0.5).mean())
    ok = b3 < o3 and b9 < o9 and frac9 < frac3 and elapsed < 60.0
    _report("spatial error map trends", ok,
            f"I=3 between/outside {b3:.2f}/{o3:.2f} m, I=9 {b9:.2f}/{o9:.2f} m, "
            f"hot fraction {frac3:.3f} -> {frac9:.3f}, {elapsed:.1f} s")
    assert b3 < o3, (b3, o3)
    assert b9 < o9, (b9, o9)
    assert frac9 < frac3, (frac3, frac9)
    assert elapsed < 60.0, f"runtime {elapsed:.1f} s exceeds 60 s"


def test_solver_properties():
    """Uniform WLS = OLS, weight-scale invariance, rank-deficiency error."""
    rng = np.random.default_rng(2718)
    ok_ols = True
    ok_scale = True
    for _ in range(30):
        count = int(rng.integers(2, 9))
        ys = np.sort(rng.uniform(0.0, 10.0, size=count))
        if np.unique(ys).size < 2:
            continue
        a = np.column_stack([-2.0 * ys, np.ones(count)])
        b = rng.normal(size=count) * 20.0
        y_u, v_u, _ = solve_wls(LinearSystem(a, b, np.ones(count)))
        oracle, *_ = np.linalg.lstsq(a, b, rcond=None)
        ok_ols &= abs(y_u - oracle[0]) < 1e-10 and abs(v_u - oracle[1]) < 1e-10
        w = rng.uniform(0.2, 9.0, size=count)
        y_w, v_w, _ = solve_wls(LinearSystem(a, b, w))
        for scale in (1e-8, 5.0, 1e8):
            y_s, v_s, _ = solve_wls(LinearSystem(a, b, w * scale))
            ok_scale &= abs(y_s - y_w) < 1e-12 and abs(v_s - v_w) < 1e-12
    user = UserPosition(3.0, 5.0)
    constants = propagation_constants_approx(MATERIAL, CARRIER)
    same_y = [
        estimate_distance(
            clean_received_power(4.0, user, 3.0, TX, constants, CARRIER),
            TX.power, 4.0, constants.alpha, CARRIER, pa_index=i,
        )
        for i in range(3)
    ]
    try:
        build_system(same_y, 3.0, WeightSpec(mode="uniform"))
        ok_rank = False
    except RankDeficiencyError:
        ok_rank = True
    ok = ok_ols and ok_scale and ok_rank
    _report("solver properties", ok,
            f"ols-match={ok_ols}, scale-invariance={ok_scale}, rank-error={ok_rank}")
    assert ok_ols
    assert ok_scale
    assert ok_rank


def test_csv_outputs_are_byte_identical_across_runs(tmp_path):
    """Same config and seed reproduce every CSV exactly, workers included."""
    cases = {
        "montecarlo": ["montecarlo", "--trials", "40", "--seed", "77"],
        "sweep": ["sweep", "--noise-levels-dbm", "-45", "-40", "--pa-counts", "2", "3",
                  "--trials", "10", "--seed", "77"],
        "heatmap": ["heatmap", "--grid", "5", "8", "--trials-per-cell", "2", "--seed", "77"],
    }
    ok = True
    details = []
    for name, args in cases.items():
        runs = []
        for variant, extra in (("a", []), ("b", []), ("c", ["--workers", "4"])):
            out = tmp_path / name / variant
            assert main(args + extra + ["--output-dir", str(out)]) == 0
            runs.append((out / f"{name}.csv").read_bytes())
        identical = runs[0] == runs[1] == runs[2]
        ok &= identical
        details.append(f"{name}={'ok' if identical else 'DIFFERS'}")
    _report("byte-identical CSV reruns (serial and parallel)", ok, ", ".join(details))
    assert ok, details
