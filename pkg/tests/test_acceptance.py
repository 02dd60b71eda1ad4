"""Acceptance criteria, one or more tests each; see conftest.py for the summary lines."""

import math
import time

import numpy as np
import pytest

from wva_lab import bench, cli
from wva_lab.decoherence import phase_flip, pointer_bloch, qfi, qfi_dwm, qfi_si
from wva_lab.noise import EasyToSaturate, HardToSaturate, NoiseParams, precision_limit
from wva_lab.optical_train import TrainConfig, difference_signal, difference_signal_first_order
from wva_lab.optical_train import max_measurable_phase, propagate_exact
from wva_lab.qubit import (
    exact_postselected_pointer,
    plus,
    post_selection_for_weak_value,
    post_selection_state,
    weak_approx_pointer,
    weak_value,
)
from wva_lab.servo import ServoConfig, quantization_step, run_servo

EPS = np.finfo(float).eps


def acceptance(ac):
    return pytest.mark.acceptance(ac)


@acceptance("AC1")
def test_ac1_weak_value_identity():
    t0 = time.perf_counter()
    deltas = np.geomspace(1e-8, math.pi / 4 * (1 - 1e-12), 2000)
    for d in deltas:
        aw = weak_value(plus(), post_selection_state(d))
        cot = 1 / math.tan(d)
        # forming -pi/4 + delta rounds delta by ~eps, a relative error of ~eps/delta in cot
        tol = 8 * EPS * max(1.0, 1.0 / d)
        assert abs(aw.real - cot) <= tol * cot
        assert abs(aw.imag) <= tol * cot
    rng = np.random.default_rng(0)
    targets = [100 + 10j, -1.0, 1.0, 0.5j, 1e4 - 3e3j]
    targets += list(rng.uniform(-1e3, 1e3, 200) + 1j * rng.uniform(-1e3, 1e3, 200))
    for a in targets:
        got = weak_value(plus(), post_selection_for_weak_value(a))
        assert abs(got - a) <= 1e-10 * abs(a)
    assert time.perf_counter() - t0 < 1.0


@acceptance("AC2")
def test_ac2_oracle_agreement():
    t0 = time.perf_counter()
    thetas = np.linspace(-1.5, 1.5, 1000)
    for delta in (0.01, 0.1, math.pi / 4):
        a_w = 1 / math.tan(delta)
        for theta in thetas:
            r = propagate_exact(TrainConfig(theta=float(theta), delta=delta))
            expect = math.sin(2 * np.angle(math.cos(theta) + 1j * a_w * math.sin(theta)))
            assert abs(r.normalized_difference - expect) <= 1e-10
    delta = math.atan(0.01)
    a_w = 1 / math.tan(delta)
    for x in np.geomspace(1e-7, 0.01, 200):
        c = TrainConfig(theta=float(x / a_w), delta=delta, input_intensity=1e6)
        exact = difference_signal(c)
        assert abs(difference_signal_first_order(c) - exact) <= 1e-2 * abs(exact)
    assert time.perf_counter() - t0 < 5.0


@acceptance("AC3")
def test_ac3_amplified_phase_curves():
    thetas = np.concatenate([-np.geomspace(0.3, 1e-6, 200), np.geomspace(1e-6, 0.3, 200)])
    for a_w in (1, 10, 50, 100):
        rows = bench.curves_rows(thetas, [a_w])
        tp = np.array([r["theta_prime"] for r in rows])
        assert np.all(np.diff(tp) > 0)
        assert np.allclose(tp[:200], -tp[200:][::-1], rtol=0, atol=1e-15)
        assert np.max(np.abs(tp - np.arctan(a_w * np.tan(thetas)))) <= 1e-12
        ratio = np.array([r["signal_ratio"] for r in rows])
        assert np.max(np.abs(ratio - np.sin(2 * tp))) <= 1e-10


@acceptance("AC4")
def test_ac4_accuracy_table():
    rows = {r["scheme"]: r for r in bench.compare_rows(bench.CompareParams())}
    assert rows["DWM"]["accuracy_per_epsilon"] == pytest.approx(1e-2, rel=1e-15)
    assert rows["SI"]["accuracy_per_epsilon"] == 1.0
    assert rows["SWM"]["accuracy_per_epsilon"] == pytest.approx(1e4, rel=1e-15)
    si = rows["SI"]["accuracy_limit"]
    assert si / rows["DWM"]["accuracy_limit"] == pytest.approx(1e2, rel=1e-12)
    assert rows["SWM"]["accuracy_limit"] / rows["DWM"]["accuracy_limit"] == pytest.approx(1e6, rel=1e-12)


PARAMS = NoiseParams(alpha_sn=1.0, beta_rin=1e-2)


@acceptance("AC5")
@pytest.mark.parametrize("gamma", [1e-1, 1e-2, 1e-3])
def test_ac5_easy_to_saturate(gamma):
    for i_max in (1e2, 1e4, 1e8):
        reg = EasyToSaturate(i_max)
        r = precision_limit("DWM", gamma, 1.0, PARAMS, reg) / precision_limit("SI", gamma, 1.0, PARAMS, reg)
        assert abs(r - gamma) <= 1e-2 * gamma


@acceptance("AC5")
@pytest.mark.xfail(
    strict=True,
    reason="at I0 = 100 (alpha/beta)^2 the hard-regime ratio is (0.1 + gamma)/1.1, not gamma",
)
@pytest.mark.parametrize("gamma", [1e-1, 1e-2, 1e-3])
def test_ac5_hard_to_saturate_literal(gamma):
    hard = HardToSaturate()
    for i0 in PARAMS.crossover_intensity * np.array([1e2, 1e4, 1e8, 1e12]):
        r = precision_limit("DWM", gamma, i0, PARAMS, hard) / precision_limit("SI", gamma, i0, PARAMS, hard)
        assert abs(r - gamma) <= 1e-2 * gamma


@acceptance("AC5")
@pytest.mark.parametrize("gamma", [1e-1, 1e-2, 1e-3])
def test_ac5_hard_to_saturate_asymptotic(gamma):
    # the shot term alpha/sqrt(I0) must fall below 1% of beta gamma
    hard = HardToSaturate()
    i_needed = 1e4 * (PARAMS.alpha_sn / (PARAMS.beta_rin * gamma)) ** 2
    for i0 in i_needed * np.array([1.0, 1e2, 1e6]):
        r = precision_limit("DWM", gamma, i0, PARAMS, hard) / precision_limit("SI", gamma, i0, PARAMS, hard)
        assert abs(r - gamma) <= 1e-2 * gamma


ETAS = np.round(np.arange(1, 51) * 0.01, 2)


@acceptance("AC6")
def test_ac6_qfi_suite():
    t0 = time.perf_counter()
    theta = 1e-3
    for eta in ETAS:
        f_si = qfi_si(theta, eta)
        assert qfi_dwm(theta, 100 + 10j, eta) > f_si
        f_real = qfi_dwm(theta, 100.0, eta)
        # both vanish together at eta = 0.5, where the ratio is taken as its limit
        assert abs(f_real - f_si) <= 1e-2 * f_si + 1e-15

        closed = 4 * (1 - 2 * eta) ** 2
        ch = phase_flip(eta)
        path = lambda t: ch.apply_array(pointer_bloch(t, 1.0))
        deriv = lambda t: ch.e @ np.array([-2 * math.sin(2 * t), -2 * math.cos(2 * t), 0.0])
        generic = qfi(path, theta, deriv)
        assert abs(generic - closed) <= 1e-6 * closed + 1e-15

        for f in (lambda an: qfi_si(theta, eta, an), lambda an: qfi_dwm(theta, 100 + 10j, eta, an)):
            fa, fd = f(True), f(False)
            assert abs(fd - fa) <= 1e-4 * fa + 1e-9
    assert time.perf_counter() - t0 < 10.0


@acceptance("AC7")
@pytest.mark.parametrize("a_w", [10, 50, 100])
def test_ac7_nonlinearity_bound(a_w):
    x = a_w * max_measurable_phase(a_w, 1e-4)
    assert abs(x - 0.0175) / 0.0175 <= 0.02


@acceptance("AC8")
def test_ac8_closed_loop():
    t0 = time.perf_counter()
    gamma = 0.01
    train = TrainConfig(theta=0.0, delta=math.atan(gamma))
    cfg = ServoConfig(phi_min=1e-6, modulator_range=2 * math.pi, seed=0)
    edge = 2 * math.pi * gamma - 1e-4
    thetas = np.linspace(-edge, edge, 100)
    assert np.sum(np.abs(thetas) >= 10 * 0.0175 * gamma) > 0
    first = []
    for theta in thetas:
        tr = run_servo(float(theta), train, cfg)
        assert tr.converged
        bound = gamma * cfg.phi_min + quantization_step("DWM", train, float(theta), cfg.phi_min)
        assert abs(tr.theta_hat - theta) <= bound
        first.append(tr.to_csv())
    second = [run_servo(float(t), train, cfg).to_csv() for t in thetas]
    assert first == second
    noisy = ServoConfig(noise=NoiseParams(1e-4, 1e-5), seed=7, max_iterations=200)
    assert run_servo(0.02, train, noisy).to_csv() == run_servo(0.02, train, noisy).to_csv()
    assert time.perf_counter() - t0 < 10.0


@acceptance("AC9")
@pytest.mark.parametrize("delta", [0.002, 0.01, 0.05])
def test_ac9_pointer_validity(delta):
    post = post_selection_state(delta)
    a_w = weak_value(plus(), post)

    def infidelity(x):
        g = x / abs(a_w)
        exact, _ = exact_postselected_pointer(g, plus(), post, plus())
        return 1 - exact.fidelity(weak_approx_pointer(g, a_w, plus()))

    for x in np.linspace(0, 0.01, 50):
        assert infidelity(x) <= 1e-4
    values = [infidelity(x) for x in np.linspace(0.01, 0.5, 50)]
    assert all(b > a for a, b in zip(values, values[1:]))


@acceptance("AC10")
@pytest.mark.parametrize("command", sorted(cli.DEFAULTS))
def test_ac10_reproducibility(tmp_path, command):
    extra = ["--alpha", "1e-3", "--beta", "1e-4", "--max-iterations", "50"] if command == "servo" else []
    for d in ("a", "b"):
        assert cli.main([command, "--seed", "11", "--out", str(tmp_path / d), *extra]) == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
