"""Closed-loop operation: a quantized servo holding the difference signal at zero.

The compensation phase ``phi_hat`` is applied after post-selection, so it
subtracts directly from the amplified lock phase (``phi_hat ~ theta/gamma`` for
DWM, ``phi_hat ~ theta`` for SI). The controller keeps a continuous command
``u``, updated by ``gain * s / 2`` from the normalized difference ``s`` (the
small-signal slope of ``s`` in the lock phase is 2), and the modulator outputs
``u`` rounded to a multiple of ``phi_min``.

The phase estimate inverts the amplification exactly. To first order it is
``gamma * phi_hat`` for DWM and ``phi_hat`` for SI.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import optical_train as ot
from .errors import NotCompensable
from .noise import NoiseParams, Scheme, sample_noisy_reading
from .optical_train import TrainConfig, amplified_phase_limit, dynamic_range

TRACE_COLUMNS = ("iteration", "phi_hat", "signal", "theta_hat_running")

# Linear loop analysis: the error contracts by (1 - gain) per step, so the loop
# is stable for 0 < gain < 2. Gain 1 settles in a single step for small errors.
DEFAULT_GAIN = 1.0
STABLE_GAIN = 1.5


@dataclass(frozen=True)
class ServoConfig:
    scheme: Scheme = Scheme.DWM
    gain: float = DEFAULT_GAIN
    phi_min: float = 1e-6
    modulator_range: float = 2 * math.pi
    max_iterations: int = 10_000
    settle_tolerance: float | None = None
    noise: NoiseParams | None = None
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.scheme is Scheme.SWM:
            raise ValueError("closed-loop operation is defined for DWM and SI only")
        if not self.gain > 0:
            raise ValueError("gain must be positive")
        if not self.phi_min > 0:
            raise ValueError("phi_min must be positive")
        if not self.modulator_range > 0:
            raise ValueError("modulator_range must be positive")
        if self.noise is not None and self.seed is None:
            raise ValueError("a seed is required when noise is enabled")


@dataclass
class ServoTrace:
    phi_hat: list[float] = field(default_factory=list)
    signal: list[float] = field(default_factory=list)
    theta_hat_running: list[float] = field(default_factory=list)
    converged: bool = False
    theta_hat: float = float("nan")

    @property
    def iterations(self) -> list[tuple[float, float]]:
        return list(zip(self.phi_hat, self.signal))

    @property
    def phi_final(self) -> float:
        return self.phi_hat[-1]

    def rows(self) -> list[dict[str, float]]:
        return [
            {"iteration": k, "phi_hat": p, "signal": s, "theta_hat_running": t}
            for k, (p, s, t) in enumerate(zip(self.phi_hat, self.signal, self.theta_hat_running))
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=TRACE_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.rows():
            w.writerow({k: repr(v) for k, v in row.items()})
        return buf.getvalue()


def _lever(scheme: Scheme, train: TrainConfig) -> complex:
    return train.weak_value if scheme is Scheme.DWM else 1.0


def _estimate(scheme: Scheme, train: TrainConfig, phi: float) -> float:
    return ot.invert_lock_phase(phi, _lever(scheme, train))


def _measure(scheme: Scheme, train: TrainConfig, phi: float):
    if scheme is Scheme.DWM:
        return ot.propagate_exact(train, compensation=phi)
    return ot.propagate_si(train, compensation=phi)


def lock_slope(scheme: Scheme | str, train: TrainConfig, theta: float) -> float:
    """Derivative of the normalized signal with respect to ``theta`` at the lock point."""
    lever = _lever(Scheme(scheme), train)
    h = 1e-7 * max(1.0, abs(theta))
    d = (ot.lock_phase(theta + h, lever) - ot.lock_phase(theta - h, lever)) / (2 * h)
    return 2.0 * float(d)


def quantization_step(scheme: Scheme | str, train: TrainConfig, theta: float, phi_min: float) -> float:
    """Phase-shift change produced by one modulator quantum at ``theta``.

    Equal to ``gamma * phi_min`` (DWM) or ``phi_min`` (SI) near ``theta = 0``
    and larger away from it, where the amplification flattens.
    """
    return 2.0 * phi_min / abs(lock_slope(scheme, train, theta))


def run_servo(theta_true: float, train: TrainConfig, cfg: ServoConfig) -> ServoTrace:
    """Lock the interferometer on ``theta_true`` and read the phase from ``phi_hat``.

    ``train.theta`` is replaced by ``theta_true``. The loop starts from
    ``phi_hat = 0`` and stops once the measured lock error ``|s|/2`` is within
    the settle tolerance (mapped to lock-phase units, floored at ``phi_min``),
    or after ``max_iterations`` with ``converged = False``.

    Raises
    ------
    NotCompensable
        If the required compensation exceeds ``modulator_range`` or lies outside
        the capture range ``|phi| < pi/2`` of a loop started at zero.
    """
    scheme = cfg.scheme
    train = train.replace(theta=float(theta_true))
    lever = _lever(scheme, train)
    target = float(ot.lock_phase(theta_true, lever))
    if abs(target) > cfg.modulator_range:
        raise NotCompensable(f"required compensation {target:.4g} rad exceeds the modulator range")
    if abs(theta_true) >= math.pi / 2 or abs(target) >= math.pi / 2:
        raise NotCompensable(f"theta = {theta_true!r} is outside the capture range of the loop")

    settle = cfg.settle_tolerance
    if settle is None:
        settle = closed_loop_precision(scheme, train.gamma, cfg.phi_min)
    # settle tolerance is given in theta; convert to lock-phase units, but never
    # ask for better than one modulator quantum
    tol_phase = max(0.5 * abs(lock_slope(scheme, train, theta_true)) * settle, cfg.phi_min)

    rng = np.random.default_rng(cfg.seed) if cfg.noise is not None else None
    trace = ServoTrace()
    u = 0.0
    phi = 0.0
    for _ in range(cfg.max_iterations):
        r = _measure(scheme, train, phi)
        i1, i2 = r.i_d1, r.i_d2
        if rng is not None:
            s1, s2 = (int(x) for x in rng.integers(0, 2**63 - 1, size=2))
            i1 = sample_noisy_reading(i1, cfg.noise, s1)
            i2 = sample_noisy_reading(i2, cfg.noise, s2)
        total = i1 + i2
        s = (i1 - i2) / total if total > 0 else 0.0

        trace.phi_hat.append(phi)
        trace.signal.append(float(s))
        trace.theta_hat_running.append(_estimate(scheme, train, phi))
        if abs(s) / 2.0 <= tol_phase:
            trace.converged = True
            break

        u += cfg.gain * s / 2.0
        u = max(-cfg.modulator_range, min(cfg.modulator_range, u))
        phi = cfg.phi_min * round(u / cfg.phi_min)
        if abs(phi) >= math.pi / 2:
            # fringe wrapped: no longer on the branch through the origin
            break

    trace.theta_hat = trace.theta_hat_running[-1]
    return trace


def closed_loop_precision(scheme: Scheme | str, gamma: float, phi_min: float) -> float:
    """Closed-loop resolution: ``gamma * phi_min`` for DWM, ``phi_min`` for SI."""
    if not phi_min > 0:
        raise ValueError("phi_min must be positive")
    return gamma * phi_min if Scheme(scheme) is Scheme.DWM else phi_min


def closed_loop_dynamic_range(
    scheme: Scheme | str, gamma: float, phi_min: float, modulator_range: float = 2 * math.pi
) -> float:
    """``theta_max / theta_min`` with ``theta_max = range * gamma`` (DWM) or ``range`` (SI)."""
    theta_max = modulator_range * gamma if Scheme(scheme) is Scheme.DWM else modulator_range
    return dynamic_range(theta_max, closed_loop_precision(scheme, gamma, phi_min))


def open_loop_dynamic_range(
    scheme: Scheme | str, gamma: float, theta_min: float, d_threshold: float = 1e-4
) -> float:
    """Open-loop range limited by the amplification nonlinearity."""
    x = amplified_phase_limit(d_threshold)
    theta_max = x * gamma if Scheme(scheme) is Scheme.DWM else x
    return dynamic_range(theta_max, theta_min)
