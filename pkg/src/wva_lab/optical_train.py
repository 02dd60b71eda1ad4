"""Exact field propagation through the difference-weak-measurement interferometer.

Layout of the simulated train::

    POL -> BS1 -> (+ arm: U+(theta), - arm: U-(theta)) -> post-selection
        -> quadrature bias -> BS2 (bias epsilon) -> D1 / D2

* BS1 and BS2 use the symmetric convention: reflection multiplies the field
  by ``i``. The reflected beam of BS1 feeds the ``+`` arm, as in
  ``(i|+> + |->)/sqrt(2)``.
* ``U+-(theta) = exp(+-i theta A)`` with ``A = |H><H| - |V><V|``.
* Both arms are projected onto the same polarization ``|post>``; the
  orthogonal component leaves through the rejected port.
* The lower arm carries a fixed pi/2 bias so the recombiner sits at
  quadrature and the difference signal is odd in theta.
* The BS2 bias is modeled on the fields: the two output ports receive power in
  the ratio ``(1 + eps/2) : (1 - eps/2)``. The amplitudes are rescaled by
  ``sqrt(1 +- eps/2) / sqrt(1 + |eps|/2)`` so the element stays passive and
  the shortfall is booked as ``i_lost``.

All the closed forms below (``detection_probabilities``,
``difference_signal_first_order``) are leading-order approximations of this
exact model.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from . import qubit
from .errors import WvaLabError
from .qubit import TwoLevelState, WeakValueSetting

READINGS_COLUMNS = (
    "theta",
    "delta",
    "epsilon",
    "p_d1",
    "p_d2",
    "i_d1",
    "i_d2",
    "signal",
    "theta_prime",
)

# Nonlinearity threshold used for the open-loop range, and the amplified
# phase bound quoted for it.
DEFAULT_NONLINEARITY = 1e-4


@dataclass(frozen=True)
class TrainConfig:
    """Parameters of one pass through the interferometer.

    Exactly one of ``delta`` (real weak value ``cot(delta)``) and
    ``target_weak_value`` (arbitrary complex weak value) is given.
    """

    theta: float
    delta: float | None = None
    target_weak_value: complex | None = None
    epsilon: float = 0.0
    input_intensity: float = 1.0
    detector_efficiency: tuple[float, float] = (1.0, 1.0)
    i_max: float | None = None

    def __post_init__(self):
        if (self.delta is None) == (self.target_weak_value is None):
            raise ValueError("give exactly one of delta or target_weak_value")
        if self.delta is not None and not 0.0 < self.delta <= np.pi / 4:
            raise ValueError(f"delta must lie in (0, pi/4], got {self.delta}")
        if not abs(self.epsilon) < 1.0:
            raise ValueError(f"|epsilon| must be < 1, got {self.epsilon}")
        if self.input_intensity < 0:
            raise ValueError("input_intensity must be >= 0")
        eff = tuple(float(e) for e in self.detector_efficiency)
        if len(eff) != 2 or not all(0.0 <= e <= 1.0 for e in eff):
            raise ValueError("detector_efficiency must be two values in [0, 1]")
        object.__setattr__(self, "detector_efficiency", eff)
        if self.i_max is not None and self.i_max <= 0:
            raise ValueError("i_max must be positive")

    @property
    def setting(self) -> WeakValueSetting:
        if self.delta is not None:
            return WeakValueSetting.from_delta(self.delta)
        return WeakValueSetting.from_weak_value(self.target_weak_value)

    @property
    def weak_value(self) -> complex:
        return self.setting.weak_value

    @property
    def gamma(self) -> float:
        return self.setting.gamma

    def replace(self, **changes) -> "TrainConfig":
        data = asdict(self)
        data.update(changes)
        return TrainConfig(**data)

    def to_dict(self) -> dict[str, str]:
        """Flat string key-value form, suitable for a config file."""
        out = {
            "theta": repr(float(self.theta)),
            "epsilon": repr(float(self.epsilon)),
            "input_intensity": repr(float(self.input_intensity)),
            "efficiency_d1": repr(self.detector_efficiency[0]),
            "efficiency_d2": repr(self.detector_efficiency[1]),
        }
        if self.delta is not None:
            out["delta"] = repr(float(self.delta))
        else:
            out["target_weak_value"] = repr(complex(self.target_weak_value))
        if self.i_max is not None:
            out["i_max"] = repr(float(self.i_max))
        return out

    @classmethod
    def from_dict(cls, data: dict[str, str]) -> "TrainConfig":
        kw = {
            "theta": float(data["theta"]),
            "epsilon": float(data.get("epsilon", 0.0)),
            "input_intensity": float(data.get("input_intensity", 1.0)),
            "detector_efficiency": (
                float(data.get("efficiency_d1", 1.0)),
                float(data.get("efficiency_d2", 1.0)),
            ),
        }
        if "delta" in data:
            kw["delta"] = float(data["delta"])
        if "target_weak_value" in data:
            kw["target_weak_value"] = parse_complex(data["target_weak_value"])
        if "i_max" in data:
            kw["i_max"] = float(data["i_max"])
        return cls(**kw)


def parse_complex(text) -> complex:
    """Parse ``100+10i``, ``(100+10j)`` or plain numbers."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    return complex(s)


@dataclass(frozen=True)
class DetectorReadings:
    """Detector probabilities and intensities for one configuration.

    ``i_rejected`` is the light discarded by the post-selection and
    ``i_lost`` collects the BS2 imbalance loss and detector inefficiency, so
    ``i_d1 + i_d2 + i_rejected + i_lost`` equals the input intensity.
    """

    p_d1: float
    p_d2: float
    i_d1: float
    i_d2: float
    saturated: tuple[bool, bool] = (False, False)
    i_rejected: float = 0.0
    i_lost: float = 0.0

    @property
    def signal(self) -> float:
        return self.i_d1 - self.i_d2

    @property
    def total(self) -> float:
        return self.i_d1 + self.i_d2

    @property
    def normalized_difference(self) -> float:
        tot = self.total
        return self.signal / tot if tot > 0 else 0.0


class AmplifiedPhase(NamedTuple):
    theta_prime: float
    n_prime: float


def amplified_phase(theta, a_w):
    """Phase and modulus of ``cos(theta) + i A_w sin(theta)``.

    For real ``a_w`` and ``|theta| < pi/2`` this is
    ``(arctan(A_w tan theta), sqrt(cos^2 theta + A_w^2 sin^2 theta))``.
    Accepts scalars or arrays.
    """
    z = np.cos(theta) + 1j * complex(a_w) * np.sin(theta)
    tp, n = np.angle(z), np.abs(z)
    if np.ndim(tp) == 0:
        return AmplifiedPhase(float(tp), float(n))
    return AmplifiedPhase(tp, n)


def lock_phase(theta, a_w):
    """Half the relative phase between the two post-selected arms.

    This is the phase the recombiner sees; it equals ``theta'`` from
    :func:`amplified_phase` when ``a_w`` is real and reduces to ``theta`` for
    ``a_w = 1``.
    """
    a_w = complex(a_w)
    up = np.cos(theta) + 1j * a_w * np.sin(theta)
    um = np.cos(theta) - 1j * a_w * np.sin(theta)
    return 0.5 * np.angle(up * np.conj(um))


def invert_lock_phase(phi: float, a_w: complex) -> float:
    """Phase shift ``theta`` whose lock phase equals ``phi`` (|phi| < pi/2)."""
    a_w = complex(a_w)
    if a_w.imag == 0.0:
        return float(np.arctan(np.tan(phi) / a_w.real))
    if abs(phi) >= np.pi / 2:
        raise WvaLabError("lock phase out of the invertible range")
    # lock_phase is odd and increasing on the branch through the origin
    hi = np.pi / 2 - 1e-12
    return float(optimize.brentq(lambda t: lock_phase(t, a_w) - phi, -hi, hi, xtol=1e-16, rtol=1e-15))


def detection_probabilities(theta, delta):
    """Leading-order detector probabilities ``(gamma^2/2)(1 +- sin(2 A_w theta))``.

    Uses ``gamma = tan(delta)`` and ``A_w = cot(delta)``.
    """
    gamma = np.tan(delta)
    a_w = 1.0 / gamma
    s = np.sin(2.0 * a_w * np.asarray(theta))
    p1 = 0.5 * gamma**2 * (1.0 + s)
    p2 = 0.5 * gamma**2 * (1.0 - s)
    if np.ndim(p1) == 0:
        return float(p1), float(p2)
    return p1, p2


def _bs2_amplitudes(epsilon: float) -> tuple[float, float]:
    scale = 1.0 + abs(epsilon) / 2.0
    return math.sqrt((1.0 + epsilon / 2.0) / scale), math.sqrt((1.0 - epsilon / 2.0) / scale)


def _recombine(a_plus: complex, a_minus: complex, epsilon: float) -> tuple[float, float, float]:
    """Return (power at D1, power at D2, power lost in the BS2 bias)."""
    a_minus = 1j * a_minus
    e1 = (a_plus + 1j * a_minus) / math.sqrt(2.0)
    e2 = (1j * a_plus + a_minus) / math.sqrt(2.0)
    p1_raw, p2_raw = abs(e1) ** 2, abs(e2) ** 2
    t1, t2 = _bs2_amplitudes(epsilon)
    p1, p2 = (t1 * t1) * p1_raw, (t2 * t2) * p2_raw
    return p1, p2, (p1_raw + p2_raw) - (p1 + p2)


def _finish(config: TrainConfig, p1: float, p2: float, rejected: float, lost: float) -> DetectorReadings:
    i0 = config.input_intensity
    e1, e2 = config.detector_efficiency
    i1, i2 = p1 * i0 * e1, p2 * i0 * e2
    lost_i = lost * i0 + p1 * i0 * (1 - e1) + p2 * i0 * (1 - e2)
    sat = (False, False)
    if config.i_max is not None:
        sat = (bool(i1 > config.i_max), bool(i2 > config.i_max))
    return DetectorReadings(
        float(p1), float(p2), float(i1), float(i2), sat, float(rejected * i0), float(lost_i)
    )


def propagate_exact(config: TrainConfig, compensation: float = 0.0) -> DetectorReadings:
    """Exact Jones-calculus evaluation of the DWM train.

    ``compensation`` is an optional phase ``phi`` applied after post-selection
    as ``exp(-+i phi)`` on the ``+/-`` arms, so it subtracts directly from the
    amplified lock phase.
    """
    setting = config.setting
    pre = setting.pre.normalized().vector
    post = setting.post.normalized().vector
    a = qubit.Z.matrix
    theta = config.theta

    fields = []
    rejected = 0.0
    for sign, bs1 in ((+1, 1j), (-1, 1.0)):
        u = math.cos(theta) * qubit.IDENTITY + 1j * sign * math.sin(theta) * a
        pol = (bs1 / math.sqrt(2.0)) * (u @ pre)
        kept = np.vdot(post, pol)
        rejected += float(np.real(np.vdot(pol, pol)) - abs(kept) ** 2)
        fields.append(kept * np.exp(-1j * sign * compensation))

    p1, p2, lost = _recombine(fields[0], fields[1], config.epsilon)
    return _finish(config, p1, p2, rejected, lost)


def propagate_si(config: TrainConfig, compensation: float = 0.0) -> DetectorReadings:
    """Standard interferometer with the same arms but no polarization selection.

    The arms acquire scalar phases ``exp(+-i theta)``; the weak-value setting
    of ``config`` is ignored.
    """
    theta = config.theta
    a_plus = (1j / math.sqrt(2.0)) * np.exp(1j * (theta - compensation))
    a_minus = (1.0 / math.sqrt(2.0)) * np.exp(-1j * (theta - compensation))
    p1, p2, lost = _recombine(a_plus, a_minus, config.epsilon)
    return _finish(config, p1, p2, 0.0, lost)


def difference_signal(config: TrainConfig) -> float:
    """Exact ``I_D1 - I_D2`` from :func:`propagate_exact`."""
    return propagate_exact(config).signal


def difference_signal_first_order(config: TrainConfig) -> float:
    """Small-signal companion ``2 gamma^2 I0 A_w theta`` (real weak value)."""
    gamma = config.gamma
    a_w = config.weak_value.real
    return 2.0 * gamma**2 * config.input_intensity * a_w * config.theta


def readings_row(config: TrainConfig, readings: DetectorReadings) -> dict[str, float]:
    """One CSV row in :data:`READINGS_COLUMNS` order."""
    return {
        "theta": float(config.theta),
        "delta": float(config.delta) if config.delta is not None else float("nan"),
        "epsilon": float(config.epsilon),
        "p_d1": readings.p_d1,
        "p_d2": readings.p_d2,
        "i_d1": readings.i_d1,
        "i_d2": readings.i_d2,
        "signal": readings.signal,
        "theta_prime": float(lock_phase(config.theta, config.weak_value)),
    }


def nonlinearity(theta, a_w: float):
    """Relative deviation ``|1 - theta'/(A_w theta)|`` of the amplified phase.

    Defined as 0 at ``theta = 0`` by continuity.
    """
    theta = np.asarray(theta, dtype=float)
    a_w = float(a_w)
    tp = np.arctan(a_w * np.tan(theta))
    lin = a_w * theta
    with np.errstate(invalid="ignore", divide="ignore"):
        d = np.abs(1.0 - tp / lin)
    d = np.where(lin == 0.0, 0.0, d)
    return float(d) if d.ndim == 0 else d


def amplified_phase_limit(d_threshold: float = DEFAULT_NONLINEARITY) -> float:
    """Largest amplified phase ``x`` with ``|1 - arctan(x)/x| <= d_threshold``.

    This is the ``A_w -> infinity`` form of :func:`nonlinearity` written in the
    amplified phase; it does not depend on the weak value.
    """
    if not 0.0 < d_threshold < 0.1:
        raise ValueError("d_threshold must lie in (0, 0.1)")
    f = lambda x: (1.0 - np.arctan(x) / x) - d_threshold
    return float(optimize.bisect(f, 1e-12, 1.0, xtol=1e-13))


def max_measurable_phase(a_w: float, d_threshold: float = DEFAULT_NONLINEARITY) -> float:
    """Largest ``theta`` whose amplification nonlinearity stays below ``d_threshold``.

    Solved by bisection on :func:`nonlinearity`. For ``a_w <= 1`` the exact
    nonlinearity of the amplified phase vanishes identically (``theta' = theta``),
    and the bound on the phase entering the fringe, :func:`amplified_phase_limit`,
    is returned instead.
    """
    if not 0.0 < d_threshold < 0.1:
        raise ValueError("d_threshold must lie in (0, 0.1)")
    a_w = float(a_w)
    if a_w <= 1.0:
        return amplified_phase_limit(d_threshold) / max(a_w, 1e-300) if a_w > 0 else 0.0
    hi = np.pi / 2 - 1e-9
    f = lambda t: nonlinearity(t, a_w) - d_threshold
    return float(optimize.bisect(f, 1e-15, hi, xtol=1e-12))


def dynamic_range(theta_max: float, theta_min: float) -> float:
    """Ratio ``|theta_max| / |theta_min|``."""
    if theta_min == 0:
        raise ZeroDivisionError("theta_min must be non-zero")
    return abs(theta_max) / abs(theta_min)
