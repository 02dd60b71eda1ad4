"""Closed-form error budget: alignment accuracy, shot noise, RIN, SNR, precision.

Intensities are in arbitrary power units; detector efficiencies are taken as 1.
The noise constant ``alpha`` here is unrelated to the post-selection angle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import MissingParameter


class Scheme(str, enum.Enum):
    DWM = "DWM"
    SI = "SI"
    SWM = "SWM"


@dataclass(frozen=True)
class NoiseParams:
    """Shot-noise constant ``alpha_sn`` and relative-intensity-noise constant ``beta_rin``."""

    alpha_sn: float = 0.0
    beta_rin: float = 0.0

    def __post_init__(self):
        if self.alpha_sn < 0 or self.beta_rin < 0:
            raise ValueError("noise constants must be non-negative")

    @property
    def crossover_intensity(self) -> float:
        """Intensity ``(alpha/beta)^2`` where shot noise and RIN are equal."""
        if self.beta_rin == 0:
            return math.inf
        return (self.alpha_sn / self.beta_rin) ** 2


@dataclass(frozen=True)
class SwmDetectorSpec:
    """Time-resolving detector for the spectral weak-measurement scheme.

    The defaults give ``omega0 * delta_t = 1e4`` (10 ps at an optical angular
    frequency of 1e15 rad/s).
    """

    omega0: float = 1e15
    delta_t: float = 1e-11

    def __post_init__(self):
        if self.omega0 <= 0 or self.delta_t <= 0:
            raise ValueError("omega0 and delta_t must be positive")

    @property
    def product(self) -> float:
        return self.omega0 * self.delta_t


@dataclass(frozen=True)
class HardToSaturate:
    """Detector regime where the input intensity is set freely by the caller."""


@dataclass(frozen=True)
class EasyToSaturate:
    """Detector regime capped at ``i_max`` detected intensity."""

    i_max: float

    def __post_init__(self):
        if self.i_max <= 0:
            raise ValueError("i_max must be positive")


SaturationRegime = HardToSaturate | EasyToSaturate


def accuracy_limit(
    scheme: Scheme | str,
    epsilon: float,
    gamma: float | None = None,
    swm: SwmDetectorSpec | None = None,
) -> float:
    """Smallest resolvable ``|theta|`` under a splitting bias ``epsilon``.

    ``gamma * eps`` for DWM, ``eps`` for SI and ``omega0 * dt * eps`` for SWM.
    """
    scheme = Scheme(scheme)
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if scheme is Scheme.DWM:
        if gamma is None:
            raise MissingParameter("DWM accuracy limit needs gamma")
        return gamma * epsilon
    if scheme is Scheme.SI:
        return float(epsilon)
    if swm is None:
        raise MissingParameter("SWM accuracy limit needs a SwmDetectorSpec")
    return swm.product * epsilon


def noise_terms(i_d: float, params: NoiseParams) -> tuple[float, float]:
    """Shot-noise and RIN intensity errors ``(alpha sqrt(I_D), beta I_D)``."""
    if i_d < 0:
        raise ValueError("detected intensity must be non-negative")
    return params.alpha_sn * math.sqrt(i_d), params.beta_rin * i_d


def detected_intensity(scheme: Scheme | str, gamma: float, i0: float) -> float:
    """Total detected intensity: ``gamma^2 I0`` for DWM and ``I0`` for SI."""
    return gamma**2 * i0 if Scheme(scheme) is Scheme.DWM else i0


def _denominator(scheme: Scheme, gamma: float, i0: float, params: NoiseParams) -> float:
    shot = params.alpha_sn * math.sqrt(1.0 / i0)
    if scheme is Scheme.DWM:
        return shot + params.beta_rin * gamma
    if scheme is Scheme.SI:
        return shot + params.beta_rin
    raise ValueError(f"{scheme.value} has no intensity-noise model")


def snr(scheme: Scheme | str, theta: float, gamma: float, i0: float, params: NoiseParams) -> float:
    """Signal-to-noise ratio with shot noise and RIN added linearly.

    DWM: ``2 theta / (alpha / sqrt(I0) + beta gamma)``;
    SI: ``2 theta / (alpha / sqrt(I0) + beta)``.
    """
    scheme = Scheme(scheme)
    if i0 <= 0:
        raise ValueError("i0 must be positive")
    if scheme is Scheme.DWM and not 0 < gamma < 1:
        raise ValueError("DWM needs gamma in (0, 1)")
    return 2.0 * theta / _denominator(scheme, gamma, i0, params)


def effective_input(scheme: Scheme | str, gamma: float, i0: float, regime: SaturationRegime) -> float:
    """Input intensity actually usable in the given detector regime."""
    if isinstance(regime, EasyToSaturate):
        return regime.i_max / gamma**2 if Scheme(scheme) is Scheme.DWM else regime.i_max
    return i0


def precision_limit(
    scheme: Scheme | str,
    gamma: float,
    i0: float,
    params: NoiseParams,
    regime: SaturationRegime = HardToSaturate(),
    snr_threshold: float = 1.0,
) -> float:
    """Minimum detectable phase, the ``theta`` where the SNR reaches ``snr_threshold``.

    In the easy-to-saturate regime ``i0`` is ignored and replaced by the
    largest input that keeps the detected intensity at ``i_max``.
    """
    scheme = Scheme(scheme)
    i_eff = effective_input(scheme, gamma, i0, regime)
    if i_eff <= 0:
        raise ValueError("effective input intensity must be positive")
    return 0.5 * snr_threshold * _denominator(scheme, gamma, i_eff, params)


def sample_noisy_reading(i_d, params: NoiseParams, seed: int, size: int | None = None):
    """Detector reading with independent Gaussian shot noise and RIN.

    The standard deviation is ``sqrt((alpha sqrt(I_D))^2 + (beta I_D)^2)``.
    Each call builds its own generator from ``seed``, so equal seeds give equal
    draws.
    """
    i_d = float(i_d)
    sn, rin = noise_terms(i_d, params)
    sigma = math.hypot(sn, rin)
    if sigma == 0.0:
        return i_d if size is None else np.full(size, i_d)
    rng = np.random.default_rng(seed)
    draw = rng.normal(0.0, sigma, size)
    return i_d + float(draw) if size is None else i_d + draw
