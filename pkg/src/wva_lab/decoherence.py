"""Bloch vectors, affine decoherence channels and quantum Fisher information.

Sign convention: Bloch components are the expectations of the standard Pauli
matrices, ``n = (<X>, <Y>, <Z>)``. With that choice ``exp(i theta Z)`` rotates
the Bloch vector by ``-2 theta`` about z, so ``exp(i theta Z)|+>`` sits at
``(cos 2theta, -sin 2theta, 0)``. Fisher information does not depend on the
sense of rotation.

The phase is encoded first and the channel acts afterwards.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ApproximationDomain, NearSingularPurity, UnphysicalOutput, ZeroInformation
from .qubit import X, Y, Z, TwoLevelState

TOL_PURE = 1e-9
TOL_NEAR_SINGULAR = 1e-6
FD_STEP = 1e-6
DWM_APPROX_LIMIT = 0.2

PAULIS = (X.matrix, Y.matrix, Z.matrix)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.length > 1 + 1e-12:
            raise UnphysicalOutput(f"|n| = {self.length!r} exceeds 1")

    @classmethod
    def from_array(cls, n) -> "BlochVector":
        n = np.asarray(n, dtype=float).reshape(3)
        return cls(float(n[0]), float(n[1]), float(n[2]))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def length(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


def state_to_bloch(s: TwoLevelState) -> BlochVector:
    v = s.normalized().vector
    comps = [np.real(np.vdot(v, p @ v)) for p in PAULIS]
    n = np.array(comps)
    # pure states can overshoot |n| = 1 by rounding
    length = np.linalg.norm(n)
    if length > 1.0:
        n = n / length
    return BlochVector.from_array(n)


def bloch_to_density(n: BlochVector) -> np.ndarray:
    """Density matrix ``(I + n . sigma) / 2``."""
    a = n.array
    return 0.5 * (np.eye(2) + sum(c * p for c, p in zip(a, PAULIS)))


def _fibonacci_sphere(count: int) -> np.ndarray:
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * k
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


@dataclass(frozen=True)
class AffineChannel:
    """Channel ``n -> E n + C`` on Bloch vectors.

    Construction checks that the map sends the unit sphere into the unit ball
    on a fixed grid of sample points.
    """

    e: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        e = np.array(self.e, dtype=float).reshape(3, 3)
        c = np.array(self.c, dtype=float).reshape(3)
        e.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "c", c)
        images = _fibonacci_sphere(512) @ e.T + c
        if np.max(np.linalg.norm(images, axis=1)) > 1 + 1e-9:
            raise UnphysicalOutput("channel maps the Bloch sphere outside the unit ball")

    def apply_array(self, n) -> np.ndarray:
        return self.e @ np.asarray(n, dtype=float) + self.c


def phase_flip(eta: float) -> AffineChannel:
    """Phase-flip channel with strength ``eta`` in [0, 0.5]."""
    if not 0.0 <= eta <= 0.5:
        raise ValueError(f"eta must lie in [0, 0.5], got {eta}")
    k = 1.0 - 2.0 * eta
    return AffineChannel(np.diag([k, k, 1.0]), np.zeros(3))


def apply_channel(ch: AffineChannel, n: BlochVector) -> BlochVector:
    out = ch.apply_array(n.array)
    length = np.linalg.norm(out)
    if length > 1 + 1e-9:
        raise UnphysicalOutput("channel output left the unit ball")
    if length > 1.0:
        out = out / length
    return BlochVector.from_array(out)


def qfi_from_vectors(n, dn) -> float:
    """QFI of a qubit from its Bloch vector and the vector's parameter derivative.

    ``|dn|^2 + (n . dn)^2 / (1 - |n|^2)`` for mixed states and ``|dn|^2`` once
    ``|n| >= 1 - 1e-9``.
    """
    n = np.asarray(n, dtype=float)
    dn = np.asarray(dn, dtype=float)
    length = float(np.linalg.norm(n))
    f = float(dn @ dn)
    if length >= 1.0 - TOL_PURE:
        return f
    if length > 1.0 - TOL_NEAR_SINGULAR:
        warnings.warn(
            f"|n| = {length:.12f} is close to the pure-state boundary", NearSingularPurity, stacklevel=2
        )
    return f + float(n @ dn) ** 2 / (1.0 - length**2)


def central_difference(path: Callable[[float], np.ndarray], theta: float, h: float = FD_STEP) -> np.ndarray:
    return (np.asarray(path(theta + h)) - np.asarray(path(theta - h))) / (2.0 * h)


def qfi(
    path: Callable[[float], np.ndarray],
    theta: float,
    derivative: Callable[[float], np.ndarray] | None = None,
    h: float = FD_STEP,
) -> float:
    """QFI of a one-parameter family of Bloch vectors at ``theta``.

    ``derivative`` is used when given; otherwise a central difference with step
    ``h`` is taken.
    """
    n = np.asarray(path(theta), dtype=float)
    dn = derivative(theta) if derivative is not None else central_difference(path, theta, h)
    return qfi_from_vectors(n, dn)


def pointer_bloch(theta, a_w: complex) -> np.ndarray:
    """Bloch vector of the normalized pointer ``e^{i A_w theta}|0> + e^{-i A_w theta}|1>``.

    With ``A_w = a + ib`` this is ``(sech(2b theta) cos 2a theta,
    -sech(2b theta) sin 2a theta, -tanh(2b theta))``.
    """
    a, b = complex(a_w).real, complex(a_w).imag
    phase = 2.0 * a * theta
    sech = 1.0 / np.cosh(2.0 * b * theta)
    return np.array([sech * np.cos(phase), -sech * np.sin(phase), -np.tanh(2.0 * b * theta)])


def pointer_bloch_derivative(theta, a_w: complex) -> np.ndarray:
    a, b = complex(a_w).real, complex(a_w).imag
    phase = 2.0 * a * theta
    sech = 1.0 / np.cosh(2.0 * b * theta)
    tanh = np.tanh(2.0 * b * theta)
    d_sech = -2.0 * b * sech * tanh
    return np.array(
        [
            d_sech * np.cos(phase) - 2.0 * a * sech * np.sin(phase),
            -d_sech * np.sin(phase) - 2.0 * a * sech * np.cos(phase),
            -2.0 * b * sech**2,
        ]
    )


def _channel_path(a_w: complex, ch: AffineChannel):
    path = lambda t: ch.apply_array(pointer_bloch(t, a_w))
    deriv = lambda t: ch.e @ pointer_bloch_derivative(t, a_w)
    return path, deriv


def qfi_si(theta: float, eta: float, analytic: bool = True) -> float:
    """QFI of ``|+>`` after ``exp(i theta Z)`` and a phase flip of strength ``eta``.

    Equal to ``4 (1 - 2 eta)^2`` for every ``theta``.
    """
    path, deriv = _channel_path(1.0, phase_flip(eta))
    return qfi(path, theta, deriv if analytic else None)


def qfi_dwm(theta: float, a_w: complex, eta: float, analytic: bool = True) -> float:
    """QFI of the amplified pointer after a phase flip, weighted by ``1/|A_w|^2``.

    The pointer carries ``exp(+-i A_w theta)`` on its two components; for
    complex ``A_w`` the imaginary part moves weight between them, so part of
    the information sits in the z component, which the phase flip leaves
    untouched.

    Raises
    ------
    ApproximationDomain
        If ``|A_w theta| > 0.2``.
    """
    a_w = complex(a_w)
    if abs(a_w * theta) > DWM_APPROX_LIMIT:
        raise ApproximationDomain(f"|A_w theta| = {abs(a_w * theta):.3g} exceeds {DWM_APPROX_LIMIT}")
    path, deriv = _channel_path(a_w, phase_flip(eta))
    return qfi(path, theta, deriv if analytic else None) / abs(a_w) ** 2


def cramer_rao(f: float, n_repeats: int = 1, convention: str = "linear") -> float:
    """Phase uncertainty bound from Fisher information ``f`` over ``n_repeats`` trials.

    ``convention="linear"`` gives ``1/(sqrt(N) F)``; ``"standard"`` gives the
    textbook ``1/sqrt(N F)``.
    """
    if n_repeats < 1:
        raise ValueError("n_repeats must be >= 1")
    if not f > 0:
        raise ZeroInformation(f"Fisher information {f!r} carries no information")
    if convention == "linear":
        return 1.0 / (math.sqrt(n_repeats) * f)
    if convention == "standard":
        return 1.0 / math.sqrt(n_repeats * f)
    raise ValueError(f"unknown convention {convention!r}")
