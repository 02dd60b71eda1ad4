"""Two-level state algebra, weak values and the system-pointer weak measurement.

Conventions
-----------
* Amplitudes are stored on the computational basis ``|0>, |1>``. Whether those
  are called H/V or 0/1 is metadata carried in ``TwoLevelState.basis``.
* The post-selection used throughout the package is parameterized by an angle
  offset ``delta``: ``|post> = cos(a)|0> + sin(a)|1>`` with ``a = -pi/4 + delta``.
  For the symmetric pre-selection this gives the exact weak value
  ``A_w = cot(delta)``, and the attenuation parameter is ``gamma = tan(delta)``.
* States are compared by fidelity only; global phases carry no meaning.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateOutput, OrthogonalSelection, UnreachableWeakValue

SELECTION_EPS = 1e-15


@dataclass(frozen=True)
class TwoLevelState:
    """Complex amplitude pair ``a0|0> + a1|1>``.

    The state is not normalized automatically; call :meth:`normalized`.
    """

    a0: complex
    a1: complex
    basis: str = "01"

    def __post_init__(self):
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "a1", complex(self.a1))

    @classmethod
    def from_vector(cls, vec, basis: str = "01") -> "TwoLevelState":
        vec = np.asarray(vec, dtype=complex).reshape(2)
        return cls(vec[0], vec[1], basis)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)

    @property
    def norm(self) -> float:
        return float(np.hypot(abs(self.a0), abs(self.a1)))

    def normalized(self) -> "TwoLevelState":
        n = self.norm
        if n == 0.0 or not np.isfinite(n):
            raise DegenerateOutput("cannot normalize a zero or non-finite state")
        return TwoLevelState(self.a0 / n, self.a1 / n, self.basis)

    def inner(self, other: "TwoLevelState") -> complex:
        """Return ``<self|other>``."""
        return complex(np.vdot(self.vector, other.vector))

    def fidelity(self, other: "TwoLevelState") -> float:
        """Overlap ``|<x|y>|^2`` of the two states after normalization."""
        a = self.normalized()
        b = other.normalized()
        return float(abs(a.inner(b)) ** 2)


def zero() -> TwoLevelState:
    return TwoLevelState(1.0, 0.0)


def one() -> TwoLevelState:
    return TwoLevelState(0.0, 1.0)


def plus() -> TwoLevelState:
    """The symmetric pre-selection ``(|0> + |1>)/sqrt(2)``."""
    r = 1.0 / np.sqrt(2.0)
    return TwoLevelState(r, r)


def post_selection_state(delta: float) -> TwoLevelState:
    """Linear post-selection at angle ``-pi/4 + delta``."""
    angle = -np.pi / 4 + delta
    return TwoLevelState(np.cos(angle), np.sin(angle))


@dataclass(frozen=True)
class PauliObservable:
    """A 2x2 Hermitian involution (eigenvalues exactly +1 and -1)."""

    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex).reshape(2, 2)
        if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
            raise ValueError("observable is not Hermitian")
        if not np.allclose(m @ m, np.eye(2), atol=1e-12, rtol=0):
            raise ValueError("observable does not square to the identity")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def expectation(self, state: TwoLevelState) -> float:
        s = state.normalized().vector
        return float(np.real(np.vdot(s, self.matrix @ s)))


X = PauliObservable(np.array([[0, 1], [1, 0]]), "X")
Y = PauliObservable(np.array([[0, -1j], [1j, 0]]), "Y")
Z = PauliObservable(np.array([[1, 0], [0, -1]]), "Z")
IDENTITY = np.eye(2, dtype=complex)


def weak_value(pre: TwoLevelState, post: TwoLevelState, obs: PauliObservable = Z) -> complex:
    """Weak value ``<post|obs|pre> / <post|pre>``.

    No magnitude cap is applied, so anomalous values far outside [-1, 1] are
    returned as-is.

    Raises
    ------
    OrthogonalSelection
        If ``|<post|pre>| <= 1e-15``.
    """
    overlap = np.vdot(post.vector, pre.vector)
    if abs(overlap) <= SELECTION_EPS:
        raise OrthogonalSelection(f"|<post|pre>| = {abs(overlap):.3e}")
    return complex(np.vdot(post.vector, obs.matrix @ pre.vector) / overlap)


def post_selection_for_weak_value(
    target: complex, pre: TwoLevelState | None = None, obs: PauliObservable = Z
) -> TwoLevelState:
    """Post-selected state whose weak value with ``pre`` equals ``target``.

    The condition ``<post|(obs - target)|pre> = 0`` fixes ``post`` up to a
    global phase as the vector orthogonal to ``v = (obs - target)|pre>``.
    For the symmetric pre-selection and ``obs = Z`` this reproduces the
    amplitude ratio ``conj(b)/conj(a) = (1 - A_w)/(1 + A_w)``.
    """
    pre = plus() if pre is None else pre
    target = complex(target)
    if not np.isfinite(target):
        raise UnreachableWeakValue("target weak value is not finite")
    v = (obs.matrix - target * IDENTITY) @ pre.normalized().vector
    post = TwoLevelState(np.conj(v[1]), -np.conj(v[0]), pre.basis)
    if post.norm <= SELECTION_EPS:
        raise UnreachableWeakValue("pre-selection is an eigenstate with eigenvalue equal to target")
    post = post.normalized()
    if abs(post.inner(pre.normalized())) <= SELECTION_EPS:
        raise UnreachableWeakValue(
            f"weak value {target} cannot be reached from this pre-selection"
        )
    return post


@dataclass(frozen=True)
class WeakValueSetting:
    """Pre/post-selection pair together with its derived weak value.

    ``delta`` is the post-selection angle offset when the post-selection is the
    real linear state at ``-pi/4 + delta``; it is ``None`` for complex settings.
    """

    pre: TwoLevelState
    post: TwoLevelState
    obs: PauliObservable = Z
    delta: float | None = None
    weak_value: complex = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "weak_value", weak_value(self.pre, self.post, self.obs))

    @classmethod
    def from_delta(cls, delta: float) -> "WeakValueSetting":
        if not 0.0 < delta <= np.pi / 4:
            raise ValueError(f"delta must lie in (0, pi/4], got {delta}")
        return cls(plus(), post_selection_state(delta), Z, float(delta))

    @classmethod
    def from_weak_value(cls, target: complex) -> "WeakValueSetting":
        target = complex(target)
        post = post_selection_for_weak_value(target)
        delta = None
        if target.imag == 0.0 and target.real >= 1.0:
            delta = float(np.arctan(1.0 / target.real))
        return cls(plus(), post, Z, delta)

    @property
    def gamma(self) -> float:
        """Attenuation parameter, ``tan(delta)`` or ``1/|A_w|`` for complex settings."""
        if self.delta is not None:
            return float(np.tan(self.delta))
        return float(1.0 / abs(self.weak_value))

    @property
    def overlap(self) -> complex:
        return self.post.inner(self.pre)


def exact_postselected_pointer(
    g: float,
    pre_sys: TwoLevelState,
    post_sys: TwoLevelState,
    pointer_in: TwoLevelState,
    a_obs: PauliObservable = Z,
    b_obs: PauliObservable = Z,
) -> tuple[TwoLevelState, float]:
    """Post-selected pointer under the exact coupling ``exp(i g A (x) B)``.

    The joint unitary is built on the 4-dimensional product space and the
    system factor is contracted with ``<post_sys|``; no weak-value expansion is
    used, so this serves as the reference for :func:`weak_approx_pointer`.

    Returns
    -------
    pointer : TwoLevelState
        Normalized post-selected pointer.
    probability : float
        Post-selection probability (squared norm before normalization).
    """
    pre = pre_sys.normalized().vector
    post = post_sys.normalized().vector
    psi = pointer_in.normalized().vector
    if abs(np.vdot(post, pre)) <= SELECTION_EPS:
        raise OrthogonalSelection("pre- and post-selection are orthogonal")

    u = np.cos(g) * np.eye(4) + 1j * np.sin(g) * np.kron(a_obs.matrix, b_obs.matrix)
    joint = u @ np.kron(pre, psi)
    out = np.conj(post) @ joint.reshape(2, 2)
    prob = float(np.real(np.vdot(out, out)))
    if prob == 0.0:
        # g = pi/2 with <post|A|pre> = 0 annihilates the pointer
        raise DegenerateOutput("post-selected pointer vanished")
    return TwoLevelState.from_vector(out / np.sqrt(prob), pointer_in.basis), min(prob, 1.0)


def weak_approx_pointer(g: float, a_w: complex, pointer_in: TwoLevelState) -> TwoLevelState:
    """Pointer after the first-order weak-value map ``exp(i A_w g B)``.

    ``pointer_in`` must be written in the eigenbasis of B. For complex ``a_w``
    the map changes amplitude magnitudes as well as phases, so the output is
    renormalized.
    """
    a_w = complex(a_w)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        c0 = pointer_in.a0 * np.exp(1j * a_w * g)
        c1 = pointer_in.a1 * np.exp(-1j * a_w * g)
        out = TwoLevelState(c0, c1, pointer_in.basis)
        norm = out.norm
    if not np.isfinite(norm) or norm == 0.0:
        raise DegenerateOutput("weak-value map under/overflowed")
    return out.normalized()
