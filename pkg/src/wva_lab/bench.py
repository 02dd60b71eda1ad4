"""Figure sweeps and the scheme comparison report, as plain row dictionaries.

Each ``*_rows`` function takes already-parsed parameters and returns a list of
dicts in a fixed column order; :mod:`wva_lab.cli` only handles arguments and
file output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import decoherence as dq
from . import noise as nb
from . import optical_train as ot
from . import servo as sv
from .errors import ZeroInformation
from .noise import NoiseParams, Scheme

SCHEMA_VERSION = 1

CURVES_COLUMNS = ot.READINGS_COLUMNS + ("re_aw", "im_aw", "n_prime", "signal_ratio")
QFI_COLUMNS = ("eta", "theta", "scheme", "re_aw", "im_aw", "qfi", "cramer_rao_bound")
NONLINEARITY_COLUMNS = ("a_w", "theta", "a_w_theta", "nonlinearity", "nonlinearity_ppm", "below_threshold")
LIMITS_COLUMNS = ("a_w", "threshold_ppm", "theta_max", "a_w_theta_max")
COMPARE_COLUMNS = (
    "scheme",
    "accuracy_per_epsilon",
    "accuracy_limit",
    "snr",
    "precision_hard",
    "precision_easy",
    "precision_ratio_hard",
    "precision_ratio_easy",
    "theta_max_open",
    "dynamic_range_open",
    "theta_min_closed",
    "theta_max_closed",
    "dynamic_range_closed",
    "qfi",
)


def make_grid(spec: str) -> np.ndarray:
    """Parse ``log:a:b:n``, ``lin:a:b:n`` or a comma-separated list.

    The result must be non-empty and strictly increasing.
    """
    spec = str(spec).strip()
    if spec.startswith(("log:", "lin:")):
        kind, a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
        if n < 1:
            raise ValueError("grid needs at least one point")
        grid = np.geomspace(a, b, n) if kind == "log" else np.linspace(a, b, n)
    else:
        grid = np.array([float(x) for x in spec.split(",") if x.strip()])
    if grid.size == 0:
        raise ValueError("grid is empty")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("grid must be strictly increasing")
    return grid


def parse_weak_values(spec: str) -> list[complex]:
    values = [ot.parse_complex(x) for x in str(spec).split(",") if x.strip()]
    if not values:
        raise ValueError("no weak values given")
    return values


def _train_for(a_w: complex, theta: float, epsilon: float, i0: float) -> ot.TrainConfig:
    a_w = complex(a_w)
    if a_w.imag == 0.0 and a_w.real >= 1.0:
        return ot.TrainConfig(theta=theta, delta=math.atan(1.0 / a_w.real), epsilon=epsilon, input_intensity=i0)
    return ot.TrainConfig(theta=theta, target_weak_value=a_w, epsilon=epsilon, input_intensity=i0)


def curves_rows(thetas, weak_values, epsilon: float = 0.0, i0: float = 1.0) -> list[dict]:
    """Amplified phase and relative signal ``I_S/I_D`` against ``theta``."""
    rows = []
    for a_w in weak_values:
        a_w = complex(a_w)
        for theta in thetas:
            cfg = _train_for(a_w, float(theta), epsilon, i0)
            readings = ot.propagate_exact(cfg)
            row = ot.readings_row(cfg, readings)
            amp = ot.amplified_phase(float(theta), a_w)
            row["theta_prime"] = amp.theta_prime
            row.update(
                re_aw=a_w.real,
                im_aw=a_w.imag,
                n_prime=amp.n_prime,
                signal_ratio=readings.normalized_difference,
            )
            rows.append(row)
    return rows


def qfi_rows(etas, theta: float, weak_values, n_repeats: int = 1, convention: str = "linear") -> list[dict]:
    """QFI of SI and of DWM for each weak value, over a decoherence sweep."""
    rows = []

    def bound(f):
        try:
            return dq.cramer_rao(f, n_repeats, convention)
        except ZeroInformation:
            return math.inf

    for eta in etas:
        eta = float(eta)
        f = dq.qfi_si(theta, eta)
        rows.append(dict(eta=eta, theta=theta, scheme="SI", re_aw=1.0, im_aw=0.0, qfi=f, cramer_rao_bound=bound(f)))
        for a_w in weak_values:
            a_w = complex(a_w)
            f = dq.qfi_dwm(theta, a_w, eta)
            rows.append(
                dict(eta=eta, theta=theta, scheme="DWM", re_aw=a_w.real, im_aw=a_w.imag, qfi=f, cramer_rao_bound=bound(f))
            )
    return rows


def nonlinearity_rows(thetas, weak_values, threshold_ppm: float = 100.0) -> tuple[list[dict], list[dict]]:
    """Nonlinearity curves in ppm plus the threshold crossing for each weak value."""
    rows, limits = [], []
    d_threshold = threshold_ppm * 1e-6
    for a_w in weak_values:
        a_w = float(complex(a_w).real)
        d = ot.nonlinearity(np.asarray(thetas, dtype=float), a_w)
        for theta, dv in zip(thetas, np.atleast_1d(d)):
            rows.append(
                dict(
                    a_w=a_w,
                    theta=float(theta),
                    a_w_theta=a_w * float(theta),
                    nonlinearity=float(dv),
                    nonlinearity_ppm=1e6 * float(dv),
                    below_threshold=int(dv <= d_threshold),
                )
            )
        t_max = ot.max_measurable_phase(a_w, d_threshold)
        limits.append(dict(a_w=a_w, threshold_ppm=threshold_ppm, theta_max=t_max, a_w_theta_max=a_w * t_max))
    return rows, limits


@dataclass(frozen=True)
class CompareParams:
    gamma: float = 1e-2
    epsilon: float = 1e-3
    omega0_dt: float = 1e4
    alpha: float = 1.0
    beta: float = 1e-2
    i0: float = 1e12
    i_max: float = 1e4
    theta: float = 1e-3
    phi_min: float = 1e-6
    modulator_range: float = 2 * math.pi
    d_threshold: float = 1e-4
    eta: float = 0.0


def compare_rows(p: CompareParams) -> list[dict]:
    """Scheme report: one row each for DWM, SI and SWM (accuracy only).

    Open-loop minimum phases are the hard-saturation precision limits; ratios
    are taken against SI.
    """
    params = NoiseParams(p.alpha, p.beta)
    hard, easy = nb.HardToSaturate(), nb.EasyToSaturate(p.i_max)
    swm = nb.SwmDetectorSpec(omega0=p.omega0_dt / 1e-11, delta_t=1e-11)
    x_lim = ot.amplified_phase_limit(p.d_threshold)

    prec = {
        s: (nb.precision_limit(s, p.gamma, p.i0, params, hard), nb.precision_limit(s, p.gamma, p.i0, params, easy))
        for s in (Scheme.DWM, Scheme.SI)
    }
    rows = []
    for scheme in (Scheme.DWM, Scheme.SI):
        lever = p.gamma if scheme is Scheme.DWM else 1.0
        theta_max_open = x_lim * lever
        ph, pe = prec[scheme]
        qfi = dq.qfi_dwm(p.theta, 1.0 / p.gamma, p.eta) if scheme is Scheme.DWM else dq.qfi_si(p.theta, p.eta)
        rows.append(
            dict(
                scheme=scheme.value,
                accuracy_per_epsilon=nb.accuracy_limit(scheme, 1.0, gamma=p.gamma),
                accuracy_limit=nb.accuracy_limit(scheme, p.epsilon, gamma=p.gamma),
                snr=nb.snr(scheme, p.theta, p.gamma, p.i0, params),
                precision_hard=ph,
                precision_easy=pe,
                precision_ratio_hard=ph / prec[Scheme.SI][0],
                precision_ratio_easy=pe / prec[Scheme.SI][1],
                theta_max_open=theta_max_open,
                dynamic_range_open=ot.dynamic_range(theta_max_open, ph),
                theta_min_closed=sv.closed_loop_precision(scheme, p.gamma, p.phi_min),
                theta_max_closed=p.modulator_range * lever,
                dynamic_range_closed=sv.closed_loop_dynamic_range(scheme, p.gamma, p.phi_min, p.modulator_range),
                qfi=qfi,
            )
        )
    swm_row = {c: None for c in COMPARE_COLUMNS}
    swm_row.update(
        scheme="SWM",
        accuracy_per_epsilon=nb.accuracy_limit(Scheme.SWM, 1.0, swm=swm),
        accuracy_limit=nb.accuracy_limit(Scheme.SWM, p.epsilon, swm=swm),
    )
    rows.append(swm_row)
    return rows
