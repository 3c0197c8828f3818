"""Analytic level-flight truth trajectories and ideal IMU synthesis.

Two deterministic scenarios are supported, both eastward level flight along
a parallel (latitude and height constant) with the body frame pinned to the
local-level frame:

* ``CONST_EAST`` - constant east velocity.  Angular rate and specific force
  are constant, so the two-sample increments have exact closed forms.
* ``SINE_EAST``  - sinusoidal east acceleration a*sin(omega*t).  Increments
  are integrated numerically with a composite Simpson rule (``substeps``
  parabolic panels per half-interval).

The synthesized gyro measures the full inertial rate of the level frame and
the accelerometer the specific force required by the velocity rate equation,
so a perfect navigator reproduces the truth exactly up to algorithm error.
"""

import enum
import functools
from dataclasses import dataclass
from math import cos, sin, tan

import numpy as np

from .geo import WGS84, EarthModel, GeodeticPosition, gravity_magnitude, principal_radii
from .sculling import ImuInterval
from .updates import NavState

__all__ = [
    "ScenarioKind",
    "Scenario",
    "truth_state",
    "imu_increments",
    "increment_table",
    "angular_rate",
    "angular_rate_dot",
    "specific_force",
    "specific_force_dot",
]


class ScenarioKind(enum.Enum):
    CONST_EAST = "const_east"
    SINE_EAST = "sine_east"


@dataclass(frozen=True)
class Scenario:
    """Level-flight scenario definition.

    ``accel_amplitude`` (m/s^2) and ``accel_omega`` (rad/s) apply to
    SINE_EAST only; ``substeps`` sets the Simpson panel count per
    half-interval for SINE_EAST increment synthesis.
    """

    kind: ScenarioKind
    lat0: float
    lon0: float = 0.0
    h0: float = 0.0
    ve0: float = 500.0
    dt: float = 0.02
    duration: float = 3600.0
    accel_amplitude: float = 0.0
    accel_omega: float = 0.0
    substeps: int = 100
    model: EarthModel = WGS84

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        steps = self.duration / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError("duration must be a whole number of intervals")
        if self.substeps < 1:
            raise ValueError("substeps must be at least 1")
        if self.kind is ScenarioKind.SINE_EAST and self.accel_omega <= 0:
            raise ValueError("SINE_EAST requires a positive accel_omega")

    @property
    def n_steps(self) -> int:
        return round(self.duration / self.dt)


def _constants(s: Scenario):
    """Per-scenario fixed quantities (latitude and height never change)."""
    r_n, r_e = principal_radii(s.lat0, s.model)
    return {
        "inv_re_h": 1.0 / (r_e + s.h0),
        "inv_rn_h": 1.0 / (r_n + s.h0),
        "inv_lon_rate": 1.0 / ((r_e + s.h0) * cos(s.lat0)),
        "gamma": gravity_magnitude(s.lat0, s.h0, s.model),
        "w_ie_n": s.model.omega_e * cos(s.lat0),
        "w_ie_u": s.model.omega_e * sin(s.lat0),
        "tan_lat": tan(s.lat0),
    }


def _ve(s: Scenario, t):
    """East velocity profile."""
    if s.kind is ScenarioKind.CONST_EAST:
        return s.ve0 + 0.0 * t
    return s.ve0 + (s.accel_amplitude / s.accel_omega) * (1.0 - np.cos(s.accel_omega * t))


def _ve_integral(s: Scenario, t):
    """Closed-form integral of the east velocity from 0 to t."""
    if s.kind is ScenarioKind.CONST_EAST:
        return s.ve0 * t
    k = s.accel_amplitude / s.accel_omega
    return (s.ve0 + k) * t - (k / s.accel_omega) * np.sin(s.accel_omega * t)


def _ve_rate(s: Scenario, t):
    if s.kind is ScenarioKind.CONST_EAST:
        return 0.0 * t
    return s.accel_amplitude * np.sin(s.accel_omega * t)


def truth_state(s: Scenario, t: float) -> NavState:
    """Exact navigation state at time ``t`` (0 <= t <= duration)."""
    if not 0.0 <= t <= s.duration:
        raise ValueError(f"time {t} outside [0, {s.duration}]")
    k = _constants(s)
    lon = s.lon0 + _ve_integral(s, t) * k["inv_lon_rate"]
    v = np.array([0.0, 0.0, float(_ve(s, t))])
    return NavState(v, GeodeticPosition(lon, s.lat0, s.h0), np.eye(3))


def angular_rate(s: Scenario, t):
    """Inertial angular rate of the level frame (= gyro output), N-U-E.

    Vectorizes over ``t``; returns an array of shape t.shape + (3,).
    """
    k = _constants(s)
    ve = _ve(s, t)
    wn = k["w_ie_n"] + ve * k["inv_re_h"]
    wu = k["w_ie_u"] + ve * k["tan_lat"] * k["inv_re_h"]
    return np.stack(np.broadcast_arrays(wn, wu, 0.0 * wn), axis=-1)


def specific_force(s: Scenario, t):
    """Accelerometer output (body = level frame), N-U-E, m/s^2.

    f = dv/dt + (2*w_ie + w_en) x v - g with v purely east, which reduces to
    [w2_u * v_e, -w2_n * v_e + gamma, dv_e/dt].
    """
    k = _constants(s)
    ve = _ve(s, t)
    w2n = 2.0 * k["w_ie_n"] + ve * k["inv_re_h"]
    w2u = 2.0 * k["w_ie_u"] + ve * k["tan_lat"] * k["inv_re_h"]
    return np.stack(
        np.broadcast_arrays(w2u * ve, -w2n * ve + k["gamma"], _ve_rate(s, t)), axis=-1
    )


def angular_rate_dot(s: Scenario, t):
    """Analytic time derivative of ``angular_rate``."""
    k = _constants(s)
    vdot = _ve_rate(s, t)
    return np.stack(
        np.broadcast_arrays(
            vdot * k["inv_re_h"], vdot * k["tan_lat"] * k["inv_re_h"], 0.0 * vdot
        ),
        axis=-1,
    )


def specific_force_dot(s: Scenario, t):
    """Analytic time derivative of ``specific_force``."""
    k = _constants(s)
    ve = _ve(s, t)
    vdot = _ve_rate(s, t)
    vddot = (
        0.0 * np.asarray(t, dtype=float)
        if s.kind is ScenarioKind.CONST_EAST
        else s.accel_amplitude * s.accel_omega * np.cos(s.accel_omega * t)
    )
    w2n = 2.0 * k["w_ie_n"] + ve * k["inv_re_h"]
    w2u = 2.0 * k["w_ie_u"] + ve * k["tan_lat"] * k["inv_re_h"]
    w2n_dot = vdot * k["inv_re_h"]
    w2u_dot = vdot * k["tan_lat"] * k["inv_re_h"]
    return np.stack(
        np.broadcast_arrays(
            w2u_dot * ve + w2u * vdot, -(w2n_dot * ve + w2n * vdot), vddot
        ),
        axis=-1,
    )


def _simpson_weights(panels: int, width: float) -> np.ndarray:
    """Composite Simpson weights over 2*panels+1 equally spaced nodes."""
    w = np.ones(2 * panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (width / (2.0 * panels) / 3.0)


def _half_interval_integrals(s: Scenario, starts: np.ndarray):
    """Simpson integrals of angular rate and specific force over half-intervals.

    ``starts`` is an array of half-interval start times; each integral spans
    dt/2.  Returns (dtheta, dv) arrays of shape (len(starts), 3).

    Both integrands are affine/quadratic in the east velocity profile, so
    the composite rule is applied to the scalar series v_E, v_E^2 and
    dv_E/dt and the vector components assembled from those integrals; this
    is the same quadrature, evaluated without large 3-vector temporaries.
    """
    half = 0.5 * s.dt
    weights = _simpson_weights(s.substeps, half)
    offsets = np.linspace(0.0, half, 2 * s.substeps + 1)
    nodes = starts[:, None] + offsets[None, :]
    ve = _ve(s, nodes)
    i_ve = ve @ weights
    i_ve2 = (ve * ve) @ weights
    i_vdot = _ve_rate(s, nodes) @ weights
    k = _constants(s)
    zero = np.zeros_like(i_ve)
    dtheta = np.stack(
        [
            k["w_ie_n"] * half + k["inv_re_h"] * i_ve,
            k["w_ie_u"] * half + k["tan_lat"] * k["inv_re_h"] * i_ve,
            zero,
        ],
        axis=-1,
    )
    dv = np.stack(
        [
            2.0 * k["w_ie_u"] * i_ve + k["tan_lat"] * k["inv_re_h"] * i_ve2,
            k["gamma"] * half - (2.0 * k["w_ie_n"] * i_ve + k["inv_re_h"] * i_ve2),
            i_vdot,
        ],
        axis=-1,
    )
    return dtheta, dv


def imu_increments(s: Scenario, t_k: float) -> ImuInterval:
    """Two-sample increments for the interval starting at ``t_k``."""
    if not (0.0 <= t_k and t_k + s.dt <= s.duration * (1.0 + 1e-12)):
        raise ValueError(f"interval [{t_k}, {t_k + s.dt}] outside the scenario")
    if s.kind is ScenarioKind.CONST_EAST:
        w = angular_rate(s, 0.0) * (0.5 * s.dt)
        f = specific_force(s, 0.0) * (0.5 * s.dt)
        return ImuInterval(w, w, f, f, s.dt)
    starts = np.array([t_k, t_k + 0.5 * s.dt])
    dtheta, dv = _half_interval_integrals(s, starts)
    return ImuInterval(dtheta[0], dtheta[1], dv[0], dv[1], s.dt)


@functools.lru_cache(maxsize=4)
def increment_table(s: Scenario):
    """Increments for every interval of the scenario, precomputed.

    Returns (dtheta, dv) arrays of shape (n_steps, 2, 3) holding both
    half-interval samples for each interval.  CONST_EAST broadcasts its
    single closed-form increment; SINE_EAST evaluates the same Simpson rule
    as ``imu_increments`` vectorized in chunks.
    """
    n = s.n_steps
    if s.kind is ScenarioKind.CONST_EAST:
        w = angular_rate(s, 0.0) * (0.5 * s.dt)
        f = specific_force(s, 0.0) * (0.5 * s.dt)
        dtheta = np.broadcast_to(w, (n, 2, 3)).copy()
        dv = np.broadcast_to(np.stack([f, f]), (n, 2, 3)).copy()
    else:
        dtheta = np.empty((n, 2, 3))
        dv = np.empty((n, 2, 3))
        half = 0.5 * s.dt
        chunk = max(1, 4_000_000 // (4 * s.substeps + 2))
        for lo in range(0, n, chunk):
            hi = min(lo + chunk, n)
            starts = np.repeat(np.arange(lo, hi) * s.dt, 2)
            starts[1::2] += half
            th, f = _half_interval_integrals(s, starts)
            dtheta[lo:hi] = th.reshape(-1, 2, 3)
            dv[lo:hi] = f.reshape(-1, 2, 3)
    # cached arrays are shared between callers
    dtheta.flags.writeable = False
    dv.flags.writeable = False
    return dtheta, dv
