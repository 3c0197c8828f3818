"""One-interval velocity, position and attitude update algorithms.

Four two-sample algorithm families are provided.  They differ only in how
the rotation of the navigation frame during the update interval enters the
velocity/position integrals:

* ``DERIVED`` - predictor/corrector update built directly on the rotating
  frame integration formulae: the Coriolis and gravity integrals carry
  first-order frame-rotation weights, the Coriolis integral is re-evaluated
  once with a linear velocity model, and the whole bracket is rotated into
  the new navigation frame.
* ``TN`` - ignores the frame rotation within the interval entirely.
* ``SV1`` - first-order rotation compensation applied to the specific-force
  integral only.
* ``SV2`` - averaged-rotation compensation ((C+I)/2) of the specific-force
  integral.

All four treat the frame rotation matrix over the interval at second order
in dt (``so3.nav_frame_rotation_second_order``).  The error cancellations
these algorithms are designed around hold at exactly that order; replacing
it with the exact exponential changes the leading error term of DERIVED
and SV2.  The attitude update, by contrast, uses the exact rotation.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import geo, so3
from .geo import EarthModel, GeodeticPosition, WGS84
from .sculling import ImuInterval, sculling_correction, scrolling_correction

__all__ = [
    "VelAlg",
    "PosAlg",
    "NavState",
    "FrameRates",
    "frame_rates",
    "velocity_update",
    "position_increment",
    "apply_position",
    "attitude_update",
    "step_once",
]


class VelAlg(enum.Enum):
    """Velocity update algorithm family."""

    DERIVED = "derived"
    TN = "tn"
    SV1 = "sv1"
    SV2 = "sv2"


class PosAlg(enum.Enum):
    """Position update algorithm family."""

    DERIVED = "derived"
    TN = "tn"
    SV1 = "sv1"
    SV2 = "sv2"


@dataclass(frozen=True)
class NavState:
    """Navigation state at an epoch: velocity (N-U-E), position, attitude.

    ``c_bn`` is the body-to-navigation-frame DCM.
    """

    v: np.ndarray
    p: GeodeticPosition
    c_bn: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        c = np.asarray(self.c_bn, dtype=float)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise ValueError("velocity must be a finite 3-vector")
        if c.shape != (3, 3) or not np.all(np.isfinite(c)):
            raise ValueError("attitude must be a finite 3x3 matrix")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "c_bn", c)


@dataclass(frozen=True)
class FrameRates:
    """Angular rates and gravity frozen at the start of an interval.

    omega_in must equal omega_ie + omega_en; all vectors in N-U-E axes.
    """

    omega_ie: np.ndarray
    omega_en: np.ndarray
    omega_in: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        for name in ("omega_ie", "omega_en", "omega_in", "g"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        mismatch = np.max(np.abs(self.omega_in - (self.omega_ie + self.omega_en)))
        scale = max(1.0, float(np.max(np.abs(self.omega_in))))
        if mismatch > 1e-15 * scale:
            raise ValueError("omega_in must equal omega_ie + omega_en")


def frame_rates(state: NavState, model: EarthModel = WGS84) -> FrameRates:
    """Evaluate Earth rate, transport rate and gravity at a state."""
    w_ie = geo.earth_rate_n(state.p.lat, model)
    w_en = geo.transport_rate_n(state.v, state.p, model)
    return FrameRates(w_ie, w_en, w_ie + w_en, geo.gravity_n(state.p, model))


def _vel_derived(v, u, rates: FrameRates, dt, corrector_passes=1):
    """Predictor plus ``corrector_passes`` refinements of the Coriolis integral.

    Unlike the comparison families, the Coriolis integrand here carries the
    Earth rate only: the transport-rate half of the usual (2 w_ie + w_en)
    Coriolis term belongs to the navigation-frame rotation, which this
    formulation applies exactly once through the bracket rotation ``c_nav``.

    The specific-force integral and the gravity term are summed first: they
    cancel to the small Coriolis scale, which keeps the per-step rounding of
    the velocity change far below the terms the algorithm is designed to
    capture.
    """
    w = rates.omega_in
    c_nav = so3.nav_frame_rotation_second_order(w, dt)
    grav = dt * rates.g + (0.5 * dt * dt) * np.cross(w, rates.g)
    u_grav = u + grav
    c0 = np.cross(rates.omega_ie, v)
    coriolis = dt * c0 + (0.5 * dt * dt) * np.cross(w, c0)
    v_next = c_nav @ (v + (u_grav - coriolis))
    for _ in range(corrector_passes):
        # linear-velocity model between v and the current estimate of v_next
        c1 = np.cross(rates.omega_ie, v_next)
        coriolis = (
            (0.5 * dt) * c0
            + (dt * dt / 6.0) * np.cross(w, c0)
            + (0.5 * dt) * c1
            + (dt * dt / 3.0) * np.cross(w, c1)
        )
        v_next = c_nav @ (v + (u_grav - coriolis))
    return v_next


def velocity_update(
    alg: VelAlg, state: NavState, rates: FrameRates, imu: ImuInterval
) -> np.ndarray:
    """Ground velocity at the end of the interval, N-U-E axes."""
    v = state.v
    dt = imu.dt
    u = sculling_correction(state.c_bn, imu)
    w2 = 2.0 * rates.omega_ie + rates.omega_en
    common = v - dt * np.cross(w2, v) + dt * rates.g
    if alg is VelAlg.TN:
        return common + u
    if alg is VelAlg.SV1:
        return common + u - dt * np.cross(rates.omega_in, u)
    if alg is VelAlg.SV2:
        c_nav = so3.nav_frame_rotation_second_order(rates.omega_in, dt)
        return common + 0.5 * (c_nav @ u + u)
    return _vel_derived(v, u, rates, dt)


def position_increment(
    alg: PosAlg, state: NavState, v_next, rates: FrameRates, imu: ImuInterval
) -> np.ndarray:
    """Position increment over the interval, metres in N-U-E axes.

    ``v_next`` is the velocity already produced by the paired velocity
    update for the same interval.
    """
    v = state.v
    dt = imu.dt
    v_next = np.asarray(v_next, dtype=float)
    if alg is PosAlg.TN:
        return (0.5 * dt) * (v + v_next)

    u = sculling_correction(state.c_bn, imu)
    i_u = scrolling_correction(state.c_bn, imu)
    w = rates.omega_in
    c_nav = so3.nav_frame_rotation_second_order(w, dt)
    if alg in (PosAlg.SV1, PosAlg.SV2):
        w2 = 2.0 * rates.omega_ie + rates.omega_en
        frac = 1.0 / 3.0 if alg is PosAlg.SV1 else 1.0 / 6.0
        return (
            dt * v
            + i_u
            + (0.5 * dt * dt) * (rates.g - np.cross(w2, v))
            + (frac * dt) * (c_nav @ u - u)
        )

    a1 = np.cross(rates.omega_ie, v)
    a2 = np.cross(rates.omega_ie, v_next)
    bracket = (
        dt * v
        + i_u
        - ((dt**2 / 3.0) * a1 + (dt**3 / 12.0) * np.cross(w, a1))
        - ((dt**2 / 6.0) * a2 + (dt**3 / 12.0) * np.cross(w, a2))
        + ((dt**2 / 2.0) * rates.g + (dt**3 / 6.0) * np.cross(w, rates.g))
    )
    r_pred = c_nav @ bracket
    # refinement of the single frame-rotation integral with a linear model
    # of the in-interval position: r = r_pred + C*(dt/2 I + dt^2/3 w x)(w x) r,
    # iterated to convergence (the contraction factor is ~dt|w|/2, so three
    # passes land at the fixed point to double precision)
    r = r_pred
    for _ in range(3):
        q = np.cross(w, r)
        r = r_pred + c_nav @ ((0.5 * dt) * q + (dt * dt / 3.0) * np.cross(w, q))
    return r


def apply_position(
    p: GeodeticPosition, r, model: EarthModel = WGS84
) -> GeodeticPosition:
    """Advance a geodetic position by an N-U-E increment ``r`` (m).

    Uses the curvature matrix evaluated at ``p`` (start of interval); valid
    for increments much smaller than the Earth radius.
    """
    r = np.asarray(r, dtype=float)
    if np.linalg.norm(r) >= 1e5:
        raise ValueError("position increment too large for the local-level map")
    dp = geo.curvature_matrix(p, model) @ r
    return GeodeticPosition(p.lon + dp[0], p.lat + dp[1], p.h + dp[2])


def attitude_update(c_bn, omega_in, imu: ImuInterval) -> np.ndarray:
    """Chain the body and navigation frame rotations over one interval.

    The new body-to-nav DCM is the exact navigation-frame rotation over the
    interval, times the old DCM, times the two-sample body rotation update.
    """
    c_nav = so3.nav_frame_rotation(omega_in, imu.dt)
    c_body = so3.body_rotation_update(imu.dtheta1, imu.dtheta2)
    return c_nav @ (np.asarray(c_bn) @ c_body)


def step_once(
    state: NavState,
    imu: ImuInterval,
    vel_alg: VelAlg = VelAlg.DERIVED,
    pos_alg: PosAlg = PosAlg.DERIVED,
    model: EarthModel = WGS84,
    integrate_attitude: bool = True,
) -> NavState:
    """Advance a navigation state by one update interval.

    Rates are evaluated at ``state`` (start of interval) and held for the
    whole step; the order is velocity, position, then attitude, all
    consuming start-of-interval quantities.
    """
    rates = frame_rates(state, model)
    v_next = velocity_update(vel_alg, state, rates, imu)
    r = position_increment(pos_alg, state, v_next, rates, imu)
    p_next = apply_position(state.p, r, model)
    if integrate_attitude:
        c_next = attitude_update(state.c_bn, rates.omega_in, imu)
    else:
        c_next = state.c_bn
    return NavState(v_next, p_next, c_next)
