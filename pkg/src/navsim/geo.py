"""WGS-84 Earth model and the North-Up-East local-level frame.

All operations here use the N-U-E axis order: index 0 = north, 1 = up,
2 = east.  Velocity vectors are ordered [v_N, v_U, v_E] accordingly, and
geodetic position is (longitude, latitude, height).

Constants (semi-major axis, flattening, rotation rate, normal-gravity
coefficients) are the standard WGS-84 defining/derived values; see README
for sources.  ``EarthModel`` instances with modified rates or a constant
gravity value are supported for tests and synthetic configurations.
"""

from dataclasses import dataclass
from math import cos, sin, sqrt, tan, pi, floor

import numpy as np

__all__ = [
    "WGS84",
    "EarthModel",
    "GeodeticPosition",
    "PolarSingularity",
    "principal_radii",
    "curvature_matrix",
    "gravity_n",
    "earth_rate_n",
    "transport_rate_n",
    "horizontal_position_error",
]

# |cos(lat)| below this raises PolarSingularity; polar mechanizations are
# out of scope for this package.
COS_LAT_MIN = 1e-6

# Linear free-air gravity gradient, m/s^2 per metre of height.
FREE_AIR_GRADIENT = 3.086e-6


class PolarSingularity(Exception):
    """Raised when the local-level mechanization degenerates near a pole."""


@dataclass(frozen=True)
class EarthModel:
    """Reference ellipsoid, rotation rate and normal-gravity constants.

    ``constant_gravity`` replaces the Somigliana model with a fixed scalar
    when set (useful for unit tests); ``omega_e`` may be zeroed to turn the
    Earth's rotation off.
    """

    a: float = 6378137.0                # semi-major axis, m
    f: float = 1.0 / 298.257223563      # flattening
    omega_e: float = 7.292115e-5        # rotation rate, rad/s
    gamma_e: float = 9.7803253359       # equatorial normal gravity, m/s^2
    somigliana_k: float = 0.00193185265241
    constant_gravity: float | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("semi-major axis must be positive")
        if not 0 < self.f < 1:
            raise ValueError("flattening must lie in (0, 1)")
        if self.omega_e < 0:
            raise ValueError("omega_e must be non-negative")

    @property
    def e2(self) -> float:
        """Squared first eccentricity, 2f - f^2."""
        return self.f * (2.0 - self.f)


WGS84 = EarthModel()


def _wrap_lon(lon: float) -> float:
    """Wrap longitude to (-pi, pi]."""
    wrapped = lon - 2.0 * pi * floor((lon + pi) / (2.0 * pi))
    if wrapped <= -pi:
        wrapped = pi
    return wrapped


@dataclass(frozen=True)
class GeodeticPosition:
    """Geodetic position: longitude, latitude (rad) and height (m)."""

    lon: float
    lat: float
    h: float = 0.0

    def __post_init__(self):
        if not (abs(self.lat) <= pi / 2):
            raise ValueError(f"latitude {self.lat} outside [-pi/2, pi/2]")
        if not self.h > -6e6:
            raise ValueError(f"height {self.h} below centre of the Earth")
        object.__setattr__(self, "lon", _wrap_lon(self.lon))

    def as_array(self) -> np.ndarray:
        return np.array([self.lon, self.lat, self.h])


def principal_radii(lat: float, model: EarthModel = WGS84) -> tuple[float, float]:
    """Meridian and transverse radii of curvature at latitude ``lat``.

    Returns
    -------
    (R_N, R_E) : tuple of float
        Meridian radius R_N = a(1-e^2)/(1-e^2 sin^2 L)^(3/2) and transverse
        radius R_E = a/sqrt(1-e^2 sin^2 L), in metres.
    """
    s2 = sin(lat) ** 2
    den = 1.0 - model.e2 * s2
    sq = sqrt(den)
    r_e = model.a / sq
    r_n = model.a * (1.0 - model.e2) / (den * sq)
    return r_n, r_e


def curvature_matrix(p: GeodeticPosition, model: EarthModel = WGS84) -> np.ndarray:
    """Matrix mapping N-U-E ground velocity to geodetic position rates.

    d/dt [lon, lat, h] = R_c @ [v_N, v_U, v_E]:

        row 0: [0, 0, 1/((R_E+h) cos L)]
        row 1: [1/(R_N+h), 0, 0]
        row 2: [0, 1, 0]

    Raises
    ------
    PolarSingularity
        If |cos(lat)| < 1e-6, where the longitude rate is undefined.
    """
    c = cos(p.lat)
    if abs(c) < COS_LAT_MIN:
        raise PolarSingularity(f"latitude {p.lat} rad too close to a pole")
    r_n, r_e = principal_radii(p.lat, model)
    return np.array(
        [
            [0.0, 0.0, 1.0 / ((r_e + p.h) * c)],
            [1.0 / (r_n + p.h), 0.0, 0.0],
            [0.0, 1.0, 0.0],
        ]
    )


def gravity_magnitude(lat: float, h: float, model: EarthModel = WGS84) -> float:
    """Normal gravity (m/s^2): Somigliana formula plus linear free-air term."""
    if model.constant_gravity is not None:
        return model.constant_gravity
    s2 = sin(lat) ** 2
    gamma0 = model.gamma_e * (1.0 + model.somigliana_k * s2) / sqrt(1.0 - model.e2 * s2)
    return gamma0 - FREE_AIR_GRADIENT * h


def gravity_n(p: GeodeticPosition, model: EarthModel = WGS84) -> np.ndarray:
    """Gravity vector in N-U-E axes: [0, -gamma(L, h), 0]."""
    return np.array([0.0, -gravity_magnitude(p.lat, p.h, model), 0.0])


def earth_rate_n(lat: float, model: EarthModel = WGS84) -> np.ndarray:
    """Earth rotation rate resolved in N-U-E axes: [w_e cos L, w_e sin L, 0]."""
    return np.array([model.omega_e * cos(lat), model.omega_e * sin(lat), 0.0])


def transport_rate_n(v, p: GeodeticPosition, model: EarthModel = WGS84) -> np.ndarray:
    """Angular rate of the local-level frame relative to Earth, N-U-E axes.

    [v_E/(R_E+h), v_E tan L/(R_E+h), -v_N/(R_N+h)].  Consistent with
    ``curvature_matrix``: the longitude/latitude rates implied by this
    vector equal R_c @ v.
    """
    c = cos(p.lat)
    if abs(c) < COS_LAT_MIN:
        raise PolarSingularity(f"latitude {p.lat} rad too close to a pole")
    r_n, r_e = principal_radii(p.lat, model)
    v_n, _, v_e = np.asarray(v, dtype=float)
    return np.array(
        [
            v_e / (r_e + p.h),
            v_e * tan(p.lat) / (r_e + p.h),
            -v_n / (r_n + p.h),
        ]
    )


def horizontal_position_error(
    p_est: GeodeticPosition, p_true: GeodeticPosition, model: EarthModel = WGS84
) -> float:
    """Horizontal distance (m) between two nearby geodetic positions.

    Small-offset metric evaluated at ``p_true``:
    sqrt((dL*(R_N+h))^2 + (dlon*(R_E+h)*cos L)^2).
    """
    r_n, r_e = principal_radii(p_true.lat, model)
    dn = (p_est.lat - p_true.lat) * (r_n + p_true.h)
    de = (p_est.lon - p_true.lon) * (r_e + p_true.h) * cos(p_true.lat)
    return sqrt(dn * dn + de * de)
