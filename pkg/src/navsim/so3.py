"""Rotation utilities on SO(3).

Vectors are plain numpy arrays of shape (3,); rotation matrices (direction
cosine matrices, DCMs) are numpy arrays of shape (3, 3).  A DCM returned by
this module maps coordinates of its source frame into its target frame; which
frames those are is documented at each call site rather than encoded in a
wrapper type.
"""

import numpy as np

__all__ = [
    "skew",
    "rotvec_to_dcm",
    "nav_frame_rotation",
    "nav_frame_rotation_second_order",
    "body_rotation_update",
]

# Below this angle the closed-form sin(a)/a and (1-cos(a))/a^2 factors lose
# digits to cancellation; interval rotations in this package are ~3e-6 rad,
# so the series branch is the common path.
_SMALL_ANGLE = 1e-7


def skew(v):
    """Return the skew-symmetric matrix M such that M @ q == cross(v, q)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rotvec_to_dcm(phi):
    """Rotation matrix exp(skew(phi)) for a rotation vector ``phi`` (rad).

    The direction of ``phi`` is the rotation axis and its norm the rotation
    angle.  Uses the Rodrigues closed form, switching to a truncated series
    for very small angles to avoid cancellation.

    Parameters
    ----------
    phi : array_like, shape (3,)
        Rotation vector in radians.

    Returns
    -------
    ndarray, shape (3, 3)
        Orthonormal rotation matrix with determinant +1.
    """
    phi = np.asarray(phi, dtype=float)
    angle2 = float(phi @ phi)
    K = skew(phi)
    if angle2 < _SMALL_ANGLE * _SMALL_ANGLE:
        s = 1.0 - angle2 / 6.0
        c = 0.5 - angle2 / 24.0
    else:
        angle = np.sqrt(angle2)
        s = np.sin(angle) / angle
        # half-angle form of (1 - cos a)/a^2: no cancellation at small angles
        half = np.sin(0.5 * angle) / angle
        c = 2.0 * half * half
    return np.eye(3) + s * K + c * (K @ K)


def nav_frame_rotation(omega_in, dt):
    """Exact rotation of the navigation frame over one update interval.

    Returns the DCM taking coordinates from the navigation frame at the
    start of the interval to the navigation frame at its end, assuming the
    frame's angular rate ``omega_in`` (rad/s) is constant over ``dt``
    seconds.  Frame coordinates rotate opposite to the frame itself, hence
    the negated rotation vector.
    """
    return rotvec_to_dcm(-dt * np.asarray(omega_in, dtype=float))


def nav_frame_rotation_second_order(omega_in, dt):
    """Navigation-frame rotation truncated at second order in ``dt``.

    I - dt*skew(w) + dt^2/2 * skew(w)^2.  This is the form the velocity and
    position update algorithms are designed around: their leading error
    terms only cancel as analyzed when the frame rotation is carried to
    exactly this order, so the update formulas must not silently upgrade it
    to the exact exponential (see updates module).
    """
    K = skew(omega_in)
    return np.eye(3) - dt * K + (0.5 * dt * dt) * (K @ K)


def body_rotation_update(dtheta1, dtheta2):
    """Body attitude change over one interval from two gyro increments.

    Standard two-sample coning update: the equivalent rotation vector is
    dtheta1 + dtheta2 + (2/3) cross(dtheta1, dtheta2), exact for angular
    rates varying linearly within the interval.  Returns the DCM taking
    body coordinates at the end of the interval to body coordinates at its
    start.
    """
    dtheta1 = np.asarray(dtheta1, dtype=float)
    dtheta2 = np.asarray(dtheta2, dtype=float)
    return rotvec_to_dcm(dtheta1 + dtheta2 + (2.0 / 3.0) * np.cross(dtheta1, dtheta2))
