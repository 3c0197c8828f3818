"""Two-sample sculling and scrolling corrections.

An update interval of length T carries two gyro increment samples
(dtheta1, dtheta2) and two accelerometer increment samples (dv1, dv2), one
per half-interval.  From these the single integral of the transformed
specific force (velocity contribution, "sculling") and its double integral
(position contribution, "scrolling") are approximated.  Both formulas are
exact for angular rate and specific force varying linearly in time.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["ImuInterval", "sculling_correction", "scrolling_correction"]


@dataclass(frozen=True)
class ImuInterval:
    """Ideal two-sample IMU increments over one update interval.

    dtheta1/dtheta2 are integrals of body angular rate (rad) and dv1/dv2
    integrals of specific force (m/s) over the first/second half-interval.
    """

    dtheta1: np.ndarray
    dtheta2: np.ndarray
    dv1: np.ndarray
    dv2: np.ndarray
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("interval length must be positive")
        for name in ("dtheta1", "dtheta2", "dv1", "dv2"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,) or not np.all(np.isfinite(vec)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, vec)
        big = max(np.linalg.norm(self.dtheta1), np.linalg.norm(self.dtheta2))
        if big >= 0.1:
            raise ValueError(
                f"gyro increment {big:.3g} rad outside the two-sample small-angle regime"
            )


def sculling_correction(c_bn, imu: ImuInterval) -> np.ndarray:
    """Integral of the transformed specific force over one interval (m/s).

    Two-sample approximation of int_{tk}^{tk+1} C_b(t)^b(tk) f dt, rotated
    into the navigation frame by ``c_bn`` (body-to-nav DCM at the start of
    the interval):

        C (dv1+dv2 + 1/2 (dth1+dth2) x (dv1+dv2)
             + 2/3 (dth1 x dv2 + dv1 x dth2))
    """
    th1, th2, dv1, dv2 = imu.dtheta1, imu.dtheta2, imu.dv1, imu.dv2
    dv = dv1 + dv2
    body = (
        dv
        + 0.5 * np.cross(th1 + th2, dv)
        + (2.0 / 3.0) * (np.cross(th1, dv2) + np.cross(dv1, th2))
    )
    return np.asarray(c_bn) @ body


def scrolling_correction(c_bn, imu: ImuInterval) -> np.ndarray:
    """Double integral of the transformed specific force (m).

    Two-sample approximation of int int C_b(tau)^b(tk) f dtau dt over the
    interval, rotated by ``c_bn``:

        (T/30) C (25 dv1 + 5 dv2 + 12 dth1 x dv1 + 8 dth1 x dv2
                    + 2 dv1 x dth2 + 2 dth2 x dv2)
    """
    th1, th2, dv1, dv2 = imu.dtheta1, imu.dtheta2, imu.dv1, imu.dv2
    body = (
        25.0 * dv1
        + 5.0 * dv2
        + 12.0 * np.cross(th1, dv1)
        + 8.0 * np.cross(th1, dv2)
        + 2.0 * np.cross(dv1, th2)
        + 2.0 * np.cross(th2, dv2)
    )
    return (imu.dt / 30.0) * (np.asarray(c_bn) @ body)
