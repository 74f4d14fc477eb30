# -*- coding: utf-8 -*-
"""
Numerical tolerances shared by every module of flagfold.

Created on Mon Oct 19 09:12:40 2026
"""

import numpy as np
from typing import Union, List

## validation tolerances
SUM_TOL = 1e-12
SYM_TOL = 1e-12
SKEW_TOL = 1e-12
PSD_CLAMP = 1e-10
ORTHO_TOL = 1e-10
STATE_SUM_TOL = 1e-9
STATE_ORTHO_TOL = 1e-8

## defaults for the adjustable tolerances (see utils for env overrides)
ZERO_TOL = 1e-9
MU_MIN = 1e-3
SINGULAR_TOL = 1e-8
DRIFT_TOL = 1e-6

## weight of the frame part of the metric: sum over i != j, i.e. twice the i < j sum
FRAME_WEIGHT = 2.0

## principal angles below this are reported as 0
ANGLE_SNAP = 1e-8
SIGN_TOL = 1e-9
JACOBIAN_TOL = 1e-12

SIGNIFICANT_DIGITS = 12
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"

pi = np.pi
sqrt3 = np.sqrt(3.0)


def volume_unit_ball(d: Union[int, float, List[Union[int, float]], np.ndarray]) -> Union[float, np.ndarray]:
    from scipy.special import gamma

    if isinstance(d, list):
        d = np.array(d)
    return pi ** (d / 2.0) / gamma(d / 2.0 + 1.0)
