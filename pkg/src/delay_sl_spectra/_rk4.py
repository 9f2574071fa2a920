"""Compiled RK4 sweep for y'' = -(q(x) y(x - delay(x)) + s^2 y) / p^2 on one half.

Everything that does not depend on s (coefficient values at the stage
abscissae, the location of every delayed point and its Hermite weights) is
tabulated beforehand, so the sweep is pure arithmetic.

Delayed-value modes per stage:
    0  delay is zero: use the stage state itself
    1  delayed point lies in a completed step ``j``: Hermite on [x_j, x_j+1]
    2  delayed point lies in the current step: Taylor predictor on the first
       pass, Hermite on the current step's provisional end values afterwards
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _delayed(mode, j, w, theta, ystage, y, v, k, h, y1, v1, acc, predictor):
    if mode == 0:
        return ystage
    if mode == 1:
        return w[0] * y[j] + w[1] * h * v[j] + w[2] * y[j + 1] + w[3] * h * v[j + 1]
    if predictor:
        dt = theta * h
        return y[k] + dt * (v[k] + 0.5 * dt * acc)
    return w[0] * y[k] + w[1] * h * v[k] + w[2] * y1 + w[3] * h * v1


@njit(cache=True)
def sweep(y0, v0, h, s2, inv_p2, qv, mode, jidx, wts, theta, has_cur, passes):
    n = qv.shape[0]
    y = np.empty(n + 1)
    v = np.empty(n + 1)
    y[0] = y0
    v[0] = v0
    for k in range(n):
        yk = y[k]
        vk = v[k]
        y1 = yk
        v1 = vk
        acc = 0.0
        npass = passes + 1 if has_cur[k] else 1
        for it in range(npass):
            pred = it == 0
            # stage 1 at x_k
            yd = _delayed(mode[k, 0], jidx[k, 0], wts[k, 0], theta[k, 0], yk,
                          y, v, k, h, y1, v1, acc, pred)
            a1 = -(qv[k, 0] * yd + s2 * yk) * inv_p2
            acc = a1
            # stage 2 at x_k + h/2
            ys = yk + 0.5 * h * vk
            vs = vk + 0.5 * h * a1
            yd = _delayed(mode[k, 1], jidx[k, 1], wts[k, 1], theta[k, 1], ys,
                          y, v, k, h, y1, v1, acc, pred)
            dy2 = vs
            a2 = -(qv[k, 1] * yd + s2 * ys) * inv_p2
            # stage 3 at x_k + h/2
            ys = yk + 0.5 * h * dy2
            vs = vk + 0.5 * h * a2
            yd = _delayed(mode[k, 1], jidx[k, 1], wts[k, 1], theta[k, 1], ys,
                          y, v, k, h, y1, v1, acc, pred)
            dy3 = vs
            a3 = -(qv[k, 1] * yd + s2 * ys) * inv_p2
            # stage 4 at x_k + h
            ys = yk + h * dy3
            vs = vk + h * a3
            yd = _delayed(mode[k, 2], jidx[k, 2], wts[k, 2], theta[k, 2], ys,
                          y, v, k, h, y1, v1, acc, pred)
            dy4 = vs
            a4 = -(qv[k, 2] * yd + s2 * ys) * inv_p2
            y1 = yk + h / 6.0 * (vk + 2.0 * dy2 + 2.0 * dy3 + dy4)
            v1 = vk + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        y[k + 1] = y1
        v[k + 1] = v1
    return y, v
