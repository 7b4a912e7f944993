"""Compiled kernels: Dormand-Prince 5(4) with FSAL and per-component error control.

All right-hand sides share the signature ``rhs(x, y, coef, mu, out)`` where
``coef`` holds the potential's float coefficients (ascending) and ``mu`` is the
spectral energy in ``-y'' + V y = mu y``.  The integrator selects one by an
integer code rather than taking it as an argument, which keeps the compiled
code in the on-disk cache.
"""

import numpy as np
from numba import njit

# Dormand & Prince (1980) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)


@njit(cache=True)
def poly(c, x):
    acc = 0.0
    for i in range(c.size - 1, -1, -1):
        acc = acc * x + c[i]
    return acc


@njit(cache=True)
def rhs_linear(x, y, c, mu, out):
    # y = (u, u', v, v') with optional mu-sensitivities appended
    q = poly(c, x) - mu
    out[0] = y[1]
    out[1] = q * y[0]
    out[2] = y[3]
    out[3] = q * y[2]
    if y.size == 8:
        out[4] = y[5]
        out[5] = q * y[4] - y[0]
        out[6] = y[7]
        out[7] = q * y[6] - y[2]


@njit(cache=True)
def rhs_riccati_u(x, y, c, mu, out):
    # p = u/u', I = int (1/p - 1/x); log u(x) = I + log x
    q = poly(c, x) - mu
    p = y[0]
    out[0] = 1.0 - q * p * p
    out[2] = p * p - 2.0 * q * p * y[2]
    if x > 0.0 and p != 0.0:
        out[1] = 1.0 / p - 1.0 / x
        out[3] = -y[2] / (p * p)
    else:
        out[1] = 0.0
        out[3] = 0.0


@njit(cache=True)
def rhs_riccati_f(x, y, c, mu, out):
    # q = f/f' with f(L) = 0, integrated from L back to 0
    q = poly(c, x) - mu
    r = y[0]
    out[0] = 1.0 - q * r * r
    out[1] = r * r - 2.0 * q * r * y[1]


LINEAR, RICCATI_U, RICCATI_F = 0, 1, 2


@njit(cache=True)
def rhs(kind, x, y, c, mu, out):
    if kind == LINEAR:
        rhs_linear(x, y, c, mu, out)
    elif kind == RICCATI_U:
        rhs_riccati_u(x, y, c, mu, out)
    else:
        rhs_riccati_f(x, y, c, mu, out)


@njit(cache=True)
def dopri5(kind, xs, y0, c, mu, rtol, atol, h0, max_steps):
    """Integrate through the points ``xs`` (monotone), recording the state at each.

    Returns ``(ys, steps, ok)``.
    """
    n = y0.size
    m = xs.size
    ys = np.empty((m, n), dtype=y0.dtype)
    ys[0] = y0
    y = y0.copy()
    x = xs[0]
    direction = 1.0 if xs[m - 1] >= xs[0] else -1.0
    k1 = np.empty_like(y)
    k2 = np.empty_like(y)
    k3 = np.empty_like(y)
    k4 = np.empty_like(y)
    k5 = np.empty_like(y)
    k6 = np.empty_like(y)
    k7 = np.empty_like(y)
    yt = np.empty_like(y)
    yn = np.empty_like(y)
    rhs(kind, x, y, c, mu, k1)
    h = abs(h0)
    steps = 0
    for i in range(1, m):
        target = xs[i]
        while (target - x) * direction > 0.0:
            remaining = abs(target - x)
            last = h >= remaining
            hh = remaining if last else h
            hs = direction * hh
            for j in range(n):
                yt[j] = y[j] + hs * A21 * k1[j]
            rhs(kind, x + C2 * hs, yt, c, mu, k2)
            for j in range(n):
                yt[j] = y[j] + hs * (A31 * k1[j] + A32 * k2[j])
            rhs(kind, x + C3 * hs, yt, c, mu, k3)
            for j in range(n):
                yt[j] = y[j] + hs * (A41 * k1[j] + A42 * k2[j] + A43 * k3[j])
            rhs(kind, x + C4 * hs, yt, c, mu, k4)
            for j in range(n):
                yt[j] = y[j] + hs * (A51 * k1[j] + A52 * k2[j] + A53 * k3[j] + A54 * k4[j])
            rhs(kind, x + C5 * hs, yt, c, mu, k5)
            for j in range(n):
                yt[j] = y[j] + hs * (A61 * k1[j] + A62 * k2[j] + A63 * k3[j]
                                     + A64 * k4[j] + A65 * k5[j])
            rhs(kind, x + hs, yt, c, mu, k6)
            for j in range(n):
                yn[j] = y[j] + hs * (B1 * k1[j] + B3 * k3[j] + B4 * k4[j]
                                     + B5 * k5[j] + B6 * k6[j])
            xn = target if last else x + hs
            rhs(kind, xn, yn, c, mu, k7)
            err = 0.0
            for j in range(n):
                e = hs * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j]
                          + E6 * k6[j] + E7 * k7[j])
                sc = atol[j] + rtol * max(abs(y[j]), abs(yn[j]))
                r = abs(e) / sc
                if r > err:
                    err = r
            steps += 1
            if steps > max_steps:
                return ys, steps, False
            if err <= 1.0:
                x = xn
                for j in range(n):
                    y[j] = yn[j]
                    k1[j] = k7[j]
                fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                if not last:
                    h = hh * fac
                elif fac < 1.0:
                    h = min(h, hh * fac)
            else:
                h = hh * max(0.2, 0.9 * err ** -0.2)
                if h < 1e-15 * max(1.0, abs(x)):
                    return ys, steps, False
        ys[i] = y
    return ys, steps, True
