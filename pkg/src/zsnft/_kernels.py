"""Compiled inner loops for transfer-matrix and Runge-Kutta propagation.

Scheme codes are plain integers here; :mod:`zsnft.zss` owns the public enum.
All kernels are ``nogil`` so thread pools get real parallelism.

b is reported as -phi2(L) e^{-i xi L}, the sign convention in which the
rectangle b = A sin(2kL)/k and the single soliton has norming constant i.
"""

import math

import numpy as np
from numba import njit

BO, BOMOD, AL, ALMOD, CN, RK4 = 0, 1, 2, 3, 4, 5

OK, OVERFLOW, NONFINITE = 0, 1, 2

_INV_FACT = np.array([1.0 / math.factorial(k) for k in range(26)])


@njit(cache=True, nogil=True)
def _qexp(q, s):
    # q * exp(s) without inf * 0 when Re s is huge and q tiny
    aq = abs(q)
    if aq == 0.0:
        return 0j
    return np.exp(s + np.log(aq)) * (q / aq)


@njit(cache=True, nogil=True)
def _bo_cs(z, dt):
    """cosh(k dt), sinh(k dt)/k and their z-derivatives, k^2 = z."""
    w = z * dt * dt
    if abs(w) < 0.1:
        c = 0j
        s = 0j
        dc = 0j
        ds = 0j
        wk = 1.0 + 0j
        wkm1 = 0j
        for k in range(12):
            c += wk * _INV_FACT[2 * k]
            s += wk * _INV_FACT[2 * k + 1]
            if k > 0:
                dc += k * wkm1 * _INV_FACT[2 * k]
                ds += k * wkm1 * _INV_FACT[2 * k + 1]
            wkm1 = wk
            wk = wk * w
        return c, dt * s, dt * dt * dc, dt * dt * dt * ds
    kap = np.sqrt(z)
    c = np.cosh(kap * dt)
    s = np.sinh(kap * dt) / kap
    dc = 0.5 * dt * s
    ds = (dt * c - s) / (2.0 * z)
    return c, s, dc, ds


@njit(cache=True, nogil=True)
def step_matrix(code, qm, qn, xi, dt, tm):
    """One-step transfer matrix and its xi-derivative as two 4-tuples."""
    if code == BO:
        z = -(qm.real * qm.real + qm.imag * qm.imag) - xi * xi
        c, s, dc, ds = _bo_cs(z, dt)
        cp = dc * (-2.0 * xi)
        sp = ds * (-2.0 * xi)
        t = (c - 1j * xi * s, qm * s, -np.conj(qm) * s, c + 1j * xi * s)
        d = (cp - 1j * xi * sp - 1j * s, qm * sp, -np.conj(qm) * sp,
             cp + 1j * xi * sp + 1j * s)
        return t, d
    if code == AL:
        nrm = 1.0 / np.sqrt(1.0 + dt * dt * abs(qm) ** 2)
        e = np.exp(-1j * xi * dt)
        ei = np.exp(1j * xi * dt)
        t = (nrm * e, nrm * dt * qm, -nrm * dt * np.conj(qm), nrm * ei)
        d = (-1j * dt * nrm * e, 0j, 0j, 1j * dt * nrm * ei)
        return t, d
    if code == BOMOD:
        aq = abs(qm)
        c = np.cos(aq * dt) + 0j
        s = np.sin(aq * dt)
        if aq == 0.0:
            return (c, 0j, 0j, c), (0j, 0j, 0j, 0j)
        u = _qexp(qm / aq * s, 2j * xi * tm)
        v = _qexp(np.conj(qm) / aq * s, -2j * xi * tm)
        t = (c, u, -v, c)
        d = (0j, 2j * tm * u, 2j * tm * v, 0j)
        return t, d
    if code == ALMOD:
        nrm = 1.0 / np.sqrt(1.0 + dt * dt * abs(qm) ** 2)
        u = _qexp(nrm * dt * qm, 2j * xi * tm)
        v = _qexp(nrm * dt * np.conj(qm), -2j * xi * tm)
        t = (nrm + 0j, u, -v, nrm + 0j)
        d = (0j, 2j * tm * u, 2j * tm * v, 0j)
        return t, d
    # CN: T = A^{-1} B, A = I - h P(qn), B = I + h P(qm), dP/dxi = diag(-i, i)
    h = 0.5 * dt
    a11 = 1.0 + 1j * h * xi
    a12 = -h * qn
    a21 = h * np.conj(qn)
    a22 = 1.0 - 1j * h * xi
    det = a11 * a22 - a12 * a21
    i11 = a22 / det
    i12 = -a12 / det
    i21 = -a21 / det
    i22 = a11 / det
    b11 = 1.0 - 1j * h * xi
    b12 = h * qm
    b21 = -h * np.conj(qm)
    b22 = 1.0 + 1j * h * xi
    t11 = i11 * b11 + i12 * b21
    t12 = i11 * b12 + i12 * b22
    t21 = i21 * b11 + i22 * b21
    t22 = i21 * b12 + i22 * b22
    # dT = A^{-1} (h D) (T + I)
    m11 = -1j * h * (t11 + 1.0)
    m12 = -1j * h * t12
    m21 = 1j * h * t21
    m22 = 1j * h * (t22 + 1.0)
    d = (i11 * m11 + i12 * m21, i11 * m12 + i12 * m22,
         i21 * m11 + i22 * m21, i21 * m12 + i22 * m22)
    return (t11, t12, t21, t22), d


@njit(cache=True, nogil=True)
def _bad(x1, x2, cap):
    m = max(abs(x1), abs(x2))
    if m != m or m == np.inf:
        return NONFINITE
    if m > cap:
        return OVERFLOW
    return OK


@njit(cache=True, nogil=True)
def propagate(code, q, dt, L, xis, want_deriv, cap, a_out, b_out, ap_out, status):
    """Left-to-right propagation over all cells for each xi in ``xis``."""
    n = q.size
    envelope = code == BOMOD or code == ALMOD
    if code == CN:
        t_start = -L + 0.5 * dt
        t_end = L + 0.5 * dt
    else:
        t_start = -L
        t_end = L
    for j in range(xis.size):
        xi = xis[j]
        # raw schemes run on Phi * e^{i xi t_start}, so the start is (1, 0)
        # and the phases are applied once at the end via _qexp
        x1 = 1.0 + 0j
        x2 = 0j
        y1 = 0j if envelope else -1j * t_start + 0j
        y2 = 0j
        st = OK
        for m in range(n):
            tm = -L + (m + 0.5) * dt
            qn = q[m + 1] if m + 1 < n else 0j
            t, d = step_matrix(code, q[m], qn, xi, dt, tm)
            if want_deriv:
                ny1 = d[0] * x1 + d[1] * x2 + t[0] * y1 + t[1] * y2
                ny2 = d[2] * x1 + d[3] * x2 + t[2] * y1 + t[3] * y2
                y1 = ny1
                y2 = ny2
            nx1 = t[0] * x1 + t[1] * x2
            nx2 = t[2] * x1 + t[3] * x2
            x1 = nx1
            x2 = nx2
            st = _bad(x1, x2, cap)
            if st != OK:
                break
        status[j] = st
        if st != OK:
            a_out[j] = np.nan
            b_out[j] = np.nan
            ap_out[j] = np.nan
            continue
        if envelope:
            a_out[j] = x1
            b_out[j] = -x2
            ap_out[j] = y1
        else:
            s_a = 1j * xi * (t_end - t_start)
            s_b = -1j * xi * (t_end + t_start)
            a_out[j] = _qexp(x1, s_a)
            b_out[j] = -_qexp(x2, s_b)
            ap_out[j] = _qexp(y1 + 1j * t_end * x1, s_a)


@njit(cache=True, nogil=True)
def _rhs(t, x1, x2, q, xi):
    return _qexp(q, 2j * xi * t) * x2, -_qexp(np.conj(q), -2j * xi * t) * x1


@njit(cache=True, nogil=True)
def propagate_rk4(q_left, q_mid, q_right, dt, L, xis, cap, a_out, b_out, status):
    """Classic RK4 on the envelope system; q taken at the three stage times."""
    n = q_mid.size
    h2 = 0.5 * dt
    for j in range(xis.size):
        xi = xis[j]
        x1 = 1.0 + 0j
        x2 = 0j
        st = OK
        for m in range(n):
            t0 = -L + m * dt
            k11, k12 = _rhs(t0, x1, x2, q_left[m], xi)
            k21, k22 = _rhs(t0 + h2, x1 + h2 * k11, x2 + h2 * k12, q_mid[m], xi)
            k31, k32 = _rhs(t0 + h2, x1 + h2 * k21, x2 + h2 * k22, q_mid[m], xi)
            k41, k42 = _rhs(t0 + dt, x1 + dt * k31, x2 + dt * k32, q_right[m], xi)
            x1 = x1 + dt / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
            x2 = x2 + dt / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
            st = _bad(x1, x2, cap)
            if st != OK:
                break
        status[j] = st
        if st != OK:
            a_out[j] = np.nan
            b_out[j] = np.nan
        else:
            a_out[j] = x1
            b_out[j] = -x2


@njit(cache=True, nogil=True)
def bidirectional(code, q, dt, L, xi):
    """Left wave G from -L and right wave H from +L, both stopped at t = 0.

    Returns (G1, G2, H1, H2). Uses BO (code 0) or AL (code 2) steps; the
    left/right matrices are e^{+-i xi dt} times the raw one-step matrix.
    """
    n = q.size
    half = n // 2
    g1 = 1.0 + 0j
    g2 = 0j
    eL = np.exp(1j * xi * dt)
    for m in range(half):
        t, _ = step_matrix(code, q[m], 0j, xi, dt, 0.0)
        n1 = eL * (t[0] * g1 + t[1] * g2)
        n2 = eL * (t[2] * g1 + t[3] * g2)
        g1 = n1
        g2 = n2
    h1 = 0j
    h2 = 1.0 + 0j
    # backward: H_m = (e^{-i xi dt} T)^{-1} H_{m+1} = e^{i xi dt} adj(T) H_{m+1}
    for m in range(n - 1, half - 1, -1):
        t, _ = step_matrix(code, q[m], 0j, xi, dt, 0.0)
        n1 = eL * (t[3] * h1 - t[1] * h2)
        n2 = eL * (-t[2] * h1 + t[0] * h2)
        h1 = n1
        h2 = n2
    return g1, g2, h1, h2
