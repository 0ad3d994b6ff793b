"""Hot inner loops for both solvers.

Every function here is written so that it runs unchanged as plain
numpy/Python or compiled by numba (see :mod:`ringratchet._jit`). Kernels
never raise on numerical trouble; they return the index of the step at
which a non-finite value appeared (``-1`` when the run was clean) and the
Python wrappers turn that into :class:`~ringratchet.errors.NumericalBlowup`.
"""
from fractions import Fraction

import numpy as np

from ._jit import USE_NUMBA, njit

TWO_PI = 2.0 * np.pi
INV_TWO_PI = 1.0 / TWO_PI

# Tangent vector magnitude above which it is rescaled back to its initial size.
TANGENT_RESCALE_ABOVE = 1e6


# ---------------------------------------------------------------------------
# radix-2 FFT
# ---------------------------------------------------------------------------

def unit_phase(theta, reach=2, max_shift=1e-14):
    """``exp(i theta)`` nudged (by at most ``max_shift``) toward exact unit modulus.

    The plain ``np.exp`` result is off unit modulus by up to ~1e-16; a factor
    reused every step turns that into a steady norm drift. Candidates keep
    the real part within ``reach`` ulps of ``cos theta`` and solve for the
    imaginary part.
    """
    z = complex(np.exp(1j * theta))
    sign = 1.0 if z.imag >= 0 else -1.0
    best, err = z, abs(Fraction(z.real) ** 2 + Fraction(z.imag) ** 2 - 1)
    for i in range(-reach, reach + 1):
        re = z.real + i * np.spacing(z.real)
        if abs(re) > 1:
            continue
        im0 = sign * float(np.sqrt(float(1 - Fraction(re) ** 2)))
        for j in range(-reach, reach + 1):
            cand = complex(re, im0 + j * np.spacing(im0))
            if abs(cand - z) > max_shift:
                continue
            e = abs(Fraction(cand.real) ** 2 + Fraction(cand.imag) ** 2 - 1)
            if e < err:
                best, err = cand, e
    return best


def fft_plan(n):
    """Bit-reversal permutation and twiddle factors for a length-``n`` FFT."""
    if n < 2 or n & (n - 1):
        raise ValueError(f"FFT length must be a power of two >= 2, got {n}")
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    twiddles = np.array([unit_phase(-2.0 * np.pi * k / n) for k in range(n // 2)])
    return rev, twiddles


def _radix2(a, rev, twiddles, inverse):
    # In-place iterative Cooley-Tukey; numpy sign/normalisation conventions.
    n = a.shape[0]
    for i in range(n):
        j = rev[i]
        if j > i:
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp
    size = 2
    while size <= n:
        half = size // 2
        stride = n // size
        for start in range(0, n, size):
            for k in range(half):
                w = twiddles[k * stride]
                if inverse:
                    w = w.conjugate()
                u = a[start + k]
                v = a[start + k + half] * w
                a[start + k] = u + v
                a[start + k + half] = u - v
        size *= 2
    if inverse:
        scale = 1.0 / n
        for i in range(n):
            a[i] *= scale


def _numpy_transform(a, rev, twiddles, inverse):
    if inverse:
        a[:] = np.fft.ifft(a)
    else:
        a[:] = np.fft.fft(a)


radix2_fft = njit(_radix2)
transform = radix2_fft if USE_NUMBA else _numpy_transform


# ---------------------------------------------------------------------------
# split-step spectral propagator
# ---------------------------------------------------------------------------

@njit
def _record_spectral(c, wavenumber, nyquist, nmax, curr, weights, norms, s, m):
    n = c.shape[0]
    scale = TWO_PI / (n * n)
    total = 0.0
    cur = 0.0
    for k in range(n):
        p = (c[k].real * c[k].real + c[k].imag * c[k].imag) * scale
        total += p
        if k != nyquist:
            cur += wavenumber[k] * p
    curr[s, m] = cur
    norms[s, m] = total
    for j in range(2 * nmax + 1):
        k = j - nmax
        if k < 0:
            k += n
        p = c[k]
        weights[s, m, j] = (p.real * p.real + p.imag * p.imag) * scale


@njit
def gp_propagate(ck, x_sin, wavenumber, kin_step, g, K, omega, t0, dt, nsteps,
                 stride, nmax, rev, twiddles, curr, weights, norms, overlaps):
    """Advance a batch of fields by ``nsteps`` Strang steps, in place.

    ``ck`` has shape ``(members, N)`` and holds the unnormalised (numpy
    convention) FFT of the grid samples of each member. ``kin_step`` holds
    ``exp(-i k^2 dt / 4) - 1`` per wavenumber; the half kinetic step is
    applied as ``c += c * kin_step``, which keeps the factor's modulus at 1
    to far below round-off (a stored ``exp`` is off by ~1e-16, and that bias
    would accumulate every step). Observables are
    written at sample rows ``0 .. nsteps // stride``; row 0 is the input.
    ``overlaps[s, m]`` is ``|<psi_0|psi_m>|`` at sample ``s``.
    Returns the 1-based step index of a blow-up, or -1.
    """
    members = ck.shape[0]
    n = ck.shape[1]
    nyquist = n // 2
    ov_scale = TWO_PI / (n * n)

    for m in range(members):
        _record_spectral(ck[m], wavenumber, nyquist, nmax, curr, weights,
                         norms, 0, m)
        acc = 0j
        for k in range(n):
            acc += ck[0, k].conjugate() * ck[m, k]
        overlaps[0, m] = abs(acc) * ov_scale

    s = 0
    for step in range(nsteps):
        drive = K * np.sin(omega * (t0 + (step + 0.5) * dt))
        for m in range(members):
            c = ck[m]
            c += c * kin_step
            transform(c, rev, twiddles, True)
            dens = c.real * c.real + c.imag * c.imag
            if not np.isfinite(dens.sum()):
                return step + 1
            phase = (g * dens + drive * x_sin) * dt
            c *= np.cos(phase) - 1j * np.sin(phase)
            transform(c, rev, twiddles, False)
            c += c * kin_step
        if (step + 1) % stride == 0:
            s += 1
            for m in range(members):
                _record_spectral(ck[m], wavenumber, nyquist, nmax, curr,
                                 weights, norms, s, m)
                acc = 0j
                for k in range(n):
                    acc += ck[0, k].conjugate() * ck[m, k]
                overlaps[s, m] = abs(acc) * ov_scale
    return -1


# ---------------------------------------------------------------------------
# three-mode model
# ---------------------------------------------------------------------------

@njit
def tmm_derivs(A, B, C, t, g, K, omega):
    gg = g * INV_TWO_PI
    d = 0.5 * K * np.sin(omega * t)
    a2 = A.real * A.real + A.imag * A.imag
    b2 = B.real * B.real + B.imag * B.imag
    c2 = C.real * C.real + C.imag * C.imag
    # i dX/dt = h_X, so dX/dt = -i h_X
    hA = gg * ((a2 + 2.0 * b2 + 2.0 * c2) * A + B * B * C.conjugate()) \
        + 0.5 * A + 1j * d * B
    hB = gg * ((2.0 * a2 + b2 + 2.0 * c2) * B + 2.0 * A * B.conjugate() * C) \
        - 1j * d * (A - C)
    hC = gg * ((2.0 * a2 + 2.0 * b2 + c2) * C + A.conjugate() * B * B) \
        + 0.5 * C - 1j * d * B
    return -1j * hA, -1j * hB, -1j * hC


@njit
def tangent_derivs(A, B, C, a, b, c, t, g, K, omega):
    """Linearised three-mode flow acting on the perturbation ``(a, b, c)``."""
    gg = g * INV_TWO_PI
    d = 0.5 * K * np.sin(omega * t)
    Ac = A.conjugate()
    Bc = B.conjugate()
    Cc = C.conjugate()
    ac = a.conjugate()
    bc = b.conjugate()
    cc = c.conjugate()
    A2 = A.real * A.real + A.imag * A.imag
    B2 = B.real * B.real + B.imag * B.imag
    C2 = C.real * C.real + C.imag * C.imag
    ha = gg * (2.0 * A2 * a + A * A * ac + B * B * cc + 2.0 * B * Cc * b
               + 2.0 * (B2 * a + A * Bc * b + A * B * bc)
               + 2.0 * (C2 * a + A * Cc * c + A * C * cc)) \
        + 0.5 * a + 1j * d * b
    hb = gg * (2.0 * B2 * b + B * B * bc
               + 2.0 * (A * Bc * c + A * C * bc + Bc * C * a)
               + 2.0 * (A * B * ac + Ac * B * a + A2 * b)
               + 2.0 * (C * B * cc + Cc * B * c + C2 * b)) \
        - 1j * d * (a - c)
    hc = gg * (2.0 * C2 * c + C * C * cc + B * B * ac + 2.0 * Ac * B * b
               + 2.0 * (A2 * c + A * C * ac + Ac * C * a)
               + 2.0 * (B2 * c + B * C * bc + Bc * C * b)) \
        + 0.5 * c - 1j * d * b
    return -1j * ha, -1j * hb, -1j * hc


@njit
def _finite(z):
    return np.isfinite(z.real) and np.isfinite(z.imag)


@njit
def tmm_propagate(A, B, C, g, K, omega, t0, dt, nsteps, stride, out):
    """Classical RK4 on the three amplitudes; samples written to ``out``.

    ``out`` has shape ``(nsteps // stride + 1, 3)``. Returns -1 or the
    1-based step index of a blow-up.
    """
    out[0, 0] = A
    out[0, 1] = B
    out[0, 2] = C
    s = 0
    h = 0.5 * dt
    for step in range(nsteps):
        t = t0 + step * dt
        k1A, k1B, k1C = tmm_derivs(A, B, C, t, g, K, omega)
        k2A, k2B, k2C = tmm_derivs(A + h * k1A, B + h * k1B, C + h * k1C,
                                   t + h, g, K, omega)
        k3A, k3B, k3C = tmm_derivs(A + h * k2A, B + h * k2B, C + h * k2C,
                                   t + h, g, K, omega)
        k4A, k4B, k4C = tmm_derivs(A + dt * k3A, B + dt * k3B, C + dt * k3C,
                                   t + dt, g, K, omega)
        A = A + dt / 6.0 * (k1A + 2.0 * k2A + 2.0 * k3A + k4A)
        B = B + dt / 6.0 * (k1B + 2.0 * k2B + 2.0 * k3B + k4B)
        C = C + dt / 6.0 * (k1C + 2.0 * k2C + 2.0 * k3C + k4C)
        if not (_finite(A) and _finite(B) and _finite(C)):
            return step + 1
        if (step + 1) % stride == 0:
            s += 1
            out[s, 0] = A
            out[s, 1] = B
            out[s, 2] = C
    return -1


@njit
def tangent_propagate(A, B, C, a, b, c, g, K, omega, t0, dt, nsteps, stride,
                      out_state, out_eps, out_logscale):
    """Joint RK4 on the amplitudes and their tangent vector.

    When the tangent vector's 2-norm exceeds ``TANGENT_RESCALE_ABOVE`` it is
    scaled back to its initial norm and the log of the factor removed is
    accumulated in ``out_logscale``.
    """
    ref = np.sqrt(abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2)
    logscale = 0.0
    out_state[0, 0] = A
    out_state[0, 1] = B
    out_state[0, 2] = C
    out_eps[0, 0] = a
    out_eps[0, 1] = b
    out_eps[0, 2] = c
    out_logscale[0] = 0.0
    s = 0
    h = 0.5 * dt
    for step in range(nsteps):
        t = t0 + step * dt
        k1A, k1B, k1C = tmm_derivs(A, B, C, t, g, K, omega)
        l1a, l1b, l1c = tangent_derivs(A, B, C, a, b, c, t, g, K, omega)

        A2 = A + h * k1A
        B2 = B + h * k1B
        C2 = C + h * k1C
        a2 = a + h * l1a
        b2 = b + h * l1b
        c2 = c + h * l1c
        k2A, k2B, k2C = tmm_derivs(A2, B2, C2, t + h, g, K, omega)
        l2a, l2b, l2c = tangent_derivs(A2, B2, C2, a2, b2, c2, t + h, g, K,
                                       omega)

        A3 = A + h * k2A
        B3 = B + h * k2B
        C3 = C + h * k2C
        a3 = a + h * l2a
        b3 = b + h * l2b
        c3 = c + h * l2c
        k3A, k3B, k3C = tmm_derivs(A3, B3, C3, t + h, g, K, omega)
        l3a, l3b, l3c = tangent_derivs(A3, B3, C3, a3, b3, c3, t + h, g, K,
                                       omega)

        A4 = A + dt * k3A
        B4 = B + dt * k3B
        C4 = C + dt * k3C
        a4 = a + dt * l3a
        b4 = b + dt * l3b
        c4 = c + dt * l3c
        k4A, k4B, k4C = tmm_derivs(A4, B4, C4, t + dt, g, K, omega)
        l4a, l4b, l4c = tangent_derivs(A4, B4, C4, a4, b4, c4, t + dt, g, K,
                                       omega)

        w = dt / 6.0
        A = A + w * (k1A + 2.0 * k2A + 2.0 * k3A + k4A)
        B = B + w * (k1B + 2.0 * k2B + 2.0 * k3B + k4B)
        C = C + w * (k1C + 2.0 * k2C + 2.0 * k3C + k4C)
        a = a + w * (l1a + 2.0 * l2a + 2.0 * l3a + l4a)
        b = b + w * (l1b + 2.0 * l2b + 2.0 * l3b + l4b)
        c = c + w * (l1c + 2.0 * l2c + 2.0 * l3c + l4c)
        if not (_finite(A) and _finite(B) and _finite(C)
                and _finite(a) and _finite(b) and _finite(c)):
            return step + 1
        size = np.sqrt(abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2)
        if size > TANGENT_RESCALE_ABOVE:
            f = ref / size
            a = a * f
            b = b * f
            c = c * f
            logscale += np.log(size / ref)
        if (step + 1) % stride == 0:
            s += 1
            out_state[s, 0] = A
            out_state[s, 1] = B
            out_state[s, 2] = C
            out_eps[s, 0] = a
            out_eps[s, 1] = b
            out_eps[s, 2] = c
            out_logscale[s] = logscale
    return -1
