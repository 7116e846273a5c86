# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the numeric kernels.

Scalar twin of _pure.py: same Philox4x32-10 stream layout, same AS241
coefficients and evaluation order, same per-path payoff arithmetic.
Integer results are bit-identical to the numpy backend; float results
agree to rounding of the platform transcendental functions. Built with
FP contraction off so the arithmetic stays a plain IEEE sequence.
"""

from libc.math cimport exp, fabs, log, pow, sqrt
from libc.stdint cimport uint32_t, uint64_t

import numpy as np


cdef inline void _philox10(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                           uint32_t k0, uint32_t k1, uint32_t* out) nogil:
    cdef int rnd
    cdef uint64_t p0, p1
    cdef uint32_t hi0, lo0, hi1, lo1, t0, t2
    for rnd in range(10):
        if rnd:
            k0 = k0 + <uint32_t>0x9E3779B9u
            k1 = k1 + <uint32_t>0xBB67AE85u
        p0 = (<uint64_t>0xD2511F53u) * c0
        p1 = (<uint64_t>0xCD9E8D57u) * c2
        hi0 = <uint32_t>(p0 >> 32)
        lo0 = <uint32_t>p0
        hi1 = <uint32_t>(p1 >> 32)
        lo1 = <uint32_t>p1
        t0 = hi1 ^ c1 ^ k0
        t2 = hi0 ^ c3 ^ k1
        c0 = t0
        c1 = lo1
        c2 = t2
        c3 = lo0
    out[0] = c0
    out[1] = c1
    out[2] = c2
    out[3] = c3


cdef inline double _uniform(uint64_t seed, uint32_t stream, uint64_t path) nogil:
    cdef uint32_t x[4]
    cdef uint64_t u64
    _philox10(<uint32_t>path, <uint32_t>(path >> 32), stream, 0u,
              <uint32_t>seed, <uint32_t>(seed >> 32), x)
    u64 = (<uint64_t>x[0]) | ((<uint64_t>x[1]) << 32)
    return ((u64 >> 11) + 0.5) * (2.0 ** -53)


cdef double[8] _A = [3.3871328727963666080e0, 1.3314166789178437745e2,
                     1.9715909503065514427e3, 1.3731693765509461125e4,
                     4.5921953931549871457e4, 6.7265770927008700853e4,
                     3.3430575583588128105e4, 2.5090809287301226727e3]
cdef double[8] _B = [1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
                     5.3941960214247511077e3, 2.1213794301586595867e4,
                     3.9307895800092710610e4, 2.8729085735721942674e4,
                     5.2264952788528545610e3]
cdef double[8] _C = [1.42343711074968357734e0, 4.63033784615654529590e0,
                     5.76949722146069140550e0, 3.64784832476320460504e0,
                     1.27045825245236838258e0, 2.41780725177450611770e-1,
                     2.27238449892691845833e-2, 7.74545014278341407640e-4]
cdef double[8] _D = [1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
                     6.89767334985100004550e-1, 1.48103976427480074590e-1,
                     1.51986665636164571966e-2, 5.47593808499534494600e-4,
                     1.05075007164441684324e-9]
cdef double[8] _E = [6.65790464350110377720e0, 5.46378491116411436990e0,
                     1.78482653991729133580e0, 2.96560571828504891230e-1,
                     2.65321895265761230930e-2, 1.24266094738807843860e-3,
                     2.71155556874348757815e-5, 2.01033439929228813265e-7]
cdef double[8] _F = [1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                     1.48753612908506148525e-2, 7.86869131145613259100e-4,
                     1.84631831751005468180e-5, 1.42151175831644588870e-7,
                     2.04426310338993978564e-15]


cdef inline double _poly8(double* cs, double x) nogil:
    cdef double acc = cs[7]
    cdef int i
    for i in range(6, -1, -1):
        acc = acc * x + cs[i]
    return acc


cdef inline double _ppnd16(double u) nogil:
    cdef double q = u - 0.5
    cdef double r, val
    if fabs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly8(_A, r) / _poly8(_B, r)
    if q < 0.0:
        r = u
    else:
        r = 1.0 - u
    r = sqrt(-log(r))
    if r <= 5.0:
        r = r - 1.6
        val = _poly8(_C, r) / _poly8(_D, r)
    else:
        r = r - 5.0
        val = _poly8(_E, r) / _poly8(_F, r)
    if q < 0.0:
        return -val
    return val


def uniforms(seed, stream, start, count):
    """U(0,1) draws for paths [start, start+count), open interval ends."""
    cdef uint64_t s = <uint64_t>seed
    cdef uint32_t st = <uint32_t>(stream & 0xFFFFFFFF)
    cdef uint64_t base = <uint64_t>start
    cdef Py_ssize_t n = count, i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _uniform(s, st, base + <uint64_t>i)
    return out


def normal_ppf(u):
    """Inverse standard normal CDF, elementwise, for u strictly in (0,1)."""
    arr = np.ascontiguousarray(u, dtype=np.float64)
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    cdef double[::1] src = flat
    cdef double[::1] dst = out
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        for i in range(n):
            dst[i] = _ppnd16(src[i])
    return out.reshape(arr.shape)


cdef inline Py_ssize_t _pick(double[::1] cum, Py_ssize_t n, double u) nogil:
    # smallest k with cum[k] > u, clamped to the last bucket
    cdef Py_ssize_t k = 0
    while k < n - 1 and cum[k] <= u:
        k += 1
    return k


def dm_chunk(seed, start, count,
             payoff_kind, pay_mean, pay_vol, pay_values, pay_cum,
             strike_kind, strike_value, strike_values, strike_cum,
             pay_factor, strike_factor, shift):
    """Sum and sum of squares of shifted discounted payoffs for one chunk.

    Same contract as the numpy backend; see _pure.dm_chunk.
    """
    pv = np.ascontiguousarray(pay_values, dtype=np.float64)
    pc = np.ascontiguousarray(pay_cum, dtype=np.float64)
    sv = np.ascontiguousarray(strike_values, dtype=np.float64)
    sc = np.ascontiguousarray(strike_cum, dtype=np.float64)
    cdef double[::1] pay_v = pv
    cdef double[::1] pay_c = pc
    cdef double[::1] str_v = sv
    cdef double[::1] str_c = sc
    cdef Py_ssize_t n_pay = pv.shape[0], n_str = sv.shape[0]
    cdef uint64_t s = <uint64_t>seed
    cdef uint64_t base = <uint64_t>start
    cdef Py_ssize_t n = count, i
    cdef int pk = payoff_kind, sk = strike_kind
    cdef double mean = pay_mean, vol = pay_vol
    cdef double const_strike = strike_value
    cdef double pf = pay_factor, sf = strike_factor
    cdef double centre = shift
    cdef double u, z, sval, xval, contrib
    cdef double acc = 0.0, acc2 = 0.0
    with nogil:
        for i in range(n):
            u = _uniform(s, 0u, base + <uint64_t>i)
            if pk == 0:
                z = _ppnd16(u)
                sval = mean * exp(vol * z - 0.5 * vol * vol)
            else:
                sval = pay_v[_pick(pay_c, n_pay, u)]
            if sk == 0:
                xval = const_strike
            else:
                u = _uniform(s, 1u, base + <uint64_t>i)
                xval = str_v[_pick(str_c, n_str, u)]
            contrib = sval * pf - xval * sf
            if contrib < 0.0:
                contrib = 0.0
            contrib -= centre
            acc += contrib
            acc2 += contrib * contrib
    return acc, acc2


def crr_price(spot, strike, rate, time, sigma, steps):
    """European call on a recombining lattice, backward induction.

    Caller guarantees sigma > 0, time > 0, and a valid risk-neutral
    probability.
    """
    cdef Py_ssize_t n = steps, j, m
    cdef double s0 = spot, x = strike, r = rate, t = time, sig = sigma
    cdef double dt = t / n
    cdef double u = exp(sig * sqrt(dt))
    cdef double d = 1.0 / u
    cdef double p = (exp(r * dt) - d) / (u - d)
    cdef double disc = exp(-r * dt)
    buf = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] v = buf
    cdef double st
    with nogil:
        for j in range(n + 1):
            st = s0 * pow(u, 2.0 * j - n)
            v[j] = st - x if st > x else 0.0
        for m in range(n, 0, -1):
            for j in range(m):
                v[j] = disc * (p * v[j + 1] + (1.0 - p) * v[j])
    return float(buf[0])
