"""numpy backend for the numeric kernels.

The random stream is Philox4x32-10 evaluated on vectors of path indices:
counter = (path_lo, path_hi, stream, 0), key = (seed_lo, seed_hi). A draw
depends only on (seed, stream, path), never on how many draws came before,
so any partition of paths over workers reproduces the same numbers.
Verified against the reference known-answer vectors for this generator.

The inverse normal CDF is the AS241 double-precision rational
approximation (relative error below 1e-15 against an independent
implementation). The compiled backend mirrors the same coefficient
evaluation order.
"""

import math

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK32 = 0xFFFFFFFF

_U64_11 = np.uint64(11)
_U64_32 = np.uint64(32)
_TWO_M53 = 2.0 ** -53


def _philox_rounds(c0, c1, c2, c3, k0, k1):
    for rnd in range(10):
        if rnd:
            k0 = (k0 + _W0) & _MASK32
            k1 = (k1 + _W1) & _MASK32
        p0 = c0.astype(np.uint64) * _M0
        p1 = c2.astype(np.uint64) * _M1
        hi0 = (p0 >> _U64_32).astype(np.uint32)
        lo0 = p0.astype(np.uint32)
        hi1 = (p1 >> _U64_32).astype(np.uint32)
        lo1 = p1.astype(np.uint32)
        c0 = hi1 ^ c1 ^ np.uint32(k0)
        c1 = lo1
        c2 = hi0 ^ c3 ^ np.uint32(k1)
        c3 = lo0
    return c0, c1, c2, c3


def uniforms(seed, stream, start, count):
    """U(0,1) draws for paths [start, start+count), open interval ends."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    c0 = idx.astype(np.uint32)
    c1 = (idx >> _U64_32).astype(np.uint32)
    c2 = np.full(count, stream & _MASK32, dtype=np.uint32)
    c3 = np.zeros(count, dtype=np.uint32)
    x0, x1, _, _ = _philox_rounds(c0, c1, c2, c3, seed & _MASK32, (seed >> 32) & _MASK32)
    u64 = x0.astype(np.uint64) | (x1.astype(np.uint64) << _U64_32)
    return ((u64 >> _U64_11).astype(np.float64) + 0.5) * _TWO_M53


_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _poly(coefs, x):
    acc = np.full_like(x, coefs[-1])
    for c in reversed(coefs[:-1]):
        acc = acc * x + c
    return acc


def normal_ppf(u):
    """Inverse standard normal CDF, elementwise, for u strictly in (0,1)."""
    u = np.asarray(u, dtype=np.float64)
    out = np.empty_like(u)
    q = u - 0.5

    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        out[central] = qc * _poly(_A, r) / _poly(_B, r)

    tails = ~central
    if tails.any():
        qt = q[tails]
        p_tail = np.where(qt < 0.0, u[tails], 1.0 - u[tails])
        r = np.sqrt(-np.log(p_tail))
        val = np.empty_like(r)
        near = r <= 5.0
        if near.any():
            rn = r[near] - 1.6
            val[near] = _poly(_C, rn) / _poly(_D, rn)
        far = ~near
        if far.any():
            rf = r[far] - 5.0
            val[far] = _poly(_E, rf) / _poly(_F, rf)
        out[tails] = np.where(qt < 0.0, -val, val)
    return out


def dm_chunk(seed, start, count,
             payoff_kind, pay_mean, pay_vol, pay_values, pay_cum,
             strike_kind, strike_value, strike_values, strike_cum,
             pay_factor, strike_factor, shift):
    """Sum and sum of squares of shifted discounted payoffs for one chunk.

    payoff_kind 0: S_T = pay_mean * exp(pay_vol*Z - pay_vol^2/2) (stream 0);
    payoff_kind 1: S_T drawn from (pay_values, pay_cum) by inverse CDF.
    strike_kind 0: constant strike_value; 1: discrete draw on stream 1.
    Contribution per path: max(S_T*pay_factor - X_T*strike_factor, 0).
    Both sums are taken over (contribution - shift); centring on a typical
    contribution keeps the variance identity exact when the sample is
    constant, whatever order the partial sums are taken in.
    """
    u_pay = uniforms(seed, 0, start, count)
    if payoff_kind == 0:
        z = normal_ppf(u_pay)
        s = pay_mean * np.exp(pay_vol * z - 0.5 * pay_vol * pay_vol)
    else:
        k = np.searchsorted(pay_cum, u_pay, side="right")
        s = pay_values[np.minimum(k, len(pay_values) - 1)]

    if strike_kind == 0:
        x = strike_value
    else:
        u_strike = uniforms(seed, 1, start, count)
        k = np.searchsorted(strike_cum, u_strike, side="right")
        x = strike_values[np.minimum(k, len(strike_values) - 1)]

    contrib = np.maximum(s * pay_factor - x * strike_factor, 0.0) - shift
    return float(np.sum(contrib)), float(np.sum(contrib * contrib))


def crr_price(spot, strike, rate, time, sigma, steps):
    """European call on a recombining lattice, backward induction.

    Caller guarantees sigma > 0, time > 0, and a valid risk-neutral
    probability.
    """
    dt = time / steps
    u = math.exp(sigma * math.sqrt(dt))
    d = 1.0 / u
    p = (math.exp(rate * dt) - d) / (u - d)
    disc = math.exp(-rate * dt)
    j = np.arange(steps + 1, dtype=np.float64)
    st = spot * u ** (2.0 * j - steps)
    v = np.maximum(st - strike, 0.0)
    for _ in range(steps):
        v = disc * (p * v[1:] + (1.0 - p) * v[:-1])
    return float(v[0])
