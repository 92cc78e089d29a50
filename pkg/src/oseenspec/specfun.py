"""Radial profile functions for the Oseen vortex and their complex extensions.

Everything here is built from u = r^2/4 and the entire function
F0(z) = e^z - z - 1:

    sigma(r)  = (1 - e^{-u})/u          angular-velocity profile, sigma(0) = 1
    sigma'(r) = (2/r)(e^{-u} - sigma)   strictly negative on r > 0
    g(r)      = e^{-r^2/8}              Gaussian half-weight, g^2 = vorticity profile
    f(r)      = 2 g^4/sigma'^2 + (g^2/sigma')(6/r - r)
                                        wave-operator commutator potential, f >= 0
    h(r)      = 3/(4r^2) + r^2/16 - 1/2 + u/F0(u)
                                        pointwise lower envelope of the |k|=1
                                        diagonal potential, min h ~ 0.4855

plus the one-parameter family used on rotated rays (F1..F4, F5) and the
incomplete moment phi_moment(a) = 3 - (3 + 3a + a^2) e^{-a}.

Near u = 0 the closed forms above lose all significant digits (f is a
difference of two O(1/u^2) terms), so each function switches to a Taylor
branch below a fixed threshold.  The F3/F4 series are rearranged so that
no cancellation occurs: with

    G(z)  = sum_{m>=0} z^m/(m+2)!          (F0 = z^2 G)
    Nt(z) = sum_{m>=0} (2/(m+1)! - 3/(m+2)!) z^m

one has F3 = Nt/(z G^2) and F4 = F3 - 2/z = M/G^2 where the coefficients
of M are computed in exact rational arithmetic at import time.
"""

import math
from fractions import Fraction

import numpy as np
from numpy.polynomial.polynomial import polyval

_NTERMS = 25


class PoleError(ValueError):
    """Evaluation requested at (or numerically on top of) a zero of F0."""


def _rational_series():
    fact = [math.factorial(m) for m in range(_NTERMS + 4)]
    g = [Fraction(1, fact[m + 2]) for m in range(_NTERMS + 2)]
    nt = [Fraction(2, fact[m + 1]) - Fraction(3, fact[m + 2])
          for m in range(_NTERMS + 2)]
    gsq = [sum(g[j] * g[l - j] for j in range(l + 1)) for l in range(_NTERMS + 2)]
    # F4 = (Nt - 2 G^2)/(z G^2); the constant term of Nt - 2 G^2 vanishes
    # identically, so the quotient by z is again a power series.
    m_ser = [nt[m + 1] - 2 * gsq[m + 1] for m in range(_NTERMS + 1)]
    assert nt[0] - 2 * gsq[0] == 0
    return (np.array([float(c) for c in g]),
            np.array([float(c) for c in nt]),
            np.array([float(c) for c in m_ser]))


_G_C, _NT_C, _M_C = _rational_series()
# sigma as a function of u, and d sigma/du
_SIG_C = np.array([(-1.0) ** m / math.factorial(m + 1) for m in range(_NTERMS)])
_DSIG_C = np.array([(-1.0) ** (m + 1) * (m + 1) / math.factorial(m + 2)
                    for m in range(_NTERMS)])


def _realarr(x, name, positive=False, nonneg=False):
    a = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must be finite")
    if positive and np.any(a <= 0):
        raise ValueError(f"{name} must be positive")
    if nonneg and np.any(a < 0):
        raise ValueError(f"{name} must be nonnegative")
    return a, np.isscalar(x) or np.ndim(x) == 0


def _ret(out, scalar):
    return out.item() if scalar else out


def sigma(r):
    """Profile sigma(r) = (1 - e^{-r^2/4})/(r^2/4); sigma(0) = 1, decreasing."""
    a, scalar = _realarr(r, "r", nonneg=True)
    u = a * a / 4
    out = np.empty_like(u)
    small = u < 0.5
    out[small] = polyval(u[small], _SIG_C)
    ub = u[~small]
    out[~small] = -np.expm1(-ub) / ub
    return _ret(out, scalar)


def sigma_prime(r):
    """d sigma/dr = (2/r)(e^{-u} - sigma(r)), u = r^2/4.  Requires r > 0.

    Below u = 1/2 the subtraction e^{-u} - sigma cancels to O(u), so the
    derivative of the sigma series is used instead (terms (-1)^{m+1}
    (m+1) u^m/(m+2)!, prefactor r/2).
    """
    a, scalar = _realarr(r, "r", positive=True)
    u = a * a / 4
    out = np.empty_like(u)
    small = u < 0.5
    out[small] = (a[small] / 2) * polyval(u[small], _DSIG_C)
    ab, ub = a[~small], u[~small]
    out[~small] = (2 / ab) * (np.exp(-ub) + np.expm1(-ub) / ub)
    return _ret(out, scalar)


def g(r):
    """Gaussian half-weight e^{-r^2/8}."""
    a, scalar = _realarr(r, "r", nonneg=True)
    return _ret(np.exp(-a * a / 8), scalar)


def f(r):
    """Commutator potential f(r) = 2g^4/sigma'^2 + (g^2/sigma')(6/r - r).

    Positive on (0, oo) with r^2 f -> 8 as r -> 0 and f -> 0 at infinity.
    The closed form is the difference of two terms of size ~4/u^2 near
    r = 0; for u = r^2/4 < 1 we evaluate the cancellation-free quotient
    f = Nt(u)/(u G(u)^2) instead (see module docstring).
    """
    a, scalar = _realarr(r, "r", positive=True)
    u = a * a / 4
    out = np.empty_like(u)
    small = u < 1.0
    us = u[small]
    out[small] = polyval(us, _NT_C) / (us * polyval(us, _G_C) ** 2)
    ab = a[~small]
    gg = np.exp(-u[~small] / 2)
    sp = sigma_prime(ab)
    out[~small] = 2 * gg ** 4 / sp ** 2 + (gg ** 2 / sp) * (6 / ab - ab)
    return _ret(out, scalar)


def h(r):
    """Lower envelope h(r) = 3/(4r^2) + r^2/16 - 1/2 + u/F0(u), u = r^2/4.

    h > 0.485 on all of (0, oo); the minimum sits near r = 3.249.
    """
    a, scalar = _realarr(r, "r", positive=True)
    u = a * a / 4
    f0 = np.empty_like(u)
    small = u < 0.5
    us = u[small]
    f0[small] = us * us * polyval(us, _G_C)
    f0[~small] = np.exp(u[~small]) - u[~small] - 1
    out = 3 / (16 * u) + u / 4 - 0.5 + u / f0
    return _ret(out, scalar)


def sigma_inverse(nu):
    """Critical radius: the unique r > 0 with sigma(r) = nu, nu in (0, 1).

    Bisection on a bracket [0, hi]; sigma is strictly decreasing, so the
    bracket keeps sigma(lo) > nu > sigma(hi).  Terminates with
    |sigma(r) - nu| <= 1e-12.
    """
    nu = float(nu)
    if not (0.0 < nu < 1.0) or not math.isfinite(nu):
        raise ValueError("nu must lie strictly between 0 and 1")
    lo, hi = 0.0, 8.0
    while sigma(hi) >= nu:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        s = sigma(mid)
        if abs(s - nu) <= 1e-12:
            return mid
        if s > nu:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * max(1.0, lo):
            break
    r = 0.5 * (lo + hi)
    if abs(sigma(r) - nu) > 1e-12:
        raise ArithmeticError("bisection stalled before reaching tolerance")
    return r


def _complexarr(z, name="z"):
    a = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must be finite")
    return a, np.isscalar(z) or np.ndim(z) == 0


def _f0(z):
    out = np.empty_like(z)
    small = np.abs(z) < 0.5
    zs = z[small]
    out[small] = zs * zs * polyval(zs, _G_C.astype(complex))
    zb = z[~small]
    out[~small] = np.exp(zb) - zb - 1
    return out


def _f3_closed(zb):
    """Closed form (4 z^2/F0 - 6 + 4z)(z/2)/F0 for |z| >= 1/2.

    Beyond Re z = 600 the exponential in F0 overflows, so the reciprocal
    is formed from e^{-z} directly; the dropped (z+1)e^{-z} correction is
    below 1e-240 relative there.
    """
    out = np.empty_like(zb)
    big = zb.real > 600.0
    zr = zb[~big]
    f0 = _f0(zr)
    if np.any(f0 == 0):
        raise PoleError("F3 evaluated at a zero of F0")
    out[~big] = (4 * zr * zr / f0 - 6 + 4 * zr) * (zr / 2) / f0
    zg = zb[big]
    w = np.exp(-zg)
    out[big] = (4 * zg * zg * w - 6 + 4 * zg) * (zg / 2) * w
    return out


def F_complex(fun_id, z):
    """Evaluate F0..F4 at complex z (scalar or array).

    F0 = e^z - z - 1
    F1 = (1 - e^{-z})/z,  F1(0) = 1        (sigma(r) = F1(r^2/4))
    F2 = e^{-z/2}                          (g(r) = F2(r^2/4))
    F3 = (4 z^2/F0 - 6 + 4z) (z/2)/F0      (f(r) = F3(r^2/4))
    F4 = F3 - 2/z, F4(0) = 2/3             (removes the z = 0 pole of F3)

    Series branches below |z| = 1/2 avoid the cancellation in the closed
    forms; F3 has a pole at every zero of F0 (in particular z = 0) and
    raises PoleError there.
    """
    a, scalar = _complexarr(z)
    a = np.atleast_1d(a)
    small = np.abs(a) < 0.5
    out = np.empty_like(a)
    if fun_id == "F0":
        out = _f0(a)
    elif fun_id == "F1":
        zs = a[small]
        out[small] = polyval(zs, _SIG_C.astype(complex))
        zb = a[~small]
        out[~small] = (1 - np.exp(-zb)) / zb
    elif fun_id == "F2":
        out = np.exp(-a / 2)
    elif fun_id == "F3":
        if np.any(a == 0):
            raise PoleError("F3 has a pole at z = 0")
        zs = a[small]
        out[small] = polyval(zs, _NT_C.astype(complex)) \
            / (zs * polyval(zs, _G_C.astype(complex)) ** 2)
        out[~small] = _f3_closed(a[~small])
    elif fun_id == "F4":
        zs = a[small]
        out[small] = polyval(zs, _M_C.astype(complex)) \
            / polyval(zs, _G_C.astype(complex)) ** 2
        zb = a[~small]
        out[~small] = _f3_closed(zb) - 2 / zb
    else:
        raise ValueError(f"unknown function id {fun_id!r}")
    if not np.all(np.isfinite(out)):
        raise PoleError(f"{fun_id} overflowed or hit a pole")
    return complex(out[0]) if scalar else out.reshape(np.shape(z))


def F5(r, theta):
    """Oscillatory part of Im F1 on the rotated ray:

        F5(r, theta) = sin(theta) - e^{-r cos(theta)} sin(r sin(theta) + theta)

    so that -Im F1(r e^{i theta}) = F5(r, theta)/r.  Requires r > 0 and
    0 < theta < pi/4.
    """
    a, scalar = _realarr(r, "r", positive=True)
    th = float(theta)
    if not (0.0 < th < math.pi / 4):
        raise ValueError("theta must lie in (0, pi/4)")
    out = math.sin(th) - np.exp(-a * math.cos(th)) * np.sin(a * math.sin(th) + th)
    return _ret(np.asarray(out), scalar)


def phi_moment(a):
    """Incomplete moment Phi(a) = 3 - (3 + 3a + a^2) e^{-a}, a >= 0.

    Equals (1/2) [ int_0^a t^3 e^{-t} dt + a^2 (1 + a) e^{-a} ]; increasing
    from 0 to 3.
    """
    x, scalar = _realarr(a, "a", nonneg=True)
    return _ret(3 - (3 + 3 * x + x * x) * np.exp(-x), scalar)


def h_numerator_coefficient(n):
    """Exact Taylor coefficient a_n of the numerator of h.

    Writing h = N(u)/(u F0(u)) gives N(u) = (3/16 + u^2/4 - u/2) F0(u) + u^2
    = sum_{n>=2} a_n u^n with a_2 = 35/32, a_3 = -7/32 and, for n >= 4,
    a_n = (3/16 + n(n-1)/4 - n/2)/n!  (positive from n = 4 on).
    """
    n = int(n)
    if n < 2:
        raise ValueError("coefficients start at n = 2")
    c = Fraction(3, 16) * Fraction(1, math.factorial(n))
    if n >= 4:
        c += Fraction(1, 4 * math.factorial(n - 2))
    if n >= 3:
        c -= Fraction(1, 2 * math.factorial(n - 1))
    if n == 2:
        c += 1
    return c
