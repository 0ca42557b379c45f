"""Complex special functions in double precision.

log-Gamma and the polygamma functions use a summed recurrence shift into
``Re(s) >= 10`` followed by the Stirling series. Hurwitz zeta uses the
Euler-Maclaurin formula; s-derivatives are obtained by differentiating every
piece of the formula term by term, so the derivatives carry the same
truncation behaviour as the values.

All vector routines accept scalars or numpy arrays and broadcast over ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import PoleError, PrecisionError

__all__ = [
    "EvalResult",
    "bernoulli",
    "log_gamma",
    "digamma",
    "polygamma",
    "hurwitz_zeta",
    "riemann_zeta",
    "dirichlet_l_psi5",
    "PSI5",
    "hurwitz_derivs",
    "zeta_derivs",
    "lpsi5_derivs",
    "em_terms",
    "power_neg",
]

EULER_GAMMA = 0.57721566490153286061
LOG_2PI = math.log(2.0 * math.pi)
_EPS = np.finfo(float).eps
_EPS_LD = float(np.finfo(np.longdouble).eps)

# character mod 5 with psi(2) = -1: the Legendre symbol (n/5)
PSI5 = {0: 0, 1: 1, 2: -1, 3: -1, 4: 1}

_SHIFT_TO = 10.0
_STIRLING_TERMS = 10
_CHUNK = 1 << 18
_TWO_PI_LD = np.longdouble("6.283185307179586476925286766559005768")


def _pow_neg(s, logs_ld):
    """exp(-s log x) with the phase t log x reduced mod 2 pi in extended precision.

    At heights of a few hundred t log x is in the thousands, and forming it
    in double precision costs about 1e-13 in every term.
    """
    t = s.imag.astype(np.longdouble)
    ph = np.fmod(t * logs_ld, _TWO_PI_LD).astype(float)
    return np.exp(-s.real * logs_ld.astype(float)) * (np.cos(ph) - 1j * np.sin(ph))


def power_neg(x: float, s):
    """x^-s for real x > 0, with the phase reduced in extended precision."""
    s = np.asarray(s, dtype=complex)
    return _pow_neg(s, np.log(np.longdouble(x)))


@dataclass(frozen=True)
class EvalResult:
    value: complex | np.ndarray
    est_abs_error: float | np.ndarray


@lru_cache(maxsize=None)
def _bernoulli_table(n_max: int) -> tuple[Fraction, ...]:
    b = [Fraction(1)]
    for m in range(1, n_max + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * b[k]
        b.append(-acc / (m + 1))
    return tuple(b)


def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n (convention B_1 = -1/2), exact."""
    return _bernoulli_table(max(n, 1))[n]


def _as_complex(s):
    z = np.asarray(s, dtype=complex)
    return z, z.ndim == 0


def _out(z, scalar):
    return complex(z) if scalar else z


def _check_gamma_poles(z):
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise PoleError(f"Gamma pole at nonpositive integer {z[bad].ravel()[0].real:g}")


def _shift_up(z):
    """Return (w, shift) with w = z + shift and Re(w) >= _SHIFT_TO."""
    shift = np.maximum(0, np.ceil(_SHIFT_TO - z.real)).astype(int)
    return z + shift, shift


def log_gamma(s):
    """Principal branch of log Gamma(s)."""
    z, scalar = _as_complex(s)
    z = np.atleast_1d(z)
    _check_gamma_poles(z)
    w, shift = _shift_up(z)
    acc = np.zeros_like(z)
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        acc[m] += np.log(z[m] + k)
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    p = inv
    for k in range(1, _STIRLING_TERMS + 1):
        b = float(bernoulli(2 * k))
        series += b / (2 * k * (2 * k - 1)) * p
        p = p * inv2
    val = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + series - acc
    return _out(val[0] if scalar else val, scalar)


def polygamma(n: int, s):
    """n-th derivative of the digamma function, n >= 0."""
    z, scalar = _as_complex(s)
    z = np.atleast_1d(z)
    _check_gamma_poles(z)
    w, shift = _shift_up(z)
    acc = np.zeros_like(z)
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        acc[m] += (z[m] + k) ** (-(n + 1))
    inv = 1.0 / w
    inv2 = inv * inv
    if n == 0:
        val = np.log(w) - 0.5 * inv
        p = inv2
        for k in range(1, _STIRLING_TERMS + 1):
            val -= float(bernoulli(2 * k)) / (2 * k) * p
            p = p * inv2
        val -= acc
    else:
        sign = (-1) ** (n + 1)
        val = math.factorial(n - 1) * inv**n + math.factorial(n) * 0.5 * inv ** (n + 1)
        p = inv ** (n + 2)
        for k in range(1, _STIRLING_TERMS + 1):
            coef = float(bernoulli(2 * k)) * math.factorial(2 * k + n - 1) / math.factorial(2 * k)
            val += coef * p
            p = p * inv2
        val = sign * val - (-1) ** n * math.factorial(n) * acc
    return _out(val[0] if scalar else val, scalar)


def digamma(s):
    """Gamma'(s)/Gamma(s)."""
    return polygamma(0, s)


# --------------------------------------------------------------------------
# Euler-Maclaurin


def _exprel_derivs(z, order, ez=None):
    """E_k(z) = integral_0^1 t^k exp(z t) dt for k = 0..order.

    ``ez`` may supply exp(z) when the caller has a more accurate value.
    """
    out = np.empty((order + 1,) + z.shape, dtype=complex)
    ez = np.exp(z) if ez is None else ez
    small = np.abs(z) < 2.0
    if np.any(small):
        zs = z[small]
        es = ez[small]
        # series for the top order, then the downward recurrence
        # E_{k-1} = (e^z - z E_k) / k, stable for small |z|
        term = np.ones_like(zs)
        acc = term / (order + 1)
        for m in range(1, 32):
            term = term * zs / m
            acc = acc + term / (m + order + 1)
        out[order][small] = acc
        for k in range(order, 0, -1):
            acc = (es - zs * acc) / k
            out[k - 1][small] = acc
    big = ~small
    if np.any(big):
        zb = z[big]
        eb = ez[big]
        prev = (eb - 1.0) / zb
        out[0][big] = prev
        for k in range(1, order + 1):
            prev = (eb - k * prev) / zb
            out[k][big] = prev
    return out


def default_terms(t_abs_max: float) -> int:
    return max(20, int(math.ceil(2.0 * t_abs_max)))


def em_terms(s) -> int:
    z = np.asarray(s, dtype=complex)
    return default_terms(float(np.max(np.abs(z.imag), initial=0.0)))


@lru_cache(maxsize=64)
def _bern_coeffs(n_bern: int) -> np.ndarray:
    return np.array([float(bernoulli(2 * j)) / math.factorial(2 * j) for j in range(1, n_bern + 2)])


def _pochhammer_derivs(s, order, n_max):
    """poch[n][m] = m-th derivative of s (s+1) ... (s+n-1), for n = 0..n_max."""
    cur = [np.ones_like(s)] + [np.zeros_like(s) for _ in range(order)]
    table = [list(cur)]
    for shift in range(n_max):
        fac = s + shift
        for m in range(order, 0, -1):
            cur[m] = cur[m] * fac + m * cur[m - 1]
        cur[0] = cur[0] * fac
        table.append(list(cur))
    return table


@lru_cache(maxsize=256)
def _em_constants(N, avec, order, n_bern):
    a = np.array(avec, dtype=float)
    logs = np.log(np.arange(N, dtype=float)[None, :] + a[:, None])  # (A, N)
    V = np.stack([(-logs) ** k for k in range(order + 1)], axis=2)  # (A, N, K)
    w_err = (1.0 + np.abs(logs)) ** (order + 1)
    x = N + a
    lx = np.log(x)
    c = _bern_coeffs(n_bern)
    j = np.arange(1, n_bern + 1)
    cx = c[:n_bern][None, :] * x[:, None] ** (1.0 - 2.0 * j[None, :])  # (A, M)
    # W[k][m] maps poch m-th derivatives to the k-th derivative of the sum
    W = [[math.comb(k, m) * (-lx[:, None]) ** (k - m) * cx for m in range(k + 1)]
         for k in range(order + 1)]
    tail_c = np.abs(c[n_bern] * x ** (-2.0 * n_bern - 1.0))
    logs_ld = np.empty(logs.shape, dtype=np.longdouble)
    lx_ld = np.empty((len(a), 1), dtype=np.longdouble)
    n = np.arange(N, dtype=np.longdouble)
    for i, ai in enumerate(avec):
        # shifts like 1/5 are meant exactly; the rounding of 0.2 would cost |s| 1e-17
        f = Fraction(ai).limit_denominator(64)
        num, den = (f.numerator, f.denominator) if abs(float(f) - ai) < 1e-15 else (ai, 1)
        num, den = np.longdouble(num), np.longdouble(den)
        logs_ld[i] = np.log(den * n + num) - np.log(den)
        lx_ld[i, 0] = np.log(den * N + num) - np.log(den)
    return logs, V, w_err, x[:, None], lx[:, None], W, tail_c[:, None], logs_ld, lx_ld


def _main_sum_extended(ss, logs_ld, order):
    """sum_n (-log(n + a))^k (n + a)^-s accumulated in extended precision, shape (A, K, p)."""
    t = ss.imag.astype(np.longdouble)[None, :, None]
    sig = ss.real.astype(np.longdouble)[None, :, None]
    lg = logs_ld[:, None, :]
    ph = np.fmod(t * lg, _TWO_PI_LD)
    mod = np.exp(-sig * lg)
    re, im = mod * np.cos(ph), -mod * np.sin(ph)
    out = np.empty((logs_ld.shape[0], order + 1, ss.shape[0]), dtype=complex)
    v = np.ones_like(lg)
    for k in range(order + 1):
        out[:, k] = (re * v).sum(axis=2).astype(float) + 1j * (im * v).sum(axis=2).astype(float)
        v = v * -lg
    return out


def _em_regular(s, avec, order, n_terms, n_bern, extended=False):
    """Derivatives 0..order of zeta(s, a) - 1/(s - 1) for each a in avec.

    Returns (out, err) with out of shape (len(avec), order+1, P). The
    subtracted pole term makes the result entire, which is what the
    Dirichlet L-function assembly needs. With ``extended`` the main sum is
    accumulated in long double, which removes most of the rounding error
    when the terms are much larger than the result.
    """
    N = n_terms
    logs, V, w_err, x, lx, W, tail_c, logs_ld, lx_ld = _em_constants(
        N, tuple(float(a) for a in np.atleast_1d(avec)), order, n_bern)
    A = logs.shape[0]
    P = s.shape[0]
    out = np.empty((A, order + 1, P), dtype=complex)
    err = np.empty((A, P))
    abs_s = np.abs(s)
    rows = max(1, _CHUNK // max(N * A, 1))
    for lo in range(0, P, rows):
        ss = s[lo:lo + rows]
        pw = _pow_neg(ss[None, :, None], logs_ld[:, None, :])  # (A, p, N)
        if extended:
            out[:, :, lo:lo + rows] = _main_sum_extended(ss, logs_ld, order)
        else:
            out[:, :, lo:lo + rows] = np.matmul(pw, V).transpose(0, 2, 1)
        # rounding in the modulus and the reduced phase
        eps = _EPS_LD if extended else _EPS
        err[:, lo:lo + rows] = eps * np.einsum("apn,an->ap", np.abs(pw), w_err) * (1.0 + abs_s[lo:lo + rows])

    xs = _pow_neg(s[None, :], lx_ld)
    neg_lx = -lx
    E = _exprel_derivs((1.0 - s[None, :]) * lx, order, ez=x * xs)
    for k in range(order + 1):
        out[:, k] += 0.5 * neg_lx**k * xs + (-1) ** (k + 1) * lx ** (k + 1) * E[k]

    # Bernoulli corrections c_j poch(s, 2j-1) x^(-s-2j+1), j = 1..n_bern
    poch = _pochhammer_derivs(s, order, 2 * n_bern + 1)
    odd = [np.stack([poch[2 * j - 1][m] for j in range(1, n_bern + 1)]) for m in range(order + 1)]
    for k in range(order + 1):
        acc = W[k][0] @ odd[0]
        for m in range(1, k + 1):
            acc = acc + W[k][m] @ odd[m]
        out[:, k] += acc * xs
    axs = np.abs(xs)
    tail = tail_c * np.abs(poch[2 * n_bern + 1][0])[None, :] * axs * (1.0 + lx) ** order
    mag = np.abs(W[0][0]) @ np.abs(odd[0])
    err += tail + 8.0 * _EPS * (np.abs(out[:, order]) + (mag + 1.0) * axs * (1.0 + lx) ** order)
    return out, err


def _bucket_terms(t_abs):
    # geometric buckets keep the number of distinct N small on long contours
    n = np.maximum(20.0, np.ceil(2.0 * t_abs))
    k = np.ceil(np.log(n / 20.0) / math.log(1.25) - 1e-9)
    return np.maximum(n, np.round(20.0 * 1.25 ** k)).astype(int)


def _em(s, avec, order, n_terms, n_bern, n_scale=1, extended=False):
    """_em_regular with N chosen per point unless n_terms fixes it.

    A single N for a whole batch would be set by its largest |Im s|, and for
    Re s < 0 the partial sums grow like N^(1 - Re s), so small-height points
    would lose digits to cancellation.
    """
    if n_terms:
        return _em_regular(s, avec, order, n_terms * n_scale, n_bern, extended)
    Ns = _bucket_terms(np.abs(s.imag)) * n_scale
    A = len(np.atleast_1d(avec))
    out = np.empty((A, order + 1, s.shape[0]), dtype=complex)
    err = np.empty((A, s.shape[0]))
    for N in np.unique(Ns):
        m = Ns == N
        out[:, :, m], err[:, m] = _em_regular(s[m], avec, order, int(N), n_bern, extended)
    return out, err


def hurwitz_derivs(s, a: float, order: int, *, n_terms=None, n_bernoulli=12, n_scale=1,
                   extended=False):
    """Vector routine: (derivs, err) for zeta(s, a), derivs shape (order+1, P).

    Raises PoleError if any s equals 1.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s == 1.0):
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    out, err = _em(s, [a], order, n_terms, n_bernoulli, n_scale, extended)
    out, err = out[0], err[0]
    _add_pole(out, s, order)
    return out, err


def _add_pole(out, s, order):
    d = 1.0 / (s - 1.0)
    pole = d.copy()
    for k in range(order + 1):
        out[k] += pole
        pole = pole * (-(k + 1)) * d


def zeta_derivs(s, order: int, **kw):
    return hurwitz_derivs(s, 1.0, order, **kw)


def _assemble_l(inner, err, s, order):
    l5 = math.log(5.0)
    f5 = power_neg(5.0, s)
    out = np.zeros_like(inner)
    for k in range(order + 1):
        for m in range(k + 1):
            out[k] += math.comb(k, m) * (-l5) ** (k - m) * inner[m]
        out[k] *= f5
    return out, err * np.abs(f5) * (1.0 + l5) ** order


_L_SHIFTS = np.array([0.2, 0.4, 0.6, 0.8])
_L_SIGNS = np.array([PSI5[1], PSI5[2], PSI5[3], PSI5[4]], dtype=float)


def lpsi5_derivs(s, order: int, *, n_terms=None, n_bernoulli=12, n_scale=1,
                 extended=False):
    """L(s, psi) = 5^-s sum_a psi(a) zeta(s, a/5). Entire; the pole terms cancel."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    d, e = _em(s, _L_SHIFTS, order, n_terms, n_bernoulli, n_scale, extended)
    inner = np.tensordot(_L_SIGNS, d, axes=1)
    return _assemble_l(inner, e.sum(axis=0), s, order)


def zeta_and_lpsi5_derivs(s, order: int, *, n_terms=None, n_bernoulli=12, n_scale=1,
                          extended=False):
    """Both zeta and L(s, psi) from a single Euler-Maclaurin pass.

    Returns (zeta_derivs, zeta_err, l_derivs, l_err). The zeta part raises
    PoleError at s = 1.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    d, e = _em(s, np.array([1.0, 0.2, 0.4, 0.6, 0.8]), order, n_terms, n_bernoulli, n_scale,
               extended)
    zeta = d[0].copy()
    if np.any(s == 1.0):
        raise PoleError("zeta has a pole at s = 1")
    _add_pole(zeta, s, order)
    inner = np.tensordot(_L_SIGNS, d[1:], axes=1)
    lval, lerr = _assemble_l(inner, e[1:].sum(axis=0), s, order)
    return zeta, e[0], lval, lerr


def _public(derivs_fn, s, deriv_order, tol, n_terms=None, n_bernoulli=12, **kw):
    if not 0 <= deriv_order <= 2:
        raise ValueError("deriv_order must be 0, 1 or 2")
    z, scalar = _as_complex(s)
    z = np.atleast_1d(z)
    scale = 1
    for _ in range(4):
        d, err = derivs_fn(z, deriv_order, n_terms=n_terms, n_bernoulli=n_bernoulli, n_scale=scale, **kw)
        val = d[deriv_order]
        if not np.all(np.isfinite(val)):
            raise PrecisionError("non-finite value from Euler-Maclaurin evaluation")
        if tol is None or np.all(err <= tol):
            break
        scale *= 2
    else:
        raise PrecisionError(
            f"estimated error {float(np.max(err)):.3g} above tolerance {tol:.3g} after {scale // 2}x terms"
        )
    if scalar:
        return EvalResult(complex(val[0]), float(err[0]))
    return EvalResult(val, err)


def hurwitz_zeta(s, a: float, deriv_order: int = 0, *, tol=None, n_terms=None, n_bernoulli=12):
    """Hurwitz zeta(s, a), or its deriv_order-th s-derivative, for 0 < a <= 1."""
    if not 0.0 < a <= 1.0:
        raise ValueError("a must lie in (0, 1]")

    def fn(z, order, **kw):
        return hurwitz_derivs(z, a, order, **kw)

    return _public(fn, s, deriv_order, tol, n_terms, n_bernoulli)


def riemann_zeta(s, deriv_order: int = 0, *, tol=None, n_terms=None, n_bernoulli=12):
    return _public(zeta_derivs, s, deriv_order, tol, n_terms, n_bernoulli)


def dirichlet_l_psi5(s, deriv_order: int = 0, *, tol=None, n_terms=None, n_bernoulli=12):
    """L(s, psi) for the real even character mod 5 with psi(2) = -1."""
    return _public(lpsi5_derivs, s, deriv_order, tol, n_terms, n_bernoulli)
