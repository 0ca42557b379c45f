"""Extended Selberg class members as data, with evaluation of F, F', F''.

Four kinds are supported: the Riemann zeta function, the Dirichlet
L-function of the real character mod 5, the product (1 + sqrt5 5^-s) zeta(s),
and the one-parameter family

    f(s, tau) = (1 - tau) (1 + sqrt5 5^-s) zeta(s) + tau L(s, psi).

All four have real Dirichlet coefficients and a single Gamma factor
Gamma(s/2), so the completed function is real on the critical line. That
gives the rotated real function used for line-zero counting.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, asdict
from typing import Callable

import numpy as np

from .errors import DomainError, PoleError, TooCloseToZeroError
from .special import (
    EvalResult,
    log_gamma,
    polygamma,
    power_neg,
    lpsi5_derivs,
    zeta_and_lpsi5_derivs,
    zeta_derivs,
)

KINDS = ("RiemannZeta", "LPsi5", "FactorZeta", "FamilyF")
MAX_ORDER = 3  # internal; the public evaluate() stops at 2
SQRT5 = math.sqrt(5.0)
LOG5 = math.log(5.0)
LOG_2PI = math.log(2.0 * math.pi)
REFLECT_BELOW = -1.0


def _c2l(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _l2c(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


@dataclass(frozen=True)
class FunctionalEquationData:
    """Phi(s) = F(s) Q^s prod Gamma(lambda_j s + mu_j) = omega conj(Phi(1 - conj s))."""

    Q: float
    gamma_factors: tuple[tuple[float, complex], ...]
    omega: complex = 1.0 + 0.0j
    degree: float | None = None

    def __post_init__(self):
        if self.Q <= 0:
            raise DomainError("Q must be positive")
        gf = tuple((float(lam), complex(mu)) for lam, mu in self.gamma_factors)
        for lam, mu in gf:
            if lam <= 0 or mu.real < 0:
                raise DomainError("need lambda_j > 0 and Re mu_j >= 0")
        object.__setattr__(self, "gamma_factors", gf)
        object.__setattr__(self, "omega", complex(self.omega))
        if abs(abs(self.omega) - 1.0) > 1e-12:
            raise DomainError("|omega| must be 1")
        d = 2.0 * sum(lam for lam, _ in gf)
        if self.degree is None:
            object.__setattr__(self, "degree", d)
        elif abs(self.degree - d) > 1e-12:
            raise DomainError(f"degree {self.degree} disagrees with 2 sum lambda_j = {d}")

    def to_dict(self):
        return {
            "Q": self.Q,
            "gamma_factors": [[lam, _c2l(mu)] for lam, mu in self.gamma_factors],
            "omega": _c2l(self.omega),
            "degree": self.degree,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            Q=float(d["Q"]),
            gamma_factors=tuple((float(lam), _l2c(mu)) for lam, mu in d["gamma_factors"]),
            omega=_l2c(d["omega"]),
            degree=d.get("degree"),
        )

    @property
    def single_half_factor(self) -> bool:
        return (len(self.gamma_factors) == 1 and self.gamma_factors[0][0] == 0.5
                and self.gamma_factors[0][1] == 0 and self.omega == 1)


@dataclass(frozen=True)
class GrowthConstants:
    """|F(sigma1 + it)| >= c for all t and |F(sigma + iT)| < T^B for sigma >= -4 sigma1, T > 10."""

    sigma1: float
    c: float
    B: float


@dataclass(frozen=True)
class DensityConstants:
    """At most eps/log(2+delta) log T - 2 zeros in |t - T| <= 1/T once T > T_bar."""

    eps: float
    delta: float
    T_bar: float

    def bound(self, T: float) -> float:
        return self.eps / math.log(2.0 + self.delta) * math.log(T) - 2.0


# functional-equation data of the four kinds; all share Gamma(s/2)
_ZETA_FE = FunctionalEquationData(Q=math.pi ** -0.5, gamma_factors=((0.5, 0.0),))
_MOD5_FE = FunctionalEquationData(Q=math.sqrt(5.0 / math.pi), gamma_factors=((0.5, 0.0),))


@dataclass(frozen=True)
class FunctionSpec:
    kind: str
    fe: FunctionalEquationData
    pole_order: int
    growth: GrowthConstants
    density: DensityConstants
    zero_free_sigma: float
    tau: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown kind {self.kind!r}")
        if self.kind == "FamilyF":
            if self.tau is None or not 0.0 <= self.tau <= 1.0:
                raise DomainError("FamilyF needs tau in [0, 1]")
            object.__setattr__(self, "tau", float(self.tau))
        elif self.tau is not None:
            raise DomainError("tau only applies to FamilyF")

    @property
    def degree(self) -> float:
        return self.fe.degree

    @property
    def name(self) -> str:
        return self.kind if self.tau is None else f"{self.kind}(tau={self.tau:g})"

    def derivs(self, s, order: int) -> np.ndarray:
        """Array of shape (order+1, P): F, F', ... at the points s."""
        return _derivs(self, np.atleast_1d(np.asarray(s, dtype=complex)), order)[0]

    def to_dict(self):
        return {
            "kind": self.kind,
            "tau": self.tau,
            "fe": self.fe.to_dict(),
            "pole_order": self.pole_order,
            "growth": asdict(self.growth),
            "density": asdict(self.density),
            "zero_free_sigma": self.zero_free_sigma,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            kind=d["kind"],
            tau=d.get("tau"),
            fe=FunctionalEquationData.from_dict(d["fe"]),
            pole_order=int(d["pole_order"]),
            growth=GrowthConstants(**d["growth"]),
            density=DensityConstants(**d["density"]),
            zero_free_sigma=float(d["zero_free_sigma"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FunctionSpec":
        return cls.from_dict(json.loads(text))


def riemann_zeta_spec() -> FunctionSpec:
    return FunctionSpec(
        kind="RiemannZeta", fe=_ZETA_FE, pole_order=1,
        growth=GrowthConstants(sigma1=2.0, c=0.658, B=9.0),
        density=DensityConstants(eps=0.17, delta=0.1, T_bar=10.0),
        zero_free_sigma=1.0,
    )


def lpsi5_spec() -> FunctionSpec:
    return FunctionSpec(
        kind="LPsi5", fe=_MOD5_FE, pole_order=0,
        growth=GrowthConstants(sigma1=2.0, c=0.658, B=10.0),
        density=DensityConstants(eps=0.17, delta=0.1, T_bar=10.0),
        zero_free_sigma=1.0,
    )


def factor_zeta_spec() -> FunctionSpec:
    return FunctionSpec(
        kind="FactorZeta", fe=_MOD5_FE, pole_order=1,
        growth=GrowthConstants(sigma1=2.0, c=0.5, B=10.0),
        density=DensityConstants(eps=0.5, delta=0.1, T_bar=10.0),
        zero_free_sigma=1.0,
    )


def family_spec(tau: float, *, eps: float = 1.0, delta: float = 0.1, T_bar: float = 20.0,
                zero_free_sigma: float = 3.0) -> FunctionSpec:
    # growth constants are tau-uniform: |f(3+it) - 1| <= 0.23 for every tau
    return FunctionSpec(
        kind="FamilyF", tau=tau, fe=_MOD5_FE, pole_order=0 if tau == 1.0 else 1,
        growth=GrowthConstants(sigma1=3.0, c=0.75, B=14.0),
        density=DensityConstants(eps=eps, delta=delta, T_bar=T_bar),
        zero_free_sigma=zero_free_sigma,
    )


def spec_from_name(name: str, tau: float | None = None) -> FunctionSpec:
    name = name.lower()
    if name in ("zeta", "riemannzeta"):
        return riemann_zeta_spec()
    if name in ("lpsi5", "l", "dirichlet"):
        return lpsi5_spec()
    if name in ("factor", "factorzeta"):
        return factor_zeta_spec()
    if name in ("family", "familyf", "f"):
        return family_spec(0.0 if tau is None else tau)
    raise DomainError(f"unknown function {name!r}")


@dataclass(frozen=True)
class AnalyticFunction:
    """A user-supplied analytic function, mainly for synthetic test doubles.

    ``func(s, order)`` returns an array of shape (order+1, len(s)).
    """

    func: Callable
    name: str = "synthetic"
    degree: float = 0.0
    Q: float = 1.0
    zero_free_sigma: float = 1.0
    pole_order: int = 0

    def derivs(self, s, order: int) -> np.ndarray:
        return np.asarray(self.func(np.atleast_1d(np.asarray(s, dtype=complex)), order), dtype=complex)


# --------------------------------------------------------------------------
# evaluation


def _leibniz(f, g, order):
    out = np.zeros_like(f[: order + 1])
    for k in range(order + 1):
        for m in range(k + 1):
            out[k] += math.comb(k, m) * f[m] * g[k - m]
    return out


def _factor_derivs(s, order):
    """h(s) = 1 + sqrt5 5^-s and its derivatives."""
    p = SQRT5 * power_neg(5.0, s)
    h = np.empty((order + 1, s.shape[0]), dtype=complex)
    h[0] = 1.0 + p
    for k in range(1, order + 1):
        h[k] = (-LOG5) ** k * p
    return h


def _series_derivs(kind, tau, s, order, extended=False):
    """(derivs, err) from the Dirichlet-series side (Euler-Maclaurin)."""
    if kind == "RiemannZeta":
        return zeta_derivs(s, order, extended=extended)
    if kind == "LPsi5":
        return lpsi5_derivs(s, order, extended=extended)
    if kind == "FactorZeta":
        z, e = zeta_derivs(s, order, extended=extended)
        h = _factor_derivs(s, order)
        return _leibniz(h, z, order), e * (1.0 + SQRT5 * np.abs(np.exp(-s * LOG5))) * (1 + LOG5) ** order
    # FamilyF
    if tau == 1.0:
        return lpsi5_derivs(s, order, extended=extended)
    if tau == 0.0:
        z, e = zeta_derivs(s, order, extended=extended)
        h = _factor_derivs(s, order)
        return _leibniz(h, z, order), e * (1.0 + SQRT5 * np.abs(np.exp(-s * LOG5))) * (1 + LOG5) ** order
    z, ze, l, le = zeta_and_lpsi5_derivs(s, order, extended=extended)
    h = _factor_derivs(s, order)
    hz = _leibniz(h, z, order)
    err = (1 - tau) * ze * (1.0 + SQRT5 * np.abs(np.exp(-s * LOG5))) * (1 + LOG5) ** order + tau * le
    return (1.0 - tau) * hz + tau * l, err


def dtau_derivs(s, order: int) -> np.ndarray:
    """s-derivatives of d f / d tau = L(s, psi) - (1 + sqrt5 5^-s) zeta(s)."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    left = s.real < REFLECT_BELOW
    out = np.empty((order + 1, s.shape[0]), dtype=complex)
    if np.any(~left):
        z, _, l, _ = zeta_and_lpsi5_derivs(s[~left], order)
        out[:, ~left] = l - _leibniz(_factor_derivs(s[~left], order), z, order)
    if np.any(left):
        # both pieces share the mod-5 functional equation
        out[:, left] = _reflect_apply(_MOD5_FE, s[left], order, lambda w, k: dtau_derivs(w, k))[0]
    return out


def _sin_scaled(s, order):
    """(pi/2)^j sin(pi s/2 + j pi/2) * exp(-|Im(pi s/2)|) for j = 0..order, and |Im(pi s/2)|."""
    z = 0.5 * np.pi * s
    y = np.abs(z.imag)
    out = np.empty((order + 1, s.shape[0]), dtype=complex)
    for j in range(order + 1):
        w = z + 0.5 * np.pi * j
        a = np.exp(1j * w.real - w.imag - y)
        b = np.exp(-1j * w.real + w.imag - y)
        out[j] = (0.5 * np.pi) ** j * (a - b) / 2j
    return out, y


def reflection_factor_derivs(fe: FunctionalEquationData, s, order):
    """X and its derivatives in F(s) = X(s) F(1 - s).

    X(s) = (Q^2 pi)^(1/2 - s) 2 (2 pi)^(s-1) Gamma(1 - s) sin(pi s / 2), the
    asymmetric form valid for a single Gamma(s/2) factor with omega = 1.
    """
    if not fe.single_half_factor:
        raise DomainError("asymmetric reflection implemented for a single Gamma(s/2) factor")
    lq = math.log(fe.Q * fe.Q * math.pi)
    w = 1.0 - s
    ell = (0.5 - s) * lq + math.log(2.0) + (s - 1.0) * LOG_2PI + log_gamma(w)
    d = [None, -lq + LOG_2PI - polygamma(0, w)]
    for k in range(2, order + 1):
        d.append((-1) ** k * polygamma(k - 1, w))
    bell = [np.ones_like(s)]
    if order >= 1:
        bell.append(d[1])
    if order >= 2:
        bell.append(d[2] + d[1] ** 2)
    if order >= 3:
        bell.append(d[3] + 3 * d[1] * d[2] + d[1] ** 3)
    sn, y = _sin_scaled(s, order)
    scale = np.exp(ell + y)
    X = np.empty((order + 1, s.shape[0]), dtype=complex)
    for j in range(order + 1):
        acc = np.zeros_like(s)
        for i in range(j + 1):
            acc += math.comb(j, i) * bell[i] * sn[j - i]
        X[j] = scale * acc
    return X, ell


def _reflect_apply(fe, s, order, mirror_derivs, mirror_err=None):
    X, ell = reflection_factor_derivs(fe, s, order)
    G = mirror_derivs(1.0 - s, order)
    err0 = None
    if isinstance(G, tuple):
        G, err0 = G
    out = np.zeros((order + 1, s.shape[0]), dtype=complex)
    for k in range(order + 1):
        for j in range(k + 1):
            out[k] += math.comb(k, j) * X[j] * (-1) ** (k - j) * G[k - j]
    absX = np.max(np.abs(X), axis=0)
    err = absX * (err0 if err0 is not None else 0.0) + 4e-16 * (1.0 + np.abs(ell)) * np.abs(out[order])
    return out, err


def _derivs(spec, s, order, method="auto", extended=False):
    if isinstance(spec, AnalyticFunction):
        return spec.derivs(s, order), np.zeros(s.shape[0])
    if spec.pole_order > 0 and np.any(s == 1.0):
        raise PoleError(f"{spec.name} has a pole at s = 1")
    if not np.all(np.isfinite(s)):
        raise DomainError("argument is not finite")
    if method == "series":
        return _series_derivs(spec.kind, spec.tau, s, order, extended)
    if method == "reflect":
        left = np.ones(s.shape, dtype=bool)
    else:
        left = s.real < REFLECT_BELOW
    out = np.empty((order + 1, s.shape[0]), dtype=complex)
    err = np.empty(s.shape[0])
    if np.any(~left):
        out[:, ~left], err[~left] = _series_derivs(spec.kind, spec.tau, s[~left], order, extended)
    if np.any(left):
        out[:, left], err[left] = _reflect_apply(
            spec.fe, s[left], order, lambda w, k: _series_derivs(spec.kind, spec.tau, w, k))
    return out, err


def _scalar_or_array(val, err, scalar):
    if scalar:
        return EvalResult(complex(val[0]), float(err[0]))
    return EvalResult(val, err)


def evaluate(spec, s, deriv_order: int = 0, *, method: str = "auto") -> EvalResult:
    """F^(deriv_order)(s) with an error estimate.

    ``method`` is "auto" (series for Re s >= -1, functional-equation
    reflection below), "series" or "reflect".
    """
    if not 0 <= deriv_order <= 2:
        raise ValueError("deriv_order must be 0, 1 or 2")
    z = np.asarray(s, dtype=complex)
    scalar = z.ndim == 0
    d, e = _derivs(spec, np.atleast_1d(z), deriv_order, method)
    return _scalar_or_array(d[deriv_order], e, scalar)


def eval_dtau(s, tau: float | None = None) -> complex | np.ndarray:
    """d f(s, tau) / d tau; f is affine in tau so the result ignores tau."""
    z = np.asarray(s, dtype=complex)
    if np.any(z == 1.0):
        raise PoleError("d f / d tau has a pole at s = 1")
    out = dtau_derivs(np.atleast_1d(z), 0)[0]
    return complex(out[0]) if z.ndim == 0 else out


def fe_reflect(spec, s, deriv_order: int = 0) -> EvalResult:
    """F(s) from F(1 - s) through the asymmetric functional equation.

    For FamilyF this is f(s) = 5^(1/2-s) 2 (2pi)^(s-1) Gamma(1-s) sin(pi s/2) f(1-s);
    the zeta and mod-5 kinds use the same form with their own conductor.
    """
    z = np.asarray(s, dtype=complex)
    if np.any(z.real >= 0.5):
        raise DomainError("fe_reflect needs Re s < 1/2")
    return evaluate(spec, z, deriv_order, method="reflect")


def log_completed_phi(spec, s, method="series"):
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    F = _derivs(spec, s, 0, method)[0][0]
    with np.errstate(divide="ignore"):
        out = np.log(F) + s * math.log(spec.fe.Q)
    for lam, mu in spec.fe.gamma_factors:
        out = out + log_gamma(lam * s + mu)
    return out


def completed_phi(spec, s):
    """Phi(s) = F(s) Q^s prod Gamma(lambda_j s + mu_j), assembled in log form."""
    z = np.asarray(s, dtype=complex)
    out = np.exp(log_completed_phi(spec, z, method="auto"))
    return complex(out[0]) if z.ndim == 0 else out


def fe_residual(spec, s):
    """|Phi(s) - omega conj(Phi(1 - conj s))| / (|Phi(s)| + |Phi(1 - conj s)|).

    Both sides come from the series path, so the check is not circular at
    points where evaluate() would itself reflect.
    """
    z = np.asarray(s, dtype=complex)
    s1 = np.atleast_1d(z)
    a = log_completed_phi(spec, s1)
    b = np.conj(log_completed_phi(spec, 1.0 - np.conj(s1))) + cmath.log(spec.fe.omega)
    m = np.maximum(a.real, b.real)
    both_zero = ~np.isfinite(m)
    m = np.where(both_zero, 0.0, m)
    ea = np.exp(a - m)
    eb = np.exp(b - m)
    with np.errstate(invalid="ignore"):
        res = np.abs(ea - eb) / (np.abs(ea) + np.abs(eb))
    res = np.where(both_zero, 0.0, res)
    return float(res[0]) if z.ndim == 0 else res


# --------------------------------------------------------------------------
# critical line


@dataclass(frozen=True)
class LineSample:
    t: float
    z_value: float
    f_value: complex
    phase: complex


def theta_derivs(fe: FunctionalEquationData, t, order: int = 0) -> np.ndarray:
    """Rotation angle theta(t) with exp(i theta) F(1/2 + it) real, and t-derivatives.

    theta(t) = t log Q + sum Im log Gamma(lambda (1/2 + it) + mu) - arg(omega)/2,
    continuous in t because log Gamma is evaluated with Re > 0.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s = 0.5 + 1j * t
    out = np.zeros((order + 1, t.shape[0]))
    out[0] = t * math.log(fe.Q) - 0.5 * cmath.phase(fe.omega)
    if order >= 1:
        out[1] = math.log(fe.Q)
    for lam, mu in fe.gamma_factors:
        w = lam * s + mu
        out[0] += log_gamma(w).imag
        if order >= 1:
            out[1] += lam * polygamma(0, w).real
        if order >= 2:
            out[2] += -lam * lam * polygamma(1, w).imag
        if order >= 3:
            out[3] += -lam ** 3 * polygamma(2, w).real
    return out


def z_derivs_from(F, theta, order):
    """Real rotated function Z(t) = exp(i theta) F(1/2+it) and t-derivatives.

    F holds s-derivatives of F at 1/2 + it, theta the t-derivatives of theta.
    """
    ph = np.exp(1j * theta[0])
    out = np.empty((order + 1, F.shape[1]))
    out[0] = (ph * F[0]).real
    if order >= 1:
        out[1] = (ph * (1j * theta[1] * F[0] + 1j * F[1])).real
    if order >= 2:
        out[2] = (ph * (-theta[1] ** 2 * F[0] - 2 * theta[1] * F[1] + 1j * theta[2] * F[0] - F[2])).real
    return out


def line_z(spec, t, order: int = 0) -> np.ndarray:
    """Vector form of the rotated function; shape (order+1, len(t))."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    F = _derivs(spec, 0.5 + 1j * t, order)[0]
    return z_derivs_from(F, theta_derivs(spec.fe, t, order), order)


def z_rotated(spec, t: float) -> LineSample:
    """Rotated real value of F on the critical line.

    Line zeros of F are exactly the sign changes (or zeros) of z_value.
    """
    th = theta_derivs(spec.fe, t, 0)[0, 0]
    f = complex(_derivs(spec, np.array([0.5 + 1j * t]), 0)[0][0, 0])
    rot = cmath.exp(1j * th) * f
    return LineSample(t=float(t), z_value=rot.real, f_value=f, phase=cmath.exp(-1j * th))


@dataclass(frozen=True)
class LogDerivSample:
    lhs: float
    rhs_exact: float
    rhs_asymptotic: float


def critical_line_logderiv(spec, t, *, min_abs=1e-8):
    """Re F'/F(1/2+it) against the functional-equation identity and its asymptotic form."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    s = 0.5 + 1j * ts
    # Re F'/F has condition number |F'|/|F|^2, so near zeros the sums need extra precision
    F = _derivs(spec, s, 1, extended=True)[0]
    if np.any(np.abs(F[0]) < min_abs):
        raise TooCloseToZeroError(f"|F(1/2+it)| < {min_abs:g}")
    fe = spec.fe
    lhs = (F[1] / F[0]).real
    rhs = -math.log(fe.Q) * np.ones_like(ts)
    for lam, mu in fe.gamma_factors:
        rhs -= lam * polygamma(0, lam * s + mu).real
    asym = -0.5 * fe.degree * np.log(ts) - math.log(fe.Q)
    if np.ndim(t) == 0:
        return LogDerivSample(float(lhs[0]), float(rhs[0]), float(asym[0]))
    return LogDerivSample(lhs, rhs, asym)


def check_growth(spec, t_values, sigmas=None):
    """Check the lower bound on sigma = sigma1 and the polynomial growth bound.

    Returns (lower_ok, upper_ok) booleans over the supplied grid.
    """
    g = spec.growth
    t = np.asarray(t_values, dtype=float)
    low = np.abs(_derivs(spec, g.sigma1 + 1j * t, 0)[0][0])
    lower_ok = bool(np.all(low >= g.c))
    if sigmas is None:
        sigmas = np.linspace(-4 * g.sigma1, g.sigma1 + 1, 9)
    tt = t[t > 10]
    upper_ok = True
    for sg in sigmas:
        v = np.abs(_derivs(spec, sg + 1j * tt, 0)[0][0])
        upper_ok &= bool(np.all(v < tt ** g.B))
    return lower_ok, upper_ok


class ZetaFamily:
    """The family f(s, tau) with the data the trajectory code needs."""

    fe = _MOD5_FE

    def spec(self, tau: float) -> FunctionSpec:
        return family_spec(tau)

    def derivs(self, s, tau: float, order: int) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        return _derivs(family_spec(tau), s, order)[0]

    def dtau(self, s, order: int) -> np.ndarray:
        return dtau_derivs(s, order)

    def derivs_and_dtau(self, s, tau: float, order: int):
        """s-derivatives of f and of d f / d tau from one pass over zeta and L."""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        if np.any(s == 1.0):
            raise PoleError("the family has a pole at s = 1")
        if np.any(s.real < REFLECT_BELOW):
            return self.derivs(s, tau, order), dtau_derivs(s, order)
        z, _, l, _ = zeta_and_lpsi5_derivs(s, order)
        hz = _leibniz(_factor_derivs(s, order), z, order)
        return (1.0 - tau) * hz + tau * l, l - hz

    def theta(self, t, order: int) -> np.ndarray:
        return theta_derivs(self.fe, t, order)

    def mirror(self, s):
        return 1.0 - np.conj(s)
