"""Zero trajectories of f(s, tau) in tau, double-zero events and the census.

A zero on the critical line is followed through the real rotated function
Z(t, tau), so it stays exactly on the line. A zero off the line is followed
by complex Newton steps. When two zeros come close, the extremum value
E(tau) = Z(t_m, tau) with Z_t(t_m, tau) = 0 decides whether they still sit on
the line (E has the sign opposite to Z_tt) or have left it. A sign change
of E marks a double zero, which is then polished by two-dimensional Newton
on (Z, Z_t).
"""

from __future__ import annotations

import cmath
import csv
import io
import json
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import lfunc
from .contour import circle, rectangle, winding
from .errors import (
    ConvergenceError,
    DomainError,
    HigherOrderZeroError,
    NoCollisionError,
    SingularStallError,
    StepUnderflowError,
    WrongCountError,
    ZetaLabError,
)
from .zeros import evaluator, scan_zeros

NOISE_STEP = 1e-10
LINE_TOL = 1e-9


# --------------------------------------------------------------------------
# families


class PlantedFamily:
    """g(s, tau) = u(s) ((s - 1/2 - i t0)^2 + kappa (tau - tau0)).

    With u = 1 the function is real on the critical line. kappa < 0 makes
    the two line zeros collide at tau0 and leave the line; kappa > 0 is the
    reverse. ``unit="exp"`` multiplies by exp(s), which breaks the line
    symmetry but keeps a clean double zero for local fits.
    """

    def __init__(self, t0: float = 1.0, tau0: float = 0.5, kappa: float = -1.0, unit: str | None = None):
        self.t0, self.tau0, self.kappa, self.unit = float(t0), float(tau0), float(kappa), unit
        self.fe = None

    def _u(self, s, order):
        if self.unit == "exp":
            e = np.exp(s)
            return np.array([e] * (order + 1))
        u = np.zeros((order + 1, s.shape[0]), dtype=complex)
        u[0] = 1.0
        return u

    def derivs_and_dtau(self, s, tau, order):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        w = s - 0.5 - 1j * self.t0
        p = np.zeros((order + 1, s.shape[0]), dtype=complex)
        p[0] = w * w + self.kappa * (tau - self.tau0)
        if order >= 1:
            p[1] = 2 * w
        if order >= 2:
            p[2] = 2.0
        pt = np.zeros_like(p)
        pt[0] = self.kappa
        u = self._u(s, order)
        return lfunc._leibniz(u, p, order), lfunc._leibniz(u, pt, order)

    def derivs(self, s, tau, order):
        return self.derivs_and_dtau(s, tau, order)[0]

    def dtau(self, s, order):
        return self.derivs_and_dtau(s, 0.0, order)[1]

    def theta(self, t, order):
        return np.zeros((order + 1, np.atleast_1d(t).shape[0]))

    def spec(self, tau):
        return lfunc.AnalyticFunction(lambda s, k: self.derivs(s, tau, k), name="planted",
                                      zero_free_sigma=3.0)

    def mirror(self, s):
        return 1.0 - np.conj(s)


def _default_family(family):
    return lfunc.ZetaFamily() if family is None else family


def _line(fam, t, tau, order):
    """Z and Z_tau with t-derivatives up to ``order`` and ``order - 1``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    F, Ft = fam.derivs_and_dtau(0.5 + 1j * t, tau, order)
    th = fam.theta(t, order)
    Z = lfunc.z_derivs_from(F, th, order)
    Zt = lfunc.z_derivs_from(Ft, th, max(order - 1, 0))
    return Z, Zt


def _point(fam, s, tau, order):
    F, Ft = fam.derivs_and_dtau(np.array([complex(s)]), tau, order)
    return F[:, 0], Ft[:, 0]


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class StepControl:
    h_init: float = 1e-3
    h_min: float = 1e-6
    h_max: float = 1e-2
    tol: float = 1e-12
    max_newton: int = 4
    easy_steps: int = 5
    fs_floor: float = 1e-4
    pair_distance: float = 1e-2
    kantorovich: float = 0.25

    def halved(self) -> "StepControl":
        return replace(self, h_init=self.h_init / 2, h_max=self.h_max / 2, tol=self.tol / 2)

    def to_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class DoubleZeroEvent:
    tau0: float
    rho0: complex
    f_second_deriv: complex
    kind: str = "leaving"  # zeros on the line for tau < tau0 when leaving

    def to_dict(self):
        return {"tau0": self.tau0, "rho0": [self.rho0.real, self.rho0.imag],
                "f_second_deriv": [self.f_second_deriv.real, self.f_second_deriv.imag], "kind": self.kind}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["tau0"]), complex(*d["rho0"]), complex(*d["f_second_deriv"]), d["kind"])

    def key(self):
        return (round(self.tau0, 6), round(self.rho0.imag, 6))


@dataclass(frozen=True)
class Classification:
    kind: str  # stays_on_line, leaves_at, incomplete
    tau_star: float | None = None
    rho_star: complex | None = None
    reason: str = ""

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "leaves_at":
            d["tau_star"] = self.tau_star
            d["rho_star"] = [self.rho_star.real, self.rho_star.imag]
        if self.kind == "incomplete":
            d["reason"] = self.reason
        return d

    @classmethod
    def from_dict(cls, d):
        rho = d.get("rho_star")
        return cls(d["kind"], d.get("tau_star"), None if rho is None else complex(*rho), d.get("reason", ""))


@dataclass
class Trajectory:
    samples: list
    target: str
    classification: Classification
    events: list = field(default_factory=list)
    ended_at_pole: bool = False

    @property
    def taus(self):
        return np.array([t for t, _ in self.samples])

    @property
    def rhos(self):
        return np.array([r for _, r in self.samples])

    def at(self, tau: float) -> complex:
        """Sample recorded exactly at ``tau``."""
        for t, r in self.samples:
            if t == tau:
                return r
        raise KeyError(tau)

    def to_dict(self):
        return {
            "target": self.target,
            "samples": [[t, r.real, r.imag] for t, r in self.samples],
            "classification": self.classification.to_dict(),
            "events": [e.to_dict() for e in self.events],
            "ended_at_pole": self.ended_at_pole,
        }

    @classmethod
    def from_dict(cls, d):
        return cls([(float(a), complex(b, c)) for a, b, c in d["samples"]], d["target"],
                   Classification.from_dict(d["classification"]),
                   [DoubleZeroEvent.from_dict(e) for e in d["events"]], bool(d.get("ended_at_pole", False)))


@dataclass(frozen=True)
class LocalQuadraticModel:
    tau: float
    a1: complex
    a0: complex
    roots: tuple[complex, complex]
    discriminant: complex


# --------------------------------------------------------------------------
# local quadratic model


def local_quadratic_fit(tau: float, center: complex, radius: float, family=None, *,
                        n_points: int = 128) -> LocalQuadraticModel:
    """Weierstrass quadratic s^2 + a1 s + a0 for the two zeros in |s - center| < radius.

    The zeros come from the power sums (1/2 pi i) \\oint s^k f'/f ds on the
    circle, each polished by Newton unless they are too close to separate.
    Roots are reported as (-a1 +- sqrt(a1^2 - 4 a0)) / 2 with the principal
    square root.
    """
    fam = _default_family(family)
    spec = fam.spec(tau)
    g = evaluator(spec, "F")
    center = complex(center)
    n = winding(g, circle(center, radius), nudge=False)[0]
    if n != 2:
        raise WrongCountError(f"expected 2 zeros in the disk, found {n}")
    w = np.exp(2j * np.pi * np.arange(n_points) / n_points)
    s = center + radius * w
    v = g(s, 1)
    q = v[1] / v[0] * radius * w  # f'/f ds / (2 pi i) per node, up to 1/n
    p1 = np.mean(q * (s - center))
    p2 = np.mean(q * (s - center) ** 2)
    # local coordinates about center avoid cancellation
    b1 = -p1
    b0 = 0.5 * (p1 * p1 - p2)
    disc = b1 * b1 - 4 * b0
    r1 = center + 0.5 * (-b1 + cmath.sqrt(disc))
    r2 = center + 0.5 * (-b1 - cmath.sqrt(disc))
    if abs(r1 - r2) > 1e-5 * radius:
        r1, r2 = (_newton(g, r, 1e-15, 30) for r in (r1, r2))
    a1 = -(r1 + r2)
    a0 = r1 * r2
    disc = (r1 - r2) ** 2
    root = cmath.sqrt(disc)
    s1 = 0.5 * (-a1 + root)
    s2 = 0.5 * (-a1 - root)
    return LocalQuadraticModel(float(tau), a1, a0, (s1, s2), disc)


def _newton(g, s, tol, iters, m=1):
    s = complex(s)
    for _ in range(iters):
        v = g(np.array([s]), 1)[:, 0]
        if v[1] == 0:
            break
        d = m * v[0] / v[1]
        s -= d
        if not cmath.isfinite(s):
            raise ConvergenceError("Newton iterate is not finite")
        if abs(d) <= max(tol, 4 * np.spacing(abs(s))):
            break
    return s


# --------------------------------------------------------------------------
# double zeros


def _zt_root(fam, t, tau, iters=40):
    for _ in range(iters):
        Z, _ = _line(fam, t, tau, 2)
        d = Z[1, 0] / Z[2, 0]
        t -= d
        if abs(d) <= 4 * np.spacing(abs(t)) + 1e-15:
            return t
    raise ConvergenceError("extremum search did not converge")


def _polish_event(fam, t, tau, kind):
    """Two-dimensional Newton on (Z, Z_t) in (t, tau), then invariant checks."""
    for _ in range(40):
        Z, Zt = _line(fam, t, tau, 2)
        J = np.array([[Z[1, 0], Zt[0, 0]], [Z[2, 0], Zt[1, 0]]])
        rhs = np.array([Z[0, 0], Z[1, 0]])
        dt, dtau = np.linalg.solve(J, rhs)
        t -= dt
        tau -= dtau
        if abs(dt) <= 4 * np.spacing(abs(t)) and abs(dtau) <= 4e-16:
            break
    F, _ = _point(fam, 0.5 + 1j * t, tau, 2)
    if abs(F[2]) <= 1e-4:
        raise HigherOrderZeroError(f"|f''| = {abs(F[2]):.3e} at the collision; higher-order zero")
    if abs(F[0]) >= 1e-8 or abs(F[1]) >= 1e-6:
        raise ConvergenceError(f"collision refinement left |f| = {abs(F[0]):.2e}, |f'| = {abs(F[1]):.2e}")
    if abs(t) < 1e-12:
        # conjugate zeros meet on the real axis, where the family is real
        t = 0.0
        F = F.real.astype(complex)
    return DoubleZeroEvent(float(tau), complex(0.5, t), complex(F[2]), kind)


def _refine_event(fam, t_m, tau_a, tau_b):
    """Event between tau_a and tau_b where the extremum value E(tau) changes sign."""
    state = {"t": t_m}

    def E(tau):
        state["t"] = _zt_root(fam, state["t"], tau)
        return float(_line(fam, state["t"], tau, 0)[0][0, 0])

    ea, eb = E(tau_a), E(tau_b)
    if ea * eb > 0:
        raise NoCollisionError("extremum value does not change sign")
    Z2 = float(_line(fam, state["t"], tau_a, 2)[0][2, 0])
    # line pair exists where E and Z_tt have opposite signs
    pair_at_a = ea * Z2 < 0
    lo, hi = sorted((tau_a, tau_b))
    pair_below = pair_at_a == (tau_a < tau_b)
    kind = "leaving" if pair_below else "returning"
    tau0 = brentq(E, lo, hi, xtol=1e-15, rtol=1e-15) if ea != 0 and eb != 0 else (tau_a if ea == 0 else tau_b)
    t0 = _zt_root(fam, state["t"], tau0)
    return _polish_event(fam, t0, tau0, kind)


def count_line_zeros(fam, tau, t_lo, t_hi, n_grid=256):
    """Line zeros in (t_lo, t_hi) at tau, catching close pairs between grid points."""
    t = np.linspace(t_lo, t_hi, n_grid + 1)
    Z = _line(fam, t, tau, 0)[0][0]
    n = int(np.sum(Z[1:] * Z[:-1] < 0))
    a = np.abs(Z)
    for i in range(1, n_grid):
        if a[i] < a[i - 1] and a[i] <= a[i + 1] and Z[i - 1] * Z[i + 1] > 0 and Z[i] * Z[i - 1] > 0:
            try:
                tm = _zt_root(fam, t[i], tau)
            except ConvergenceError:
                continue
            if t[i - 1] < tm < t[i + 1] and _line(fam, tm, tau, 0)[0][0, 0] * Z[i] < 0:
                n += 2
    return n


def detect_double_zero(t_bracket, tau_bracket, family=None, *, n_grid: int = 256) -> DoubleZeroEvent:
    """Collision of two line zeros inside t_bracket for some tau in tau_bracket."""
    fam = _default_family(family)
    t_lo, t_hi = map(float, t_bracket)
    ta, tb = map(float, tau_bracket)
    ca = count_line_zeros(fam, ta, t_lo, t_hi, n_grid)
    cb = count_line_zeros(fam, tb, t_lo, t_hi, n_grid)
    if abs(ca - cb) != 2:
        raise NoCollisionError(f"line-zero counts {ca} and {cb} at the bracket ends")
    # bisect on the count until the pair is close, then follow its extremum
    for _ in range(60):
        tm = 0.5 * (ta + tb)
        cm = count_line_zeros(fam, tm, t_lo, t_hi, n_grid)
        if cm == ca:
            ta = tm
        elif cm == cb:
            tb = tm
        else:
            raise NoCollisionError("more than one collision inside the bracket")
        if abs(tb - ta) < 1e-7:
            break
    pair_side = ta if ca > cb else tb
    t = np.linspace(t_lo, t_hi, 4 * n_grid + 1)
    Z = _line(fam, t, pair_side, 1)[0]
    sc = np.nonzero(Z[0][1:] * Z[0][:-1] <= 0)[0]
    # the vanishing pair is the closest adjacent pair of sign changes
    if len(sc) >= 2:
        k = int(np.argmin(np.diff(t[sc])))
        guess = 0.5 * (t[sc[k]] + t[sc[k + 1] + 1])
    else:
        guess = t[int(np.argmin(np.abs(Z[0])))]
    t_m = _zt_root(fam, guess, pair_side)
    return _refine_event(fam, t_m, ta, tb)


# --------------------------------------------------------------------------
# tracing


class _Tracer:
    def __init__(self, fam, target, ctrl: StepControl):
        self.fam = fam
        self.target = target
        self.c = ctrl
        self.shift = 0 if target == "F" else 1

    # evaluation of the traced function (f or f_s) at a point
    def _pt(self, s, tau):
        F, Ft = _point(self.fam, s, tau, 2 + self.shift)
        return F[self.shift:], Ft[self.shift:]

    def _done(self, d, prev, x):
        # converged, or stalled at the rounding floor of the evaluation
        if abs(d) <= max(self.c.tol, 4 * np.spacing(abs(x))):
            return True
        return abs(d) <= NOISE_STEP and abs(d) > 0.5 * prev

    def _newton_s(self, s, tau, iters):
        prev = np.inf
        for k in range(iters):
            F, _ = self._pt(s, tau)
            if F[1] == 0:
                return s, False
            d = F[0] / F[1]
            s -= d
            if self._done(d, prev, s):
                return s, True
            prev = abs(d)
        return s, False

    def _newton_t(self, t, tau, iters):
        prev = np.inf
        for k in range(iters):
            Z, _ = _line(self.fam, t, tau, 1)
            if Z[1, 0] == 0:
                return t, False
            d = Z[0, 0] / Z[1, 0]
            t -= d
            if self._done(d, prev, t):
                return t, True
            prev = abs(d)
        return t, False

    def run(self, rho, tau0, tau1, stops=()):
        self.ended_at_pole = False
        tr = self._run(rho, tau0, tau1, stops)
        tr.ended_at_pole = self.ended_at_pole
        tr.samples = [(float(t), complex(r)) for t, r in tr.samples]
        return tr

    def _run(self, rho, tau0, tau1, stops=()):
        c = self.c
        s = complex(rho)
        tau = float(tau0)
        samples = [(tau, s)]
        events = []
        if tau1 == tau0:
            return Trajectory(samples, self.target, self._classify(samples, events), events)
        direction = 1.0 if tau1 > tau0 else -1.0
        stops = sorted({float(x) for x in stops if (x - tau0) * direction > 0 and (tau1 - x) * direction > 0}
                       | {float(tau1)}, key=lambda x: direction * x)
        F, _ = self._pt(s, tau)
        if abs(F[0]) >= 1e-9:
            raise DomainError(f"start point is not a zero: |f| = {abs(F[0]):.2e}")
        mode = "line" if (self.target == "F" and abs(s.real - 0.5) < LINE_TOL) else "off"
        if mode == "line":
            s = complex(0.5, s.imag)
        h = c.h_init
        easy = 0
        while stops:
            nxt = stops[0]
            room = abs(nxt - tau)
            F, Ft = self._pt(s, tau)
            fs, fss = abs(F[1]), abs(F[2])
            if self._into_pole(s, tau, F, Ft, stops, direction):
                # f(s, tau) ~ (1 - tau) c / (s - 1) + L(s): the zero meets the pole as tau -> 1
                samples.append((1.0, 1.0 + 0j))
                stops.clear()
                self.ended_at_pole = True
                break
            near = fs < c.fs_floor or 2 * fs < c.pair_distance * fss
            if near and self.target == "F" and self._pair_capable(s, mode):
                tau, s, mode, new_samples, ev = self._pair(s, tau, mode, direction, stops)
                samples.extend(new_samples)
                events.extend(ev)
                while stops and (stops[0] - tau) * direction <= 0:
                    stops.pop(0)
                h = c.h_init
                easy = 0
                continue
            if near and fs < c.fs_floor * 1e-3:
                raise SingularStallError(f"|f_s| = {fs:.2e} with no usable local model at tau = {tau}")
            # Kantorovich cap on the predicted displacement
            rate = abs(Ft[0] / F[1])
            radius = c.kantorovich * fs / max(fss, 1e-300)
            h_cap = radius / max(rate, 1e-300)
            step = min(h, h_cap, room)
            if step < c.h_min and step < room:
                raise StepUnderflowError(f"step {step:.2e} below minimum at tau = {tau}")
            tn = tau + direction * step
            if tn * direction > nxt * direction or step == room:
                tn = nxt
            sp = s - (tn - tau) * Ft[0] / F[1]
            if mode == "line":
                t_new, ok = self._newton_t(sp.imag, tn, c.max_newton)
                s_new = complex(0.5, t_new)
            else:
                s_new, ok = self._newton_s(sp, tn, c.max_newton)
            if ok and abs(s_new - sp) <= 2 * radius + 1e-12:
                samples.append((tn, s_new))
                s, tau = s_new, tn
                if tau == nxt:
                    stops.pop(0)
                easy += 1
                if easy >= c.easy_steps:
                    h = min(2 * h, c.h_max)
                    easy = 0
            else:
                h = step / 2
                easy = 0
                if h < c.h_min:
                    raise StepUnderflowError(f"corrector failed down to step {h:.2e} at tau = {tau}")
        if mode == "off" and self.target == "F" and abs(s.real - 0.5) < LINE_TOL:
            raise ConvergenceError("off-line zero drifted onto the line without an event")
        return Trajectory(samples, self.target, self._classify(samples, events), events)

    def _into_pole(self, s, tau, F, Ft, stops, direction):
        if self.target != "F" or direction < 0 or stops != [1.0] or abs(s.imag) > 1e-12:
            return False
        d = abs(s - 1.0)
        if d > 1e-3:
            return False
        # linear extrapolation of the trajectory lands on s = 1 at tau = 1
        v = -Ft[0] / F[1]
        land = s + v * (1.0 - tau)
        return abs(land - 1.0) < 0.05 * d

    def _pair_capable(self, s, mode):
        # the partner is the neighbouring line zero or the mirror image
        return mode == "line" or abs(s.real - 0.5) < self.c.pair_distance

    def _roots_near(self, t_m, tau):
        """Both zeros of the close pair, from the Taylor quadratic at 1/2 + i t_m."""
        cpt = complex(0.5, t_m)
        F, _ = _point(self.fam, cpt, tau, 2)
        a, b, q = 0.5 * F[2], F[1], F[0]
        disc = cmath.sqrt(b * b - 4 * a * q)
        roots = []
        g = evaluator(self.fam.spec(tau), "F")
        for sign in (1, -1):
            h = (-b + sign * disc) / (2 * a)
            roots.append(_newton(g, cpt + h, self.c.tol, 40))
        return roots

    def _pair(self, s, tau, mode, direction, stops):
        """Follow a close pair until it separates or collides."""
        c = self.c
        fam = self.fam
        samples, events = [], []
        if mode == "line":
            Z, _ = _line(fam, s.imag, tau, 2)
            t_m = s.imag - Z[1, 0] / Z[2, 0]
        else:
            t_m = s.imag
        t_m = _zt_root(fam, t_m, tau)
        Z, Zt = _line(fam, t_m, tau, 2)
        E = Z[0, 0]
        h = c.h_init
        for _ in range(100000):
            if not stops:
                break
            nxt = stops[0]
            room = abs(nxt - tau)
            rate = direction * Zt[0, 0]
            if E * rate < 0:
                step = min(c.h_max, 1.5 * abs(E / rate))
            else:
                step = h
            step = max(min(step, room), min(c.h_min, room))
            tn = nxt if step >= room else tau + direction * step
            t_pred = t_m - (tn - tau) * Zt[1, 0] / Z[2, 0]
            try:
                t_mn = _zt_root(fam, t_pred, tn)
            except ConvergenceError:
                h = step / 2
                if h < c.h_min * 1e-3:
                    raise SingularStallError("extremum lost while following a close pair")
                continue
            Zn, Ztn = _line(fam, t_mn, tn, 2)
            En = Zn[0, 0]
            if En == 0 or En * E < 0:
                ev = _refine_event(fam, t_m, tau, tn)
                s, tau, mode = self._cross(ev, s, mode, direction, tau, tn)
                samples.append((ev.tau0, ev.rho0))
                samples.append((tau, s))
                events.append(ev)
                while stops and (stops[0] - tau) * direction < 0:
                    raise ConvergenceError("event step skipped a stop")
                if stops and tau == stops[0]:
                    stops.pop(0)
                if self._separated(s, tau):
                    return tau, s, mode, samples, events
                t_m = _zt_root(fam, ev.rho0.imag, tau)
                Z, Zt = _line(fam, t_m, tau, 2)
                E = Z[0, 0]
                continue
            roots = self._roots_near(t_mn, tn)
            if mode == "line":
                if any(abs(r.real - 0.5) > 1e-6 for r in roots):
                    raise ConvergenceError("line pair lost its symmetry")
                below = s.imag < t_m
                s_new = complex(0.5, min(r.imag for r in roots) if below else max(r.imag for r in roots))
                s_new = complex(0.5, self._newton_t(s_new.imag, tn, 20)[0])
            else:
                left = s.real < 0.5
                s_new = min(roots, key=lambda r: r.real) if left else max(roots, key=lambda r: r.real)
            s, tau, t_m, Z, Zt, E = s_new, tn, t_mn, Zn, Ztn, En
            samples.append((tau, s))
            if tau == nxt:
                stops.pop(0)
            if self._separated(s, tau):
                return tau, s, mode, samples, events
            h = min(2 * h, c.h_max)
        return tau, s, mode, samples, events

    def _separated(self, s, tau):
        F, _ = _point(self.fam, s, tau, 2)
        fs, fss = abs(F[1]), abs(F[2])
        return fs > 2 * self.c.fs_floor and 2 * fs > 2 * self.c.pair_distance * fss

    def _cross(self, ev, s, mode, direction, tau_before, tau_after):
        """Continue through a double zero with the labelling lower->left, upper->right."""
        F, Ft = _point(self.fam, ev.rho0, ev.tau0, 2)
        x = 1e-3
        delta = x * x * abs(F[2]) / (2 * abs(Ft[0]))
        delta = min(max(delta, 1e-12), 1e-3, abs(tau_after - ev.tau0) if tau_after != ev.tau0 else 1e-3)
        tn = ev.tau0 + direction * delta
        w = cmath.sqrt(-2 * Ft[0] * (tn - ev.tau0) / F[2])
        g = evaluator(self.fam.spec(tn), "F")
        r1 = _newton(g, ev.rho0 + w, self.c.tol, 40)
        r2 = _newton(g, ev.rho0 - w, self.c.tol, 40)
        sep = abs(r1 - r2)
        if sep < 0.1 * abs(w):
            raise ConvergenceError("post-collision zeros did not separate")
        on_line = abs(r1.real - 0.5) < 1e-3 * sep and abs(r2.real - 0.5) < 1e-3 * sep
        if mode == "line":
            if on_line:
                raise ConvergenceError("line pair still on the line after the collision")
            lower = s.imag < ev.rho0.imag
            new = min((r1, r2), key=lambda r: r.real) if lower else max((r1, r2), key=lambda r: r.real)
            return new, tn, "off"
        if not on_line:
            raise ConvergenceError("mirror pair did not land on the line after the collision")
        left = s.real < 0.5
        t_new = min(r1.imag, r2.imag) if left else max(r1.imag, r2.imag)
        t_new = self._newton_t(t_new, tn, 20)[0]
        return complex(0.5, t_new), tn, "line"

    def _classify(self, samples, events):
        if self.target != "F":
            return Classification("stays_on_line" if all(abs(r.real - 0.5) < LINE_TOL for _, r in samples)
                                  else "leaves_at", None, None)
        leaving = [e for e in events if (e.kind == "leaving") == (samples[-1][0] >= samples[0][0])]
        if abs(samples[0][1].real - 0.5) >= LINE_TOL:
            return Classification("leaves_at", samples[0][0], samples[0][1])
        if leaving:
            return Classification("leaves_at", leaving[0].tau0, leaving[0].rho0)
        if all(abs(r.real - 0.5) < LINE_TOL for _, r in samples):
            return Classification("stays_on_line")
        return Classification("incomplete", reason="left the line without a detected event")


def trace(target: str, rho_start: complex, tau_start: float, tau_end: float,
          step_ctrl: StepControl | None = None, *, family=None, stops=()) -> Trajectory:
    """Follow a zero of f (target "F") or of f_s (target "Fprime") from tau_start to tau_end.

    ``stops`` are tau values the trajectory must land on exactly.
    """
    if target not in ("F", "Fprime"):
        raise DomainError("target must be F or Fprime")
    if not (0.0 <= min(tau_start, tau_end) and max(tau_start, tau_end) <= 1.0) and family is None:
        raise DomainError("tau must stay in [0, 1]")
    tr = _Tracer(_default_family(family), target, step_ctrl or StepControl())
    return tr.run(rho_start, tau_start, tau_end, stops)


# --------------------------------------------------------------------------
# equivalence check at leaving events


@dataclass(frozen=True)
class StatementCheck:
    a: bool
    b: bool
    c: bool

    def __post_init__(self):
        for k in ("a", "b", "c"):
            object.__setattr__(self, k, bool(getattr(self, k)))

    @property
    def holds(self) -> bool:
        return self.a and self.b and self.c


@dataclass(frozen=True)
class Theorem3Result:
    event: DoubleZeroEvent
    theta: float
    statement1: StatementCheck
    statement2: StatementCheck
    mirrored1: StatementCheck
    mirrored2: StatementCheck
    mirror_error: float
    discriminant_signs: tuple[int, int]

    @property
    def equivalent(self) -> bool:
        return (self.statement1.holds == self.statement2.holds
                and self.mirrored1.holds == self.mirrored2.holds)

    @property
    def exercised(self) -> bool:
        """True when one orientation holds on both sides, so the check is not vacuous."""
        return (self.statement1.holds and self.statement2.holds) or (self.mirrored1.holds and self.mirrored2.holds)

    def to_dict(self):
        return {
            "tau0": self.event.tau0, "rho0": [self.event.rho0.real, self.event.rho0.imag],
            "theta": self.theta,
            "statement1": [self.statement1.a, self.statement1.b, self.statement1.c],
            "statement2": [self.statement2.a, self.statement2.b, self.statement2.c],
            "mirrored1": [self.mirrored1.a, self.mirrored1.b, self.mirrored1.c],
            "mirrored2": [self.mirrored2.a, self.mirrored2.b, self.mirrored2.c],
            "equivalent": self.equivalent, "exercised": self.exercised,
            "mirror_error": self.mirror_error,
        }


def classify_theorem3(event: DoubleZeroEvent, theta: float | None = None, family=None, *,
                      n_side: int = 4) -> Theorem3Result:
    """Evaluate both statements of the equivalence at a double zero on the line.

    Statement 1 uses the two zeros of f from local quadratic fits on a grid
    of tau on each side; statement 2 follows the zero of f_s through rho0.
    The mirrored orientation swaps the roles of tau < tau0 and tau > tau0.
    """
    fam = _default_family(family)
    rho0, tau0 = event.rho0, event.tau0
    F, Ft = _point(fam, rho0, tau0, 3)
    x = 2e-3
    if theta is None:
        theta = min(max(x * x * abs(F[2]) / (2 * abs(Ft[0])), 1e-9), 1e-3)
    sep = math.sqrt(2 * abs(Ft[0]) * theta / abs(F[2]))
    radius = 4 * sep
    grid = [k * theta / n_side for k in range(1, n_side + 1)]
    before = [tau0 - d for d in grid]
    after = [tau0 + d for d in grid]

    def roots(tau):
        return local_quadratic_fit(tau, rho0, radius, fam).roots

    def disc_sign(tau):
        m = local_quadratic_fit(tau, rho0, radius, fam)
        return int(np.sign(m.discriminant.real))

    rb = [roots(t) for t in before]
    ra = [roots(t) for t in after]
    at0 = local_quadratic_fit(tau0, rho0, radius, fam)
    a1 = max(abs(r - rho0) for r in at0.roots) < 1e-6

    def on_line(rs):
        return any(abs(r.real - 0.5) < LINE_TOL for r in rs)

    def left(rs):
        return any(r.real < 0.5 - LINE_TOL for r in rs)

    s1 = StatementCheck(a1, all(on_line(r) for r in rb), all(left(r) for r in ra))
    m1 = StatementCheck(a1, all(on_line(r) for r in ra), all(left(r) for r in rb))
    mirror_err = 0.0
    for rs in rb + ra:
        if not on_line(rs):
            mirror_err = max(mirror_err, abs(rs[1] - (1 - rs[0].conjugate())))

    # zero of f_s through rho0, by the implicit-function predictor and Newton
    gp_rate = -Ft[1] / F[2]

    def rho_tilde(tau):
        g = evaluator(fam.spec(tau), "Fprime")
        return _newton(g, rho0 + (tau - tau0) * gp_rate, 1e-15, 40)

    rt0 = rho_tilde(tau0)
    a2 = abs(rt0 - rho0) < 1e-8
    tb = [rho_tilde(t) for t in before]
    ta = [rho_tilde(t) for t in after]
    s2 = StatementCheck(a2, all(r.real > 0.5 for r in tb), all(r.real < 0.5 for r in ta))
    m2 = StatementCheck(a2, all(r.real > 0.5 for r in ta), all(r.real < 0.5 for r in tb))
    return Theorem3Result(event, float(theta), s1, s2, m1, m2, float(mirror_err),
                          (disc_sign(before[0]), disc_sign(after[0])))


# --------------------------------------------------------------------------
# census


@dataclass
class CensusResult:
    H: float
    total: int
    stays: int
    leaves: int
    incomplete: int
    events: list
    theorem3: list
    conservation: list
    mirror_ok: bool
    trajectories: list
    seeds: list
    reasons: dict = field(default_factory=dict)

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["H", "total", "stays", "leaves", "events"])
        ev = ";".join(f"{e.tau0:.17g}:{e.rho0.imag:.17g}:{e.kind}" for e in self.events)
        w.writerow([format(self.H, ".17g"), self.total, self.stays, self.leaves, ev])
        return buf.getvalue()

    def summary_dict(self):
        return {
            "H": self.H, "total": self.total, "stays": self.stays, "leaves": self.leaves,
            "incomplete": self.incomplete, "mirror_ok": self.mirror_ok,
            "events": [e.to_dict() for e in self.events],
            "theorem3": [r.to_dict() for r in self.theorem3],
            "conservation": [list(c) for c in self.conservation],
            "reasons": {str(k): v for k, v in self.reasons.items()},
        }


def trajectories_to_jsonl(result: CensusResult) -> str:
    lines = []
    for seed, tr in zip(result.seeds, result.trajectories):
        d = {"seed": [seed.real, seed.imag]}
        d.update(tr.to_dict())
        lines.append(json.dumps(d))
    return "\n".join(lines) + "\n"


def plot_data_csv(trajectories) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trajectory", "tau", "re", "im"])
    for i, tr in enumerate(trajectories):
        for t, r in tr.samples:
            w.writerow([i, format(t, ".17g"), format(r.real, ".17g"), format(r.imag, ".17g")])
    return buf.getvalue()


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".ckpt-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def census(H: float, step: StepControl | None = None, *, family=None, margin: float = 8.0,
           t_floor: float = 0.5, checkpoints=None, threads: int = 1, checkpoint_path: str | None = None,
           checkpoint_every: float = 30.0, config_hash: str = "", seed_tol: float = 1e-12,
           classify: bool = True) -> CensusResult:
    """Trace every zero of f(., 0) with t_floor < Im rho <= H to tau = 1.

    Seeds between H and H + margin are traced as well, only to check zero
    conservation in the box [-2, 3] x [t_floor, H] at each checkpoint tau.
    """
    if H > 500:
        raise DomainError("H must be at most 500")
    step = step or StepControl()
    fam = _default_family(family)
    if checkpoints is None:
        checkpoints = [k / 10 for k in range(1, 11)]
    checkpoints = sorted(set(float(c) for c in checkpoints) | {1.0})
    seeds = [z.rho for z in scan_zeros(fam.spec(0.0), "F", (-2.0, 3.0, t_floor, H + margin), tol=seed_tol)]

    done = {}
    if checkpoint_path and os.path.exists(checkpoint_path):
        with open(checkpoint_path) as fh:
            ck = json.load(fh)
        if ck.get("config_hash") == config_hash:
            done = {int(k): Trajectory.from_dict(v) for k, v in ck["completed"].items()}

    def work(i):
        try:
            return trace("F", seeds[i], 0.0, 1.0, step, family=fam, stops=checkpoints)
        except ZetaLabError as e:
            return Trajectory([(0.0, seeds[i])], "F", Classification("incomplete", reason=f"{type(e).__name__}: {e}"))

    todo = [i for i in range(len(seeds)) if i not in done]
    last = time.monotonic()

    def save():
        if checkpoint_path:
            payload = {"run_id": config_hash or "census", "config_hash": config_hash,
                       "completed": {str(k): done[k].to_dict() for k in sorted(done)}}
            _atomic_write(checkpoint_path, json.dumps(payload))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        futures = {i: ex.submit(work, i) for i in todo}
        for i in todo:
            done[i] = futures[i].result()
            if checkpoint_path and time.monotonic() - last >= checkpoint_every:
                save()
                last = time.monotonic()
    save()
    trajs = [done[i] for i in range(len(seeds))]

    reported = [i for i, s in enumerate(seeds) if s.imag <= H]
    kinds = [trajs[i].classification.kind for i in reported]
    incomplete = sum(k == "incomplete" for k in kinds)
    reasons = {i: trajs[i].classification.reason for i in range(len(seeds))
               if trajs[i].classification.kind == "incomplete"}

    events = {}
    for tr in trajs:
        for e in tr.events:
            events.setdefault(e.key(), e)
    events = [events[k] for k in sorted(events, key=lambda k: (k[1], k[0]))]

    # zero conservation and mirror symmetry at the checkpoints
    conservation = []
    mirror_ok = True
    complete = all(tr.classification.kind != "incomplete" for tr in trajs)
    if complete:
        for tc in checkpoints:
            pts = [tr.at(tc) for tr in trajs]
            n_box = sum(t_floor < p.imag <= H for p in pts)
            g = evaluator(fam.spec(tc), "F")
            w, used = winding(g, rectangle(-2.0, 3.0, t_floor, H))
            x0, x1, y0, y1 = used.params
            n_box = sum(y0 < p.imag <= y1 for p in pts)
            conservation.append((tc, n_box, w))
            # a zero pushed onto the real axis is mirrored by the trajectory of
            # its conjugate seed, which lies outside the census
            for p in pts:
                if abs(p.real - 0.5) >= LINE_TOL and p.imag > t_floor:
                    m = 1 - p.conjugate()
                    if min(abs(q - m) for q in pts) > 1e-8:
                        mirror_ok = False

    th3 = []
    if classify and complete:
        for e in events:
            # a collision with the conjugate zero on the real axis lies outside
            # the theorem, which needs Im rho0 large
            if t_floor < e.rho0.imag <= H + margin:
                th3.append(classify_theorem3(e, family=fam))

    return CensusResult(
        H=float(H), total=len(reported), stays=sum(k == "stays_on_line" for k in kinds),
        leaves=sum(k == "leaves_at" for k in kinds), incomplete=incomplete, events=events,
        theorem3=th3, conservation=conservation, mirror_ok=mirror_ok, trajectories=trajs,
        seeds=seeds, reasons=reasons,
    )
