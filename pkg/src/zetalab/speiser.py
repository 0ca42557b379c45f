"""Zeros of F and F' in half-disks left of the critical line."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import lfunc
from .contour import half_disk_left, winding
from .errors import DomainError
from .zeros import AnnulusResult, evaluator, zero_free_annulus

INDENT_REL = 1e-7


@dataclass(frozen=True)
class SpeiserReport:
    s0: complex
    r: float
    n_F: int
    n_Fprime: int
    equal: bool
    annulus: AnnulusResult | None = None
    line_zeros_bypassed: tuple[float, ...] = ()

    def to_dict(self):
        return {
            "s0": [self.s0.real, self.s0.imag],
            "r": self.r,
            "n_F": self.n_F,
            "n_Fprime": self.n_Fprime,
            "equal": self.equal,
            "annulus": None if self.annulus is None else self.annulus.to_dict(),
            "line_zeros_bypassed": list(self.line_zeros_bypassed),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "r", "n_F", "n_Fprime", "equal"])
    for rep in reports:
        w.writerow([format(rep.s0.imag, ".17g"), format(rep.r, ".17g"), rep.n_F, rep.n_Fprime,
                    str(rep.equal).lower()])
    return buf.getvalue()


def line_zeros(spec, t_lo: float, t_hi: float, *, step: float | None = None) -> list[float]:
    """Zeros of F(1/2 + it) for t in (t_lo, t_hi).

    Simple zeros show up as sign changes of the rotated real function; a
    double zero touching the axis is caught as a local minimum of |Z| with Z'
    vanishing there as well.
    """
    if t_hi <= t_lo:
        return []
    if step is None:
        step = min(0.01, (t_hi - t_lo) / 64)
    n = max(8, int(math.ceil((t_hi - t_lo) / step)))
    t = np.linspace(t_lo, t_hi, n + 1)
    if isinstance(spec, lfunc.AnalyticFunction):
        g = evaluator(spec, "F")
        fv = g(0.5 + 1j * t, 0)[0]
        # a synthetic target has no rotation; treat exact line zeros only
        out = []
        for i in np.nonzero(np.abs(fv) < 1e-12)[0]:
            out.append(float(t[i]))
        return out
    Z = lfunc.line_z(spec, t, 0)[0]
    zf = lambda x: float(lfunc.line_z(spec, x, 0)[0, 0])  # noqa: E731
    found = []
    for i in range(n):
        a, b = Z[i], Z[i + 1]
        if a == 0.0:
            found.append(float(t[i]))
        elif a * b < 0:
            found.append(brentq(zf, t[i], t[i + 1], xtol=1e-15, rtol=1e-15))
    if Z[-1] == 0.0:
        found.append(float(t[-1]))
    # touching zeros: |Z| has a sampled local minimum without a sign change
    absz = np.abs(Z)
    scale = float(np.median(absz)) + 1e-300
    for i in range(1, n):
        if absz[i] <= absz[i - 1] and absz[i] <= absz[i + 1] and Z[i - 1] * Z[i + 1] > 0:
            if absz[i] > 1e-3 * scale:
                continue
            zt = lambda x: float(lfunc.line_z(spec, x, 1)[1, 0])  # noqa: E731
            a, b = t[i - 1], t[i + 1]
            if zt(a) * zt(b) < 0:
                tm = brentq(zt, a, b, xtol=1e-15, rtol=1e-15)
                if abs(zf(tm)) < 1e-12 * scale:
                    found.append(tm)
    return sorted(set(found))


def speiser_compare(spec, s0: complex, r: float, *, indent_rel: float = INDENT_REL) -> SpeiserReport:
    """Zeros of F and F' in {|s - s0| <= r, Re s < 1/2}.

    Line zeros of F on the chord are bypassed by left semicircles of radius
    indent_rel * r, so zeros on Re s = 1/2 belong to neither count.
    """
    s0 = complex(s0)
    if r <= 0:
        raise DomainError("r must be positive")
    d = 0.5 - s0.real
    if not (0 <= d < r):
        raise DomainError("need 1/2 - r < Re s0 <= 1/2")
    h = math.sqrt(r * r - d * d)
    lz = line_zeros(spec, s0.imag - h, s0.imag + h, step=min(0.01, h / 32))
    contour = half_disk_left(s0, r, lz, indent_rel * r)
    n_f = winding(evaluator(spec, "F"), contour, nudge=False)[0]
    n_fp = winding(evaluator(spec, "Fprime"), contour, nudge=False)[0]
    return SpeiserReport(s0, float(r), n_f, n_fp, n_f == n_fp, None, tuple(lz))


def speiser_pipeline(spec, T: float, C: float, A_shells: int, delta: float) -> SpeiserReport:
    """Empty shell about 1/2 + iT by the pigeonhole schedule, then compare at r_final.

    The radii are exp(-(2+delta)^-k C) with C standing in for T^A, which
    would underflow at any useful height.
    """
    s0 = complex(0.5, T)
    ann = zero_free_annulus(spec, s0, C, A_shells, delta)
    rep = speiser_compare(spec, s0, ann.r_final)
    return SpeiserReport(rep.s0, rep.r, rep.n_F, rep.n_Fprime, rep.equal, ann, rep.line_zeros_bypassed)


def spira_line_check(spec, t_lo: float, t_hi: float, grid_step: float = 0.01, *,
                     theta1: float = 1e-6, theta2: float = 1e-4) -> list[tuple[float, float, float]]:
    """Line points where |F'| nearly vanishes but |F| does not.

    Every sampled local minimum of |F'(1/2+it)| is refined; minima below
    theta1 must have |F| < theta2 there. Returns the violations as
    (t, |F|, |F'|).
    """
    if t_hi > 500:
        raise DomainError("t_hi must be at most 500")
    g = evaluator(spec, "F")
    n = max(8, int(math.ceil((t_hi - t_lo) / grid_step)))
    t = np.linspace(t_lo, t_hi, n + 1)
    vals = g(0.5 + 1j * t, 1)
    afp = np.abs(vals[1])
    idx = np.nonzero((afp[1:-1] < afp[:-2]) & (afp[1:-1] <= afp[2:]))[0] + 1
    out = []
    fp = lambda x: float(abs(g(np.array([0.5 + 1j * x]), 1)[1, 0]))  # noqa: E731
    for i in idx:
        res = minimize_scalar(fp, bounds=(t[i - 1], t[i + 1]), method="bounded",
                              options={"xatol": 1e-12})
        tm, m = float(res.x), float(res.fun)
        if m < theta1:
            fv = float(abs(g(np.array([0.5 + 1j * tm]), 0)[0, 0]))
            if fv >= theta2:
                out.append((tm, fv, m))
    return out


@dataclass(frozen=True)
class NegativityReport:
    worst_value: float
    worst_t: float
    excluded: tuple[float, ...] = field(default=())


def logderiv_negativity(spec, t_lo: float, t_hi: float, step: float = 0.01, *,
                        min_abs: float = 1e-4) -> NegativityReport:
    """Largest Re F'/F(1/2+it) on a grid, skipping points with |F| <= min_abs."""
    g = evaluator(spec, "F")
    n = max(8, int(math.ceil((t_hi - t_lo) / step)))
    t = np.linspace(t_lo, t_hi, n + 1)
    v = g(0.5 + 1j * t, 1)
    keep = np.abs(v[0]) > min_abs
    ld = (v[1][keep] / v[0][keep]).real
    k = int(np.argmax(ld))
    return NegativityReport(float(ld[k]), float(t[keep][k]), tuple(map(float, t[~keep])))
