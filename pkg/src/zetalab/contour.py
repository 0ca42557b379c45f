"""Closed piecewise contours and argument-principle winding counts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, OnContourZeroError, SubdivisionError, ConvergenceError

INITIAL_SPACING = 0.1
MIN_SAMPLES = 16
MAX_DEPTH = 40
ON_CONTOUR_REL = 1e-12
NUDGE_REL = 1e-6
NUDGE_TRIES = 3


@dataclass(frozen=True)
class Segment:
    """A line from ``start`` to ``end`` or an arc about ``center`` from phi0 to phi1."""

    kind: str
    start: complex = 0j
    end: complex = 0j
    center: complex = 0j
    radius: float = 0.0
    phi0: float = 0.0
    phi1: float = 0.0

    @classmethod
    def line(cls, a, b):
        return cls("line", start=complex(a), end=complex(b))

    @classmethod
    def arc(cls, center, radius, phi0, phi1):
        c = complex(center)
        return cls("arc", center=c, radius=float(radius), phi0=float(phi0), phi1=float(phi1),
                   start=c + radius * np.exp(1j * phi0), end=c + radius * np.exp(1j * phi1))

    def points(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "line":
            # lerp from whichever end is closer keeps the endpoints exact
            return np.where(u <= 0.5, self.start + (self.end - self.start) * u,
                            self.end - (self.end - self.start) * (1.0 - u))
        return self.center + self.radius * np.exp(1j * (self.phi0 + (self.phi1 - self.phi0) * u))

    @property
    def length(self) -> float:
        if self.kind == "line":
            return abs(self.end - self.start)
        return self.radius * abs(self.phi1 - self.phi0)


@dataclass(frozen=True)
class Indentation:
    center: complex
    radius: float
    side: str = "left"


@dataclass(frozen=True)
class Contour:
    segments: tuple[Segment, ...]
    kind: str = "custom"
    indentations: tuple[Indentation, ...] = ()
    # construction parameters, kept so the contour can be nudged outward
    params: tuple = field(default=(), compare=False)

    def __post_init__(self):
        segs = self.segments
        for a, b in zip(segs, segs[1:] + segs[:1]):
            if abs(a.end - b.start) > 1e-12 * (1.0 + abs(a.end)):
                raise DomainError("contour is not closed")

    @property
    def diameter(self) -> float:
        pts = np.concatenate([s.points(np.linspace(0, 1, 9)) for s in self.segments])
        return float(max(np.ptp(pts.real), np.ptp(pts.imag)))

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    def nudged(self, amount: float) -> "Contour":
        if self.kind == "rectangle":
            x0, x1, y0, y1 = self.params
            return rectangle(x0 - amount, x1 + amount, y0 - amount, y1 + amount)
        if self.kind == "circle":
            c, r = self.params
            return circle(c, r + amount)
        if self.kind == "half_disk_left":
            s0, r, pts, rad = self.params
            return half_disk_left(s0, r + amount, pts, rad)
        raise OnContourZeroError("cannot nudge a custom contour")


def rectangle(x0, x1, y0, y1) -> Contour:
    if not (x1 > x0 and y1 > y0):
        raise DomainError("degenerate rectangle")
    a, b, c, d = complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)
    segs = (Segment.line(a, b), Segment.line(b, c), Segment.line(c, d), Segment.line(d, a))
    return Contour(segs, "rectangle", params=(x0, x1, y0, y1))


def circle(center, r) -> Contour:
    if r <= 0:
        raise DomainError("radius must be positive")
    return Contour((Segment.arc(center, r, 0.0, 2 * math.pi),), "circle", params=(complex(center), float(r)))


def half_disk_left(s0, r, indent_points=(), indent_radius=0.0) -> Contour:
    """Boundary of {|s - s0| <= r, Re s < 1/2}, bypassing line points by left semicircles."""
    s0 = complex(s0)
    d = 0.5 - s0.real
    if not (0 <= d < r):
        raise DomainError("need 1/2 - r < Re s0 <= 1/2")
    h = math.sqrt(r * r - d * d)
    lo, hi = s0.imag - h, s0.imag + h
    pts = sorted(float(t) for t in indent_points if lo < t < hi)
    rho = float(indent_radius)
    if pts:
        if rho <= 0:
            raise DomainError("indentation radius must be positive")
        if rho >= 1e-3 * 2 * r:
            raise DomainError("indentation radius must be below 1e-3 of the diameter")
        gaps = np.diff([lo] + pts + [hi])
        if np.any(gaps[1:-1] < 4 * rho) or gaps[0] < rho or gaps[-1] < rho:
            from .errors import IndentationOverlapError
            raise IndentationOverlapError("line zeros closer than 4 indentation radii")
    phi_top = math.atan2(h, d)
    top = complex(0.5, hi)
    segs = [Segment.arc(s0, r, phi_top, 2 * math.pi - phi_top)]
    # arc endpoints land on the line up to rounding; snap them
    segs[0] = replace(segs[0], start=top, end=complex(0.5, lo))
    cur = complex(0.5, lo)
    inds = []
    for t in pts:
        a = complex(0.5, t - rho)
        segs.append(Segment.line(cur, a))
        arc = Segment.arc(complex(0.5, t), rho, -0.5 * math.pi, -1.5 * math.pi)
        segs.append(replace(arc, start=a, end=complex(0.5, t + rho)))
        inds.append(Indentation(complex(0.5, t), rho, "left"))
        cur = complex(0.5, t + rho)
    segs.append(Segment.line(cur, top))
    return Contour(tuple(segs), "half_disk_left", tuple(inds), params=(s0, float(r), tuple(pts), rho))


def _initial_u(seg: Segment) -> np.ndarray:
    n = max(MIN_SAMPLES if seg.kind == "arc" else 8, int(math.ceil(seg.length / INITIAL_SPACING)))
    return np.linspace(0.0, 1.0, n + 1)


def winding_raw(g, contour: Contour) -> int:
    """Winding number of g around ``contour`` without nudging.

    ``g(s, k)`` returns g and its first k derivatives, shape (k+1, P). An
    interval is accepted once its argument change is below pi/2 and its
    length is below |g/g'| at both ends, so no zero or pole slips between
    neighbouring samples.
    """
    segs = contour.segments
    us = [_initial_u(s) for s in segs]
    n0 = [len(u) - 1 for u in us]
    pts = [s.points(u) for s, u in zip(segs, us)]
    sizes = [len(p) for p in pts]
    vals = g(np.concatenate(pts), 1)
    gv = np.split(vals[0], np.cumsum(sizes)[:-1])
    gd = np.split(vals[1], np.cumsum(sizes)[:-1])
    absg = np.abs(vals[0])
    if not np.all(np.isfinite(vals)):
        raise OnContourZeroError("non-finite value on contour (pole on contour?)")
    scale = float(np.median(absg))
    floor = ON_CONTOUR_REL * scale
    if np.any(absg <= floor):
        raise OnContourZeroError("target vanishes on the contour")
    for _ in range(MAX_DEPTH + 2):
        todo = []
        for i, seg in enumerate(segs):
            G, D, u, p = gv[i], gd[i], us[i], pts[i]
            darg = np.angle(G[1:] / G[:-1])
            step = np.abs(np.diff(p))
            rate = np.abs(D / G)
            bad = (np.abs(darg) >= 0.5 * np.pi) | (step * np.maximum(rate[1:], rate[:-1]) >= 1.0)
            if bad.any():
                du = np.diff(u)[bad]
                if np.min(du) * n0[i] < 2.0 ** -MAX_DEPTH:
                    raise SubdivisionError(f"subdivision depth exceeded {MAX_DEPTH}")
                todo.append((i, np.nonzero(bad)[0]))
        if not todo:
            break
        mids = [0.5 * (us[i][idx] + us[i][idx + 1]) for i, idx in todo]
        new_pts = [segs[i].points(m) for (i, _), m in zip(todo, mids)]
        nsz = [len(p) for p in new_pts]
        nv = g(np.concatenate(new_pts), 1)
        if not np.all(np.isfinite(nv)):
            raise OnContourZeroError("non-finite value on contour (pole on contour?)")
        if np.any(np.abs(nv[0]) <= floor):
            raise OnContourZeroError("target vanishes on the contour")
        nv0 = np.split(nv[0], np.cumsum(nsz)[:-1])
        nv1 = np.split(nv[1], np.cumsum(nsz)[:-1])
        for (i, idx), m, p, a, b in zip(todo, mids, new_pts, nv0, nv1):
            us[i] = np.insert(us[i], idx + 1, m)
            pts[i] = np.insert(pts[i], idx + 1, p)
            gv[i] = np.insert(gv[i], idx + 1, a)
            gd[i] = np.insert(gd[i], idx + 1, b)
    else:
        raise SubdivisionError(f"subdivision depth exceeded {MAX_DEPTH}")
    total = sum(float(np.sum(np.angle(G[1:] / G[:-1]))) for G in gv)
    w = total / (2 * math.pi)
    n = int(round(w))
    if abs(w - n) > 1e-3:
        raise ConvergenceError(f"argument change {w:.6f} x 2pi is not an integer")
    return n


def winding(g, contour: Contour, *, nudge: bool = True) -> tuple[int, Contour]:
    """Winding number, retrying on a contour nudged outward if a zero sits on it.

    Returns the count together with the contour actually used.
    """
    c = contour
    tries = NUDGE_TRIES if nudge else 0
    for attempt in range(tries + 1):
        try:
            return winding_raw(g, c), c
        except OnContourZeroError:
            if attempt == tries:
                raise
            c = c.nudged(NUDGE_REL * contour.diameter)
    raise AssertionError("unreachable")
