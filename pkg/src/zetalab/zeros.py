"""Zero counting and location by the argument principle."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import Executor
from dataclasses import dataclass, asdict

import numpy as np

from . import lfunc
from .contour import Contour, circle, rectangle, winding
from .errors import (
    ConvergenceError,
    DomainError,
    IsolationError,
    NoEmptyShellError,
    OnContourZeroError,
    UnresolvedScaleError,
    BudgetError,
)

WHICH = ("F", "Fprime")
SPLIT_FRACTIONS = (0.4871, 0.5317, 0.4459, 0.5683, 0.4106)
NEWTON_CELL = 0.5
CLUSTER_CELL = 1e-7
MAX_CELLS = 20000


def evaluator(spec, which: str = "F"):
    """g(s, k) -> (k+1, P) array of the target (F or F') and its derivatives."""
    if which not in WHICH:
        raise DomainError(f"which must be one of {WHICH}")
    shift = 0 if which == "F" else 1
    if isinstance(spec, lfunc.AnalyticFunction):
        def g(s, k):
            return spec.derivs(s, k + shift)[shift:]
    else:
        def g(s, k):
            s = np.atleast_1d(np.asarray(s, dtype=complex))
            return lfunc._derivs(spec, s, k + shift)[0][shift:]
    return g


@dataclass(frozen=True)
class ZeroRecord:
    rho: complex
    multiplicity: int
    residual: float
    method: str

    def to_dict(self):
        return {"rho": [self.rho.real, self.rho.imag], "multiplicity": self.multiplicity,
                "residual": self.residual, "method": self.method}

    @classmethod
    def from_dict(cls, d):
        return cls(complex(*d["rho"]), int(d["multiplicity"]), float(d["residual"]), d["method"])


CSV_COLUMNS = ("beta", "gamma", "multiplicity", "residual", "method")


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_g17(r.rho.real), _g17(r.rho.imag), r.multiplicity, _g17(r.residual), r.method])
    return buf.getvalue()


def records_from_csv(text: str):
    rows = csv.DictReader(io.StringIO(text))
    return [ZeroRecord(complex(float(r["beta"]), float(r["gamma"])), int(r["multiplicity"]),
                       float(r["residual"]), r["method"]) for r in rows]


def records_to_json(records) -> str:
    return json.dumps([r.to_dict() for r in records])


def records_from_json(text: str):
    return [ZeroRecord.from_dict(d) for d in json.loads(text)]


# --------------------------------------------------------------------------
# counting


def winding_count(spec, which: str, contour: Contour, *, nudge: bool = True) -> int:
    """Zeros minus poles of F (or F') inside ``contour``."""
    return winding(evaluator(spec, which), contour, nudge=nudge)[0]


def _cauchy_majorant(g, center, rho):
    pts = center + rho * np.exp(2j * np.pi * np.arange(64) / 64)
    return 1.25 * float(np.max(np.abs(g(pts, 0)[0])))


def taylor_count(g, center: complex, r: float, *, rho: float = 1e-3) -> int:
    """Number of zeros in |s - center| <= r from a dominant Taylor term.

    Writes g = a0 + a1 h + a2 h^2 + R with |R| bounded through a Cauchy
    estimate on |h| = rho. If one term beats the rest on |h| = r, Rouche
    gives the count; otherwise the scale cannot be resolved in double
    precision and UnresolvedScaleError is raised.
    """
    if r >= 0.5 * rho:
        raise DomainError("taylor_count needs r much smaller than rho")
    d = g(np.array([complex(center)]), 2)[:, 0]
    a = [abs(d[0]), abs(d[1]) * r, abs(d[2]) * r * r / 2]
    M = _cauchy_majorant(g, complex(center), rho)
    q = r / rho
    tail = M * q ** 3 / (1 - q)
    # rounding in each coefficient, relative to the values being combined
    eps = 64 * np.finfo(float).eps
    noise = eps * (M + sum(a)) + tail
    for k in range(3):
        if a[k] > sum(a) - a[k] + noise:
            return k
    raise UnresolvedScaleError(f"cannot resolve zeros of the target within radius {r:.3e} of {center}")


def _tiny_radius(center) -> float:
    return 1e4 * float(np.spacing(max(abs(center), 1.0)))


def disk_count(spec, which: str, center: complex, r: float) -> int:
    """Zeros of F (or F') in the closed disk |s - center| <= r."""
    g = evaluator(spec, which)
    if r < 1e-6:
        try:
            return taylor_count(g, center, r, rho=min(1e-3, 1e3 * r) if r > 1e-9 else 1e-3)
        except UnresolvedScaleError:
            if r < _tiny_radius(center):
                raise
    return winding(g, circle(center, r))[0]


# --------------------------------------------------------------------------
# refinement


def refine_zero(spec, which: str, s_guess: complex, *, tol: float = 1e-12, max_iter: int = 60,
                max_dist: float = 1.0, multiplicity: int = 1, method: str = "newton") -> ZeroRecord:
    """Newton refinement, switching to s -= m g/g' once convergence looks linear."""
    g = evaluator(spec, which)
    s = complex(s_guess)
    m = multiplicity
    prev = None
    slow = 0
    for it in range(max_iter):
        v = g(np.array([s]), 1)[:, 0]
        if v[0] == 0:
            break
        if v[1] == 0:
            raise ConvergenceError(f"derivative vanishes at {s}")
        step = m * v[0] / v[1]
        floor = max(tol, 4 * float(np.spacing(abs(s))))
        if abs(step) <= floor:
            if it > 0:
                s = s - step
            break
        if prev is not None and m == 1:
            ratio = abs(step) / abs(prev)
            slow = slow + 1 if 0.3 < ratio < 0.99 else 0
            if slow >= 3:
                m = max(2, int(round(1.0 / (1.0 - ratio))))
                method = method + "-m"
                step = m * v[0] / v[1]
        prev = step
        s = s - step
        if abs(s - s_guess) > max_dist or not np.isfinite(s):
            raise ConvergenceError(f"Newton left the basin around {s_guess}")
    else:
        raise ConvergenceError(f"no convergence after {max_iter} iterations from {s_guess}")
    res = float(abs(g(np.array([s]), 0)[0, 0]))
    return ZeroRecord(complex(s), m, res, method)


def multiplicity(spec, which: str, zr: ZeroRecord, *, r_iso: float | None = None, others=()) -> int:
    """Winding count on a circle of radius r_iso/2 about the zero."""
    if r_iso is None:
        d = [abs(complex(o) - zr.rho) for o in others if abs(complex(o) - zr.rho) > 0]
        r_iso = min([1e-2] + [0.5 * x for x in d])
    inner = disk_count(spec, which, zr.rho, 0.5 * r_iso)
    outer = disk_count(spec, which, zr.rho, r_iso)
    if inner != outer or inner == 0:
        raise IsolationError(f"zero at {zr.rho} is not isolated within {r_iso:g}")
    return inner


# --------------------------------------------------------------------------
# scanning


@dataclass(frozen=True)
class _Cell:
    x0: float
    x1: float
    y0: float
    y1: float
    count: int

    @property
    def center(self):
        return complex(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    @property
    def size(self):
        return max(self.x1 - self.x0, self.y1 - self.y0)

    def contains(self, s, pad=0.0):
        return (self.x0 - pad <= s.real <= self.x1 + pad) and (self.y0 - pad <= s.imag <= self.y1 + pad)


def _split(g, cell: _Cell):
    wide = (cell.x1 - cell.x0) >= (cell.y1 - cell.y0)
    last = None
    for f in SPLIT_FRACTIONS:
        if wide:
            xm = cell.x0 + f * (cell.x1 - cell.x0)
            parts = [(cell.x0, xm, cell.y0, cell.y1), (xm, cell.x1, cell.y0, cell.y1)]
        else:
            ym = cell.y0 + f * (cell.y1 - cell.y0)
            parts = [(cell.x0, cell.x1, cell.y0, ym), (cell.x0, cell.x1, ym, cell.y1)]
        try:
            counts = [winding(g, rectangle(*p), nudge=False)[0] for p in parts]
        except OnContourZeroError as e:
            last = e
            continue
        if sum(counts) != cell.count:
            raise ConvergenceError(f"cell counts {counts} do not add up to {cell.count}")
        return [_Cell(*p, c) for p, c in zip(parts, counts) if c != 0]
    raise last


def _process(spec, which, g, cell: _Cell, tol):
    """Either ([], [record]) for a resolved cell or (children, [])."""
    if cell.count < 0:
        raise DomainError("rectangle encloses a pole")
    if cell.count == 1 and cell.size <= NEWTON_CELL:
        try:
            zr = refine_zero(spec, which, cell.center, tol=tol, max_dist=2 * cell.size + 1e-6,
                             method="scan+newton")
            if cell.contains(zr.rho, pad=1e-9) and zr.multiplicity == 1:
                return [], [zr]
        except ConvergenceError:
            pass
    if cell.count >= 2 and cell.size <= CLUSTER_CELL * (1 + abs(cell.center)):
        zr = refine_zero(spec, which, cell.center, tol=tol, max_dist=cell.size * 10,
                         multiplicity=cell.count, method="scan+cluster")
        return [], [ZeroRecord(zr.rho, cell.count, zr.residual, zr.method)]
    return _split(g, cell), []


@dataclass(frozen=True)
class ScanState:
    """Pending cells and zeros found so far, between two generations of a scan."""

    total: int
    cells: tuple
    found: tuple
    n_cells: int

    def to_dict(self):
        return {"total": self.total, "n_cells": self.n_cells,
                "cells": [[c.x0, c.x1, c.y0, c.y1, c.count] for c in self.cells],
                "found": [r.to_dict() for r in self.found]}

    @classmethod
    def from_dict(cls, d):
        cells = tuple(_Cell(*map(float, c[:4]), int(c[4])) for c in d["cells"])
        return cls(int(d["total"]), cells, tuple(ZeroRecord.from_dict(r) for r in d["found"]),
                   int(d["n_cells"]))


def scan_zeros(spec, which: str, rect, *, tol: float = 1e-12, executor: Executor | None = None,
               resume: ScanState | None = None, on_generation=None):
    """All zeros of F (or F') in rect = (x0, x1, y0, y1), sorted by (Im, Re).

    Cells are bisected by winding counts until each holds one zero, which
    is then polished by Newton. The work in each generation of cells may be
    farmed out to ``executor``; the result does not depend on it.

    ``on_generation(state)`` is called after every generation; passing such
    a state back as ``resume`` continues the scan where it stopped.
    """
    x0, x1, y0, y1 = map(float, rect)
    g = evaluator(spec, which)
    if getattr(spec, "pole_order", 0) > 0 and x0 <= 1.0 <= x1 and y0 <= 0.0 <= y1:
        raise DomainError("rectangle contains the pole at s = 1")
    if resume is not None:
        total, cells, found, n_cells = resume.total, list(resume.cells), list(resume.found), resume.n_cells
    else:
        total, used = winding(g, rectangle(x0, x1, y0, y1))
        if total == 0:
            return []
        if used.params != (x0, x1, y0, y1):
            x0, x1, y0, y1 = used.params
        cells = [_Cell(x0, x1, y0, y1, total)]
        found = []
        n_cells = 0
    while cells:
        n_cells += len(cells)
        if n_cells > MAX_CELLS:
            raise BudgetError("scan exceeded its cell budget")
        fn = lambda c: _process(spec, which, g, c, tol)  # noqa: E731
        results = list(executor.map(fn, cells)) if executor else [fn(c) for c in cells]
        nxt = []
        for children, recs in results:
            nxt.extend(children)
            found.extend(recs)
        cells = nxt
        if on_generation is not None:
            on_generation(ScanState(total, tuple(cells), tuple(found), n_cells))
    found.sort(key=lambda r: (r.rho.imag, r.rho.real))
    if sum(r.multiplicity for r in found) != total:
        raise ConvergenceError("multiplicities do not add up to the winding count")
    return found


# --------------------------------------------------------------------------
# annulus search


@dataclass(frozen=True)
class AnnulusResult:
    j: int
    r_inner: float
    r_outer: float
    r_final: float
    zero_counts_per_shell: tuple[int, ...]
    radii: tuple[float, ...] = ()

    def to_dict(self):
        d = asdict(self)
        d["zero_counts_per_shell"] = list(self.zero_counts_per_shell)
        d["radii"] = list(self.radii)
        return d


def shell_radii(C: float, A_shells: int, delta: float) -> np.ndarray:
    k = np.arange(1, A_shells + 1)
    return np.exp(-((2.0 + delta) ** (-k.astype(float))) * C)


def zero_free_annulus(spec, s0: complex, C: float, A_shells: int, delta: float, *,
                      which: str = "F") -> AnnulusResult:
    """First empty shell r_{j-1} < |s - s0| <= r_j, j >= 2, of the schedule r_k = exp(-(2+delta)^-k C).

    zero_counts_per_shell[0] is the count in the inner disk |s - s0| <= r_1.
    """
    if A_shells < 2:
        raise DomainError("A_shells must be at least 2")
    if not (0 < C and math.exp(-C) >= 1e-300):
        raise DomainError("C must satisfy exp(-C) >= 1e-300")
    if delta <= 0:
        raise DomainError("delta must be positive")
    radii = shell_radii(C, A_shells, delta)
    disk = [disk_count(spec, which, s0, float(r)) for r in radii]
    shells = [disk[0]] + [disk[k] - disk[k - 1] for k in range(1, A_shells)]
    if any(c < 0 for c in shells):
        raise ConvergenceError(f"negative shell count {shells}")
    for j in range(2, A_shells + 1):
        if shells[j - 1] == 0:
            r_out = float(radii[j - 1])
            return AnnulusResult(j, float(radii[j - 2]), r_out, r_out ** (1.0 + delta / 3.0),
                                 tuple(shells), tuple(map(float, radii)))
    raise NoEmptyShellError(f"no empty shell among {A_shells}: counts {shells}", counts=shells)


# --------------------------------------------------------------------------
# density checks


@dataclass(frozen=True)
class StripCount:
    count: int
    bound: float
    classical_bound: float | None = None


def strip_zero_count(spec, T: float) -> StripCount:
    """Zeros with |beta| <= sigma_F and |gamma - T| <= 1/T, against the density bound."""
    dens = spec.density
    if T <= dens.T_bar:
        raise DomainError(f"T must exceed T_bar = {dens.T_bar}")
    sf = spec.zero_free_sigma
    n = winding_count(spec, "F", rectangle(-sf, sf, T - 1.0 / T, T + 1.0 / T))
    classical = 0.225 * math.log(T) if getattr(spec, "kind", None) == "RiemannZeta" else None
    return StripCount(n, dens.bound(T), classical)


@dataclass(frozen=True)
class RvmEstimate:
    counted: int
    main_term: float
    counted_two_sided: int


def rvm_estimate(spec, T: float, *, t_lo: float = 0.5) -> RvmEstimate:
    """One-sided zero count with 0 < gamma < T, and the main term d_F/pi T log T.

    The main term counts |gamma| < T, so compare it with counted_two_sided.
    """
    if T > 500:
        raise DomainError("T must be at most 500")
    sf = spec.zero_free_sigma
    n = winding_count(spec, "F", rectangle(0.5 - (sf + 0.5), 0.5 + (sf + 0.5), t_lo, T))
    main = spec.degree / math.pi * T * math.log(T)
    return RvmEstimate(n, main, 2 * n)


def fit_c_F(estimates, Ts) -> float:
    """Least-squares c in counted_two_sided - main_term = c T."""
    Ts = np.asarray(Ts, dtype=float)
    y = np.array([e.counted_two_sided - e.main_term for e in estimates])
    return float(np.dot(Ts, y) / np.dot(Ts, Ts))
