"""Independent oracles for the derived reference values.

Run ``python tests/oracles.py`` to recompute every value and freeze it into
tests/golden/derived.json. Each entry keeps the oracle's own number and a
second opinion (mpmath, a finer grid, a brute-force sum, a round trip) so the
golden file records how the value was obtained, not only what it is.
"""

from __future__ import annotations

import json
import math
import os
import sys

import mpmath as mp
import numpy as np

from zetalab import lfunc, special, speiser, trajectory, zeros
from zetalab.contour import circle, rectangle

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "derived.json")
mp.mp.dps = 30

# a leaving collision and its returning partner, both below height 100
EVENT_LEAVE = (0.02943896759007275, 60.712980763865644)
EVENT_RETURN = (0.7145382471397379, 61.351663700243684)
# left member of an off-line pair at tau = 0.5
OFFLINE_TAU, OFFLINE_RHO = 0.5, complex(0.2204, 61.1685)


def _c(z):
    return [float(z.real), float(z.imag)]


def sign_change_zeros(spec, t_lo, t_hi, step):
    """Line zeros from sign changes of the rotated function on a plain grid (no refinement)."""
    t = np.arange(t_lo, t_hi + step / 2, step)
    Z = lfunc.line_z(spec, t, 0)[0]
    idx = np.nonzero(Z[1:] * Z[:-1] < 0)[0]
    return 0.5 * (t[idx] + t[idx + 1])


def lpsi5_at_1():
    # blocks of one period converge like k^-3; Levin-type acceleration on top
    def block(k):
        k = mp.mpf(k)
        return 1 / (5 * k + 1) - 1 / (5 * k + 2) - 1 / (5 * k + 3) + 1 / (5 * k + 4)
    return mp.nsum(block, [0, mp.inf])


def lpsi5_bruteforce(s, n_max=10 ** 6):
    n = np.arange(1, n_max + 1, dtype=float)
    psi = np.array([0.0, 1.0, -1.0, -1.0, 1.0])[(np.arange(1, n_max + 1) % 5)]
    # sum small terms first
    terms = psi * np.exp(-s * np.log(n))
    return complex(np.sum(terms[::-1]))


def build():
    out = {}
    zeta = lfunc.riemann_zeta_spec()

    # Hurwitz zeta at 4x truncation length and doubled Bernoulli terms
    s = np.array([0.5 + 50j])
    n0 = special.em_terms(s)
    v4 = complex(special.hurwitz_derivs(s, 0.2, 0, n_terms=4 * n0, n_bernoulli=24)[0][0, 0])
    out["hurwitz_0.5+50i_a0.2"] = {
        "value": _c(v4), "oracle": "Euler-Maclaurin at 4x terms, 24 Bernoulli terms",
        "second_opinion": _c(complex(mp.zeta(mp.mpc(0.5, 50), 0.2))), "tol": 1e-10}

    # first zeta zero from the sign-change scan, refined by Newton
    t0 = sign_change_zeros(zeta, 14.0, 14.3, 1e-4)
    assert len(t0) == 1
    zr = zeros.refine_zero(zeta, "F", complex(0.5, t0[0]))
    out["zeta_first_zero"] = {
        "value": zr.rho.imag, "oracle": "sign change of Z on a 1e-4 grid, Newton polish",
        "second_opinion": float(mp.im(mp.zetazero(1))), "tol": 1e-9}
    out["z_sign_changes_14_14.3"] = {"value": int(len(t0)), "oracle": "1e-4 grid", "tol": 0}

    out["lpsi5_s1"] = {"value": float(lpsi5_at_1()), "oracle": "accelerated periodic block sum",
                       "second_opinion": float(2 / mp.sqrt(5) * mp.log((1 + mp.sqrt(5)) / 2)), "tol": 1e-9}
    v = lpsi5_bruteforce(2 + 3j)
    out["lpsi5_2+3i"] = {"value": _c(v), "oracle": "direct sum n <= 10^6", "tol": 1e-8}

    # d f / d tau against a central difference of f in tau
    s0, h = 0.7 + 30j, 1e-6
    fd = (lfunc.evaluate(lfunc.family_spec(0.5 + h), s0).value
          - lfunc.evaluate(lfunc.family_spec(0.5 - h), s0).value) / (2 * h)
    out["dtau_fd_0.7+30i"] = {"value": _c(complex(fd)), "oracle": "central difference h=1e-6", "tol": 1e-8}

    # reflection path against the plain series path of the family
    s0 = -1 + 25j
    ser = complex(lfunc.evaluate(lfunc.family_spec(0.3), s0, method="series").value)
    out["family0.3_-1+25i"] = {"value": _c(ser), "oracle": "Hurwitz series path", "tol_rel": 1e-8}

    # zero counts from sign changes of Z on a fine grid
    for T in (50, 100):
        n = len(sign_change_zeros(zeta, 0.05, T, 1e-3))
        out[f"zeta_count_1_{T}"] = {"value": int(n), "oracle": "sign changes of Z, step 1e-3", "tol": 0}

    # three zeros in [0,1] x [10,30] from the scan at tol 1e-12
    recs = zeros.scan_zeros(zeta, "F", (0, 1, 10, 30), tol=1e-12)
    out["zeta_scan_0_1_10_30"] = {
        "value": [_c(r.rho) for r in recs], "oracle": "bisection + Newton at tol 1e-12",
        "second_opinion": [float(mp.im(mp.zetazero(k))) for k in (1, 2, 3)], "tol": 1e-8}
    out["zeta_empty_2_3_10_20"] = {
        "value": zeros.winding_count(zeta, "F", rectangle(2, 3, 10, 20)), "oracle": "winding count", "tol": 0}

    # simple zero multiplicity and the collision double zero, by winding on small circles
    out["mult_simple_zeta"] = {
        "value": zeros.winding_count(zeta, "F", circle(zr.rho, 1e-3)), "oracle": "winding r=1e-3", "tol": 0}
    tau0, t_ev = EVENT_LEAVE
    fam_spec = lfunc.family_spec(tau0)
    out["mult_collision"] = {
        "value": zeros.winding_count(fam_spec, "F", circle(complex(0.5, t_ev), 1e-4)),
        "oracle": "winding r=1e-4 at the census collision", "tol": 0}

    # annulus: nearest zero to 0.5+15.5i lies beyond the outermost shell
    r = zeros.shell_radii(5.0, 5, 0.1)
    near = zeros.scan_zeros(zeta, "F", (-0.5, 1.5, 13.5, 17.5))
    dist = min(abs(z.rho - (0.5 + 15.5j)) for z in near)
    ann = zeros.zero_free_annulus(zeta, 0.5 + 15.5j, 5.0, 5, 0.1)
    out["annulus_15.5"] = {"value": {"j": ann.j, "counts": list(ann.zero_counts_per_shell)},
                           "oracle": "scan: nearest zero distance vs outer radius",
                           "nearest": dist, "r_outer": float(r[-1]), "tol": 0}

    # strip counts by scanning a rectangle larger than the strip, then filtering
    for T in (100.0, 14.1347):
        rs = zeros.scan_zeros(zeta, "F", (-1, 1, T - 1.5, T + 1.5))
        n = sum(abs(z.rho.imag - T) <= 1 / T for z in rs)
        out[f"strip_zeta_{T}"] = {"value": int(n), "oracle": "scan and filter", "tol": 0}
    fs = lfunc.family_spec(0.5)
    rs = zeros.scan_zeros(fs, "F", (-3, 3, 49.5, 50.5))
    out["strip_family0.5_50"] = {"value": int(sum(abs(z.rho.imag - 50) <= 1 / 50 for z in rs)),
                                 "bound": fs.density.bound(50.0), "oracle": "scan and filter", "tol": 0}

    # one-sided counts in the critical strip, by scan
    for T in (50, 100):
        rs = zeros.scan_zeros(zeta, "F", (-0.5, 1.5, 0.5, T))
        out[f"rvm_zeta_{T}"] = {"value": len(rs), "oracle": "scan", "tol": 0}

    # half-disk counts by scanning both functions and filtering
    def half_disk_scan(spec, s0, r):
        res = {}
        for which in ("F", "Fprime"):
            rs = zeros.scan_zeros(spec, which, (0.5 - r - 0.01, 0.5 - 1e-9, s0.imag - r - 0.01, s0.imag + r + 0.01))
            res[which] = int(sum(abs(z.rho - s0) <= r and z.rho.real < 0.5 for z in rs))
        return res
    out["speiser_zeta_14"] = {"value": half_disk_scan(zeta, complex(0.5, 14.134725), 0.3),
                              "oracle": "scan of F and F' in the half-disk", "tol": 0}
    fs = lfunc.family_spec(OFFLINE_TAU)
    left = zeros.refine_zero(fs, "F", OFFLINE_RHO).rho
    s0, r = complex(0.5, left.imag), 2 * abs(left.real - 0.5)
    out["speiser_family_offline"] = {"value": half_disk_scan(fs, s0, r), "s0": _c(s0), "r": r, "tau": OFFLINE_TAU,
                                     "oracle": "scan of F and F' in the half-disk", "tol": 0}

    # pipeline at T = 100: shell radius and the scan of the final half-disk
    ann = zeros.zero_free_annulus(zeta, 0.5 + 100j, 20.0, 8, 0.1)
    out["pipeline_zeta_100"] = {"value": half_disk_scan(zeta, 0.5 + 100j, ann.r_final), "r_final": ann.r_final,
                                "oracle": "scan of F and F' in the half-disk", "tol": 0}

    # Spira check at 10x grid resolution
    for name, spec, lo, hi in (("spira_zeta", zeta, 10, 200), ("spira_family0.7", lfunc.family_spec(0.7), 10, 100)):
        v = speiser.spira_line_check(spec, lo, hi, grid_step=0.001)
        out[name] = {"value": len(v), "oracle": "grid step 1e-3", "tol": 0}

    # log-derivative on the line from the exact identity
    for name, spec, lo, hi in (("negativity_zeta", zeta, 10, 200),
                               ("negativity_family0.2", lfunc.family_spec(0.2), 20, 100)):
        t = np.arange(lo, hi, 0.01)
        smp = lfunc.critical_line_logderiv(spec, t, min_abs=0.0)
        keep = np.abs(lfunc.evaluate(spec, 0.5 + 1j * t).value) > 1e-4
        out[name] = {"value": float(np.max(smp.rhs_exact[keep])), "oracle": "rhs of the exact identity", "tol": 1e-6}

    # trace of the forced factor zero, re-verified by scans at intermediate tau
    rho0 = complex(0.5, math.pi / math.log(5))
    tr = trajectory.trace("F", rho0, 0.0, 0.1, stops=[k / 100 for k in range(1, 10)])
    checks = []
    for k in range(1, 11):
        tau = k / 100
        p = tr.at(tau)
        rs = zeros.scan_zeros(lfunc.family_spec(tau), "F", (0, 1, p.imag - 0.2, p.imag + 0.2))
        checks.append(min(abs(z.rho - p) for z in rs))
    out["trace_factor_zero"] = {"value": max(checks), "oracle": "scan_zeros at 10 tau values", "tol": 1e-9}
    back = trajectory.trace("F", tr.samples[-1][1], 0.1, 0.0)
    out["trace_round_trip"] = {"value": abs(back.samples[-1][1] - rho0), "oracle": "forward then backward",
                               "tol": 1e-7}

    # collision: discriminant sign flips across tau0
    tau0, t_ev = EVENT_LEAVE
    d = []
    for tau in (tau0 - 1e-5, tau0 + 1e-5):
        m = trajectory.local_quadratic_fit(tau, complex(0.5, t_ev), 0.05)
        d.append(float(m.discriminant.real))
    out["event_leave"] = {"value": [tau0, t_ev], "disc_before_after": d,
                          "oracle": "discriminant sign change of the local quadratic", "tol": 1e-8}

    # census at H = 100 with the default and the halved step
    counts = []
    for st in (trajectory.StepControl(), trajectory.StepControl().halved()):
        res = trajectory.census(100.0, st, classify=False)
        counts.append([res.total, res.stays, res.leaves, res.incomplete])
    out["census_100"] = {"value": counts[0], "halved": counts[1], "oracle": "halved step and tolerances",
                         "tol": 0}
    return out


def main():
    data = build()
    os.makedirs(os.path.dirname(GOLDEN), exist_ok=True)
    with open(GOLDEN, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
    print(f"wrote {len(data)} entries to {GOLDEN}", file=sys.stderr)


if __name__ == "__main__":
    main()
