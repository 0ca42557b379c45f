import json
import math

import numpy as np
import pytest

from zetalab import lfunc, trajectory as tj, zeros
from zetalab.errors import NoCollisionError, WrongCountError

RHO_FACTOR = complex(0.5, math.pi / math.log(5))


def test_trace_factor_zero(golden):
    tr = tj.trace("F", RHO_FACTOR, 0.0, 0.1)
    for tau, s in tr.samples:
        assert abs(lfunc.evaluate(lfunc.family_spec(tau), s).value) < 1e-9
    assert golden["trace_factor_zero"]["value"] < 1e-9
    steps = np.abs(np.diff([s for _, s in tr.samples]))
    assert steps.max() < 0.05


def test_trace_constant_and_round_trip():
    tr = tj.trace("F", RHO_FACTOR, 0.3, 0.3)
    assert tr.samples == [(0.3, RHO_FACTOR)]
    fwd = tj.trace("F", RHO_FACTOR, 0.0, 0.1)
    back = tj.trace("F", fwd.samples[-1][1], 0.1, 0.0)
    assert abs(back.samples[-1][1] - RHO_FACTOR) < 1e-7


def test_trajectory_dict_round_trip():
    tr = tj.trace("F", RHO_FACTOR, 0.0, 0.05)
    again = tj.Trajectory.from_dict(json.loads(json.dumps(tr.to_dict())))
    assert again.samples == tr.samples and again.classification == tr.classification


def test_planted_collision_detected():
    fam = tj.PlantedFamily(t0=3.0, tau0=0.4, kappa=-1.0)
    ev = tj.detect_double_zero((2.0, 4.0), (0.2, 0.6), fam)
    assert abs(ev.tau0 - 0.4) < 1e-8 and ev.rho0.real == 0.5
    assert abs(ev.rho0.imag - 3.0) < 1e-6
    with pytest.raises(NoCollisionError):
        tj.detect_double_zero((2.0, 4.0), (0.5, 0.6), fam)


def test_planted_trace_leaves_and_returns():
    fam = tj.PlantedFamily(t0=3.0, tau0=0.4, kappa=-1.0)
    tr = tj.trace("F", complex(0.5, 3.0 - math.sqrt(0.4)), 0.0, 1.0, family=fam)
    assert tr.classification.kind == "leaves_at"
    assert abs(tr.classification.tau_star - 0.4) < 1e-8
    end = tr.samples[-1][1]
    assert end.real < 0.5 and abs(end - (3.0j + 0.5 - math.sqrt(0.6))) < 1e-8
    back = tj.trace("F", end, 1.0, 0.0, family=fam)
    assert abs(back.samples[-1][1] - complex(0.5, 3.0 - math.sqrt(0.4))) < 1e-7


def test_local_quadratic_planted():
    # (s - 1/2 - 2i)^2 = 0.04 at tau = 0.6, times exp(s)
    fam = tj.PlantedFamily(t0=2.0, tau0=0.5, kappa=-0.4, unit="exp")
    m = tj.local_quadratic_fit(0.6, complex(0.5, 2.0), 0.3, fam)
    z = sorted(m.roots, key=lambda r: r.real)
    assert abs(z[0] - (0.3 + 2j)) < 1e-9 and abs(z[1] - (0.7 + 2j)) < 1e-9
    with pytest.raises(WrongCountError):
        tj.local_quadratic_fit(0.6, complex(0.5, 2.0), 0.1, fam)


def test_event_discriminant_and_mirror(golden):
    tau0, t = golden["event_leave"]["value"]
    m0 = tj.local_quadratic_fit(tau0, complex(0.5, t), 0.05)
    assert abs(m0.discriminant) < 1e-7
    before, after = golden["event_leave"]["disc_before_after"]
    assert before < 0 < after
    m = tj.local_quadratic_fit(tau0 + 1e-3, complex(0.5, t), 0.2)
    s1, s2 = sorted(m.roots, key=lambda r: r.real)
    assert s1.real < 0.5 < s2.real and abs(s2 - (1 - s1.conjugate())) < 1e-8


def test_detect_census_collision(golden):
    tau0, t = golden["event_leave"]["value"]
    ev = tj.detect_double_zero((t - 0.3, t + 0.3), (tau0 - 0.01, tau0 + 0.01))
    assert abs(ev.tau0 - tau0) < 1e-9 and abs(ev.rho0.imag - t) < 1e-7
    assert ev.kind == "leaving"
    z = zeros.ZeroRecord(ev.rho0, 2, 0.0, "collision")
    assert zeros.multiplicity(lfunc.family_spec(ev.tau0), "F", z, r_iso=1e-4) == 2


@pytest.mark.parametrize("which", ["event_leave"])
def test_theorem3_on_census_event(golden, which):
    tau0, t = golden[which]["value"]
    ev = tj.detect_double_zero((t - 0.3, t + 0.3), (tau0 - 0.01, tau0 + 0.01))
    res = tj.classify_theorem3(ev)
    assert res.statement1.holds and res.statement2.holds
    assert res.equivalent and res.exercised
    assert res.mirror_error < 1e-8


def test_theorem3_returning_event_uses_mirrored_orientation():
    ev = tj.detect_double_zero((61.05, 61.65), (0.70, 0.73))
    assert ev.kind == "returning"
    res = tj.classify_theorem3(ev)
    assert res.mirrored1.holds and res.mirrored2.holds and res.equivalent


def test_degenerate_step_rejected():
    bad = tj.StepControl(h_init=1.0, h_min=1.0, h_max=1.0)
    res = tj.census(15.0, bad, classify=False, margin=2.0)
    assert res.incomplete > 0


def test_small_census_invariants():
    res = tj.census(30.0, margin=4.0)
    assert res.incomplete == 0 and res.total == res.stays + res.leaves
    assert all(n == w for _, n, w in res.conservation)
    assert res.mirror_ok
    lines = tj.trajectories_to_jsonl(res).splitlines()
    assert len(lines) == len(res.seeds)
    assert res.summary_csv().splitlines()[0] == "H,total,stays,leaves,events"
