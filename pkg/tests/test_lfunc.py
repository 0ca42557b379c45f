import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetalab import lfunc, special
from zetalab.errors import DomainError, PoleError, TooCloseToZeroError

RHO_FACTOR = complex(0.5, math.pi / math.log(5))


def test_family_endpoints():
    s = 2 + 5j
    f0 = lfunc.evaluate(lfunc.family_spec(0.0), s).value
    assert abs(f0 - (1 + math.sqrt(5) * 5 ** -s) * special.riemann_zeta(s).value) < 1e-12
    f1 = lfunc.evaluate(lfunc.family_spec(1.0), s).value
    assert abs(f1 - special.dirichlet_l_psi5(s).value) < 1e-12


def test_forced_factor_zero():
    assert abs(lfunc.evaluate(lfunc.family_spec(0.0), RHO_FACTOR).value) < 1e-10
    assert abs(lfunc.z_rotated(lfunc.family_spec(0.0), RHO_FACTOR.imag).z_value) < 1e-9


def test_eval_dtau(golden):
    s = 0.3 + 7j
    assert lfunc.eval_dtau(s, 0.2) == lfunc.eval_dtau(s, 0.9)
    expect = special.dirichlet_l_psi5(2.0).value - (1 + math.sqrt(5) / 25) * math.pi ** 2 / 6
    assert abs(lfunc.eval_dtau(2.0) - expect) < 1e-13
    g = golden["dtau_fd_0.7+30i"]
    assert abs(lfunc.eval_dtau(0.7 + 30j) - complex(*g["value"])) < g["tol"]
    with pytest.raises(PoleError):
        lfunc.eval_dtau(1.0)


def test_eval_rejects_high_order():
    with pytest.raises(ValueError):
        lfunc.evaluate(lfunc.riemann_zeta_spec(), 2.0, 3)


@pytest.mark.parametrize("spec", [lfunc.riemann_zeta_spec(), lfunc.family_spec(0.0), lfunc.family_spec(0.4),
                                  lfunc.family_spec(1.0), lfunc.lpsi5_spec(), lfunc.factor_zeta_spec()],
                         ids=lambda s: s.name)
def test_fe_residual_examples(spec):
    assert lfunc.fe_residual(spec, 0.3 + 20j) < 1e-9
    assert lfunc.fe_residual(spec, 0.5 + 37.5j) < 1e-10


def test_fe_reflect_paths(golden):
    spec = lfunc.family_spec(0.5)
    s = -0.5 + 10j
    a = lfunc.fe_reflect(spec, s).value
    b = lfunc.evaluate(spec, s, method="series").value
    assert abs(a - b) < 1e-8 * abs(b)
    assert abs(lfunc.fe_reflect(lfunc.riemann_zeta_spec(), -2.0).value) < 1e-10
    g = golden["family0.3_-1+25i"]
    v = lfunc.fe_reflect(lfunc.family_spec(0.3), -1 + 25j).value
    ref = complex(*g["value"])
    assert abs(v - ref) < g["tol_rel"] * abs(ref)
    with pytest.raises(DomainError):
        lfunc.fe_reflect(spec, 0.7)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, -1.01), st.floats(2, 80), st.integers(0, 2))
def test_reflection_matches_series(x, y, k):
    spec = lfunc.riemann_zeta_spec()
    s = complex(x, y)
    a = lfunc.evaluate(spec, s, k, method="reflect").value
    b = lfunc.evaluate(spec, s, k, method="series").value
    assert abs(a - b) < 1e-9 * max(1.0, abs(b))


def test_z_rotated():
    spec = lfunc.riemann_zeta_spec()
    t = np.linspace(14.0, 14.3, 301)
    Z = lfunc.line_z(spec, t)[0]
    assert np.count_nonzero(Z[1:] * Z[:-1] < 0) == 1
    rng = np.random.default_rng(5)
    for t in rng.uniform(5, 200, 100):
        smp = lfunc.z_rotated(spec, float(t))
        assert abs(smp.z_value ** 2 - abs(smp.f_value) ** 2) <= 1e-10 * abs(smp.f_value) ** 2 + 1e-300


def test_logderiv_identity():
    spec = lfunc.riemann_zeta_spec()
    smp = lfunc.critical_line_logderiv(spec, 50.0)
    assert abs(smp.lhs - smp.rhs_exact) < 1e-9
    smp = lfunc.critical_line_logderiv(spec, 200.0)
    assert abs(smp.lhs - smp.rhs_asymptotic) < 1.0
    smp = lfunc.critical_line_logderiv(lfunc.family_spec(0.5), 100.0)
    assert abs(smp.lhs - smp.rhs_exact) < 1e-8
    with pytest.raises(TooCloseToZeroError):
        lfunc.critical_line_logderiv(spec, 14.134725141734693)


def test_degree_and_constants():
    z = lfunc.riemann_zeta_spec()
    assert z.degree == 1
    assert sum(2 * lam for lam, _ in z.fe.gamma_factors) == z.degree
    assert (z.density.eps, z.density.delta) == (0.17, 0.1)


@pytest.mark.parametrize("spec", [lfunc.riemann_zeta_spec(), lfunc.lpsi5_spec(), lfunc.factor_zeta_spec(),
                                  lfunc.family_spec(0.0), lfunc.family_spec(0.6), lfunc.family_spec(1.0)],
                         ids=lambda s: s.name)
def test_growth_constants_hold(spec):
    lower, upper = lfunc.check_growth(spec, np.linspace(0.5, 300, 400))
    assert lower and upper


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["zeta", "lpsi5", "factor", "family"]), st.floats(0, 1))
def test_spec_json_round_trip(name, tau):
    spec = lfunc.spec_from_name(name, tau if name == "family" else None)
    assert lfunc.FunctionSpec.from_json(spec.to_json()) == spec


def test_spec_validation():
    with pytest.raises(DomainError):
        lfunc.family_spec(1.5)
    with pytest.raises(DomainError):
        lfunc.spec_from_name("nope")
