import mpmath
import numpy as np
import pytest

from oracles import piecewise_expm_transfer
from spinflip.extension_algebra import j4_residual, m_family
from spinflip.regularization import (
    Profile,
    RegularizedCoupling,
    converge_study,
    fit_order,
    kinetic_study,
    match_family,
    point_limit,
    profile_eval,
    rectangle_transfer_closed_form,
    transfer_matrix_eps,
)
from spinflip.spin_physics import SIGMA_X, SIGMA_Y, SIGMA_Z

EPS4 = [0.4, 0.2, 0.1, 0.05]


def test_profile_values():
    assert profile_eval(Profile("rectangle", 0.5), 0.0) == 2.0
    assert profile_eval(Profile("rectangle", 0.5), 0.3) == 0.0
    assert profile_eval(Profile("bump", 0.3), 0.3) == 0.0
    assert profile_eval(Profile("bump", 0.3), -0.31) == 0.0


@pytest.mark.parametrize("eps", [0.05, 0.3, 1.7])
def test_bump_unit_integral(eps):
    mpmath.mp.dps = 30
    p = Profile("bump", eps)
    total = mpmath.quad(lambda x: profile_eval(p, float(x)), [-eps, 0, eps])
    assert abs(float(total) - 1.0) <= 1e-10


def test_profile_validation():
    with pytest.raises(ValueError):
        Profile("triangle", 0.1)
    with pytest.raises(ValueError):
        Profile("bump", 0.0)


def test_free_transfer_is_identity():
    for shape in ("bump", "rectangle"):
        c = RegularizedCoupling(Profile(shape, 0.2))
        for k in (0.3, 1.0, 4.0):
            assert np.max(np.abs(transfer_matrix_eps(c, k).t - np.eye(4))) <= 1e-10


def test_closed_form_matches_expm_oracle():
    for a in (2 * SIGMA_Y, SIGMA_X - 0.5 * SIGMA_Z, np.diag([3.0, -1.0])):
        for eps in (0.05, 0.3):
            for k in (0.5, 2.0):
                c = RegularizedCoupling(Profile("rectangle", eps), a)
                got = rectangle_transfer_closed_form(c, k).t
                assert np.max(np.abs(got - piecewise_expm_transfer(a, eps, k))) <= 1e-11


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.25, 0.5])
@pytest.mark.parametrize("k", [0.5, 1.0, 2.5, 5.0])
def test_ode_matches_closed_form(eps, k):
    c = RegularizedCoupling(Profile("rectangle", eps), 2 * SIGMA_Y)
    ode = transfer_matrix_eps(c, k).t
    exact = rectangle_transfer_closed_form(c, k).t
    assert np.max(np.abs(ode - exact)) <= 1e-9


@pytest.mark.parametrize("coupling", [
    dict(a_pot=SIGMA_Y),
    dict(a_pot=0.5 * SIGMA_X + SIGMA_Z),
    dict(x4=0.05),
    dict(a_pot=SIGMA_Y, x4=-0.03),
])
@pytest.mark.parametrize("shape", ["bump", "rectangle"])
def test_transfer_is_flux_conserving(coupling, shape):
    c = RegularizedCoupling(Profile(shape, 0.2), **coupling)
    t = transfer_matrix_eps(c, 1.3).t
    assert j4_residual(t) <= 1e-9


def test_kinetic_singularity_rejected():
    c = RegularizedCoupling(Profile("rectangle", 0.1), x4=0.2)
    with pytest.raises(ValueError, match="kinetic coefficient singular"):
        transfer_matrix_eps(c, 1.0)


def test_delta_limit_is_family3():
    c = RegularizedCoupling(Profile("rectangle", 0.4), 2 * SIGMA_Y)
    assert np.array_equal(point_limit(c), m_family(3, -2j))
    res = [np.linalg.norm(transfer_matrix_eps(c.with_epsilon(e), 1.0).t - m_family(3, -2j))
           for e in EPS4]
    assert all(b < a for a, b in zip(res, res[1:]))


def test_delta_limit_k_independent():
    c = RegularizedCoupling(Profile("rectangle", 0.4), SIGMA_Y)
    diffs = [np.linalg.norm(transfer_matrix_eps(c.with_epsilon(e), 1.0).t
                            - transfer_matrix_eps(c.with_epsilon(e), 3.0).t) for e in EPS4]
    assert all(b < a for a, b in zip(diffs, diffs[1:]))


def test_converge_study_rectangle():
    c = RegularizedCoupling(Profile("rectangle", 0.4), SIGMA_Y)
    rep = converge_study(c, 1.0, EPS4)
    assert all(b < a for a, b in zip(rep.residuals, rep.residuals[1:]))
    assert rep.order >= 0.9
    assert all(m.family == 3 for m in rep.matches)


def test_converge_study_bump():
    c = RegularizedCoupling(Profile("bump", 0.4), SIGMA_Y)
    rep = converge_study(c, 1.0, EPS4)
    assert rep.order >= 0.9


def test_converge_study_zero_coupling():
    rep = converge_study(RegularizedCoupling(Profile("rectangle", 0.4)), 1.0, EPS4)
    assert max(rep.residuals) <= 1e-10
    assert rep.order is None


def test_converge_study_validation():
    c = RegularizedCoupling(Profile("rectangle", 0.4), SIGMA_Y)
    with pytest.raises(ValueError):
        converge_study(c, 1.0, [0.1, 0.2, 0.05])
    with pytest.raises(ValueError):
        converge_study(c, 1.0, [0.2, 0.1])


def test_kinetic_study_reports():
    rep = kinetic_study(0.05, 1.0, EPS4, shape="bump")
    assert len(rep.residuals) == 4 and len(rep.strengths) == 4
    assert all(abs(s) <= 0.05 for s in rep.strengths)
    assert all(np.isfinite(rep.residuals))


def test_fit_order_exact_power():
    eps = np.array([0.4, 0.2, 0.1])
    assert fit_order(eps, 3 * eps ** 2) == pytest.approx(2.0)


def test_match_family_exact():
    z = 1 - 1j
    out = match_family(m_family(3, z), tol=1e-12)
    assert out.family == 3 and out.matched
    assert out.z == z and out.residual == 0


def test_match_family_perturbed():
    rng = np.random.default_rng(11)
    pert = rng.normal(size=(4, 4))
    pert *= 1e-6 / np.linalg.norm(pert)
    out = match_family(m_family(3, 1 - 1j) + pert, tol=1e-5)
    assert out.family == 3 and out.matched
    assert abs(out.z - (1 - 1j)) <= 1e-6
    assert out.residual <= 1e-6


def test_match_family_none():
    t = np.eye(4, dtype=complex)
    t[0, 1] = 0.5
    t[2, 3] = 0.5
    out = match_family(t, tol=1e-6)
    assert not out.matched
    assert out.residual == pytest.approx(np.sqrt(0.5))
