"""Smooth-profile realizations of the singular spin-flip couplings.

The regularized operator is

    H psi = -[(I + x4 sigma_y V) psi']' + a_pot V psi

with ``V`` a unit-integral profile of width ``epsilon``. Its stationary
equation at energy ``k^2`` is integrated across the profile; removing the
free propagation outside ``x = 0`` gives a 4x4 transfer matrix comparable to a
point-interaction boundary matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad, solve_ivp

from .extension_algebra import m_family
from .spin_physics import SIGMA_Y, rashba_bc

SHAPES = ("bump", "rectangle")
MARGIN_FRACTION = 0.1
VAL = [0, 2]
DER = [1, 3]


@lru_cache(maxsize=None)
def _bump_norm() -> float:
    val, _ = quad(lambda u: math.exp(-1.0 / (1.0 - u * u)), 0.0, 1.0,
                  epsabs=0.0, epsrel=1e-13, limit=200)
    return 0.5 / val


@dataclass(frozen=True)
class Profile:
    """Unit-integral delta-sequence member.

    ``rectangle`` is ``1/epsilon`` on ``|x| <= epsilon/2``; ``bump`` is the
    C-infinity function ``C exp(-1/(1 - (x/epsilon)^2)) / epsilon`` on
    ``|x| < epsilon``.
    """

    shape: str
    epsilon: float

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown profile shape {self.shape!r}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def half_support(self) -> float:
        return 0.5 * self.epsilon if self.shape == "rectangle" else self.epsilon

    @property
    def peak(self) -> float:
        if self.shape == "rectangle":
            return 1.0 / self.epsilon
        return _bump_norm() * math.exp(-1.0) / self.epsilon

    def breakpoints(self) -> tuple[float, ...]:
        if self.shape == "rectangle":
            return (-0.5 * self.epsilon, 0.5 * self.epsilon)
        return ()


def profile_eval(p: Profile, x: float) -> float:
    eps = p.epsilon
    if p.shape == "rectangle":
        return 1.0 / eps if abs(x) <= 0.5 * eps else 0.0
    u = x / eps
    if abs(u) >= 1.0:
        return 0.0
    return _bump_norm() * math.exp(-1.0 / (1.0 - u * u)) / eps


@dataclass(frozen=True)
class RegularizedCoupling:
    """Potential coefficient ``a_pot`` (hermitian 2x2) and kinetic strength ``x4``."""

    profile: Profile
    a_pot: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), complex))
    x4: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.a_pot, dtype=complex)
        if a.shape != (2, 2) or np.max(np.abs(a - a.conj().T)) > 1e-12:
            raise ValueError("a_pot must be a hermitian 2x2 matrix")
        object.__setattr__(self, "a_pot", a)

    def kinetic_ok(self) -> bool:
        return abs(self.x4) * self.profile.peak < 1.0

    def with_epsilon(self, epsilon: float) -> "RegularizedCoupling":
        return RegularizedCoupling(Profile(self.profile.shape, epsilon), self.a_pot, self.x4)


@dataclass(frozen=True)
class TransferMatrix:
    k: float
    t: np.ndarray


def free_propagator(k: float, length: float) -> np.ndarray:
    """Free evolution of ``(psi, psi')`` pairs over ``length`` in both channels."""
    c, s = math.cos(k * length), math.sin(k * length)
    block = np.array([[c, s / k], [-k * s, c]], dtype=complex)
    return np.kron(np.eye(2), block)


def _generator(c: RegularizedCoupling, k: float, x: float) -> np.ndarray:
    v = profile_eval(c.profile, x)
    g = np.zeros((4, 4), dtype=complex)
    g[np.ix_(VAL, DER)] = np.linalg.inv(np.eye(2) + c.x4 * v * SIGMA_Y)
    g[np.ix_(DER, VAL)] = v * c.a_pot - k * k * np.eye(2)
    return g


def _fundamental(c: RegularizedCoupling, k: float, a: float, b: float,
                 rtol: float, atol: float) -> np.ndarray:
    """Propagator of ``(psi, p)``, ``p = (I + x4 sigma_y V) psi'``, from a to b."""

    def rhs(x, y):
        return (_generator(c, k, x) @ y.reshape(4, 4)).ravel()

    sol = solve_ivp(rhs, (a, b), np.eye(4, dtype=complex).ravel(),
                    method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    return sol.y[:, -1].reshape(4, 4)


def transfer_matrix_eps(c: RegularizedCoupling, k: float, rtol: float = 1e-12,
                        atol: float = 1e-14) -> TransferMatrix:
    """Transfer matrix of the regularized coupling with free propagation removed.

    Integration runs over ``[-d, d]`` with ``d = 1.1 * epsilon`` and is split
    at profile discontinuities. The result maps boundary data extrapolated
    freely to ``0-`` onto data extrapolated freely to ``0+``.
    """
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k}")
    if not c.kinetic_ok():
        raise ValueError("kinetic coefficient singular")
    d = (1.0 + MARGIN_FRACTION) * c.profile.epsilon
    nodes = [-d, *c.profile.breakpoints(), d]
    prop = np.eye(4, dtype=complex)
    for a, b in zip(nodes[:-1], nodes[1:]):
        prop = _fundamental(c, k, a, b, rtol, atol) @ prop
    back = free_propagator(k, -d)
    return TransferMatrix(float(k), back @ prop @ back)


def rectangle_transfer_closed_form(c: RegularizedCoupling, k: float) -> TransferMatrix:
    """Piecewise-constant solution for a rectangle profile with ``x4 = 0``.

    In the eigenbasis of ``a_pot`` each channel sees a scalar barrier of
    height ``lambda / epsilon`` and width ``epsilon``.
    """
    if c.profile.shape != "rectangle" or c.x4 != 0:
        raise ValueError("closed form needs a rectangle profile and x4 = 0")
    eps = c.profile.epsilon
    lam, u = np.linalg.eigh(c.a_pot)
    blocks = []
    for ev in lam:
        q = np.sqrt(complex(k * k - ev / eps))
        qe = q * eps
        # sin(q eps)/q written to stay finite at q = 0
        sinc = eps * np.sinc(qe / np.pi)
        barrier = np.array([[np.cos(qe), sinc], [-q * q * sinc, np.cos(qe)]])
        half = np.array([[math.cos(k * eps / 2), -math.sin(k * eps / 2) / k],
                         [k * math.sin(k * eps / 2), math.cos(k * eps / 2)]])
        blocks.append(half @ barrier @ half)
    diag = np.zeros((4, 4), dtype=complex)
    diag[:2, :2], diag[2:, 2:] = blocks
    rot = np.kron(u, np.eye(2))
    return TransferMatrix(float(k), rot @ diag @ rot.conj().T)


def point_limit(c: RegularizedCoupling) -> np.ndarray:
    """Boundary matrix expected as ``epsilon -> 0``.

    The potential term gives a derivative jump ``a_pot psi(0)``; an off-diagonal
    ``a_pot`` is therefore family 3 with ``z = a_pot[0, 1]``. For ``x4 != 0``
    the published kinetic-type matrix is composed on top; that part is a
    claim under test, not an established limit.
    """
    m = np.eye(4, dtype=complex)
    m[np.ix_(DER, VAL)] = c.a_pot
    if c.x4:
        m = rashba_bc("x4", c.x4) @ m
    return m


# (position of z, its coefficient, position of conj(z), its coefficient)
_FAMILY_PATTERN = {
    1: ((1, 3), 1.0, (2, 0), -1.0),
    2: ((0, 2), 1.0, (3, 1), -1.0),
    3: ((1, 2), 1.0, (3, 0), 1.0),
    4: ((0, 3), 1.0, (2, 1), 1.0),
}


@dataclass(frozen=True)
class FamilyMatch:
    family: int
    z: complex
    residual: float
    matched: bool


def match_family(t, tol: float = 1e-6) -> FamilyMatch:
    """Closest ``m_family(fam, z)`` in Frobenius norm; ``matched`` iff within ``tol``."""
    t = np.asarray(getattr(t, "t", t), dtype=complex)
    best = None
    for fam, (pa, ca, pb, cb) in _FAMILY_PATTERN.items():
        z = (np.conj(ca) * t[pa] + cb * np.conj(t[pb])) / (abs(ca) ** 2 + abs(cb) ** 2)
        res = float(np.linalg.norm(t - m_family(fam, z)))
        if best is None or res < best.residual:
            best = FamilyMatch(fam, complex(z), res, res <= tol)
    return best


@dataclass
class ConvergenceReport:
    k: float
    epsilons: list[float]
    residuals: list[float]
    order: float | None
    target: np.ndarray
    matches: list[FamilyMatch]
    strengths: list[float] = field(default_factory=list)


def fit_order(epsilons, residuals, floor: float = 1e-10) -> float | None:
    """Least-squares slope of log(residual) against log(epsilon)."""
    res = np.asarray(residuals, dtype=float)
    if np.all(res <= floor):
        return None
    slope, _ = np.polyfit(np.log(epsilons), np.log(np.maximum(res, 1e-300)), 1)
    return float(slope)


def _check_eps(eps_list) -> list[float]:
    eps = [float(e) for e in eps_list]
    if len(eps) < 3 or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps_list must be strictly decreasing with at least 3 entries")
    if eps[-1] <= 0:
        raise ValueError("epsilon values must be positive")
    return eps


def converge_study(c_base: RegularizedCoupling, k: float, eps_list,
                   target=None, rtol: float = 1e-12) -> ConvergenceReport:
    eps = _check_eps(eps_list)
    target = point_limit(c_base) if target is None else np.asarray(target, complex)
    residuals, matches = [], []
    for e in eps:
        t = transfer_matrix_eps(c_base.with_epsilon(e), k, rtol=rtol).t
        residuals.append(float(np.linalg.norm(t - target)))
        matches.append(match_family(t))
    return ConvergenceReport(float(k), eps, residuals, fit_order(eps, residuals),
                             target, matches)


def kinetic_study(x4: float, k: float, eps_list, shape: str = "bump",
                  max_amplitude: float = 0.5, rtol: float = 1e-12) -> ConvergenceReport:
    """Exploratory epsilon-sweep of the kinetic (x4) coupling alone.

    A fixed ``x4`` with a unit-integral profile makes ``I + x4 sigma_y V``
    singular once ``|x4| V_max >= 1``. Here the amplitude ``|x4| V_max`` is
    capped at ``max_amplitude``, so the effective width-integrated strength
    (reported in ``strengths``) shrinks with epsilon. Residuals are measured
    against the published kinetic-type matrix for the nominal ``x4``.
    """
    eps = _check_eps(eps_list)
    target = rashba_bc("x4", x4)
    residuals, matches, strengths = [], [], []
    for e in eps:
        prof = Profile(shape, e)
        x4_eff = math.copysign(min(abs(x4), max_amplitude / prof.peak), x4)
        t = transfer_matrix_eps(RegularizedCoupling(prof, x4=x4_eff), k, rtol=rtol).t
        residuals.append(float(np.linalg.norm(t - target)))
        matches.append(match_family(t))
        strengths.append(x4_eff)
    return ConvergenceReport(float(k), eps, residuals, fit_order(eps, residuals),
                             target, matches, strengths)
