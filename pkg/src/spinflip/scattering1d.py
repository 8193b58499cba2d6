"""Two-channel stationary scattering and bound states for a point interaction at x=0.

Conventions: unit-amplitude plane wave ``exp(+-ikx) chi_s`` incident from the
chosen side, spin channels ``chi_up = (1, 0)`` and ``chi_dn = (0, 1)``,
boundary vectors ordered ``(psi_up, psi_up', psi_dn, psi_dn')``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extension_algebra import MAX_CONDITION

SIDES = ("left", "right")
KAPPA_MIN = 1e-6
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class MatchingError(RuntimeError):
    """Matching system too ill-conditioned to solve reliably."""


@dataclass(frozen=True)
class ScatterAmplitudes:
    """Reflection and transmission for one incidence side.

    Column ``s`` of ``r`` and ``t`` holds the outgoing spinor for incident
    spin channel ``s`` (0 = up, 1 = down).
    """

    k: float
    side: str
    r: np.ndarray
    t: np.ndarray

    def flux(self) -> np.ndarray:
        return np.sum(np.abs(self.r) ** 2 + np.abs(self.t) ** 2, axis=0)


@dataclass(frozen=True)
class BoundState1D:
    kappa: float
    energy: float
    left_spinor: np.ndarray
    right_spinor: np.ndarray
    residual: float

    def boundary_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return _decaying_boundary(self.kappa, self.left_spinor, self.right_spinor)


def _interleave(values: np.ndarray, derivs: np.ndarray) -> np.ndarray:
    """Stack 2-spinor values/derivatives (along axis 0) into 4-vector order."""
    out = np.empty((4,) + values.shape[1:], dtype=complex)
    out[0::2] = values
    out[1::2] = derivs
    return out


def _decaying_boundary(kappa, left, right):
    left = np.asarray(left, dtype=complex)
    right = np.asarray(right, dtype=complex)
    return _interleave(left, kappa * left), _interleave(right, -kappa * right)


def _solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if np.linalg.cond(a) > MAX_CONDITION:
        raise MatchingError("resonant/ill-conditioned matching")
    return np.linalg.solve(a, b)


def scatter(m, k: float, side: str = "left") -> ScatterAmplitudes:
    """Solve ``Gamma(0+) = M Gamma(0-)`` for both incident spin channels."""
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k}")
    if side not in SIDES:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    m = np.asarray(m, dtype=complex)
    eye = np.eye(2, dtype=complex)
    ik = 1j * k
    # unknowns (r_up, r_dn, t_up, t_dn); gamma = base + columns @ unknowns
    if side == "left":
        inc_minus = _interleave(eye, ik * eye)
        refl_minus = _interleave(eye, -ik * eye)
        trans_plus = _interleave(eye, ik * eye)
        a = np.hstack([-m @ refl_minus, trans_plus])
        b = m @ inc_minus
    else:
        inc_plus = _interleave(eye, -ik * eye)
        refl_plus = _interleave(eye, ik * eye)
        trans_minus = _interleave(eye, -ik * eye)
        a = np.hstack([refl_plus, -m @ trans_minus])
        b = -inc_plus
    sol = _solve(a, b)
    return ScatterAmplitudes(k=float(k), side=side, r=sol[:2], t=sol[2:])


def s_matrix(m, k: float) -> np.ndarray:
    """S-matrix in the channel basis (left up, left dn, right up, right dn)."""
    left = scatter(m, k, "left")
    right = scatter(m, k, "right")
    return np.block([[left.r, right.t], [left.t, right.r]])


def flux_residual(m, k: float) -> float:
    """Largest ``|1 - sum(|r|^2 + |t|^2)|`` over sides and incident spins."""
    worst = 0.0
    for side in SIDES:
        amps = scatter(m, k, side)
        worst = max(worst, float(np.max(np.abs(1.0 - amps.flux()))))
    return worst


def bound_matching_matrix(m, kappa: float) -> np.ndarray:
    """Homogeneous system for ``(c_minus, c_plus)`` with decaying tails."""
    m = np.asarray(m, dtype=complex)
    eye = np.eye(2, dtype=complex)
    left = _interleave(eye, kappa * eye)
    right = _interleave(eye, -kappa * eye)
    return np.hstack([-m @ left, right])


def _sigma_min(m, kappa: float) -> float:
    return float(np.linalg.svd(bound_matching_matrix(m, kappa), compute_uv=False)[-1])


def _golden_min(f, a: float, b: float, xtol: float = 1e-15) -> float:
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > xtol * max(1.0, abs(a) + abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return c if fc < fd else d


def bound_states(m, kappa_max: float = 10.0, n_grid: int = 4000,
                 tol: float = 1e-10) -> list[BoundState1D]:
    """Bound states with ``kappa`` in ``(0, kappa_max]``, ordered by energy.

    Local minima of the smallest singular value of the matching matrix on a
    uniform grid are refined by golden-section search and accepted when the
    minimum drops below ``tol``. A two-dimensional null space yields two
    states at the same energy.
    """
    if not kappa_max > 0:
        raise ValueError(f"kappa_max must be positive, got {kappa_max}")
    grid = np.linspace(KAPPA_MIN, kappa_max, n_grid)
    smin = np.array([_sigma_min(m, q) for q in grid])
    found = []
    for i in range(1, len(grid) - 1):
        if not (smin[i] <= smin[i - 1] and smin[i] < smin[i + 1]):
            continue
        lo, hi = grid[i - 1], grid[i + 1]
        kappa = _golden_min(lambda q: _sigma_min(m, q), lo, hi)
        _, sv, vh = np.linalg.svd(bound_matching_matrix(m, kappa))
        null = vh[sv < tol].conj()
        for vec in null:
            found.append(_make_state(m, kappa, vec))
    found.sort(key=lambda s: (s.energy, tuple(np.round(np.abs(s.left_spinor), 12))))
    return found


def _make_state(m, kappa, vec) -> BoundState1D:
    # int |psi|^2 dx = (|c_minus|^2 + |c_plus|^2) / (2 kappa)
    norm = np.sqrt(np.vdot(vec, vec).real / (2.0 * kappa))
    vec = vec / norm
    pivot = vec[np.argmax(np.abs(vec) > 1e-8 * np.max(np.abs(vec)))]
    vec = vec * (abs(pivot) / pivot)
    left, right = vec[:2], vec[2:]
    g_minus, g_plus = _decaying_boundary(kappa, left, right)
    residual = float(np.linalg.norm(g_plus - np.asarray(m) @ g_minus))
    return BoundState1D(float(kappa), float(-kappa * kappa), left, right, residual)


def rotate_boundary_matrix(m, u) -> np.ndarray:
    """Express ``M`` in a new spin basis whose columns are given by ``u``."""
    big = np.kron(np.asarray(u, dtype=complex), np.eye(2))
    return big.conj().T @ np.asarray(m, dtype=complex) @ big
