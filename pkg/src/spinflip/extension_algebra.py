"""State-mixing point interactions of the two-channel operator -d^2/dx^2.

Three equivalent parameterizations are handled here:

* ``M`` -- 4x4 boundary matrix, ``Gamma(0+) = M @ Gamma(0-)`` with the
  boundary vector ordered ``(psi1, psi1', psi2, psi2')``;
* ``h`` -- hermitian coupling matrix of the finite-rank perturbation;
* ``Lambda`` -- jump matrix, ``2 beta = Lambda delta`` on the mean-value and
  half-jump functionals.

Units are hbar^2/2m = 1 throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FAMILIES = (1, 2, 3, 4)

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
J4 = np.kron(np.eye(2), J2).astype(complex)

# A and I of the h -> M map
HALF_SWAP = 0.5 * np.array(
    [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
DERIV_SIGN = np.diag([1.0, -1.0, 1.0, -1.0]).astype(complex)

# (source family of Lambda) -> (target M family, sign applied to z)
LAMBDA_TO_M = {1: (3, 1), 2: (2, 1), 3: (1, -1), 4: (4, -1)}

MAX_CONDITION = 1e12


class ExtensionError(ValueError):
    """Raised when a map between parameterizations is singular."""


@dataclass(frozen=True)
class MixingParams:
    """The four complex couplings labelling the state-mixing extensions."""

    z1: complex = 0j
    z2: complex = 0j
    z3: complex = 0j
    z4: complex = 0j

    def __post_init__(self):
        for name in ("z1", "z2", "z3", "z4"):
            value = complex(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.z1, self.z2, self.z3, self.z4)


def _check_family(fam: int) -> int:
    if fam not in FAMILIES:
        raise ValueError(f"family out of range: {fam!r} (expected 1..4)")
    return int(fam)


def boundary_vector(psi1, dpsi1, psi2, dpsi2) -> np.ndarray:
    gamma = np.array([psi1, dpsi1, psi2, dpsi2], dtype=complex)
    if not np.all(np.isfinite(gamma)):
        raise ValueError("boundary vector entries must be finite")
    return gamma


def j4_residual(m) -> float:
    """Frobenius norm of ``M^H J4 M - J4``; zero iff ``M`` conserves current."""
    m = np.asarray(m, dtype=complex)
    return float(np.linalg.norm(m.conj().T @ J4 @ m - J4))


def generator_residual(x) -> float:
    """Frobenius norm of ``X^H J4 + J4 X`` (Lie-algebra condition)."""
    x = np.asarray(x, dtype=complex)
    return float(np.linalg.norm(x.conj().T @ J4 + J4 @ x))


def m_family(fam: int, z: complex) -> np.ndarray:
    """Boundary matrix of the ``fam``-th state-mixing family.

    Family ``n`` is the one carrying coupling ``z_n``:

    1. ``psi1' += z psi2'``, ``psi2 -= conj(z) psi1``
    2. ``psi1 += z psi2``, ``psi2' -= conj(z) psi1'``
    3. ``psi1' += z psi2``, ``psi2' += conj(z) psi1``
    4. ``psi1 += z psi2'``, ``psi2 += conj(z) psi1'``
    """
    fam = _check_family(fam)
    z = complex(z)
    zc = z.conjugate()
    m = np.eye(4, dtype=complex)
    if fam == 1:
        m[1, 3], m[2, 0] = z, -zc
    elif fam == 2:
        m[0, 2], m[3, 1] = z, -zc
    elif fam == 3:
        m[1, 2], m[3, 0] = z, zc
    else:
        m[0, 3], m[2, 1] = z, zc
    return m


def h_family(fam: int, z: complex) -> np.ndarray:
    """Hermitian coupling matrix generating ``m_family(fam, z)``.

    Indexed by the boundary-matrix family it produces under
    :func:`m_from_h`, so families 2 and 4 appear in swapped order relative
    to the customary listing.
    """
    fam = _check_family(fam)
    z = complex(z)
    zc = z.conjugate()
    h = np.zeros((4, 4), dtype=complex)
    if fam == 1:
        h[0, 3], h[3, 0] = -z, -zc
    elif fam == 2:
        h[1, 2], h[2, 1] = z, zc
    elif fam == 3:
        h[0, 2], h[2, 0] = z, zc
    else:
        h[1, 3], h[3, 1] = -z, -zc
    return h


def lambda_family(fam: int, z: complex) -> np.ndarray:
    """Spin-flip jump matrix ``Lambda`` of the ``fam``-th family.

    Note that ``m_from_lambda(lambda_family(f, z))`` lands on
    ``m_family(*LAMBDA_TO_M[f])`` with ``z`` scaled by the listed sign,
    not on ``m_family(f, z)``.
    """
    fam = _check_family(fam)
    z = complex(z)
    zc = z.conjugate()
    lam = np.zeros((4, 4), dtype=complex)
    if fam == 1:
        lam[1, 2], lam[3, 0] = -z, -zc
    elif fam == 2:
        lam[0, 2], lam[3, 1] = z, -zc
    elif fam == 3:
        lam[1, 3], lam[2, 0] = -z, zc
    else:
        lam[0, 3], lam[2, 1] = z, zc
    return lam


def _cayley(n: np.ndarray) -> np.ndarray:
    eye = np.eye(4, dtype=complex)
    lhs = eye - n
    if not np.all(np.isfinite(lhs)) or np.linalg.cond(lhs) > MAX_CONDITION:
        raise ExtensionError("non-invertible extension map")
    return np.linalg.solve(lhs, eye + n)


def m_from_h(h) -> np.ndarray:
    """``M = (1 - A h I)^-1 (1 + A h I)``."""
    h = np.asarray(h, dtype=complex)
    return _cayley(HALF_SWAP @ h @ DERIV_SIGN)


def m_from_lambda(lam) -> np.ndarray:
    """``M = (1 - D Lambda D / 2)^-1 (1 + D Lambda D / 2)``, D = diag(1,-1,1,-1).

    The conjugation by D accounts for the minus signs carried by the
    derivative functionals; the 1/2 comes from ``beta`` being a half-jump.
    """
    lam = np.asarray(lam, dtype=complex)
    return _cayley(0.5 * DERIV_SIGN @ lam @ DERIV_SIGN)


def m_from_params(p: MixingParams) -> np.ndarray:
    """Boundary matrix for simultaneous couplings, via the summed ``h``."""
    h = sum(h_family(f, z) for f, z in zip(FAMILIES, p.as_tuple()))
    return m_from_h(h)


def apply_bc(m, gamma_minus) -> np.ndarray:
    return np.asarray(m, dtype=complex) @ np.asarray(gamma_minus, dtype=complex)


def current_form(gamma) -> float:
    """``Im(Gamma^H J4 Gamma)``, the boundary current up to a constant."""
    gamma = np.asarray(gamma, dtype=complex)
    return float(np.imag(gamma.conj() @ J4 @ gamma))
