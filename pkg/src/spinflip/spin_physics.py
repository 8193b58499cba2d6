"""Spin interpretation of the two-channel extensions.

Pauli decomposition of 2x2 boundary matrices, the filter singling out the
two real Rashba-type couplings, the published Rashba boundary matrices,
rotation to the S_x eigenbasis and the transverse Pauli-current jumps.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .extension_algebra import MixingParams, apply_bc, m_family

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# columns are |S_x = +1/2>, |S_x = -1/2>
SX_BASIS = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

HERMITIAN_TOL = 1e-12


def _require_hermitian(w, tol=HERMITIAN_TOL) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if w.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {w.shape}")
    if np.max(np.abs(w - w.conj().T)) > tol:
        raise ValueError("matrix is not hermitian")
    return w


@dataclass(frozen=True)
class PauliDecomposition:
    omega: float
    w: tuple[float, float, float]

    def matrix(self) -> np.ndarray:
        return self.omega * SIGMA_0 + sum(c * s for c, s in zip(self.w, PAULI))


def pauli_decompose(w_matrix) -> PauliDecomposition:
    """Split a hermitian 2x2 matrix as ``omega * I + w . sigma``."""
    w_matrix = _require_hermitian(w_matrix)
    omega = 0.5 * np.trace(w_matrix).real
    w = tuple(float(0.5 * np.trace(s @ w_matrix).real) for s in PAULI)
    return PauliDecomposition(float(omega), w)


@dataclass(frozen=True)
class RashbaParams:
    """Potential-type (``x1``) and kinetic-type (``x4``) spin-flip strengths."""

    x1: float
    x4: float


@dataclass(frozen=True)
class Rejection:
    violated: str
    magnitude: float


def spin_filter(p: MixingParams, tol: float = 1e-12) -> RashbaParams | Rejection:
    """Keep only the couplings compatible with a spin interpretation.

    Accepted parameters have ``z2 = z3 = 0``, ``Re z1 = 0`` and ``Im z4 = 0``,
    mapped to ``x1 = -Im z1`` and ``x4 = -Re z4``. The first violated
    condition is returned otherwise.
    """
    checks = (
        ("z2 != 0", abs(p.z2)),
        ("z3 != 0", abs(p.z3)),
        ("Re z1 != 0", abs(p.z1.real)),
        ("Im z4 != 0", abs(p.z4.imag)),
    )
    for name, size in checks:
        if size > tol:
            return Rejection(name, float(size))
    return RashbaParams(x1=-p.z1.imag, x4=-p.z4.real)


RASHBA_KINDS = ("x1", "x4")


def rashba_bc(kind: str, value: float) -> np.ndarray:
    """Rashba boundary matrix stored as published.

    ``x1``: functions continuous, ``psi_up' += 2 x1 psi_dn'`` and
    ``psi_dn' += 2 x1 psi_up'``.
    ``x4``: derivatives continuous, ``psi_up += 2 x4 psi_dn'`` and
    ``psi_dn += 2 x4 psi_up'``.

    These are not J4-unitary in general; see ``scripts/classify_rashba.py``.
    """
    m = np.eye(4, dtype=complex)
    if kind == "x1":
        m[1, 3] = m[3, 1] = 2.0 * value
    elif kind == "x4":
        m[0, 3] = m[2, 1] = 2.0 * value
    else:
        raise ValueError(f"unknown Rashba kind {kind!r}; use 'x1' or 'x4'")
    return m


def substituted_rashba_bc(kind: str, value: float) -> np.ndarray:
    """Rashba coupling obtained by plugging it back into the mixing families.

    ``x1`` uses family 1 with ``z1 = -i x1``; ``x4`` uses family 4 with
    ``z4 = -x4``. Unlike :func:`rashba_bc`, these are J4-unitary.
    """
    if kind == "x1":
        return m_family(1, -1j * value)
    if kind == "x4":
        return m_family(4, -value)
    raise ValueError(f"unknown Rashba kind {kind!r}; use 'x1' or 'x4'")


def sx_conjugate(w_matrix) -> tuple[np.ndarray, float]:
    """Rewrite ``W`` in the S_x eigenbasis.

    When ``W[0, 1]`` is not real, a phase gauge ``G = diag(1, exp(i theta))``
    with ``theta = arg W[0, 1]`` is applied first (``W -> G W G^H``) to make
    it real; then ``U^H W U`` with ``U`` the S_x eigenbasis. Returns the
    rotated matrix and ``theta`` (0 when no gauge was needed).
    """
    w_matrix = _require_hermitian(w_matrix)
    off = w_matrix[0, 1]
    theta = float(np.angle(off)) if off.imag != 0 else 0.0
    gauge = np.diag([1.0, np.exp(1j * theta)])
    w_gauged = gauge @ w_matrix @ gauge.conj().T
    return SX_BASIS.conj().T @ w_gauged @ SX_BASIS, theta


class CurrentJump(NamedTuple):
    d_jy: float
    d_jz: float


def transverse_currents(gamma) -> tuple[float, float]:
    """``(J_y, J_z)`` built from one-sided boundary values."""
    gamma = np.asarray(gamma, dtype=complex)
    psi = gamma[[0, 2]]
    dpsi = gamma[[1, 3]]
    jy = -(dpsi.conj() @ SIGMA_Z @ psi + psi.conj() @ SIGMA_Z @ dpsi)
    jz = dpsi.conj() @ SIGMA_Y @ psi + psi.conj() @ SIGMA_Y @ dpsi
    return float(jy.real), float(jz.real)


def pauli_current_jump(m, gamma_minus) -> CurrentJump:
    jy_minus, jz_minus = transverse_currents(gamma_minus)
    jy_plus, jz_plus = transverse_currents(apply_bc(m, gamma_minus))
    return CurrentJump(jy_plus - jy_minus, jz_plus - jz_minus)
