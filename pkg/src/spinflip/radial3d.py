"""s-wave reduction of the 3D problem: half-line with ``Phi'(0) = W Phi(0)``.

``Phi`` holds the two spin components of ``phi = r psi``; ``W`` is hermitian,
``W = omega I + w . sigma``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .spin_physics import PAULI, SIGMA_0, SIGMA_Z, pauli_decompose


@dataclass(frozen=True)
class RadialExtension:
    omega: float = 0.0
    w: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        w = tuple(float(c) for c in self.w)
        if len(w) != 3:
            raise ValueError("w must have three components")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "omega", float(self.omega))

    @classmethod
    def from_matrix(cls, w_matrix) -> "RadialExtension":
        dec = pauli_decompose(w_matrix)
        return cls(dec.omega, dec.w)

    @property
    def matrix(self) -> np.ndarray:
        return self.omega * SIGMA_0 + sum(c * s for c, s in zip(self.w, PAULI))


@dataclass(frozen=True)
class RadialBoundState:
    energy: float
    kappa: float
    channel_spinor: np.ndarray


def radial_bound_states(ext: RadialExtension | np.ndarray) -> list[RadialBoundState]:
    """One state per negative eigenvalue ``lam`` of ``W``: ``kappa = -lam``.

    The decaying solution ``exp(-kappa r) chi`` meets the boundary condition
    exactly when ``W chi = -kappa chi``. ``lam = 0`` is a threshold, not a
    bound state. Sorted by energy.
    """
    w = ext.matrix if isinstance(ext, RadialExtension) else np.asarray(ext, complex)
    lam, vecs = np.linalg.eigh(w)
    states = []
    for ev, vec in zip(lam, vecs.T):
        if ev < 0:
            kappa = -float(ev)
            states.append(RadialBoundState(-kappa * kappa, kappa, vec))
    return sorted(states, key=lambda s: s.energy)


def hyperfine_split(omega_scalar: float, omega_spin: float) -> tuple[float, float]:
    """Energies ``(E_up, E_dn) = (-(Omega + omega)^2, -(Omega - omega)^2)``.

    Both states are bound only for ``Omega < 0`` and ``|Omega| > |omega|``.
    """
    if not (omega_scalar < 0 and abs(omega_scalar) > abs(omega_spin)):
        raise ValueError(
            "two bound states need Omega < 0 and |Omega| > |omega|, "
            f"got Omega={omega_scalar}, omega={omega_spin}"
        )
    return -(omega_scalar + omega_spin) ** 2, -(omega_scalar - omega_spin) ** 2


def split_matrix(omega_scalar: float, omega_spin: float) -> np.ndarray:
    return omega_scalar * SIGMA_0 + omega_spin * SIGMA_Z


class PhaseShifts(NamedTuple):
    delta_plus: float
    delta_minus: float
    lam_plus: float
    lam_minus: float


def radial_phase_shifts(ext: RadialExtension | np.ndarray, k: float) -> PhaseShifts:
    """s-wave phase shifts per eigenchannel, ``cot(delta) = lam / k``, delta in (0, pi).

    ``plus`` refers to the larger eigenvalue of ``W``.
    """
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k}")
    w = ext.matrix if isinstance(ext, RadialExtension) else np.asarray(ext, complex)
    lam_minus, lam_plus = np.linalg.eigvalsh(w)
    return PhaseShifts(
        float(np.arctan2(k, lam_plus)),
        float(np.arctan2(k, lam_minus)),
        float(lam_plus),
        float(lam_minus),
    )
