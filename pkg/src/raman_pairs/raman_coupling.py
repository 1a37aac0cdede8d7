"""Photon modes and one- and two-photon coupling amplitudes.

``single_photon_coupling`` is the dipole coupling of one photon mode to one
ground-excited sublevel pair,

    g = E_k sum_q (eps_q* . eps_klambda) <F m|e r . eps_q|F' m'>,

in rad/s with hbar divided out and the field-per-photon and reduced dipole
in configured units.  ``effective_coupling`` is the excited-manifold-summed
two-photon amplitude after adiabatic elimination,

    G = sum_(F'' m'') g_out*(F'' m'', final) g_in(F'' m'', initial) / Delta(F'_initial).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .atomic_model import (
    AtomSpec,
    SublevelId,
    detuning,
    dipole_matrix_element,
    spherical_component,
)
from .errors import InputDomainError, SingularDetuningError

__all__ = [
    "PhotonMode",
    "polarization_basis",
    "detection_modes",
    "single_photon_coupling",
    "effective_coupling",
    "coupling_tensor",
]

_GEOM_TOL = 1e-12
_POLE_CONE = 1e-9


@dataclass(frozen=True, eq=False)
class PhotonMode:
    """A field mode: unit propagation direction, polarization index, and
    explicit complex transverse polarization vector."""

    direction: np.ndarray
    lam: int
    polarization: np.ndarray
    field_per_photon: float = 1.0

    def __post_init__(self) -> None:
        k = np.asarray(self.direction, dtype=float)
        pol = np.asarray(self.polarization, dtype=complex)
        if k.shape != (3,) or pol.shape != (3,):
            raise InputDomainError("direction and polarization must be 3-vectors")
        if abs(np.linalg.norm(k) - 1.0) > _GEOM_TOL:
            raise InputDomainError("mode direction must be a unit vector")
        if abs(np.linalg.norm(pol) - 1.0) > _GEOM_TOL:
            raise InputDomainError("mode polarization must be a unit vector")
        if abs(np.vdot(pol, k)) > _GEOM_TOL:
            raise InputDomainError("mode polarization must be transverse")
        if self.lam not in (1, 2):
            raise InputDomainError("polarization index must be 1 or 2")
        k.flags.writeable = False
        pol.flags.writeable = False
        object.__setattr__(self, "direction", k)
        object.__setattr__(self, "polarization", pol)


def polarization_basis(k_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal transverse pair for direction ``k_hat``.

    Away from the z axis this is the spherical-coordinate pair (theta-hat,
    phi-hat).  Within 1e-9 rad of +-z it switches to the circular pair
    (eps_+1, eps_-1), the natural basis on the quantization axis.
    """
    k = np.asarray(k_hat, dtype=float)
    if k.shape != (3,):
        raise InputDomainError("direction must be a 3-vector")
    if abs(np.linalg.norm(k) - 1.0) > _GEOM_TOL:
        raise InputDomainError("direction must be a unit vector")
    s = np.hypot(k[0], k[1])
    if s < _POLE_CONE:
        return spherical_component(+1).copy(), spherical_component(-1).copy()
    cos_phi, sin_phi = k[0] / s, k[1] / s
    theta_hat = np.array([k[2] * cos_phi, k[2] * sin_phi, -s], dtype=complex)
    phi_hat = np.array([-sin_phi, cos_phi, 0.0], dtype=complex)
    return theta_hat, phi_hat


def detection_modes(k_hat: np.ndarray) -> tuple[PhotonMode, PhotonMode]:
    """The two scattered-photon modes (lambda = 1, 2) for a direction."""
    e1, e2 = polarization_basis(k_hat)
    return (
        PhotonMode(direction=np.asarray(k_hat, dtype=float), lam=1, polarization=e1),
        PhotonMode(direction=np.asarray(k_hat, dtype=float), lam=2, polarization=e2),
    )


def _spherical_overlaps(polarization: np.ndarray) -> np.ndarray:
    """(eps_q* . eps) for q = -1, 0, +1 as a complex 3-array."""
    return np.array(
        [complex(np.vdot(spherical_component(q), polarization)) for q in (-1, 0, +1)]
    )


@lru_cache(maxsize=32)
def _sublevel_tables(spec: AtomSpec):
    """Ground/excited sublevel orderings and the dipole tensor dip[e, g, q]."""
    ground = tuple(spec.sublevels("ground"))
    excited = tuple(spec.sublevels("excited"))
    dip = np.zeros((len(excited), len(ground), 3))
    for ie, e in enumerate(excited):
        for ig, g in enumerate(ground):
            for iq, q in enumerate((-1, 0, +1)):
                dip[ie, ig, iq] = dipole_matrix_element(spec, e, g, q)
    dip.flags.writeable = False
    return ground, excited, dip


def ground_basis(spec: AtomSpec) -> tuple[SublevelId, ...]:
    """Ground sublevels in the canonical (F asc, m asc) order."""
    return _sublevel_tables(spec)[0]


def _mode_coupling_matrix(spec: AtomSpec, mode: PhotonMode) -> np.ndarray:
    """g[e, g] for one mode over the full sublevel grid."""
    _, _, dip = _sublevel_tables(spec)
    overlaps = _spherical_overlaps(mode.polarization)
    return mode.field_per_photon * (dip @ overlaps)


def single_photon_coupling(
    spec: AtomSpec, mode: PhotonMode, excited: SublevelId, ground: SublevelId
) -> complex:
    """Coupling g of one photon mode to one excited<-ground transition."""
    if excited.manifold != "excited" or ground.manifold != "ground":
        raise InputDomainError("expected (excited, ground) sublevel pair")
    overlaps = _spherical_overlaps(mode.polarization)
    total = 0.0 + 0.0j
    for iq, q in enumerate((-1, 0, +1)):
        if overlaps[iq] != 0.0:
            total += overlaps[iq] * dipole_matrix_element(spec, excited, ground, q)
    return mode.field_per_photon * total


def _detunings(spec: AtomSpec, omega_laser: float) -> np.ndarray:
    """Delta(F') per ground sublevel; raises on an exact zero."""
    ground, _, _ = _sublevel_tables(spec)
    deltas = np.array([detuning(spec, omega_laser, g.f) for g in ground])
    if np.any(deltas == 0.0):
        raise SingularDetuningError(
            "laser exactly resonant with a ground level; adiabatic elimination "
            "requires a far off-resonant pump"
        )
    return deltas


def coupling_matrix(
    spec: AtomSpec, omega_laser: float, out_mode: PhotonMode, in_mode: PhotonMode
) -> np.ndarray:
    """G[final, initial] over the ground sublevel grid (canonical order)."""
    g_out = _mode_coupling_matrix(spec, out_mode)
    g_in = _mode_coupling_matrix(spec, in_mode)
    deltas = _detunings(spec, omega_laser)
    return (g_out.conj().T @ g_in) / deltas[np.newaxis, :]


def effective_coupling(
    spec: AtomSpec,
    omega_laser: float,
    out_mode: PhotonMode,
    in_mode: PhotonMode,
    final: SublevelId,
    initial: SublevelId,
) -> complex:
    """Two-photon amplitude G(final <- initial) for an (out, in) mode pair."""
    if final.manifold != "ground" or initial.manifold != "ground":
        raise InputDomainError("effective coupling connects ground sublevels")
    ground, _, _ = _sublevel_tables(spec)
    try:
        i_fin = ground.index(final)
        i_ini = ground.index(initial)
    except ValueError:
        raise InputDomainError("sublevel does not belong to this species") from None
    return complex(coupling_matrix(spec, omega_laser, out_mode, in_mode)[i_fin, i_ini])


def coupling_tensor(
    spec: AtomSpec, omega_laser: float, out_mode: PhotonMode, in_mode: PhotonMode
) -> dict[tuple[tuple[int, int], tuple[int, int]], complex]:
    """G as a sparse map ((2F, 2m)_final, (2F', 2m')_initial) -> amplitude.

    Entries that are exactly zero by selection rules are absent.
    """
    ground, _, _ = _sublevel_tables(spec)
    matrix = coupling_matrix(spec, omega_laser, out_mode, in_mode)
    tensor: dict[tuple[tuple[int, int], tuple[int, int]], complex] = {}
    for i_fin, fin in enumerate(ground):
        for i_ini, ini in enumerate(ground):
            value = matrix[i_fin, i_ini]
            if value != 0.0:
                tensor[((fin.f.twice, fin.m.twice), (ini.f.twice, ini.m.twice))] = complex(value)
    return tensor
