"""Bipartite entanglement measures for pair states.

The photon side of a :class:`~raman_pairs.pair_state.PairState` is the set of
occupied (frequency channel, polarization) labels, the atom side the occupied
(F, m) sublevels.  Schmidt decomposition uses a one-sided Jacobi SVD
implemented here: the amplitude matrices are tiny (at most 8x8) and an
in-repo routine keeps results bit-reproducible across platforms.

Entropy is reported in bits, so a maximally entangled 2x2 state carries
exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputDomainError, UndefinedOverlapError
from .pair_state import (
    Channel,
    CondensateSpinor,
    PairState,
    PumpConfig,
    scattered_spinor,
    spectral_filter,
)

__all__ = [
    "SchmidtResult",
    "deterministic_svd",
    "schmidt",
    "entanglement_entropy",
    "concurrence_2x2",
    "concurrence_after_filter",
    "is_factorized",
    "conditional_overlap",
]

_JACOBI_TOL = 1e-15
_JACOBI_MAX_SWEEPS = 60
_RANK_FLOOR = 1e-15


def _jacobi_columns(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonalize the columns of ``a`` (m >= n) by complex Jacobi rotations.

    Returns (a', w) with a' = a @ w, w unitary, and the columns of a'
    pairwise orthogonal.  Deterministic sweep order (p < q, row major).
    """
    a = a.astype(complex, copy=True)
    n = a.shape[1]
    w = np.eye(n, dtype=complex)
    # Columns whose norm falls below this floor are numerically zero; pairs
    # involving them must be skipped or the relative criterion never settles.
    norm_floor_sq = (np.linalg.norm(a) * 1e-15) ** 2
    for _ in range(_JACOBI_MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                x, y = a[:, p], a[:, q]
                alpha = float(np.real(np.vdot(x, x)))
                beta = float(np.real(np.vdot(y, y)))
                if alpha <= norm_floor_sq or beta <= norm_floor_sq:
                    continue
                gamma = complex(np.vdot(x, y))
                mag = abs(gamma)
                if mag <= _JACOBI_TOL * math.sqrt(alpha * beta) or mag == 0.0:
                    continue
                rotated = True
                phase = gamma / mag
                tau = (alpha - beta) / (2.0 * mag)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                cos = 1.0 / math.sqrt(1.0 + t * t)
                sin = cos * t
                rot = np.array(
                    [[cos, -sin * phase], [sin * np.conj(phase), cos]], dtype=complex
                )
                a[:, [p, q]] = a[:, [p, q]] @ rot
                w[:, [p, q]] = w[:, [p, q]] @ rot
        if not rotated:
            return a, w
    raise ConvergenceError("Jacobi sweeps did not orthogonalize the columns")


def deterministic_svd(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Compact SVD ``matrix = u @ diag(s) @ vh`` by one-sided Jacobi.

    Singular values are returned in descending order; exact ties keep the
    sweep's column order.  Values below 1e-15 of the largest are dropped.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise InputDomainError("expected a non-empty 2-d matrix")
    if m.shape[0] < m.shape[1]:
        u_t, s, vh_t = deterministic_svd(m.conj().T)
        return vh_t.conj().T, s, u_t.conj().T

    rotated, w = _jacobi_columns(m)
    norms = np.linalg.norm(rotated, axis=0)
    order = sorted(range(len(norms)), key=lambda j: -norms[j])
    top = norms[order[0]] if len(order) else 0.0
    keep = [j for j in order if norms[j] > _RANK_FLOOR * top and norms[j] > 0.0]
    if not keep:
        raise InputDomainError("cannot decompose an all-zero matrix")
    u = np.stack([rotated[:, j] / norms[j] for j in keep], axis=1)
    s = np.array([norms[j] for j in keep])
    vh = w[:, keep].conj().T
    return u, s, vh


@dataclass(frozen=True, eq=False)
class SchmidtResult:
    """Canonical expansion sum_i c_i |p_i>|a_i> of a pair state.

    ``photon_basis[i]`` and ``atom_basis[i]`` are coordinate vectors over
    ``photon_labels`` and ``atom_labels``; the amplitude matrix is
    reconstructed as sum_i c_i outer(p_i, a_i) without conjugation.
    """

    coefficients: tuple[float, ...]
    photon_basis: tuple[np.ndarray, ...]
    atom_basis: tuple[np.ndarray, ...]
    photon_labels: tuple[Channel, ...]
    atom_labels: tuple[tuple[int, int], ...]

    def reconstruction(self) -> np.ndarray:
        out = np.zeros((len(self.photon_labels), len(self.atom_labels)), dtype=complex)
        for c, p, a in zip(self.coefficients, self.photon_basis, self.atom_basis):
            out += c * np.outer(p, a)
        return out


def _canonical_phase(u: np.ndarray, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate a Schmidt pair so the first significant photon entry is real positive."""
    for value in u:
        if abs(value) > 1e-12:
            phase = value / abs(value)
            return u / phase, a * phase
    return u, a


def schmidt_of_matrix(
    matrix: np.ndarray,
    photon_labels: tuple[Channel, ...],
    atom_labels: tuple[tuple[int, int], ...],
) -> SchmidtResult:
    u, s, vh = deterministic_svd(matrix)
    # vh rows are v_j^dagger, which is exactly the atom-side coordinate
    # vector entering the expansion without conjugation.
    pairs = []
    for j in range(len(s)):
        pj, aj = _canonical_phase(u[:, j], vh[j, :])
        pairs.append((float(s[j]), pj, aj))
    pairs.sort(key=lambda item: (-item[0], tuple((z.real, z.imag) for z in item[1])))
    return SchmidtResult(
        coefficients=tuple(c for c, _, _ in pairs),
        photon_basis=tuple(p for _, p, _ in pairs),
        atom_basis=tuple(a for _, _, a in pairs),
        photon_labels=photon_labels,
        atom_labels=atom_labels,
    )


def schmidt(state: PairState) -> SchmidtResult:
    """Schmidt decomposition of the photon x atom amplitude matrix."""
    matrix, photon_labels, atom_labels = state.matrix()
    return schmidt_of_matrix(matrix, photon_labels, atom_labels)


def _entropy_bits(coefficients: tuple[float, ...]) -> float:
    total = 0.0
    for c in coefficients:
        p = c * c
        if p > 0.0:
            total -= p * math.log2(p)
    return total


def entanglement_entropy(state: PairState) -> float:
    """Entropy of entanglement in bits, -sum c^2 log2 c^2."""
    return _entropy_bits(schmidt(state).coefficients)


def concurrence_2x2(state: PairState) -> float:
    """Pure-state concurrence 2|det M| for a state on exactly 2x2 support."""
    matrix, photon_labels, atom_labels = state.matrix()
    if len(photon_labels) != 2 or len(atom_labels) != 2:
        raise InputDomainError(
            f"concurrence needs exactly 2x2 support, got "
            f"{len(photon_labels)} photon x {len(atom_labels)} atom labels"
        )
    return 2.0 * abs(matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0])


def concurrence_after_filter(state: PairState, f_select) -> float:
    """Concurrence of the spectrally filtered state.

    After filtering the photon side has at most two labels, so the pure-state
    concurrence generalizes to 2 c1 c2 in terms of the two leading Schmidt
    coefficients; this equals 2|det M| on exact 2x2 support and 0 for any
    product state.
    """
    coeffs = schmidt(spectral_filter(state, f_select)).coefficients
    if len(coeffs) < 2:
        return 0.0
    return 2.0 * coeffs[0] * coeffs[1]


def is_factorized(state: PairState, tol: float = 1e-10) -> bool:
    """True iff the state is a product state within ``tol``.

    Covers both degenerate routes to factorization: identical branch spinors
    and a vanishing branch.
    """
    coeffs = schmidt(state).coefficients
    return len(coeffs) < 2 or coeffs[1] < tol


def conditional_overlap(
    spec,
    pump: PumpConfig,
    phi0: CondensateSpinor,
    k_hat: np.ndarray,
    *,
    validity_threshold: float = 100.0,
    enforce_validity: bool = True,
) -> float:
    """|<S_k1|S_k2>| between the atomic spinors of the two photon branches."""
    branches = [
        scattered_spinor(
            spec,
            pump,
            phi0,
            k_hat,
            lam,
            validity_threshold=validity_threshold,
            enforce_validity=enforce_validity,
        )
        for lam in (1, 2)
    ]
    if any(b.is_empty for b in branches):
        raise UndefinedOverlapError(
            "a polarization branch has zero norm; the overlap is undefined "
            "(the state factorizes)"
        )
    first = branches[0].as_dict()
    second = branches[1].as_dict()
    overlap = sum(np.conj(first[key]) * amp for key, amp in second.items() if key in first)
    return abs(complex(overlap))
