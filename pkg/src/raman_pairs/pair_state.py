"""Entangled atom-photon pair states for one detection direction.

A pump photon scattered into direction k creates one atom-photon pair.  Per
polarization branch lambda the atom lands in the normalized spinor

    S_klambda(F, m) = N^-1 sum_(F'm') G_klambda,pump(F m, F' m') phi0(F' m'),

with N the Euclidean norm of the unnormalized vector, and the branch enters
the joint state with weight N.  The photon label is (frequency channel,
polarization): energy conservation with atomic recoil assigns each final
ground level F its own photon frequency, solving

    omega = omega_L - delta(F) - hbar |K - k(omega)|^2 / (2 m_atom)

by fixed-point iteration (delta measured from the lowest ground level, which
is where the condensate sits in the configurations treated here).

The joint amplitude tensor is normalized and its global phase fixed so that
the lexicographically first nonzero (channel, F, m) entry is real positive;
only relative phases are physical.  Spatial structure is carried solely as
the recoil momentum label hbar(K - k).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import hbar as HBAR

from .angular_momentum import HalfIntLike, halfint
from .atomic_model import AtomSpec, validity_check
from .errors import (
    ConvergenceError,
    EmptyStateError,
    InputDomainError,
    OffResonanceError,
)
from .raman_coupling import PhotonMode, coupling_matrix, detection_modes, ground_basis

__all__ = [
    "PumpConfig",
    "CondensateSpinor",
    "ScatteredSpinor",
    "Channel",
    "PairState",
    "scattered_spinor",
    "photon_frequency",
    "build_pair_state",
    "spectral_filter",
    "pair_state_to_json",
    "pair_state_from_json",
]

_GEOM_TOL = 1e-12
_NORM_TOL = 1e-12
DEFAULT_CHANNEL_RESOLUTION = 2.0 * np.pi * 1.0e6  # rad/s


@dataclass(frozen=True, eq=False)
class PumpConfig:
    """Undepleted pump laser plus condensate atom number."""

    direction: np.ndarray
    polarization: np.ndarray
    omega_laser: float
    pump_amplitude: complex = 1.0 + 0.0j
    atom_number: float = 1.0

    def __post_init__(self) -> None:
        k = np.asarray(self.direction, dtype=float)
        pol = np.asarray(self.polarization, dtype=complex)
        if k.shape != (3,) or pol.shape != (3,):
            raise InputDomainError("pump direction and polarization must be 3-vectors")
        if abs(np.linalg.norm(k) - 1.0) > _GEOM_TOL:
            raise InputDomainError("pump direction must be a unit vector")
        if abs(np.linalg.norm(pol) - 1.0) > _GEOM_TOL:
            raise InputDomainError("pump polarization must be a unit vector")
        if abs(np.vdot(pol, k)) > _GEOM_TOL:
            raise InputDomainError("pump polarization must be transverse")
        if self.omega_laser <= 0:
            raise InputDomainError("pump frequency must be positive")
        if self.atom_number < 1:
            raise InputDomainError("atom number must be at least 1")
        k.flags.writeable = False
        pol.flags.writeable = False
        object.__setattr__(self, "direction", k)
        object.__setattr__(self, "polarization", pol)

    def mode(self) -> PhotonMode:
        return PhotonMode(direction=self.direction, lam=1, polarization=self.polarization)


@dataclass(frozen=True)
class CondensateSpinor:
    """Internal state of the source condensate over ground (F', m')."""

    amplitudes: tuple[tuple[tuple[int, int], complex], ...]

    def __post_init__(self) -> None:
        norm_sq = sum(abs(a) ** 2 for _, a in self.amplitudes)
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise InputDomainError(
                f"condensate spinor must be unit norm, got |.|^2 = {norm_sq!r}"
            )

    @classmethod
    def from_dict(cls, amplitudes: dict[tuple[int, int], complex]) -> "CondensateSpinor":
        items = tuple(sorted((k, complex(v)) for k, v in amplitudes.items() if v != 0))
        return cls(items)

    @classmethod
    def single(cls, f: HalfIntLike, m: HalfIntLike) -> "CondensateSpinor":
        f, m = halfint(f), halfint(m)
        return cls((((f.twice, m.twice), 1.0 + 0.0j),))

    def as_dict(self) -> dict[tuple[int, int], complex]:
        return dict(self.amplitudes)

    def vector(self, spec: AtomSpec) -> np.ndarray:
        """Amplitudes over the canonical ground basis of ``spec``."""
        basis = ground_basis(spec)
        index = {(g.f.twice, g.m.twice): i for i, g in enumerate(basis)}
        vec = np.zeros(len(basis), dtype=complex)
        for key, amp in self.amplitudes:
            if key not in index:
                raise InputDomainError(
                    f"condensate occupies (2F,2m)={key}, not a ground sublevel of {spec.name}"
                )
            vec[index[key]] = amp
        return vec


def sodium_condensate() -> CondensateSpinor:
    """The |F'=1, m'=0> condensate used in the sodium example."""
    return CondensateSpinor.single(1, 0)


@dataclass(frozen=True, eq=False)
class ScatteredSpinor:
    """Normalized internal state of the scattered atom for one branch."""

    amplitudes: tuple[tuple[tuple[int, int], complex], ...]
    normalization: float
    photon_mode: PhotonMode

    def __post_init__(self) -> None:
        if self.normalization < 0:
            raise InputDomainError("branch normalization must be non-negative")
        if (self.normalization == 0.0) != (len(self.amplitudes) == 0):
            raise InputDomainError("zero normalization must pair with an empty spinor")
        if self.amplitudes:
            norm_sq = sum(abs(a) ** 2 for _, a in self.amplitudes)
            if abs(norm_sq - 1.0) > _NORM_TOL:
                raise InputDomainError("scattered spinor must be unit norm")

    @property
    def is_empty(self) -> bool:
        return self.normalization == 0.0

    def as_dict(self) -> dict[tuple[int, int], complex]:
        return dict(self.amplitudes)


@dataclass(frozen=True, order=True)
class Channel:
    """One photon label: frequency (keyed by final F) and polarization index."""

    omega: float
    lam: int
    doubled_f: int

    def key(self) -> str:
        return f"{self.omega / (2.0 * np.pi)!r}:{self.lam}"


@dataclass(frozen=True, eq=False)
class PairState:
    """Joint atom-photon amplitude tensor for one detection direction."""

    amplitudes: tuple[tuple[tuple[Channel, tuple[int, int]], complex], ...]
    channels: tuple[Channel, ...]
    recoil_momentum: np.ndarray
    photon_wavevector: np.ndarray
    emission_weight: float
    detection_direction: np.ndarray
    pump: PumpConfig
    unresolved_channel_pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        norm_sq = sum(abs(a) ** 2 for _, a in self.amplitudes)
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise InputDomainError("pair state must be unit norm")
        if any(ch.omega <= 0 for ch in self.channels):
            raise InputDomainError("channel frequencies must be positive")
        for name in ("recoil_momentum", "photon_wavevector", "detection_direction"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def as_dict(self) -> dict[tuple[Channel, tuple[int, int]], complex]:
        return dict(self.amplitudes)

    def photon_labels(self) -> tuple[Channel, ...]:
        """Channels carrying nonzero amplitude, in (omega, lambda) order."""
        present = {ch for (ch, _), _ in self.amplitudes}
        return tuple(sorted(present))

    def atom_labels(self) -> tuple[tuple[int, int], ...]:
        """(2F, 2m) labels carrying nonzero amplitude, ascending."""
        present = {key for (_, key), _ in self.amplitudes}
        return tuple(sorted(present))

    def matrix(self) -> tuple[np.ndarray, tuple[Channel, ...], tuple[tuple[int, int], ...]]:
        """Amplitudes as a (photon x atom) matrix over the occupied labels."""
        photon = self.photon_labels()
        atom = self.atom_labels()
        mat = np.zeros((len(photon), len(atom)), dtype=complex)
        amp = self.as_dict()
        for i, ch in enumerate(photon):
            for j, at in enumerate(atom):
                mat[i, j] = amp.get((ch, at), 0.0)
        return mat, photon, atom

    def channel_probabilities(self) -> tuple[tuple[Channel, float], ...]:
        probs: dict[Channel, float] = {ch: 0.0 for ch in self.photon_labels()}
        for (ch, _), amp in self.amplitudes:
            probs[ch] += abs(amp) ** 2
        return tuple(sorted(probs.items()))


def _require_valid(
    spec: AtomSpec, omega_laser: float, threshold: float, enforce: bool
) -> None:
    report = validity_check(spec, omega_laser, threshold)
    if report.passed:
        return
    message = (
        "far off-resonant condition |Delta(F')| >> Gamma violated: "
        + report.describe()
    )
    if enforce:
        raise OffResonanceError(message)
    warnings.warn(message, stacklevel=3)


def _branch_vectors(
    spec: AtomSpec, pump: PumpConfig, phi0: CondensateSpinor, k_hat: np.ndarray
) -> tuple[tuple[PhotonMode, PhotonMode], np.ndarray]:
    """Unnormalized branch spinors, rows indexed (lambda-1, ground sublevel)."""
    modes = detection_modes(k_hat)
    pump_mode = pump.mode()
    phi_vec = phi0.vector(spec)
    rows = np.vstack(
        [coupling_matrix(spec, pump.omega_laser, mode, pump_mode) @ phi_vec for mode in modes]
    )
    return modes, rows


def scattered_spinor(
    spec: AtomSpec,
    pump: PumpConfig,
    phi0: CondensateSpinor,
    k_hat: np.ndarray,
    lam: int,
    *,
    validity_threshold: float = 100.0,
    enforce_validity: bool = True,
) -> ScatteredSpinor:
    """Internal state of the atom paired with a photon in branch ``lam``.

    Returns the empty-spinor sentinel (normalization 0) when every amplitude
    vanishes by selection rules.
    """
    if lam not in (1, 2):
        raise InputDomainError("polarization index must be 1 or 2")
    _require_valid(spec, pump.omega_laser, validity_threshold, enforce_validity)
    modes, rows = _branch_vectors(spec, pump, phi0, k_hat)
    vec = rows[lam - 1]
    norm = float(np.linalg.norm(vec))
    mode = modes[lam - 1]
    if norm == 0.0:
        return ScatteredSpinor(amplitudes=(), normalization=0.0, photon_mode=mode)
    basis = ground_basis(spec)
    amps = tuple(
        ((g.f.twice, g.m.twice), complex(v / norm))
        for g, v in zip(basis, vec)
        if v != 0.0
    )
    return ScatteredSpinor(amplitudes=amps, normalization=norm, photon_mode=mode)


def photon_frequency(
    spec: AtomSpec, pump: PumpConfig, k_hat: np.ndarray, f_final: HalfIntLike
) -> float:
    """Scattered photon frequency for a final ground level, with recoil.

    Unique in the optical regime; solved by fixed-point iteration from the
    recoil-free value to relative 1e-15.
    """
    k = np.asarray(k_hat, dtype=float)
    if abs(np.linalg.norm(k) - 1.0) > _GEOM_TOL:
        raise InputDomainError("detection direction must be a unit vector")
    delta = spec.splitting(f_final)
    cos_angle = float(np.dot(pump.direction, k))
    k_pump = pump.omega_laser / SPEED_OF_LIGHT
    base = pump.omega_laser - delta
    omega = base
    for _ in range(100):
        k_out = omega / SPEED_OF_LIGHT
        recoil = HBAR * (k_pump**2 + k_out**2 - 2.0 * k_pump * k_out * cos_angle) / (
            2.0 * spec.mass
        )
        new = base - recoil
        if new <= 0:
            raise ConvergenceError("photon frequency iteration left the optical regime")
        if abs(new - omega) <= 1e-15 * abs(new):
            return new
        omega = new
    raise ConvergenceError("photon frequency iteration did not converge")


def _fix_global_phase(
    entries: list[tuple[tuple[Channel, tuple[int, int]], complex]],
) -> list[tuple[tuple[Channel, tuple[int, int]], complex]]:
    """Rotate so the lexicographically first nonzero entry is real positive."""
    first = min(entries, key=lambda item: (item[0][0], item[0][1]))[1]
    phase = first / abs(first)
    return [(key, complex(amp / phase)) for key, amp in entries]


def build_pair_state(
    spec: AtomSpec,
    pump: PumpConfig,
    phi0: CondensateSpinor,
    k_hat: np.ndarray,
    *,
    channel_resolution: float = DEFAULT_CHANNEL_RESOLUTION,
    validity_threshold: float = 100.0,
    enforce_validity: bool = True,
) -> PairState:
    """Assemble the normalized joint state over (channel x polarization) x (F, m)."""
    _require_valid(spec, pump.omega_laser, validity_threshold, enforce_validity)
    k = np.asarray(k_hat, dtype=float)
    modes, rows = _branch_vectors(spec, pump, phi0, k)
    if not np.any(rows != 0.0):
        raise EmptyStateError(
            "no scattering amplitude into this direction for the given pump "
            "and condensate"
        )

    basis = ground_basis(spec)
    omegas = {
        f.twice: photon_frequency(spec, pump, k, f) for f in spec.ground_levels()
    }

    entries: list[tuple[tuple[Channel, tuple[int, int]], complex]] = []
    channels: dict[tuple[int, int], Channel] = {}
    for i_lam, mode in enumerate(modes):
        for g, amp in zip(basis, rows[i_lam]):
            if amp == 0.0:
                continue
            ch_key = (g.f.twice, mode.lam)
            if ch_key not in channels:
                channels[ch_key] = Channel(
                    omega=omegas[g.f.twice], lam=mode.lam, doubled_f=g.f.twice
                )
            entries.append(((channels[ch_key], (g.f.twice, g.m.twice)), complex(amp)))

    total = np.sqrt(sum(abs(a) ** 2 for _, a in entries))
    entries = [(key, amp / total) for key, amp in entries]
    entries = _fix_global_phase(entries)
    entries.sort(key=lambda item: (item[0][0], item[0][1]))

    branch_norms = np.linalg.norm(rows, axis=1)
    weight = float(pump.atom_number * abs(pump.pump_amplitude) ** 2 * np.sum(branch_norms**2))

    present_f = sorted({ch.doubled_f for ch in channels.values()})
    unresolved = tuple(
        (fa, fb)
        for idx, fa in enumerate(present_f)
        for fb in present_f[idx + 1 :]
        if abs(omegas[fa] - omegas[fb]) < channel_resolution
    )

    # Reference photon wavevector: the elastic channel of the lowest ground
    # level.  Channel frequencies differ from it only at the 1e-9 level.
    lowest_f = spec.ground_levels()[0]
    k_out = k * (omegas[lowest_f.twice] / SPEED_OF_LIGHT)
    k_pump_vec = pump.direction * (pump.omega_laser / SPEED_OF_LIGHT)
    recoil = HBAR * k_pump_vec - HBAR * k_out

    return PairState(
        amplitudes=tuple(entries),
        channels=tuple(sorted(channels.values())),
        recoil_momentum=recoil,
        photon_wavevector=k_out,
        emission_weight=weight,
        detection_direction=k.copy(),
        pump=pump,
        unresolved_channel_pairs=unresolved,
    )


def spectral_filter(state: PairState, f_select: HalfIntLike) -> PairState:
    """Project onto the frequency channel of one final F and renormalize."""
    f = halfint(f_select)
    kept = [
        (key, amp) for key, amp in state.amplitudes if key[0].doubled_f == f.twice
    ]
    if not kept:
        raise EmptyStateError(
            f"the F={f} frequency channel carries zero probability; nothing to select"
        )
    for fa, fb in state.unresolved_channel_pairs:
        if f.twice in (fa, fb):
            warnings.warn(
                f"selected channel F={f} is not spectrally resolvable from its "
                f"neighbor at the configured resolution",
                stacklevel=2,
            )
    total = np.sqrt(sum(abs(a) ** 2 for _, a in kept))
    kept = [(key, amp / total) for key, amp in kept]
    kept = _fix_global_phase(kept)
    channels = tuple(sorted({key[0] for key, _ in kept}))
    return PairState(
        amplitudes=tuple(kept),
        channels=channels,
        recoil_momentum=state.recoil_momentum,
        photon_wavevector=state.photon_wavevector,
        emission_weight=state.emission_weight,
        detection_direction=state.detection_direction,
        pump=state.pump,
        unresolved_channel_pairs=state.unresolved_channel_pairs,
    )


# --- serialization ----------------------------------------------------------


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def pair_state_to_json(state: PairState, provenance: dict | None = None) -> dict:
    """JSON-ready document; channels keyed "omega_hz:lambda", atoms "2F:2m"."""
    amplitude_doc: dict[str, dict[str, list[float]]] = {}
    for (ch, (tf, tm)), amp in state.amplitudes:
        amplitude_doc.setdefault(ch.key(), {})[f"{tf}:{tm}"] = _complex_pair(amp)
    pump = state.pump
    doc = {
        "format": "raman-pairs/pair-state/1",
        "detection_direction": [float(x) for x in state.detection_direction],
        "channels": [
            {
                "key": ch.key(),
                "omega_hz": ch.omega / (2.0 * np.pi),
                "lambda": ch.lam,
                "doubled_f": ch.doubled_f,
            }
            for ch in state.channels
        ],
        "amplitudes": amplitude_doc,
        "recoil_momentum_kg_m_per_s": [float(x) for x in state.recoil_momentum],
        "photon_wavevector_rad_per_m": [float(x) for x in state.photon_wavevector],
        "emission_weight": state.emission_weight,
        "unresolved_channel_pairs": [list(p) for p in state.unresolved_channel_pairs],
        "pump": {
            "direction": [float(x) for x in pump.direction],
            "polarization": [_complex_pair(z) for z in pump.polarization],
            "laser_hz": pump.omega_laser / (2.0 * np.pi),
            "amplitude": _complex_pair(pump.pump_amplitude),
            "atom_number": pump.atom_number,
        },
        "provenance": provenance or {},
    }
    return doc


def pair_state_from_json(doc: dict) -> PairState:
    """Rebuild a :class:`PairState` from :func:`pair_state_to_json` output."""
    pump_doc = doc["pump"]
    pump = PumpConfig(
        direction=np.array(pump_doc["direction"], dtype=float),
        polarization=np.array([complex(re, im) for re, im in pump_doc["polarization"]]),
        omega_laser=2.0 * np.pi * pump_doc["laser_hz"],
        pump_amplitude=complex(*pump_doc["amplitude"]),
        atom_number=pump_doc["atom_number"],
    )
    channels = {
        ch["key"]: Channel(
            omega=2.0 * np.pi * ch["omega_hz"], lam=ch["lambda"], doubled_f=ch["doubled_f"]
        )
        for ch in doc["channels"]
    }
    entries = []
    for ch_key, atoms in doc["amplitudes"].items():
        for atom_key, (re, im) in atoms.items():
            tf, tm = (int(x) for x in atom_key.split(":"))
            entries.append(((channels[ch_key], (tf, tm)), complex(re, im)))
    entries.sort(key=lambda item: (item[0][0], item[0][1]))
    return PairState(
        amplitudes=tuple(entries),
        channels=tuple(sorted(channels.values())),
        recoil_momentum=np.array(doc["recoil_momentum_kg_m_per_s"], dtype=float),
        photon_wavevector=np.array(doc["photon_wavevector_rad_per_m"], dtype=float),
        emission_weight=doc["emission_weight"],
        detection_direction=np.array(doc["detection_direction"], dtype=float),
        pump=pump,
        unresolved_channel_pairs=tuple(
            (int(a), int(b)) for a, b in doc["unresolved_channel_pairs"]
        ),
    )


def write_pair_state(state: PairState, path: str | Path, provenance: dict | None = None) -> None:
    doc = pair_state_to_json(state, provenance)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
