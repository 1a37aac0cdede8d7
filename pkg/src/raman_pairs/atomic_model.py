"""Alkali-like species with hyperfine structure and dipole matrix elements.

An :class:`AtomSpec` carries the nuclear spin I, the ground and excited
electronic angular momenta (J_g, J_e), the ground hyperfine splittings, and
the optical-line constants.  Hyperfine levels are built by coupling the
nuclear spin first, |(I J) F m>, with Condon-Shortley Clebsch-Gordan
coefficients; the dipole matrix element between an excited |F m> and a
ground |F' m'| sublevel then factorizes as

    <F m|e r . eps_q|F' m'> = -(-1)^(I + J_g + F) sqrt((2F'+1)(2J_e+1)) D
                              <F m|F' 1 m' q> {I J_g F'; 1 F J_e}

with D the reduced dipole moment of the J_g <-> J_e line.  The 6-j argument
layout was fixed by checking the whole sodium table against an explicit
|m_I, m_J> expansion; with the nuclear-spin-first coupling order the two
routes agree identically (global sign +1).

Excited-state hyperfine splittings are neglected: a single resonance
frequency per species, with the detuning of ground level F' given by
Delta(F') = omega_L - omega_a + delta(F').
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Literal

import numpy as np

from .angular_momentum import HalfInt, HalfIntLike, clebsch_gordan, halfint, wigner_6j
from .errors import InputDomainError

__all__ = [
    "AtomSpec",
    "SublevelId",
    "spherical_basis_vectors",
    "dipole_matrix_element",
    "detuning",
    "validity_check",
    "ValidityReport",
    "load_atom_spec",
    "sodium",
]

TWO_PI = 2.0 * np.pi

Manifold = Literal["ground", "excited"]


def _manifold_levels(I: HalfInt, J: HalfInt) -> tuple[HalfInt, ...]:
    lo, hi = abs(I.twice - J.twice), I.twice + J.twice
    return tuple(HalfInt(t) for t in range(lo, hi + 1, 2))


@dataclass(frozen=True)
class AtomSpec:
    """Immutable species definition.

    Frequencies are angular (rad/s).  ``ground_splittings`` maps each ground
    F' to its offset above the lowest ground level; the lowest level must map
    to zero.  ``reduced_dipole`` defaults to 1 because it cancels in every
    normalized state.
    """

    name: str
    nuclear_spin: HalfInt
    ground_j: HalfInt
    excited_j: HalfInt
    ground_splittings: tuple[tuple[HalfInt, float], ...]
    resonance: float
    linewidth: float
    mass: float
    reduced_dipole: float = 1.0

    def __post_init__(self) -> None:
        I, Jg, Je = self.nuclear_spin, self.ground_j, self.excited_j
        for j, label in ((I, "nuclear spin"), (Jg, "ground J"), (Je, "excited J")):
            if j.twice < 0:
                raise InputDomainError(f"{label} must be non-negative")
        if self.resonance <= 0 or self.linewidth <= 0 or self.mass <= 0:
            raise InputDomainError("resonance, linewidth and mass must be positive")

        expected = _manifold_levels(I, Jg)
        given = tuple(f for f, _ in self.ground_splittings)
        if given != expected:
            raise InputDomainError(
                f"ground splittings must cover F' = {[str(f) for f in expected]} "
                f"in order, got {[str(f) for f in given]}"
            )
        split = dict(self.ground_splittings)
        if split[expected[0]] != 0.0:
            raise InputDomainError("lowest ground level must have zero splitting")
        if any(v < 0 for v in split.values()):
            raise InputDomainError("ground splittings must be non-negative")

        # The decomposition phase (-1)^(I + J_g + F) must be real for every
        # excited F, i.e. I + J_g + F integer.  Since F pairs I with J_e this
        # reduces to J_g + J_e being an integer.
        if (self.ground_j.twice + self.excited_j.twice) % 2 != 0:
            raise InputDomainError(
                "ground and excited J must couple to the same F parity "
                "(J_g + J_e must be an integer)"
            )

    # --- manifold structure -------------------------------------------------

    def ground_levels(self) -> tuple[HalfInt, ...]:
        return _manifold_levels(self.nuclear_spin, self.ground_j)

    def excited_levels(self) -> tuple[HalfInt, ...]:
        return _manifold_levels(self.nuclear_spin, self.excited_j)

    def levels(self, manifold: Manifold) -> tuple[HalfInt, ...]:
        return self.ground_levels() if manifold == "ground" else self.excited_levels()

    def sublevels(self, manifold: Manifold) -> Iterator["SublevelId"]:
        """All (F, m) sublevels of a manifold in (F asc, m asc) order."""
        for f in self.levels(manifold):
            for tm in range(-f.twice, f.twice + 1, 2):
                yield SublevelId(manifold, f, HalfInt(tm))

    def splitting(self, f_ground: HalfIntLike) -> float:
        f = halfint(f_ground)
        for level, value in self.ground_splittings:
            if level == f:
                return value
        raise InputDomainError(f"F'={f} is not a ground level of {self.name}")


@dataclass(frozen=True)
class SublevelId:
    """One hyperfine sublevel |F m> of the ground or excited manifold."""

    manifold: Manifold
    f: HalfInt
    m: HalfInt

    def __post_init__(self) -> None:
        if self.manifold not in ("ground", "excited"):
            raise InputDomainError(f"unknown manifold {self.manifold!r}")
        if (self.f.twice - self.m.twice) % 2 != 0 or abs(self.m.twice) > self.f.twice:
            raise InputDomainError(f"invalid sublevel F={self.f}, m={self.m}")

    def __str__(self) -> str:
        tag = "g" if self.manifold == "ground" else "e"
        return f"|{self.f},{self.m}>{tag}"


def ground_sublevel(f: HalfIntLike, m: HalfIntLike) -> SublevelId:
    return SublevelId("ground", halfint(f), halfint(m))


def excited_sublevel(f: HalfIntLike, m: HalfIntLike) -> SublevelId:
    return SublevelId("excited", halfint(f), halfint(m))


# --- spherical polarization basis ------------------------------------------

_EPS_M1 = np.array([1.0, -1.0j, 0.0]) / np.sqrt(2.0)
_EPS_0 = np.array([0.0, 0.0, 1.0], dtype=complex)
_EPS_P1 = np.array([-1.0, -1.0j, 0.0]) / np.sqrt(2.0)
for _v in (_EPS_M1, _EPS_0, _EPS_P1):
    _v.flags.writeable = False


def spherical_basis_vectors() -> dict[int, np.ndarray]:
    """Unit polarization vectors for sigma-, pi, sigma+ light, keyed by q.

    eps_-1 = +(x - iy)/sqrt2, eps_0 = z, eps_+1 = -(x + iy)/sqrt2; orthonormal
    under the Hermitian inner product.
    """
    return {-1: _EPS_M1.copy(), 0: _EPS_0.copy(), +1: _EPS_P1.copy()}


def spherical_component(q: int) -> np.ndarray:
    """Read-only view of the spherical unit vector for q in {-1, 0, +1}."""
    if q not in (-1, 0, +1):
        raise InputDomainError(f"q must be -1, 0 or +1, got {q}")
    return (_EPS_M1, _EPS_0, _EPS_P1)[q + 1]


# --- dipole matrix elements -------------------------------------------------


def dipole_matrix_element(
    spec: AtomSpec, excited: SublevelId, ground: SublevelId, q: int
) -> float:
    """<F m (excited)|e r . eps_q|F' m' (ground)>, real in this convention.

    Zero unless m = m' + q and the triangle {F', 1, F} closes.
    """
    if excited.manifold != "excited":
        raise InputDomainError(f"{excited} is not an excited sublevel")
    if ground.manifold != "ground":
        raise InputDomainError(f"{ground} is not a ground sublevel")
    if q not in (-1, 0, +1):
        raise InputDomainError(f"q must be -1, 0 or +1, got {q}")
    if excited.f not in spec.excited_levels() or ground.f not in spec.ground_levels():
        raise InputDomainError("sublevel does not belong to this species")

    if excited.m.twice != ground.m.twice + 2 * q:
        return 0.0

    I, Jg, Je = spec.nuclear_spin, spec.ground_j, spec.excited_j
    fe, fg = excited.f, ground.f
    cg = clebsch_gordan(fg, ground.m, HalfInt(2), HalfInt(2 * q), fe, excited.m)
    if cg.sign == 0:
        return 0.0
    sixj = wigner_6j(I, Jg, fg, HalfInt(2), fe, Je)
    if sixj.sign == 0:
        return 0.0
    exponent = (I.twice + Jg.twice + fe.twice) // 2
    phase = -1.0 if exponent % 2 == 0 else 1.0
    scale = np.sqrt((fg.twice + 1.0) * (Je.twice + 1.0)) * spec.reduced_dipole
    return phase * scale * cg.value * sixj.value


def detuning(spec: AtomSpec, omega_laser: float, f_ground: HalfIntLike) -> float:
    """Delta(F') = omega_L - omega_a + delta(F'), sign preserved."""
    return omega_laser - spec.resonance + spec.splitting(f_ground)


@dataclass(frozen=True)
class ValidityReport:
    """|Delta(F')| / Gamma per ground level, against a pass threshold."""

    ratios: tuple[tuple[HalfInt, float], ...]
    threshold: float
    passed: bool

    def describe(self) -> str:
        parts = ", ".join(f"F'={f}: {r:.3g}" for f, r in self.ratios)
        verdict = "pass" if self.passed else "fail"
        return f"|detuning|/linewidth {{{parts}}} vs threshold {self.threshold:g}: {verdict}"


def validity_check(
    spec: AtomSpec, omega_laser: float, threshold: float = 100.0
) -> ValidityReport:
    """Check the far off-resonant condition |Delta(F')| >> Gamma."""
    ratios = tuple(
        (f, abs(detuning(spec, omega_laser, f)) / spec.linewidth)
        for f in spec.ground_levels()
    )
    passed = all(r > threshold for _, r in ratios)
    return ValidityReport(ratios=ratios, threshold=threshold, passed=passed)


# --- species files ----------------------------------------------------------

_ATOM_KEYS = {
    "name",
    "doubled_I",
    "doubled_ground_J",
    "doubled_excited_J",
    "ground_splittings_hz",
    "resonance_hz",
    "linewidth_hz",
    "mass_kg",
    "reduced_dipole",
    "notes",
}


def load_atom_spec(path: str | Path) -> AtomSpec:
    """Load an :class:`AtomSpec` from its JSON file format.

    Frequencies are given in Hz in the file and converted to rad/s here.
    The ``notes`` key is free-form provenance text and is ignored.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    unknown = set(raw) - _ATOM_KEYS
    if unknown:
        raise InputDomainError(f"unknown atom-spec key {sorted(unknown)[0]!r} in {path}")
    missing = _ATOM_KEYS - {"notes", "reduced_dipole"} - set(raw)
    if missing:
        raise InputDomainError(f"atom spec {path} missing key {sorted(missing)[0]!r}")
    try:
        splittings = tuple(
            sorted(
                ((HalfInt(int(k)), TWO_PI * float(v)) for k, v in raw["ground_splittings_hz"].items()),
                key=lambda item: item[0].twice,
            )
        )
        return AtomSpec(
            name=str(raw["name"]),
            nuclear_spin=HalfInt(int(raw["doubled_I"])),
            ground_j=HalfInt(int(raw["doubled_ground_J"])),
            excited_j=HalfInt(int(raw["doubled_excited_J"])),
            ground_splittings=splittings,
            resonance=TWO_PI * float(raw["resonance_hz"]),
            linewidth=TWO_PI * float(raw["linewidth_hz"]),
            mass=float(raw["mass_kg"]),
            reduced_dipole=float(raw.get("reduced_dipole", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise InputDomainError(f"malformed atom spec {path}: {exc}") from exc


def sodium() -> AtomSpec:
    """The shipped sodium D2 preset (I=3/2, J_g=1/2, J_e=3/2)."""
    return load_atom_spec(Path(__file__).parent / "data" / "sodium.json")
