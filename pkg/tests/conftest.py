import math

import numpy as np
import pytest

from raman_pairs.atomic_model import sodium
from raman_pairs.pair_state import (
    CondensateSpinor,
    PumpConfig,
    build_pair_state,
    sodium_condensate,
)

TWO_PI = 2.0 * math.pi
DETUNING_HZ = -10.0e9  # red detuned 10 GHz, far off resonance


@pytest.fixture(scope="session")
def spec():
    return sodium()


@pytest.fixture(scope="session")
def pump(spec):
    """The reference configuration: pump along y, pi-polarized along z."""
    return PumpConfig(
        direction=np.array([0.0, 1.0, 0.0]),
        polarization=np.array([0.0, 0.0, 1.0]),
        omega_laser=spec.resonance + TWO_PI * DETUNING_HZ,
        pump_amplitude=1.0 + 0.0j,
        atom_number=1.0e6,
    )


@pytest.fixture(scope="session")
def phi0():
    return sodium_condensate()


@pytest.fixture(scope="session")
def state_z(spec, pump, phi0):
    """The full four-channel state with the detector on +z."""
    return build_pair_state(spec, pump, phi0, np.array([0.0, 0.0, 1.0]))


def random_direction(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_pump(spec, rng, atom_number: float = 1.0e6) -> PumpConfig:
    """Random geometry pump with a random transverse elliptic polarization."""
    k = random_direction(rng)
    a = rng.normal(size=3) + 1j * rng.normal(size=3)
    a -= np.vdot(k, a) * k
    pol = a / np.linalg.norm(a)
    return PumpConfig(
        direction=k,
        polarization=pol,
        omega_laser=spec.resonance + TWO_PI * DETUNING_HZ,
        atom_number=atom_number,
    )


def random_condensate(spec, rng) -> CondensateSpinor:
    from raman_pairs.raman_coupling import ground_basis

    basis = ground_basis(spec)
    vec = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    vec /= np.linalg.norm(vec)
    return CondensateSpinor.from_dict(
        {(g.f.twice, g.m.twice): complex(v) for g, v in zip(basis, vec)}
    )


def assert_equal_up_to_global_phase(actual: dict, expected: dict, tol: float = 1e-10):
    """Compare two keyed amplitude maps modulo one overall phase."""
    assert set(actual) == set(expected)
    ref_key = max(expected, key=lambda k: abs(expected[k]))
    phase = (actual[ref_key] / expected[ref_key])
    phase /= abs(phase)
    for key, want in expected.items():
        assert abs(actual[key] / phase - want) <= tol, (
            f"amplitude at {key}: {actual[key] / phase} != {want}"
        )
