"""Sphere scans of entanglement measures over detection directions.

The grid is an equiangular (theta, phi) lattice that contains both poles
exactly, since the interesting optimum sits on the quantization axis and
must not fall between nodes.  Directions where no scattering amplitude
exists (or where the requested measure is undefined, e.g. a zero-weight
filter channel) are recorded with a NaN sentinel and flagged rather than
scored 0: "no scattering" and "unentangled scattering" are different
statements.

Node evaluations are pure and independent; with ``workers > 1`` they run in
a process pool over fixed-size chunks, and the result is identical for any
worker count.  The ``RAMAN_PAIR_THREADS`` environment variable caps the
worker count (0 means one worker per CPU).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .angular_momentum import halfint
from .atomic_model import AtomSpec
from .entanglement_analysis import (
    concurrence_after_filter,
    conditional_overlap,
    entanglement_entropy,
)
from .errors import (
    EmptyScanError,
    EmptyStateError,
    InputDomainError,
    UndefinedOverlapError,
)
from .pair_state import CondensateSpinor, PairState, PumpConfig, build_pair_state

__all__ = [
    "MEASURES",
    "ScanNode",
    "ScanMap",
    "direction_from_angles",
    "scan_sphere",
    "argmax_direction",
    "scan_to_csv_text",
    "scan_to_json_doc",
    "write_scan",
]

MEASURES = ("entropy", "concurrence_after_filter", "conditional_overlap")
MIN_RESOLUTION = math.pi / 1800.0
MAX_RESOLUTION = math.pi / 6.0
_CHUNKSIZE = 64


@dataclass(frozen=True)
class ScanNode:
    theta: float
    phi: float
    direction: tuple[float, float, float]
    measure: float
    flagged: bool
    channel_info: tuple[tuple[str, float], ...] = ()


@dataclass(frozen=True, eq=False)
class ScanMap:
    nodes: tuple[ScanNode, ...]
    resolution: float
    measure_name: str
    metadata: dict = field(default_factory=dict)


def direction_from_angles(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )


def _grid(resolution: float) -> list[tuple[float, float]]:
    n_theta = max(1, math.ceil(math.pi / resolution - 1e-12))
    n_phi = max(1, math.ceil(2.0 * math.pi / resolution - 1e-12))
    thetas = [i * math.pi / n_theta for i in range(n_theta + 1)]
    phis = [j * 2.0 * math.pi / n_phi for j in range(n_phi)]
    return [(t, p) for t in thetas for p in phis]


def _evaluate_node(args) -> ScanNode:
    spec, pump, phi0, measure, filter_f, theta, phi, kwargs = args
    direction = direction_from_angles(theta, phi)
    # Renormalize against trig rounding so downstream unit checks hold.
    direction /= np.linalg.norm(direction)
    channel_info: tuple[tuple[str, float], ...] = ()
    state: PairState | None = None
    try:
        state = build_pair_state(spec, pump, phi0, direction, **kwargs)
        channel_info = tuple(
            (ch.key(), float(p)) for ch, p in state.channel_probabilities()
        )
    except EmptyStateError:
        state = None

    flagged = False
    value = math.nan
    try:
        if measure == "entropy":
            if state is None:
                raise EmptyStateError("no scattering at this node")
            value = entanglement_entropy(state)
        elif measure == "concurrence_after_filter":
            if state is None:
                raise EmptyStateError("no scattering at this node")
            value = concurrence_after_filter(state, filter_f)
        else:
            value = conditional_overlap(
                spec,
                pump,
                phi0,
                direction,
                validity_threshold=kwargs.get("validity_threshold", 100.0),
                enforce_validity=kwargs.get("enforce_validity", True),
            )
    except (EmptyStateError, UndefinedOverlapError):
        flagged = True

    return ScanNode(
        theta=theta,
        phi=phi,
        direction=(float(direction[0]), float(direction[1]), float(direction[2])),
        measure=value,
        flagged=flagged,
        channel_info=channel_info,
    )


def _worker_count(workers: int | None) -> int:
    if workers is None:
        raw = os.environ.get("RAMAN_PAIR_THREADS", "1")
        try:
            workers = int(raw)
        except ValueError:
            raise InputDomainError(f"RAMAN_PAIR_THREADS must be an integer, got {raw!r}")
    if workers == 0:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise InputDomainError("worker count must be >= 0")
    return workers


def scan_sphere(
    spec: AtomSpec,
    pump: PumpConfig,
    phi0: CondensateSpinor,
    resolution: float,
    measure: str,
    *,
    filter_f=None,
    workers: int | None = None,
    validity_threshold: float = 100.0,
    enforce_validity: bool = True,
) -> ScanMap:
    """Evaluate an entanglement measure on the full detection sphere."""
    if not (MIN_RESOLUTION <= resolution <= MAX_RESOLUTION):
        raise InputDomainError(
            f"resolution must lie in [pi/1800, pi/6] rad, got {resolution!r}"
        )
    if measure not in MEASURES:
        raise InputDomainError(
            f"unknown measure {measure!r}; choose one of {', '.join(MEASURES)}"
        )
    if measure == "concurrence_after_filter":
        if filter_f is None:
            raise InputDomainError("concurrence_after_filter needs a filter level F")
        filter_f = halfint(filter_f)
        if filter_f not in spec.ground_levels():
            raise InputDomainError(
                f"F={filter_f} is not a ground level of {spec.name}"
            )
    kwargs = {
        "validity_threshold": validity_threshold,
        "enforce_validity": enforce_validity,
    }
    jobs = [
        (spec, pump, phi0, measure, filter_f, theta, phi, kwargs)
        for theta, phi in _grid(resolution)
    ]
    n_workers = _worker_count(workers)
    if n_workers == 1:
        nodes = [_evaluate_node(job) for job in jobs]
    else:
        import multiprocessing

        with multiprocessing.get_context("fork").Pool(n_workers) as pool:
            nodes = pool.map(_evaluate_node, jobs, chunksize=_CHUNKSIZE)

    name = measure
    if measure == "concurrence_after_filter":
        name = f"concurrence_after_filter(F={filter_f})"
    return ScanMap(
        nodes=tuple(nodes),
        resolution=resolution,
        measure_name=name,
        metadata={},
    )


def argmax_direction(scan: ScanMap) -> tuple[np.ndarray, float]:
    """Maximum over non-flagged nodes; ties go to the smallest (theta, phi)."""
    best: ScanNode | None = None
    for node in scan.nodes:
        if node.flagged:
            continue
        if best is None or node.measure > best.measure:
            best = node
    if best is None:
        raise EmptyScanError("every node of the scan is flagged")
    return np.array(best.direction), best.measure


def scan_to_csv_text(scan: ScanMap) -> str:
    """Delimited node table with '#' metadata header lines."""
    buf = io.StringIO()
    for key in sorted(scan.metadata):
        buf.write(f"# {key}={scan.metadata[key]}\n")
    buf.write(f"# measure={scan.measure_name}\n")
    buf.write(f"# resolution_rad={scan.resolution!r}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta_rad", "phi_rad", "kx", "ky", "kz", "measure", "flag"])
    for node in scan.nodes:
        writer.writerow(
            [
                repr(node.theta),
                repr(node.phi),
                repr(node.direction[0]),
                repr(node.direction[1]),
                repr(node.direction[2]),
                "nan" if math.isnan(node.measure) else repr(node.measure),
                1 if node.flagged else 0,
            ]
        )
    return buf.getvalue()


def scan_to_json_doc(scan: ScanMap) -> dict:
    return {
        "format": "raman-pairs/scan-map/1",
        "measure": scan.measure_name,
        "resolution_rad": scan.resolution,
        "metadata": scan.metadata,
        "nodes": [
            {
                "theta_rad": node.theta,
                "phi_rad": node.phi,
                "direction": list(node.direction),
                "measure": None if math.isnan(node.measure) else node.measure,
                "flagged": node.flagged,
                "channels": {key: prob for key, prob in node.channel_info},
            }
            for node in scan.nodes
        ],
    }


def write_scan(scan: ScanMap, prefix: str | Path) -> tuple[Path, Path]:
    """Write ``<prefix>.csv`` and ``<prefix>.json``; returns both paths."""
    prefix = Path(prefix)
    csv_path = prefix.with_suffix(".csv")
    json_path = prefix.with_suffix(".json")
    csv_path.write_text(scan_to_csv_text(scan), encoding="utf-8")
    json_path.write_text(
        json.dumps(scan_to_json_doc(scan), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return csv_path, json_path
