"""Command-line interface.

Subcommands: ``state``, ``filter``, ``scan``, ``chsh``, ``tables``.  Configs
are strict JSON (unknown keys are rejected, frequencies are given in Hz with
the unit in the key name).  Exit codes: 0 success, 2 configuration error,
3 physics or numerical-domain error.  All outputs carry a metadata block and
two runs with identical inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .angular_momentum import HalfInt, clebsch_gordan, halfint, wigner_3j, wigner_6j
from .atomic_model import AtomSpec, load_atom_spec
from .bell_sim import GENERATOR_ID, chsh, events_to_csv, optimize_chsh, sample_events
from .entanglement_analysis import conditional_overlap, entanglement_entropy, schmidt
from .errors import (
    ConfigError,
    InputDomainError,
    PhysicsError,
    UndefinedOverlapError,
)
from .geometry_explorer import (
    MEASURES,
    argmax_direction,
    scan_sphere,
    write_scan,
)
from .pair_state import (
    CondensateSpinor,
    PairState,
    PumpConfig,
    build_pair_state,
    pair_state_to_json,
    spectral_filter,
)

TWO_PI = 2.0 * math.pi
TABLES_MAX_DOUBLED_J = 12

_CONFIG_SCHEMA = {
    "atom_spec_path": None,
    "pump": {"direction", "polarization", "laser_hz", "amplitude", "atom_number"},
    "condensate": {"amplitudes"},
    "detection": {"direction", "scan"},
    "filter_f": None,
    "chsh": {"settings_rad"},
    "validity_threshold": None,
    "output": {"path", "format"},
}
_SCAN_KEYS = {"resolution_deg", "measure", "filter_f", "workers"}


def _fail_config(message: str) -> None:
    raise ConfigError(message)


def _check_keys(obj: dict, allowed, path: str) -> None:
    for key in obj:
        if key not in allowed:
            _fail_config(f"unknown key '{path}{key}'")


def _as_complex(value, path: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    _fail_config(f"'{path}' must be a number or an [re, im] pair")


def _as_vector(value, path: str, complex_ok: bool) -> np.ndarray:
    if not isinstance(value, list) or len(value) != 3:
        _fail_config(f"'{path}' must be a 3-component list")
    if complex_ok:
        return np.array([_as_complex(v, path) for v in value])
    return np.array([float(v) for v in value])


class RunConfig:
    """Parsed and validated run configuration."""

    def __init__(self, path: Path) -> None:
        self.path = path
        raw_bytes = path.read_bytes()
        self.sha256 = hashlib.sha256(raw_bytes).hexdigest()
        try:
            raw = json.loads(raw_bytes)
        except json.JSONDecodeError as exc:
            _fail_config(f"config {path} is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            _fail_config("config root must be an object")
        _check_keys(raw, set(_CONFIG_SCHEMA), "")
        for key in ("atom_spec_path", "pump", "condensate", "detection"):
            if key not in raw:
                _fail_config(f"missing required key '{key}'")
        for key, sub in _CONFIG_SCHEMA.items():
            if sub is not None and key in raw:
                if not isinstance(raw[key], dict):
                    _fail_config(f"'{key}' must be an object")
                _check_keys(raw[key], sub, f"{key}.")

        self.atom_path, self.atom_sha256, self.spec = self._load_atom(raw["atom_spec_path"])
        self.pump = self._parse_pump(raw["pump"])
        self.condensate = self._parse_condensate(raw["condensate"])
        detection = raw["detection"]
        if ("direction" in detection) == ("scan" in detection):
            _fail_config("'detection' must contain exactly one of 'direction', 'scan'")
        self.direction: np.ndarray | None = None
        self.scan: dict | None = None
        if "direction" in detection:
            self.direction = _as_vector(detection["direction"], "detection.direction", False)
            norm = np.linalg.norm(self.direction)
            if norm == 0:
                _fail_config("'detection.direction' must be nonzero")
            self.direction = self.direction / norm
        else:
            scan = detection["scan"]
            if not isinstance(scan, dict):
                _fail_config("'detection.scan' must be an object")
            _check_keys(scan, _SCAN_KEYS, "detection.scan.")
            for key in ("resolution_deg", "measure"):
                if key not in scan:
                    _fail_config(f"missing required key 'detection.scan.{key}'")
            if scan["measure"] not in MEASURES:
                _fail_config(
                    f"'detection.scan.measure' must be one of {', '.join(MEASURES)}"
                )
            self.scan = scan

        self.filter_f: HalfInt | None = None
        if "filter_f" in raw:
            self.filter_f = self.parse_level(raw["filter_f"], "filter_f")
        self.chsh_settings: tuple[float, float, float, float] | None = None
        if "chsh" in raw:
            settings = raw["chsh"].get("settings_rad")
            if settings is not None:
                if not isinstance(settings, list) or len(settings) != 4:
                    _fail_config("'chsh.settings_rad' must be a list of 4 angles")
                self.chsh_settings = tuple(float(x) for x in settings)
        self.validity_threshold = float(raw.get("validity_threshold", 100.0))
        output = raw.get("output", {})
        self.output_path = output.get("path")
        self.output_format = output.get("format", "json")
        if self.output_format not in ("json", "csv"):
            _fail_config("'output.format' must be 'json' or 'csv'")

    def _load_atom(self, value) -> tuple[Path, str, AtomSpec]:
        if not isinstance(value, str):
            _fail_config("'atom_spec_path' must be a string")
        if value.startswith("builtin:"):
            path = Path(__file__).parent / "data" / f"{value[len('builtin:'):]}.json"
        else:
            path = Path(value)
            if not path.is_absolute():
                path = self.path.parent / path
        if not path.exists():
            _fail_config(f"atom spec file not found: '{path}'")
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        return path, digest, load_atom_spec(path)

    def parse_level(self, value, key: str) -> HalfInt:
        try:
            level = halfint(str(value))
        except InputDomainError:
            _fail_config(f"'{key}' must be an integer or half-integer, got {value!r}")
        if level not in self.spec.ground_levels():
            _fail_config(
                f"'{key}'={level} is not a ground level of {self.spec.name} "
                f"(levels: {[str(f) for f in self.spec.ground_levels()]})"
            )
        return level

    def _parse_pump(self, raw: dict) -> PumpConfig:
        for key in ("direction", "polarization", "laser_hz"):
            if key not in raw:
                _fail_config(f"missing required key 'pump.{key}'")
        direction = _as_vector(raw["direction"], "pump.direction", False)
        norm = np.linalg.norm(direction)
        if norm == 0:
            _fail_config("'pump.direction' must be nonzero")
        polarization = _as_vector(raw["polarization"], "pump.polarization", True)
        pol_norm = np.linalg.norm(polarization)
        if pol_norm == 0:
            _fail_config("'pump.polarization' must be nonzero")
        try:
            return PumpConfig(
                direction=direction / norm,
                polarization=polarization / pol_norm,
                omega_laser=TWO_PI * float(raw["laser_hz"]),
                pump_amplitude=_as_complex(raw.get("amplitude", 1.0), "pump.amplitude"),
                atom_number=float(raw.get("atom_number", 1.0)),
            )
        except InputDomainError as exc:
            _fail_config(f"invalid 'pump': {exc}")

    def _parse_condensate(self, raw: dict) -> CondensateSpinor:
        amplitudes = raw.get("amplitudes")
        if not isinstance(amplitudes, dict) or not amplitudes:
            _fail_config("'condensate.amplitudes' must be a non-empty object")
        parsed: dict[tuple[int, int], complex] = {}
        for key, value in amplitudes.items():
            try:
                tf, tm = (int(x) for x in key.split(":"))
            except ValueError:
                _fail_config(
                    f"condensate key {key!r} must look like '2F:2m' with doubled integers"
                )
            parsed[(tf, tm)] = _as_complex(value, f"condensate.amplitudes.{key}")
        total = math.sqrt(sum(abs(a) ** 2 for a in parsed.values()))
        if total == 0:
            _fail_config("'condensate.amplitudes' must not all vanish")
        normalized = {key: amp / total for key, amp in parsed.items()}
        spinor = CondensateSpinor.from_dict(normalized)
        spinor.vector(self.spec)  # validates sublevel keys against the species
        return spinor

    def metadata(self, seed: int | None = None) -> dict:
        doc = {
            "tool": "raman-pairs",
            "version": __version__,
            "config_sha256": self.sha256,
            "atom_spec_sha256": self.atom_sha256,
            "atom": self.spec.name,
        }
        if seed is not None:
            doc["seed"] = seed
        return doc


def _write_text(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _analysis_block(config: RunConfig, state: PairState) -> dict:
    result = schmidt(state)
    try:
        overlap = conditional_overlap(
            config.spec,
            config.pump,
            config.condensate,
            state.detection_direction,
            validity_threshold=config.validity_threshold,
        )
        overlap_doc: float | None = overlap
        overlap_note = None
    except UndefinedOverlapError as exc:
        overlap_doc = None
        overlap_note = str(exc)
    block = {
        "entropy_bits": entanglement_entropy(state),
        "schmidt_coefficients": list(result.coefficients),
        "channel_probabilities": {
            ch.key(): prob for ch, prob in state.channel_probabilities()
        },
        "conditional_overlap": overlap_doc,
    }
    if overlap_note is not None:
        block["conditional_overlap_note"] = overlap_note
    return block


def _state_csv(state: PairState, metadata: dict) -> str:
    buf = io.StringIO()
    for key in sorted(metadata):
        buf.write(f"# {key}={metadata[key]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["omega_hz", "lambda", "doubled_F", "doubled_m", "amp_re", "amp_im"])
    for (ch, (tf, tm)), amp in state.amplitudes:
        writer.writerow(
            [repr(ch.omega / TWO_PI), ch.lam, tf, tm, repr(amp.real), repr(amp.imag)]
        )
    return buf.getvalue()


def _require_direction(config: RunConfig) -> np.ndarray:
    if config.direction is None:
        _fail_config("this command needs 'detection.direction', not a scan block")
    return config.direction


def _emit_state(config: RunConfig, state: PairState, args) -> None:
    fmt = args.format or config.output_format
    out = args.output or config.output_path
    if fmt == "csv":
        _write_text(_state_csv(state, config.metadata()), out)
    else:
        doc = pair_state_to_json(state, provenance=config.metadata())
        doc["analysis"] = _analysis_block(config, state)
        _write_text(_json_text(doc), out)


def cmd_state(args) -> int:
    config = RunConfig(Path(args.config))
    state = build_pair_state(
        config.spec,
        config.pump,
        config.condensate,
        _require_direction(config),
        validity_threshold=config.validity_threshold,
    )
    _emit_state(config, state, args)
    return 0


def cmd_filter(args) -> int:
    config = RunConfig(Path(args.config))
    if args.f_select is not None:
        level = config.parse_level(args.f_select, "f-select")
    elif config.filter_f is not None:
        level = config.filter_f
    else:
        _fail_config("no filter level: pass --f-select or set 'filter_f' in the config")
    state = build_pair_state(
        config.spec,
        config.pump,
        config.condensate,
        _require_direction(config),
        validity_threshold=config.validity_threshold,
    )
    filtered = spectral_filter(state, level)
    _emit_state(config, filtered, args)
    return 0


def cmd_scan(args) -> int:
    config = RunConfig(Path(args.config))
    if config.scan is None:
        _fail_config("'detection.scan' block required for the scan command")
    out = args.output or config.output_path
    if out is None:
        _fail_config("scan needs an output prefix: pass --output or set 'output.path'")
    resolution = math.radians(float(config.scan["resolution_deg"]))
    filter_f = None
    if "filter_f" in config.scan:
        filter_f = config.parse_level(config.scan["filter_f"], "detection.scan.filter_f")
    workers = config.scan.get("workers")
    scan = scan_sphere(
        config.spec,
        config.pump,
        config.condensate,
        resolution,
        config.scan["measure"],
        filter_f=filter_f,
        workers=int(workers) if workers is not None else None,
        validity_threshold=config.validity_threshold,
    )
    scan = replace(scan, metadata=config.metadata())
    csv_path, json_path = write_scan(scan, out)
    direction, value = argmax_direction(scan)
    sys.stdout.write(
        f"scan {scan.measure_name}: {len(scan.nodes)} nodes -> {csv_path}, {json_path}\n"
        f"argmax direction ({direction[0]:+.6f}, {direction[1]:+.6f}, "
        f"{direction[2]:+.6f}) value {value!r}\n"
    )
    return 0


def cmd_chsh(args) -> int:
    if args.format == "csv":
        _fail_config("the chsh analysis is JSON only; use --events-csv for event records")
    config = RunConfig(Path(args.config))
    state = build_pair_state(
        config.spec,
        config.pump,
        config.condensate,
        _require_direction(config),
        validity_threshold=config.validity_threshold,
    )
    if config.filter_f is not None:
        state = spectral_filter(state, config.filter_f)
    photon_labels = state.photon_labels()
    atom_labels = state.atom_labels()
    if len(photon_labels) != 2 or len(atom_labels) != 2:
        raise PhysicsError(
            "CHSH needs a 2x2 state (2 photon labels x 2 atom labels); this one has "
            f"{len(photon_labels)} photon x {len(atom_labels)} atom labels. "
            "Set 'filter_f' in the config to select one frequency channel."
        )
    if config.chsh_settings is not None:
        settings = config.chsh_settings
        s_value = chsh(state, *settings)
        optimized = False
    else:
        settings, s_value = optimize_chsh(state)
        optimized = True
    doc = {
        "format": "raman-pairs/chsh/1",
        "metadata": config.metadata(seed=args.seed if args.samples else None),
        "settings_rad": list(settings),
        "optimized": optimized,
        "s_analytic": s_value,
        "tsirelson_bound": 2.0 * math.sqrt(2.0),
    }
    if args.samples:
        result = sample_events(state, settings, args.samples, args.seed)
        doc["sampling"] = {
            "n": args.samples,
            "seed": args.seed,
            "generator": GENERATOR_ID,
            "s_estimate": result.s_estimate,
            "standard_error": result.standard_error,
            "correlations": list(result.correlations),
            "counts": list(result.counts),
        }
        if args.events_csv:
            events_to_csv(result.records, args.events_csv)
            doc["sampling"]["events_csv"] = str(args.events_csv)
    _write_text(_json_text(doc), args.output or config.output_path)
    return 0


def _tables_text(max_doubled_j: int) -> tuple[str, str, str]:
    def rows_cg():
        for tj1 in range(max_doubled_j + 1):
            for tj2 in range(max_doubled_j + 1):
                for tj in range(abs(tj1 - tj2), min(tj1 + tj2, max_doubled_j) + 1, 2):
                    for tm1 in range(-tj1, tj1 + 1, 2):
                        for tm2 in range(-tj2, tj2 + 1, 2):
                            tm = tm1 + tm2
                            if abs(tm) > tj:
                                continue
                            value = clebsch_gordan(
                                *(HalfInt(t) for t in (tj1, tm1, tj2, tm2, tj, tm))
                            )
                            yield (tj1, tm1, tj2, tm2, tj, tm, value)

    def rows_3j():
        for tj1 in range(max_doubled_j + 1):
            for tj2 in range(max_doubled_j + 1):
                for tj3 in range(abs(tj1 - tj2), min(tj1 + tj2, max_doubled_j) + 1, 2):
                    for tm1 in range(-tj1, tj1 + 1, 2):
                        for tm2 in range(-tj2, tj2 + 1, 2):
                            tm3 = -(tm1 + tm2)
                            if abs(tm3) > tj3:
                                continue
                            value = wigner_3j(
                                *(HalfInt(t) for t in (tj1, tj2, tj3, tm1, tm2, tm3))
                            )
                            yield (tj1, tj2, tj3, tm1, tm2, tm3, value)

    def rows_6j():
        rng = range(max_doubled_j + 1)
        for tj1 in rng:
            for tj2 in rng:
                for tj3 in range(abs(tj1 - tj2), min(tj1 + tj2, max_doubled_j) + 1, 2):
                    for tj4 in rng:
                        for tj5 in range(
                            abs(tj4 - tj3), min(tj4 + tj3, max_doubled_j) + 1, 2
                        ):
                            for tj6 in range(
                                max(abs(tj1 - tj5), abs(tj4 - tj2)),
                                min(tj1 + tj5, tj4 + tj2, max_doubled_j) + 1,
                                2,
                            ):
                                value = wigner_6j(
                                    *(HalfInt(t) for t in (tj1, tj2, tj3, tj4, tj5, tj6))
                                )
                                yield (tj1, tj2, tj3, tj4, tj5, tj6, value)

    def table(header: list[str], rows) -> str:
        buf = io.StringIO()
        buf.write(f"# tool=raman-pairs\n# version={__version__}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            value = row[-1]
            writer.writerow(
                list(row[:-1])
                + [repr(value.value), value.sign, value.radicand.numerator, value.radicand.denominator]
            )
        return buf.getvalue()

    labels = ["value", "sign", "radicand_num", "radicand_den"]
    cg = table(["2j1", "2m1", "2j2", "2m2", "2J", "2M"] + labels, rows_cg())
    w3j = table(["2j1", "2j2", "2j3", "2m1", "2m2", "2m3"] + labels, rows_3j())
    w6j = table(["2j1", "2j2", "2j3", "2j4", "2j5", "2j6"] + labels, rows_6j())
    return cg, w3j, w6j


def cmd_tables(args) -> int:
    n = args.max_doubled_j
    if n < 0 or n > TABLES_MAX_DOUBLED_J:
        _fail_config(
            f"--max-doubled-j must lie in [0, {TABLES_MAX_DOUBLED_J}], got {n}"
        )
    cg, w3j, w6j = _tables_text(n)
    if args.output:
        prefix = Path(args.output)
        for suffix, text in (("cg", cg), ("3j", w3j), ("6j", w6j)):
            path = prefix.parent / f"{prefix.name}_{suffix}.csv"
            path.write_text(text, encoding="utf-8")
            sys.stdout.write(f"wrote {path}\n")
    else:
        sys.stdout.write(cg)
        sys.stdout.write(w3j)
        sys.stdout.write(w6j)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="raman-pairs",
        description=(
            "Entangled atom-photon pair states from off-resonant light "
            "scattering on a spinor condensate"
        ),
    )
    parser.add_argument("--version", action="version", version=f"raman-pairs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
        if config_required:
            p.add_argument("--config", required=True, help="run configuration JSON")
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument(
            "--format", choices=("json", "csv"), default=None, help="output format"
        )

    p_state = sub.add_parser("state", help="build the pair state for one direction")
    add_common(p_state)
    p_state.set_defaults(func=cmd_state)

    p_filter = sub.add_parser("filter", help="spectrally filter one frequency channel")
    add_common(p_filter)
    p_filter.add_argument("--f-select", help="final ground level F, e.g. '1' or '3/2'")
    p_filter.set_defaults(func=cmd_filter)

    p_scan = sub.add_parser("scan", help="scan detection directions over the sphere")
    add_common(p_scan)
    p_scan.set_defaults(func=cmd_scan)

    p_chsh = sub.add_parser("chsh", help="CHSH correlations of a filtered state")
    add_common(p_chsh)
    p_chsh.add_argument("--samples", type=int, default=0, help="sampled trials")
    p_chsh.add_argument("--seed", type=int, default=0, help="sampling seed")
    p_chsh.add_argument("--events-csv", help="write sampled events to this CSV")
    p_chsh.set_defaults(func=cmd_chsh)

    p_tables = sub.add_parser("tables", help="dump coefficient grids as CSV")
    p_tables.add_argument("--max-doubled-j", type=int, required=True)
    p_tables.add_argument("--output", help="output path prefix")
    p_tables.set_defaults(func=cmd_tables)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputDomainError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except PhysicsError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
