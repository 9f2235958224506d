"""Scenario configs: validation, execution, and deterministic artifacts.

A scenario is a JSON document naming one computation kind plus its
parameters, optionally swept over one dotted parameter path. Runs write
their artifacts atomically (temp file + rename) into an output directory
together with a manifest of content hashes; identical config and seed give
byte-identical files. All randomness is opt-in and none of the shipped
kinds use any; the seed is recorded for provenance.
"""

from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from . import dynamics, levels, protocols, relaxation, screening, spin, vibronic
from .errors import ConfigError, HostGuestError
from .units import FrequencyGrid, Quantity, Unit, convert

SCHEMA_VERSION = 1

_ANGULAR_UNITS = ["eV", "THz", "GHz", "MHz", "kHz", "rad/s"]

_QUANTITY = {
    "type": "object",
    "properties": {
        "value": {"type": "number"},
        "unit": {"enum": _ANGULAR_UNITS + ["K", "T", "s", "1"]},
    },
    "required": ["value", "unit"],
    "additionalProperties": False,
}

_GRID = {
    "type": "object",
    "properties": {
        "start": _QUANTITY,
        "stop": _QUANTITY,
        "points": {"type": "integer", "minimum": 2},
    },
    "required": ["start", "stop", "points"],
    "additionalProperties": False,
}

_PULSE = {
    "type": "object",
    "properties": {
        "peak_rabi": _QUANTITY,
        "center": _QUANTITY,
        "width": _QUANTITY,
    },
    "required": ["peak_rabi", "center", "width"],
    "additionalProperties": False,
}

_PHONON_DENSITY = {
    "type": "object",
    "properties": {
        "coupling_weight": {"type": "number", "minimum": 0},
        "peak_frequency": _QUANTITY,
        "cutoff_frequency": _QUANTITY,
    },
    "required": ["coupling_weight", "peak_frequency", "cutoff_frequency"],
    "additionalProperties": False,
}

_NUCLEUS = {
    "type": "object",
    "properties": {
        "spin": {"type": "string"},
        "hyperfine_tensor": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 3,
                "maxItems": 3,
            },
            "minItems": 3,
            "maxItems": 3,
        },
        "hyperfine_unit": {"enum": _ANGULAR_UNITS},
        "gyromagnetic_ratio": {"type": "number"},
    },
    "required": ["spin", "hyperfine_tensor", "hyperfine_unit"],
    "additionalProperties": False,
}

_SPIN_SYSTEM = {
    "type": "object",
    "properties": {
        "zfs_d": _QUANTITY,
        "zfs_e": _QUANTITY,
        "magnetic_field_tesla": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 3,
            "maxItems": 3,
        },
        "g_electron": {"type": "number"},
        "nuclei": {"type": "array", "items": _NUCLEUS},
    },
    "required": ["zfs_d", "zfs_e"],
    "additionalProperties": False,
}

_TWO_LEVEL = {
    "type": "object",
    "properties": {
        "rabi": _QUANTITY,
        "detuning": _QUANTITY,
        "decay": _QUANTITY,
        "dephasing": _QUANTITY,
    },
    "required": ["rabi", "detuning", "decay"],
    "additionalProperties": False,
}

_TIME_AXIS = {
    "type": "object",
    "properties": {
        "stop": _QUANTITY,
        "points": {"type": "integer", "minimum": 2},
    },
    "required": ["stop", "points"],
    "additionalProperties": False,
}

PARAMETER_SCHEMAS = {
    "spin_spectrum": {
        "type": "object",
        "properties": {
            "spin_system": _SPIN_SYSTEM,
            "grid": _GRID,
            "linewidth": _QUANTITY,
        },
        "required": ["spin_system", "grid", "linewidth"],
        "additionalProperties": False,
    },
    "odmr": {
        "type": "object",
        "properties": {
            "network": {
                "type": "object",
                "properties": {
                    "states": {"type": "array", "items": {"type": "string"}},
                    "rates": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "properties": {
                                "source": {"type": "string"},
                                "target": {"type": "string"},
                                "rate": _QUANTITY,
                            },
                            "required": ["source", "target", "rate"],
                            "additionalProperties": False,
                        },
                    },
                    "emissive": {"type": "array", "items": {"type": "string"}},
                },
                "required": ["states", "rates", "emissive"],
                "additionalProperties": False,
            },
            "mw_pair": {
                "type": "array",
                "items": {"enum": ["x", "y", "z"]},
                "minItems": 2,
                "maxItems": 2,
            },
            "mw_mixing_rate": _QUANTITY,
        },
        "required": ["network", "mw_pair", "mw_mixing_rate"],
        "additionalProperties": False,
    },
    "crot": {
        "type": "object",
        "properties": {
            "spin_system": _SPIN_SYSTEM,
            "drive_frequency": _QUANTITY,
            "rabi_frequency": _QUANTITY,
            "duration": _QUANTITY,
            "drive_axis": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 3,
                "maxItems": 3,
            },
        },
        "required": ["spin_system", "drive_frequency", "rabi_frequency", "duration"],
        "additionalProperties": False,
    },
    "emission_spectrum": {
        "type": "object",
        "properties": {
            "model": {
                "type": "object",
                "properties": {
                    "zpl_frequency": _QUANTITY,
                    "radiative_rate": _QUANTITY,
                    "temperature": _QUANTITY,
                    "vibron_modes": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "properties": {
                                "frequency": _QUANTITY,
                                "huang_rhys": {"type": "number", "minimum": 0},
                                "relaxation_rate": _QUANTITY,
                            },
                            "required": ["frequency", "huang_rhys", "relaxation_rate"],
                            "additionalProperties": False,
                        },
                    },
                    "phonon_density": {
                        "oneOf": [{"type": "null"}, _PHONON_DENSITY]
                    },
                    "extra_linewidth": _QUANTITY,
                },
                "required": ["zpl_frequency", "radiative_rate", "temperature"],
                "additionalProperties": False,
            },
            "grid": _GRID,
        },
        "required": ["model", "grid"],
        "additionalProperties": False,
    },
    "relaxation_classify": {
        "type": "object",
        "properties": {
            "vibron_frequency": _QUANTITY,
            "phonon_cutoff": _QUANTITY,
            "other_vibrons": {"type": "array", "items": _QUANTITY},
            "rate_model": {
                "type": "object",
                "properties": {
                    "density": _PHONON_DENSITY,
                    "coupling": {"type": "number"},
                    "temperature": _QUANTITY,
                },
                "required": ["density", "coupling", "temperature"],
                "additionalProperties": False,
            },
        },
        "required": ["vibron_frequency", "phonon_cutoff"],
        "additionalProperties": False,
    },
    "lindblad": {
        "type": "object",
        "properties": {
            "system": _TWO_LEVEL,
            "initial_state": {"enum": ["ground", "excited"]},
            "times": _TIME_AXIS,
        },
        "required": ["system", "initial_state", "times"],
        "additionalProperties": False,
    },
    "g2": {
        "type": "object",
        "properties": {"system": _TWO_LEVEL, "taus": _TIME_AXIS},
        "required": ["system", "taus"],
        "additionalProperties": False,
    },
    "raman_memory": {
        "type": "object",
        "properties": {
            "gamma0": _QUANTITY,
            "kappa_v": _QUANTITY,
            "detuning": _QUANTITY,
            "signal_pulse": _PULSE,
            "control_pulse": _PULSE,
            "storage_hold": _QUANTITY,
        },
        "required": [
            "gamma0",
            "kappa_v",
            "detuning",
            "signal_pulse",
            "control_pulse",
            "storage_hold",
        ],
        "additionalProperties": False,
    },
    "cavity_interface": {
        "type": "object",
        "properties": {
            "g": _QUANTITY,
            "kappa": _QUANTITY,
            "kappa_in": _QUANTITY,
            "kappa_out": _QUANTITY,
            "gamma": _QUANTITY,
            "emitter_coupled": {"type": "boolean"},
            "grid": _GRID,
        },
        "required": ["g", "kappa", "kappa_in", "kappa_out", "gamma", "grid"],
        "additionalProperties": False,
    },
    "optomech": {
        "type": "object",
        "properties": {
            "g0": _QUANTITY,
            "omega_v": _QUANTITY,
            "kappa_v": _QUANTITY,
            "gamma0": _QUANTITY,
            "temperature": _QUANTITY,
            "n_bar": {"oneOf": [{"type": "null"}, {"type": "number", "minimum": 0}]},
        },
        "required": ["g0", "omega_v", "kappa_v", "gamma0", "temperature"],
        "additionalProperties": False,
    },
    "screening": {
        "type": "object",
        "properties": {
            "input_csv": {"type": "string"},
            "criteria": {
                "type": "object",
                "properties": {
                    "min_t1_ev": {"type": "number"},
                    "max_s1_ev": {"type": "number"},
                },
                "required": [],
                "additionalProperties": False,
            },
        },
        "required": ["input_csv"],
        "additionalProperties": False,
    },
}

SCENARIO_KINDS = tuple(sorted(PARAMETER_SCHEMAS))


def config_schema(kind: str) -> dict:
    """The full JSON schema for one scenario kind."""
    if kind not in PARAMETER_SCHEMAS:
        raise ConfigError(
            f"unknown scenario kind {kind!r}; expected one of {', '.join(SCENARIO_KINDS)}"
        )
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "properties": {
            "schema_version": {"const": SCHEMA_VERSION},
            "scenario_kind": {"const": kind},
            "parameters": PARAMETER_SCHEMAS[kind],
            "sweep": {
                "type": "object",
                "properties": {
                    "parameter": {"type": "string"},
                    "values": {
                        "type": "array",
                        "items": {"type": ["number", "string", "boolean"]},
                        "minItems": 1,
                    },
                },
                "required": ["parameter", "values"],
                "additionalProperties": False,
            },
            "output_dir": {"type": "string"},
            "seed": {"type": "integer", "minimum": 0},
        },
        "required": ["schema_version", "scenario_kind", "parameters"],
        "additionalProperties": False,
    }


def validate_config(config) -> None:
    """Raise ConfigError describing the first (deepest-path) violation."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    kind = config.get("scenario_kind")
    if not isinstance(kind, str) or kind not in PARAMETER_SCHEMAS:
        raise ConfigError(
            f"scenario_kind must be one of {', '.join(SCENARIO_KINDS)}, got {kind!r}"
        )
    validator = Draft202012Validator(config_schema(kind))
    errors = sorted(
        validator.iter_errors(config), key=lambda e: (-len(e.absolute_path), str(e.absolute_path))
    )
    if errors:
        err = errors[0]
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"at {where}: {err.message}")


# --- quantity coercion helpers ---------------------------------------------


def _quantity(node: dict) -> Quantity:
    return Quantity(float(node["value"]), Unit(node["unit"]))


def _angular(node: dict, where: str) -> float:
    try:
        return _quantity(node).rad_per_s
    except HostGuestError:
        raise ConfigError(f"{where} must carry a frequency or energy unit") from None


def _in_unit(node: dict, unit: Unit, where: str) -> float:
    try:
        return convert(_quantity(node), unit).value
    except HostGuestError:
        raise ConfigError(f"{where} must carry a {unit.value} unit") from None


def _grid(node: dict, where: str) -> FrequencyGrid:
    return FrequencyGrid(
        start=_angular(node["start"], f"{where}.start"),
        stop=_angular(node["stop"], f"{where}.stop"),
        points=int(node["points"]),
    )


def _phonon_density(node: dict, where: str) -> vibronic.PhononSpectralDensity:
    return vibronic.PhononSpectralDensity(
        coupling_weight=float(node["coupling_weight"]),
        peak_frequency=_angular(node["peak_frequency"], f"{where}.peak_frequency"),
        cutoff_frequency=_angular(node["cutoff_frequency"], f"{where}.cutoff_frequency"),
    )


def _spin_system(node: dict, where: str) -> spin.SpinSystemSpec:
    nuclei = []
    for idx, nuc in enumerate(node.get("nuclei", ())):
        unit = Unit(nuc["hyperfine_unit"])
        factor = convert(Quantity(1.0, unit), Unit.RAD_PER_S).value
        tensor = [[factor * x for x in row] for row in nuc["hyperfine_tensor"]]
        kwargs = {}
        if "gyromagnetic_ratio" in nuc:
            kwargs["gyromagnetic_ratio"] = float(nuc["gyromagnetic_ratio"])
        try:
            nuclei.append(
                spin.NucleusSpec(spin=nuc["spin"], hyperfine_tensor=tensor, **kwargs)
            )
        except ValueError as exc:
            raise ConfigError(f"at {where}.nuclei.{idx}: {exc}") from None
    try:
        return spin.SpinSystemSpec(
            zfs_d=_angular(node["zfs_d"], f"{where}.zfs_d"),
            zfs_e=_angular(node["zfs_e"], f"{where}.zfs_e"),
            magnetic_field=tuple(node.get("magnetic_field_tesla", (0.0, 0.0, 0.0))),
            g_electron=float(node.get("g_electron", spin.G_ELECTRON_DEFAULT)),
            nuclei=tuple(nuclei),
        )
    except ValueError as exc:
        raise ConfigError(f"at {where}: {exc}") from None


def _two_level(node: dict) -> dynamics.OpenSystem:
    rabi = _angular(node["rabi"], "system.rabi")
    delta = _angular(node["detuning"], "system.detuning")
    decay = _angular(node["decay"], "system.decay")
    dephasing = _angular(node.get("dephasing", {"value": 0.0, "unit": "rad/s"}), "system.dephasing")
    lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # basis (g, e)
    project_e = np.diag([0.0, 1.0]).astype(complex)
    h = delta * project_e + 0.5 * rabi * (lower + lower.conj().T)
    channels = [(lower, decay)]
    if dephasing > 0.0:
        channels.append((project_e, dephasing))
    return dynamics.OpenSystem(h, tuple(channels))


# --- CSV / JSON byte renderers ----------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue().encode()


def _json_scalar(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def _json_bytes(payload) -> bytes:
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()


# --- scenario runners --------------------------------------------------------
#
# Each runner maps validated parameters to (scalars, artifacts); scalars are
# flat key -> scalar (these populate result.json and sweep columns),
# artifacts are file name -> bytes.

_TWO_PI = 2.0 * math.pi


def _run_spin_spectrum(params, _ctx):
    system = _spin_system(params["spin_system"], "spin_system")
    grid = _grid(params["grid"], "grid")
    linewidth = _angular(params["linewidth"], "linewidth")
    freqs, response = spin.odmr_spectrum(system, grid, linewidth)
    eig = spin.diagonalize(spin.build_spin_hamiltonian(system))
    gaps = np.diff(eig.energies)
    scalars = {
        "level_count": len(eig.energies),
        "smallest_gap_hz": float(gaps.min() / _TWO_PI) if len(gaps) else 0.0,
        "largest_gap_hz": float((eig.energies[-1] - eig.energies[0]) / _TWO_PI),
    }
    artifacts = {
        "spectrum.csv": _csv_bytes(
            ("frequency_hz", "response"),
            zip(freqs / _TWO_PI, response),
        ),
        "levels.csv": _csv_bytes(
            ("index", "energy_hz"),
            ((i, e / _TWO_PI) for i, e in enumerate(eig.energies)),
        ),
    }
    return scalars, artifacts


def _parse_network(node):
    states = tuple(levels.parse_ket(s) for s in node["states"])
    rates = {}
    for item in node["rates"]:
        key = (levels.parse_ket(item["source"]), levels.parse_ket(item["target"]))
        rates[key] = _angular(item["rate"], "network.rates")
    flags = {k: False for k in states}
    for s in node["emissive"]:
        flags[levels.parse_ket(s)] = True
    return dynamics.RateNetwork(states, rates, flags)


def _run_odmr(params, _ctx):
    try:
        network = _parse_network(params["network"])
    except ValueError as exc:
        raise ConfigError(f"at network: {exc}") from None
    contrast = dynamics.odmr_contrast(
        network,
        tuple(params["mw_pair"]),
        _angular(params["mw_mixing_rate"], "mw_mixing_rate"),
    )
    return {"contrast": contrast}, {}


def _run_crot(params, _ctx):
    system = _spin_system(params["spin_system"], "spin_system")
    result = spin.crot_gate(
        system,
        drive_frequency=_angular(params["drive_frequency"], "drive_frequency"),
        rabi_frequency=_angular(params["rabi_frequency"], "rabi_frequency"),
        duration=_in_unit(params["duration"], Unit.SECOND, "duration"),
        drive_axis=tuple(params.get("drive_axis", (1.0, 0.0, 0.0))),
    )
    u = result.unitary
    header = []
    for i in range(u.shape[0]):
        for j in range(u.shape[1]):
            header.extend((f"re_{i}{j}", f"im_{i}{j}"))
    flat = []
    for i in range(u.shape[0]):
        for j in range(u.shape[1]):
            flat.extend((u[i, j].real, u[i, j].imag))
    scalars = {
        "fidelity": result.fidelity,
        "addressed_lower": result.addressed[0],
        "addressed_upper": result.addressed[1],
        "step_count": result.step_count,
    }
    return scalars, {"unitary.csv": _csv_bytes(header, [flat])}


def _run_emission_spectrum(params, _ctx):
    node = params["model"]
    modes = tuple(
        vibronic.VibronMode(
            frequency=_angular(m["frequency"], "model.vibron_modes.frequency"),
            huang_rhys=float(m["huang_rhys"]),
            relaxation_rate=_angular(m["relaxation_rate"], "model.vibron_modes.relaxation_rate"),
        )
        for m in node.get("vibron_modes", ())
    )
    density_node = node.get("phonon_density")
    try:
        model = vibronic.VibronicModel(
            zpl_frequency=_angular(node["zpl_frequency"], "model.zpl_frequency"),
            radiative_rate=_angular(node["radiative_rate"], "model.radiative_rate"),
            vibron_modes=modes,
            phonon_density=(
                _phonon_density(density_node, "model.phonon_density")
                if density_node
                else None
            ),
            temperature=_in_unit(node["temperature"], Unit.KELVIN, "model.temperature"),
            extra_linewidth=(
                _angular(node["extra_linewidth"], "model.extra_linewidth")
                if "extra_linewidth" in node
                else 0.0
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"at model: {exc}") from None
    grid = _grid(params["grid"], "grid")
    spectrum = vibronic.emission_spectrum(model, grid)
    scalars = {
        "debye_waller": vibronic.debye_waller(model),
        "zpl_branching_ratio": vibronic.zpl_branching_ratio(model),
        "zpl_linewidth_hz": model.zpl_linewidth / _TWO_PI,
    }
    artifact = _csv_bytes(
        ("frequency_hz", "normalized_intensity"),
        zip(spectrum.frequencies / _TWO_PI, spectrum.intensity),
    )
    return scalars, {"spectrum.csv": artifact}


def _run_relaxation_classify(params, _ctx):
    try:
        data = relaxation.RelaxationInput(
            vibron_frequency=_angular(params["vibron_frequency"], "vibron_frequency"),
            phonon_cutoff=_angular(params["phonon_cutoff"], "phonon_cutoff"),
            other_vibrons=tuple(
                _angular(w, "other_vibrons") for w in params.get("other_vibrons", ())
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"at parameters: {exc}") from None
    channel = relaxation.classify_relaxation(data)
    scalars = {"channel": channel.value, "two_phonon_rate": 0.0}
    if "rate_model" in params and channel is relaxation.RelaxationChannel.TWO_PHONON:
        rm = params["rate_model"]
        scalars["two_phonon_rate"] = relaxation.two_phonon_rate(
            data.vibron_frequency,
            _phonon_density(rm["density"], "rate_model.density"),
            coupling=float(rm["coupling"]),
            temperature=_in_unit(rm["temperature"], Unit.KELVIN, "rate_model.temperature"),
        )
    return scalars, {}


def _run_lindblad(params, _ctx):
    system = _two_level(params["system"])
    stop = _in_unit(params["times"]["stop"], Unit.SECOND, "times.stop")
    points = int(params["times"]["points"])
    if stop <= 0.0:
        raise ConfigError("times.stop must be positive")
    times = np.linspace(0.0, stop, points)
    rho0 = (
        np.diag([1.0, 0.0]).astype(complex)
        if params["initial_state"] == "ground"
        else np.diag([0.0, 1.0]).astype(complex)
    )
    states = dynamics.evolve(system, rho0, times)
    rho_ss = dynamics.steady_state(system)
    rows = [
        (t, s[0, 0].real, s[1, 1].real, s[0, 1].real, s[0, 1].imag)
        for t, s in zip(times, states)
    ]
    scalars = {
        "final_excited_population": states[-1][1, 1].real,
        "steady_excited_population": rho_ss[1, 1].real,
        "max_trace_error": float(
            max(abs(np.trace(s).real - 1.0) for s in states)
        ),
    }
    artifact = _csv_bytes(
        ("time_s", "ground_population", "excited_population", "coherence_re", "coherence_im"),
        rows,
    )
    return scalars, {"trajectory.csv": artifact}


def _run_g2(params, _ctx):
    system = _two_level(params["system"])
    stop = _in_unit(params["taus"]["stop"], Unit.SECOND, "taus.stop")
    points = int(params["taus"]["points"])
    if stop <= 0.0:
        raise ConfigError("taus.stop must be positive")
    taus = np.linspace(0.0, stop, points)
    lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    values = dynamics.g2_correlation(system, lower, taus)
    scalars = {"g2_zero": float(values[0]), "g2_final": float(values[-1])}
    return scalars, {"g2.csv": _csv_bytes(("tau_s", "g2"), zip(taus, values))}


def _run_raman_memory(params, _ctx):
    def pulse(node, where):
        return protocols.Pulse(
            peak_rabi=_angular(node["peak_rabi"], f"{where}.peak_rabi"),
            center=_in_unit(node["center"], Unit.SECOND, f"{where}.center"),
            width=_in_unit(node["width"], Unit.SECOND, f"{where}.width"),
        )

    spec = protocols.RamanMemorySpec(
        gamma0=_angular(params["gamma0"], "gamma0"),
        kappa_v=_angular(params["kappa_v"], "kappa_v"),
        detuning=_angular(params["detuning"], "detuning"),
        signal_pulse=pulse(params["signal_pulse"], "signal_pulse"),
        control_pulse=pulse(params["control_pulse"], "control_pulse"),
        storage_hold=_in_unit(params["storage_hold"], Unit.SECOND, "storage_hold"),
    )
    storage, total = protocols.raman_memory_efficiency(spec)
    return {"storage_efficiency": storage, "total_efficiency": total}, {}


def _run_cavity_interface(params, _ctx):
    spec = protocols.CavityInterfaceSpec(
        g=_angular(params["g"], "g"),
        kappa=_angular(params["kappa"], "kappa"),
        kappa_in=_angular(params["kappa_in"], "kappa_in"),
        kappa_out=_angular(params["kappa_out"], "kappa_out"),
        gamma=_angular(params["gamma"], "gamma"),
        emitter_coupled=bool(params.get("emitter_coupled", True)),
    )
    grid = _grid(params["grid"], "grid")
    detunings = grid.frequencies
    reflection, transmission = protocols.cavity_response(spec, detunings)
    reflectance = np.abs(reflection) ** 2
    transmittance = np.abs(transmission) ** 2
    loss = 1.0 - reflectance - transmittance
    r0, t0 = protocols.cavity_response(spec, 0.0)
    scalars = {
        "cooperativity": spec.cooperativity,
        "on_resonance_reflectance": float(abs(r0[0]) ** 2),
        "on_resonance_transmittance": float(abs(t0[0]) ** 2),
        "spin_photon_fidelity": protocols.spin_photon_fidelity(spec),
    }
    artifact = _csv_bytes(
        ("detuning_hz", "reflectance", "transmittance", "loss"),
        zip(detunings / _TWO_PI, reflectance, transmittance, loss),
    )
    return scalars, {"response.csv": artifact}


def _run_optomech(params, _ctx):
    p = protocols.OptomechParams(
        g0=_angular(params["g0"], "g0"),
        omega_v=_angular(params["omega_v"], "omega_v"),
        kappa_v=_angular(params["kappa_v"], "kappa_v"),
        gamma0=_angular(params["gamma0"], "gamma0"),
        temperature=_in_unit(params["temperature"], Unit.KELVIN, "temperature"),
    )
    n_bar = params.get("n_bar")
    result = protocols.optomech_cooperativity(p, None if n_bar is None else float(n_bar))
    scalars = {
        "cooperativity": result.cooperativity,
        "thermal_occupation": result.thermal_occupation,
        "ultrastrong": result.ultrastrong,
    }
    return scalars, {}


def _run_screening(params, ctx):
    raw = Path(params["input_csv"])
    path = raw if raw.is_absolute() else ctx["config_dir"] / raw
    result = screening.ingest(path)
    crit_node = params.get("criteria", {})
    criteria = screening.SelectionCriteria(
        min_t1_ev=float(crit_node.get("min_t1_ev", screening.DEFAULT_MIN_T1_EV)),
        max_s1_ev=float(crit_node.get("max_s1_ev", screening.DEFAULT_MAX_S1_EV)),
    )
    chosen = screening.select_candidates(result, criteria)
    fit = screening.fit_linear_scaling(result)
    scalars = {
        "record_count": len(result),
        "rejected_count": len(result.rejected),
        "candidate_count": len(chosen),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
    }
    artifact = _csv_bytes(
        screening.CSV_COLUMNS,
        (
            (r.name, r.carbon_count, r.e_s1_ev, r.e_t1_ev, r.centrosymmetric)
            for r in chosen
        ),
    )
    return scalars, {"candidates.csv": artifact}


_RUNNERS = {
    "spin_spectrum": _run_spin_spectrum,
    "odmr": _run_odmr,
    "crot": _run_crot,
    "emission_spectrum": _run_emission_spectrum,
    "relaxation_classify": _run_relaxation_classify,
    "lindblad": _run_lindblad,
    "g2": _run_g2,
    "raman_memory": _run_raman_memory,
    "cavity_interface": _run_cavity_interface,
    "optomech": _run_optomech,
    "screening": _run_screening,
}


# --- sweep plumbing and the driver ------------------------------------------


def _invoke(runner, params, ctx):
    # Constructor ValueErrors at this point come from config-derived values.
    try:
        return runner(params, ctx)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _set_path(tree: dict, dotted: str, value):
    tokens = dotted.split(".")
    node = tree
    for tok in tokens[:-1]:
        if isinstance(node, list):
            try:
                node = node[int(tok)]
            except (ValueError, IndexError):
                raise ConfigError(f"sweep parameter path {dotted!r} does not resolve")
        elif isinstance(node, dict) and tok in node:
            node = node[tok]
        else:
            raise ConfigError(f"sweep parameter path {dotted!r} does not resolve")
    leaf = tokens[-1]
    if isinstance(node, list):
        try:
            node[int(leaf)] = value
        except (ValueError, IndexError):
            raise ConfigError(f"sweep parameter path {dotted!r} does not resolve")
    elif isinstance(node, dict) and leaf in node:
        node[leaf] = value
    else:
        raise ConfigError(f"sweep parameter path {dotted!r} does not resolve")


def _atomic_write(path: Path, data: bytes):
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("wb") as handle:
        handle.write(data)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, path)


def load_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such config file: {path}")
    try:
        with path.open() as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


def run_scenario(
    config: dict,
    config_dir,
    output_dir=None,
    threads: int = 1,
) -> Path:
    """Validate and execute one scenario; returns the output directory.

    The manifest plus all artifacts are staged in memory and written
    atomically at the end, so a failing run leaves no partial artifact
    behind.
    """
    validate_config(config)
    kind = config["scenario_kind"]
    seed = int(config.get("seed", 0))
    out = Path(output_dir) if output_dir else Path(config.get("output_dir", "."))
    if not out.is_absolute():
        out = Path(config_dir) / out
    ctx = {"config_dir": Path(config_dir), "seed": seed}
    runner = _RUNNERS[kind]

    files: dict[str, bytes] = {}
    sweep = config.get("sweep")
    if sweep:
        dotted = sweep["parameter"]
        # Resolve once against the pristine parameters so bad paths fail
        # before any computation.
        probe = copy.deepcopy(config["parameters"])
        _set_path(probe, dotted, sweep["values"][0])

        def run_point(value):
            point = copy.deepcopy(config)
            _set_path(point["parameters"], dotted, value)
            validate_config(point)
            scalars, _ = _invoke(runner, point["parameters"], ctx)
            return scalars

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run_point, sweep["values"]))
        else:
            results = [run_point(v) for v in sweep["values"]]
        columns = sorted(results[0])
        rows = [
            [value] + [point[c] for c in columns]
            for value, point in zip(sweep["values"], results)
        ]
        files["sweep.csv"] = _csv_bytes([dotted] + columns, rows)
    else:
        scalars, artifacts = _invoke(runner, config["parameters"], ctx)
        files.update(artifacts)
        files["result.json"] = _json_bytes(
            {k: _json_scalar(v) for k, v in scalars.items()}
        )

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "scenario_kind": kind,
        "seed": seed,
        "artifacts": [
            {
                "name": name,
                "sha256": hashlib.sha256(data).hexdigest(),
                "size_bytes": len(data),
            }
            for name, data in sorted(files.items())
        ],
    }
    out.mkdir(parents=True, exist_ok=True)
    for name, data in sorted(files.items()):
        _atomic_write(out / name, data)
    _atomic_write(out / "manifest.json", _json_bytes(manifest))
    return out
