"""Config-file schema for the command-line front end.

Run configurations are INI files with bracketed sections.  Frequencies,
couplings, dissipation rates and anharmonicities are all entered as angular
frequencies (rad/s); anharmonicity and cross-Kerr entries are converted to
energies internally.  Two unit systems are declared under ``[units]``:

* ``normalized``: all rates relative to a reference frequency of 1 (the
  convention of the tabulated two- and three-body spectra);
* ``si``: rad/s, required for the circuit commands (equiv, couple, qtable).

Sections:

* ``[modes.mech]``, ``[modes.lf]``, ``[modes.hf]`` - omega, gamma, n_th, N,
  anharmonicity (rad/s).  mech+lf defines a two-body system, adding hf makes
  it three-body.
* ``[couplings]`` - g, chi_LH, and for two-body systems ``rotating_wave``
  (default true) and ``transmon_form`` (default duffing), the conventions
  under which the normalized reference spectra are reproduced.
* ``[drive]`` - mode (name), amplitude (default gamma*1e-3 of that mode).
* ``[sweep]`` - start, stop, points (omit the section for an automatic grid).
* ``[mechanical]`` - mass, spring_constant, plate_area, gap, bias_voltage.
* ``[circuit]`` - C_J, L_J.
* ``[analyze]`` - task plus task-specific numbers (see cli docs).
* ``[qtable]`` - temperature (K), softening_ratio, margin.
* ``[membrane.<label>]`` - frequency plus capacitance or plate_area/gap.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

from scipy.constants import hbar

from .analysis import MembraneSpec
from .electromech import MechanicalSpec
from .model import DriveSpec, ModeSpec, ThreeBodyParams, TwoBodySystem

COMMANDS = ("equiv", "couple", "analyze", "qtable", "spectrum")
SI_ONLY_COMMANDS = ("equiv", "couple", "qtable")
_SI_ONLY_SECTIONS = ("mechanical", "circuit", "qtable")

ANALYZE_TASKS = (
    "min_mech_frequency", "max_chi", "dispersive_nonrwa", "dispersive_rwa",
    "jc_levels", "resonant_modes", "crosskerr_ladder", "hybridize",
    "hf_linewidth",
)


class ConfigError(ValueError):
    """Schema violation in a run configuration."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    units: str
    system: object | None = None          # TwoBodySystem | ThreeBodyParams
    drive: DriveSpec | None = None
    driven_mode_name: str | None = None
    sweep: tuple[float, float, int] | None = None
    mechanical: MechanicalSpec | None = None
    bias_voltage: float | None = None
    circuit: tuple[float, float] | None = None   # (C_J, L_J)
    analyze: dict = field(default_factory=dict)
    qtable: dict = field(default_factory=dict)
    membranes: tuple[MembraneSpec, ...] = ()


def _get(parser, section, key, conv, default=None, required=False):
    if not parser.has_option(section, key):
        if required:
            raise ConfigError(f"section [{section}]: missing required key {key!r}")
        return default
    raw = parser.get(section, key)
    try:
        if conv is bool:
            lowered = raw.strip().lower()
            if lowered in ("true", "yes", "1", "on"):
                return True
            if lowered in ("false", "no", "0", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        return conv(raw)
    except ValueError as err:
        raise ConfigError(f"section [{section}], key {key!r}: {err}") from None


def _reject_unknown_keys(parser, section, allowed):
    for key in parser.options(section):
        if key not in allowed:
            raise ConfigError(f"section [{section}]: unknown key {key!r}")


def _parse_mode(parser, section) -> ModeSpec:
    _reject_unknown_keys(parser, section, {"omega", "gamma", "n_th", "n", "anharmonicity"})
    omega = _get(parser, section, "omega", float, required=True)
    N = _get(parser, section, "n", int, required=True)
    gamma = _get(parser, section, "gamma", float, default=0.0)
    n_th = _get(parser, section, "n_th", float, default=0.0)
    anh = _get(parser, section, "anharmonicity", float, default=0.0)
    try:
        return ModeSpec(omega=omega, N=N, anharmonicity=anh * hbar, gamma=gamma, n_th=n_th)
    except ValueError as err:
        raise ConfigError(f"section [{section}]: {err}") from None


def parse_config(text: str, command: str) -> RunConfig:
    """Parse and validate a run configuration for the given command."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"malformed config: {err}") from None

    if not parser.has_section("units"):
        raise ConfigError("section [units]: missing (declare system = si | normalized)")
    units = _get(parser, "units", "system", str, required=True).strip().lower()
    if units not in ("si", "normalized"):
        raise ConfigError(f"section [units], key 'system': must be si or normalized, got {units!r}")
    if command in SI_ONLY_COMMANDS and units != "si":
        raise ConfigError(f"command {command!r} requires SI units")
    if units == "normalized":
        for sec in _SI_ONLY_SECTIONS:
            if parser.has_section(sec):
                raise ConfigError(
                    f"section [{sec}] takes SI quantities and cannot be mixed "
                    "with normalized units"
                )

    mode_sections = [s for s in parser.sections() if s.startswith("modes.")]
    modes = {}
    for sec in mode_sections:
        name = sec.split(".", 1)[1]
        if name not in ("mech", "lf", "hf"):
            raise ConfigError(f"section [{sec}]: unknown mode name {name!r} "
                              "(expected mech, lf or hf)")
        modes[name] = _parse_mode(parser, sec)

    system = None
    driven_name = None
    drive = None
    if modes:
        if "mech" not in modes or "lf" not in modes:
            raise ConfigError("a system needs at least [modes.mech] and [modes.lf]")
        if not parser.has_section("couplings"):
            raise ConfigError("section [couplings]: missing")
        g = _get(parser, "couplings", "g", float, required=True)
        chi_LH = _get(parser, "couplings", "chi_lh", float, default=0.0)
        if "hf" in modes:
            _reject_unknown_keys(parser, "couplings", {"g", "chi_lh"})
            try:
                system = ThreeBodyParams(hf=modes["hf"], lf=modes["lf"],
                                         mech=modes["mech"], g=g, chi_LH=chi_LH * hbar)
            except ValueError as err:
                raise ConfigError(f"section [couplings]: {err}") from None
            default_driven = "hf"
        else:
            _reject_unknown_keys(parser, "couplings",
                                 {"g", "chi_lh", "rotating_wave", "transmon_form"})
            if chi_LH:
                raise ConfigError("section [couplings]: chi_lh requires a [modes.hf] section")
            rwa = _get(parser, "couplings", "rotating_wave", bool, default=True)
            form = _get(parser, "couplings", "transmon_form", str, default="duffing").strip()
            if form not in ("duffing", "quartic"):
                raise ConfigError(f"section [couplings], key 'transmon_form': "
                                  f"must be duffing or quartic, got {form!r}")
            system = TwoBodySystem(transmon=modes["lf"], mech=modes["mech"], g=g,
                                   transmon_form=form,
                                   coupling="rwa" if rwa else "full")
            default_driven = "lf"

        driven_name = default_driven
        amplitude = None
        if parser.has_section("drive"):
            _reject_unknown_keys(parser, "drive", {"mode", "amplitude"})
            driven_name = _get(parser, "drive", "mode", str, default=default_driven).strip()
            if driven_name not in modes:
                raise ConfigError(f"section [drive], key 'mode': no mode named {driven_name!r}")
            amplitude = _get(parser, "drive", "amplitude", float)
        order = ("hf", "lf", "mech") if "hf" in modes else ("lf", "mech")
        driven_index = order.index(driven_name)
        if amplitude is None:
            amplitude = modes[driven_name].gamma * 1e-3
        try:
            drive = DriveSpec(driven_mode=driven_index, omega_d=0.0, amplitude=amplitude)
        except ValueError as err:
            raise ConfigError(f"section [drive]: {err}") from None

    sweep = None
    if parser.has_section("sweep") and parser.options("sweep"):
        _reject_unknown_keys(parser, "sweep", {"start", "stop", "points"})
        start = _get(parser, "sweep", "start", float, required=True)
        stop = _get(parser, "sweep", "stop", float, required=True)
        points = _get(parser, "sweep", "points", int, default=401)
        if stop <= start:
            raise ConfigError("section [sweep]: stop must exceed start")
        if points < 2:
            raise ConfigError("section [sweep]: points must be >= 2")
        sweep = (start, stop, points)

    mechanical = None
    bias_voltage = None
    if parser.has_section("mechanical"):
        _reject_unknown_keys(parser, "mechanical",
                             {"mass", "spring_constant", "plate_area", "gap", "bias_voltage"})
        try:
            mechanical = MechanicalSpec(
                mass=_get(parser, "mechanical", "mass", float, required=True),
                spring_constant=_get(parser, "mechanical", "spring_constant", float, required=True),
                plate_area=_get(parser, "mechanical", "plate_area", float, required=True),
                gap=_get(parser, "mechanical", "gap", float, required=True),
            )
        except ValueError as err:
            raise ConfigError(f"section [mechanical]: {err}") from None
        bias_voltage = _get(parser, "mechanical", "bias_voltage", float, default=0.0)

    circuit = None
    if parser.has_section("circuit"):
        _reject_unknown_keys(parser, "circuit", {"c_j", "l_j"})
        circuit = (
            _get(parser, "circuit", "c_j", float, required=True),
            _get(parser, "circuit", "l_j", float, required=True),
        )

    analyze = {}
    if parser.has_section("analyze"):
        task = _get(parser, "analyze", "task", str, required=(command == "analyze")).strip()
        if task not in ANALYZE_TASKS:
            raise ConfigError(f"section [analyze], key 'task': unknown task {task!r}")
        analyze["task"] = task
        for key in parser.options("analyze"):
            if key != "task":
                analyze[key] = _get(parser, "analyze", key, float)

    qtable = {}
    membranes = []
    if parser.has_section("qtable"):
        _reject_unknown_keys(parser, "qtable", {"temperature", "softening_ratio", "margin"})
        qtable = {
            "temperature": _get(parser, "qtable", "temperature", float, default=0.020),
            "softening_ratio": _get(parser, "qtable", "softening_ratio", float, default=0.9),
            "margin": _get(parser, "qtable", "margin", float, default=10.0),
        }
    for sec in parser.sections():
        if sec.startswith("membrane."):
            label = sec.split(".", 1)[1]
            _reject_unknown_keys(parser, sec, {"frequency", "capacitance", "plate_area", "gap"})
            mem = MembraneSpec(
                label=label,
                omega_m0=_get(parser, sec, "frequency", float, required=True),
                C_d=_get(parser, sec, "capacitance", float),
                plate_area=_get(parser, sec, "plate_area", float),
                gap=_get(parser, sec, "gap", float),
            )
            try:
                mem.capacitance()
            except ValueError as err:
                raise ConfigError(f"section [{sec}]: {err}") from None
            membranes.append(mem)
    membranes.sort(key=lambda m: m.omega_m0)

    # command-level requirements
    if command in ("equiv", "couple") and mechanical is None:
        raise ConfigError(f"command {command!r} requires a [mechanical] section")
    if command == "couple" and circuit is None:
        raise ConfigError("command 'couple' requires a [circuit] section")
    if command == "qtable" and not membranes:
        raise ConfigError("command 'qtable' requires at least one [membrane.<label>] section")
    if command == "analyze" and "task" not in analyze:
        raise ConfigError("command 'analyze' requires an [analyze] section with a task")
    if command == "spectrum" and system is None:
        raise ConfigError("command 'spectrum' requires [modes.*] and [couplings] sections")

    return RunConfig(
        command=command, units=units, system=system, drive=drive,
        driven_mode_name=driven_name, sweep=sweep, mechanical=mechanical,
        bias_voltage=bias_voltage, circuit=circuit, analyze=analyze,
        qtable=qtable, membranes=tuple(membranes),
    )


def emit_config(config: RunConfig) -> str:
    """Serialize a RunConfig back to INI text (parse/emit round-trips)."""
    parser = configparser.ConfigParser()
    parser["units"] = {"system": config.units}

    def fmt(x):
        return f"{x:.12g}"

    if config.system is not None:
        if isinstance(config.system, ThreeBodyParams):
            mode_map = {"hf": config.system.hf, "lf": config.system.lf,
                        "mech": config.system.mech}
        else:
            mode_map = {"lf": config.system.transmon, "mech": config.system.mech}
        for name in ("mech", "lf", "hf"):
            if name in mode_map:
                m = mode_map[name]
                parser[f"modes.{name}"] = {
                    "omega": fmt(m.omega), "gamma": fmt(m.gamma),
                    "n_th": fmt(m.n_th), "n": str(m.N),
                    "anharmonicity": fmt(m.anharmonicity / hbar),
                }
        couplings = {"g": fmt(config.system.g)}
        if isinstance(config.system, ThreeBodyParams):
            couplings["chi_lh"] = fmt(config.system.chi_LH / hbar)
        else:
            couplings["rotating_wave"] = str(config.system.coupling == "rwa").lower()
            couplings["transmon_form"] = config.system.transmon_form
        parser["couplings"] = couplings
        if config.drive is not None:
            parser["drive"] = {"mode": config.driven_mode_name,
                               "amplitude": fmt(config.drive.amplitude)}
    if config.sweep is not None:
        start, stop, points = config.sweep
        parser["sweep"] = {"start": fmt(start), "stop": fmt(stop), "points": str(points)}
    if config.mechanical is not None:
        parser["mechanical"] = {
            "mass": fmt(config.mechanical.mass),
            "spring_constant": fmt(config.mechanical.spring_constant),
            "plate_area": fmt(config.mechanical.plate_area),
            "gap": fmt(config.mechanical.gap),
            "bias_voltage": fmt(config.bias_voltage or 0.0),
        }
    if config.circuit is not None:
        parser["circuit"] = {"c_j": fmt(config.circuit[0]), "l_j": fmt(config.circuit[1])}
    if config.analyze:
        parser["analyze"] = {
            k: (v if k == "task" else fmt(v)) for k, v in config.analyze.items()
        }
    if config.qtable:
        parser["qtable"] = {
            "temperature": fmt(config.qtable["temperature"]),
            "softening_ratio": fmt(config.qtable["softening_ratio"]),
            "margin": fmt(config.qtable["margin"]),
        }
    for mem in config.membranes:
        sec = {}
        sec["frequency"] = fmt(mem.omega_m0)
        if mem.C_d is not None:
            sec["capacitance"] = fmt(mem.C_d)
        if mem.plate_area is not None:
            sec["plate_area"] = fmt(mem.plate_area)
        if mem.gap is not None:
            sec["gap"] = fmt(mem.gap)
        parser[f"membrane.{mem.label}"] = sec

    out = io.StringIO()
    parser.write(out)
    return out.getvalue()
