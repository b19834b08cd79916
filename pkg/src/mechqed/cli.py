"""Command-line front end.

    mechqed <command> --config <file> [--out <path>] [--format csv|report]

Commands:

* ``equiv``    - equivalent circuit of the biased mechanical oscillator
* ``couple``   - quantized two-body circuit parameters
* ``analyze``  - closed-form regime analysis (task selected in [analyze])
* ``qtable``   - quality-factor requirement table for candidate membranes
* ``spectrum`` - driven steady-state sweep, CSV columns
                 omega_d, quad_re, quad_im, converged

Exit codes: 0 success, 2 configuration error, 3 solver failure.  All numbers
are printed with 12 significant digits and field order is fixed, so identical
configs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np
from scipy.constants import hbar

from . import analysis, electromech
from .config import ConfigError, RunConfig, parse_config
from .model import quantize_two_body
from .solver import SpectrumResult, SteadyStateError, spectrum_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _report(title: str, items) -> str:
    lines = [f"# {title}"]
    for key, value in items:
        lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def spectrum_csv(result: SpectrumResult) -> str:
    lines = ["omega_d,quad_re,quad_im,converged"]
    for w, re, im, ok in zip(result.omega_d, result.quadrature_re,
                             result.quadrature_im, result.converged):
        lines.append(f"{w:.12g},{re:.12g},{im:.12g},{int(ok)}")
    return "\n".join(lines) + "\n"


def qtable_csv(rows) -> str:
    lines = ["label,C_d,C_t,L_J,E_J,I_c,g_over_omega,n_th,Q"]
    for r in rows:
        lines.append(",".join([r.label] + [
            _fmt(v) for v in (r.C_d, r.C_t, r.L_J, r.E_J, r.I_c,
                              r.g_over_omega, r.n_th, r.Q_required)
        ]))
    return "\n".join(lines) + "\n"


def qtable_report(rows) -> str:
    out = ["# quality factor requirements"]
    for r in rows:
        out.append(f"[{r.label}]")
        for key, val in (("C_d", r.C_d), ("C_t", r.C_t), ("C_J", r.C_J),
                         ("L_J", r.L_J), ("E_J", r.E_J), ("I_c", r.I_c),
                         ("g_over_omega", r.g_over_omega), ("n_th", r.n_th),
                         ("Q", r.Q_required),
                         ("geometry_dominated", r.geometry_dominated)):
            out.append(f"{key} = {_fmt(val)}")
    return "\n".join(out) + "\n"


def run_equiv(config: RunConfig) -> str:
    eq = electromech.equivalent_circuit(config.mechanical, config.bias_voltage)
    return _report("equivalent circuit", [
        ("bias_voltage", config.bias_voltage),
        ("pull_in_voltage", electromech.pull_in_voltage(config.mechanical)),
        ("x0", eq.x0), ("rest_gap", eq.D), ("C_d", eq.C_d),
        ("k_eff", eq.k_eff), ("C_m", eq.C_m), ("L_m", eq.L_m), ("Z_m", eq.Z_m),
        ("omega_m_biased", eq.omega_m_V0), ("omega_m_unbiased", eq.omega_m_0),
        ("decoupled", eq.decoupled),
    ])


def run_couple(config: RunConfig) -> str:
    eq = electromech.equivalent_circuit(config.mechanical, config.bias_voltage)
    C_J, L_J = config.circuit
    p = quantize_two_body(eq, C_J, L_J)
    return _report("quantized two-body circuit", [
        ("omega_t_prime", p.omega_t_prime), ("omega_t", p.omega_t),
        ("omega_m_prime", p.omega_m_prime), ("g", p.g),
        ("anharmonicity", p.A), ("anharmonicity_over_hbar", p.A / hbar),
        ("C_t", p.C_t), ("C_J", p.C_J), ("C_d", p.C_d), ("L_J", p.L_J),
        ("Delta", p.Delta), ("Sigma", p.Sigma),
        ("in_transmon_limit", p.in_transmon_limit),
        ("decoupled", p.decoupled),
    ])


def _analyze_chi_target(params: dict) -> float:
    """Cross-Kerr target in joules from whichever form the config gave."""
    if "chi_target" in params:
        return params["chi_target"] * hbar
    if "gamma_t" in params:
        return params.get("margin", 10.0) * hbar * params["gamma_t"]
    raise ConfigError("section [analyze]: need chi_target (rad/s) or gamma_t")


def _require(params: dict, *keys) -> list:
    missing = [k for k in keys if k not in params]
    if missing:
        raise ConfigError(f"section [analyze]: task {params['task']!r} needs keys {missing}")
    return [params[k] for k in keys]


def run_analyze(config: RunConfig) -> str:
    p = config.analyze
    task = p["task"]
    if task == "min_mech_frequency":
        (omega_t,) = _require(p, "omega_t_prime")
        chi = _analyze_chi_target(p)
        om0 = analysis.min_mech_frequency(omega_t, chi)
        return _report("minimum mechanical frequency", [
            ("omega_t_prime", omega_t), ("chi_target", chi),
            ("chi_target_over_hbar", chi / hbar),
            ("min_omega_m0", om0), ("min_omega_m0_hz", om0 / (2 * np.pi)),
        ])
    if task == "max_chi":
        omega_m0, omega_t, C_J, C_d = _require(p, "omega_m0", "omega_t_prime", "c_j", "c_d")
        r = analysis.max_chi(omega_m0, omega_t, C_J, C_d)
        return _report("cross-Kerr bound", [
            ("chi_max", r.chi_max), ("chi_max_over_hbar", r.chi_max / hbar),
            ("s_max", r.S_max), ("k_eff_ratio_opt", r.k_eff_ratio_opt),
            ("k_eff_ratio_branch", r.k_eff_ratio_branch),
            ("quality_bound", r.quality_bound),
        ])
    if task == "dispersive_nonrwa":
        gamma_t, n_th = _require(p, "gamma_t", "n_th")
        eq = electromech.equivalent_circuit(config.mechanical, config.bias_voltage)
        params = quantize_two_body(eq, *config.circuit)
        rep = analysis.dispersive_nonrwa(params, gamma_t, n_th)
        return _report("dispersive analysis (no RWA)", [
            ("regime", rep.regime), ("chi_m", rep.chi_m),
            ("chi_m_over_hbar", rep.chi_m / hbar), ("a_m_tilde", rep.A_m_tilde),
            ("gamma_m_eff", rep.gamma_m_eff), ("gamma_t_eff", rep.gamma_t_eff),
            ("delta", rep.Delta), ("sigma", rep.Sigma),
            ("g_over_delta", rep.g_over_Delta),
        ])
    if task == "dispersive_rwa":
        Delta, A, g = _require(p, "delta", "anharmonicity", "g")
        rep = analysis.dispersive_rwa(Delta, A * hbar, g,
                                      gamma_t=p.get("gamma_t", 0.0),
                                      gamma_m=p.get("gamma_m", 0.0),
                                      n_th=p.get("n_th", 0.0))
        return _report("dispersive analysis (RWA)", [
            ("regime", rep.regime), ("chi_m", rep.chi_m),
            ("chi_m_over_hbar", rep.chi_m / hbar), ("a_m", rep.A_m_tilde),
            ("gamma_m_eff", rep.gamma_m_eff), ("gamma_t_eff", rep.gamma_t_eff),
        ])
    if task == "jc_levels":
        omega, g = _require(p, "omega", "g")
        ladder = analysis.jc_levels(omega, g, int(p.get("n_max", 3)))
        items = [("omega", omega), ("g", g),
                 ("resolution_gap", ladder.resolution_gap)]
        for n, (up, dn) in enumerate(zip(ladder.levels_plus, ladder.levels_minus), start=1):
            items.append((f"level_{n}_plus", up))
            items.append((f"level_{n}_minus", dn))
        for i, f in enumerate(analysis.jc_spectrum_peaks(omega, g, int(p.get("n_max", 3)))):
            items.append((f"peak_{i}", f))
        return _report("Jaynes-Cummings ladder", items)
    if task == "resonant_modes":
        omega, g, E_C = _require(p, "omega", "g", "e_c")
        modes = analysis.resonant_normal_modes(omega, g, E_C * hbar,
                                               gamma_t=p.get("gamma_t", 0.0),
                                               gamma_m=p.get("gamma_m", 0.0))
        return _report("resonant normal modes", [
            ("omega_plus", modes.omega_plus), ("omega_minus", modes.omega_minus),
            ("anharmonicity_pm", modes.A_pm), ("cross_kerr", modes.chi),
            ("gamma_pm", modes.gamma_pm),
        ])
    if task == "crosskerr_ladder":
        g, Delta, chi = _require(p, "g", "delta", "chi_lh")
        ladder = analysis.three_body_jc_crosskerr(g, Delta, chi * hbar,
                                                  n_max=int(p.get("n_max", 2)))
        items = [("discriminability", ladder.discriminability)]
        for n, (cp, cm) in enumerate(zip(ladder.chi_plus, ladder.chi_minus), start=1):
            items.append((f"chi_{n}_plus", cp))
            items.append((f"chi_{n}_minus", cm))
        return _report("cross-Kerr ladder", items)
    if task == "hybridize":
        g, Delta, omega_tL, chi = _require(p, "g", "delta", "omega_tl", "chi_lh")
        s = analysis.hybridize(g, Delta, omega_tL, chi * hbar)
        return _report("hybridized modes", [
            ("f", s.f), ("h", s.h), ("omega_1", s.omega_1), ("delta_1", s.Delta_1),
            ("chi_l", s.chi_L), ("chi_m", s.chi_m),
        ])
    if task == "hf_linewidth":
        gamma_tH, gamma_tL, n_th = _require(p, "gamma_th", "gamma_tl", "n_th")
        full = analysis.hf_effective_linewidth(gamma_tH, gamma_tL, n_th,
                                               n_L_avg=p.get("n_l_avg", 0.5))
        return _report("effective HF linewidth", [
            ("gamma_h_eff", full),
            ("gamma_h_eff_hot_bath", gamma_tH + 4.0 * n_th * gamma_tL),
        ])
    raise ConfigError(f"section [analyze]: unhandled task {task!r}")


def run_qtable(config: RunConfig, fmt: str) -> str:
    q = config.qtable or {"temperature": 0.020, "softening_ratio": 0.9, "margin": 10.0}
    rows = analysis.requirements_table(
        config.membranes, T=q["temperature"], r=q["softening_ratio"], margin=q["margin"],
    )
    return qtable_csv(rows) if fmt == "csv" else qtable_report(rows)


def run_spectrum(config: RunConfig) -> str:
    grid = None
    if config.sweep is not None:
        start, stop, points = config.sweep
        grid = np.linspace(start, stop, points)
    result = spectrum_sweep(config.system, drive=config.drive, grid=grid)
    return spectrum_csv(result)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mechqed",
        description="Voltage-biased electromechanics: circuits, requirements and spectra",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("equiv", "couple", "analyze", "qtable", "spectrum"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="run configuration file")
        cmd.add_argument("--out", default=None, help="output path (default stdout)")
        cmd.add_argument("--format", default=None, choices=("csv", "report"))
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        print(f"error: cannot read config: {err}", file=sys.stderr)
        return EXIT_CONFIG

    fmt = args.format
    try:
        config = parse_config(text, args.command)
        if args.command == "spectrum":
            if fmt == "report":
                raise ConfigError("spectrum output is CSV only")
            output = run_spectrum(config)
        elif args.command == "qtable":
            output = run_qtable(config, fmt or "report")
        else:
            if fmt == "csv":
                raise ConfigError(f"command {args.command!r} emits a report, not CSV")
            output = {"equiv": run_equiv, "couple": run_couple,
                      "analyze": run_analyze}[args.command](config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (SteadyStateError, MemoryError) as err:
        print(f"solver error: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except (electromech.PullInError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(output)
        except OSError as err:
            print(f"error: cannot write output: {err}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        sys.stdout.write(output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
