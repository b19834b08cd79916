"""Closed-form regime results for phonon-number resolution.

Dispersive cross-Kerr formulas (with and without the rotating-wave
approximation), the voltage-tuned upper bound on the cross-Kerr and the
minimum mechanical frequency it implies, Jaynes-Cummings ladders, resonant
normal modes, the three-body hybridization formulas, effective linewidths,
and the quality-factor requirement table for candidate mechanical
oscillators.

Conventions: angular frequencies, couplings and dissipation rates in rad/s;
anharmonicities and cross-Kerr strengths in joules.  Regime qualifiers
("much larger") are graded numerically: a ratio of 10 or more is treated as
satisfied, between 3 and 10 as marginal (flagged), below 3 as violated.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import e as e_charge, epsilon_0, hbar
from scipy.optimize import minimize_scalar

from .electromech import thermal_occupation
from .model import TwoBodyParams

# grading of "much greater than" ratios
RATIO_SATISFIED = 10.0
RATIO_MARGINAL = 3.0

REGIME_NON_RWA = "non_rwa"
REGIME_RWA = "rwa"
REGIME_RESONANT = "resonant"
REGIME_INVALID = "invalid"


def classify_regime(omega_t_prime: float, omega_m_prime: float, g: float,
                    A_over_hbar: float = 0.0) -> str:
    """Coarse regime tag from the frequency layout.

    non_rwa: detuning comparable to the frequency sum (far-detuned modes);
    rwa: well separated from both the coupling and the sum; resonant:
    detuning below the coupling scale; invalid: coupling not small against
    the relevant detunings.
    """
    Delta = abs(omega_t_prime - omega_m_prime)
    Sigma = omega_t_prime + omega_m_prime
    if Delta <= max(g, 1e-12 * Sigma) * RATIO_MARGINAL:
        return REGIME_RESONANT
    if g * RATIO_MARGINAL > Delta:
        return REGIME_INVALID
    if Sigma < RATIO_SATISFIED * Delta:
        return REGIME_NON_RWA
    return REGIME_RWA


@dataclass(frozen=True)
class DispersiveReport:
    """Cross-Kerr and effective-linewidth summary of a dispersive analysis."""

    chi_m: float          # J, transmon-spectrum shift per phonon
    A_m_tilde: float      # J, induced mechanical anharmonicity
    gamma_m_eff: float    # rad/s
    gamma_t_eff: float    # rad/s
    regime: str
    Sigma: float = 0.0    # rad/s
    Delta: float = 0.0    # rad/s
    g_over_Delta: float = 0.0
    warnings_: tuple = field(default=())


def dispersive_nonrwa(params: TwoBodyParams, gamma_t: float, n_th: float) -> DispersiveReport:
    """Far-detuned (no-RWA) dispersive analysis of the two-body circuit.

    chi_m = 8 A g^2 w_m'^2 / w_t'^4, the induced mechanical anharmonicity
    A_m = chi_m^2/(4A), and the coupling-induced mechanical linewidth
    4 gamma_t (g/w_t')^2.  Valid when the detuning is comparable to the
    frequency sum and much larger than g.
    """
    w_t, w_m, g, A = params.omega_t_prime, params.omega_m_prime, params.g, params.A
    Delta, Sigma = params.Delta, params.Sigma
    notes = []
    regime = classify_regime(w_t, w_m, g, A / hbar)
    if regime == REGIME_RESONANT or (Delta != 0 and g / abs(Delta) > 0.1):
        if regime == REGIME_RESONANT:
            return DispersiveReport(0.0, 0.0, 0.0, 0.0, REGIME_INVALID,
                                    Sigma, Delta, g / Delta if Delta else math.inf)
        notes.append(f"g/Delta = {g / abs(Delta):.3f} above 0.1, expansion degraded")
    if regime == REGIME_RWA:
        notes.append("Sigma >> Delta; the RWA formulas are the better description")
    chi_m = 8.0 * A * g**2 * w_m**2 / w_t**4
    A_m = chi_m**2 / (4.0 * A) if A > 0 else 0.0
    gamma_m_eff = 4.0 * gamma_t * (g / w_t) ** 2
    gamma_t_eff = (1.0 + 4.0 * n_th) * gamma_t
    return DispersiveReport(chi_m, A_m, gamma_m_eff, gamma_t_eff, REGIME_NON_RWA,
                            Sigma, Delta, g / abs(Delta) if Delta else math.inf,
                            tuple(notes))


def dispersive_rwa(Delta: float, A: float, g: float, gamma_t: float = 0.0,
                   gamma_m: float = 0.0, n_th: float = 0.0) -> DispersiveReport:
    """Dispersive analysis with the RWA, Sigma >> |Delta|, |Delta - A/hbar| >> g.

    Returns the signed cross-Kerr chi_m = 2 A g^2/(Delta (Delta - A/hbar)),
    the induced mechanical anharmonicity chi_m^2/(4A), and the effective
    linewidths gamma_m + gamma_t g^2/(Delta(Delta - A/hbar)) and
    (1 + 4 n_th) gamma_t.
    """
    A_w = A / hbar
    if Delta == 0.0 or Delta == A_w:
        raise ValueError("Delta must not sit on a pole (Delta = 0 or Delta = A/hbar)")
    notes = []
    for name, det in (("Delta", Delta), ("Delta - A/hbar", Delta - A_w)):
        ratio = abs(det) / g if g > 0 else math.inf
        if ratio < RATIO_MARGINAL:
            notes.append(f"|{name}|/g = {ratio:.2f} violates the dispersive condition")
        elif ratio < RATIO_SATISFIED:
            notes.append(f"|{name}|/g = {ratio:.2f} is marginal")
    denom = Delta * (Delta - A_w)
    chi_m = 2.0 * A * g**2 / denom
    A_m = chi_m**2 / (4.0 * A) if A > 0 else 0.0
    gamma_m_eff = gamma_m + gamma_t * g**2 / denom
    gamma_t_eff = (1.0 + 4.0 * n_th) * gamma_t
    return DispersiveReport(chi_m, A_m, gamma_m_eff, gamma_t_eff, REGIME_RWA,
                            Delta=Delta, g_over_Delta=g / abs(Delta),
                            warnings_=tuple(notes))


def coupling_shape_factor(k_eff_ratio, C_J: float, C_d: float):
    """Dimensionless factor S through which the spring softening and the
    capacitance split control the attainable cross-Kerr:

        S = sqrt(C_d^2 (k - k_eff)^2 (C_d k + C_J k_eff) / ((C_J + C_d)^3 k^3))

    expressed in terms of u = k_eff/k.  Vectorized over ``k_eff_ratio``.
    """
    u = np.asarray(k_eff_ratio, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise ValueError("k_eff/k must lie in [0, 1]")
    val = np.sqrt(C_d**2 * (1.0 - u) ** 2 * (C_d + C_J * u) / (C_J + C_d) ** 3)
    return val if val.shape else float(val)


@dataclass(frozen=True)
class MaxChiResult:
    chi_max: float            # J, bound on the cross-Kerr
    S_max: float              # maximizing value of the shape factor
    k_eff_ratio_opt: float    # numerically maximizing k_eff/k
    k_eff_ratio_branch: float  # analytic branch point (0 or interior)
    quality_bound: float      # ceiling on 1/Q_t for mechanical-spectrum resolution


def max_chi(omega_m0: float, omega_t_prime: float, C_J: float, C_d: float) -> MaxChiResult:
    """Upper bound on the cross-Kerr attainable by voltage tuning.

    chi_m never exceeds (hbar w_t'/10)(w_m0/w_t')^3 * max S, with S maximized
    numerically over the softened spring constant (the printed closed form
    for the interior branch is not reproduced by substitution, so the scan is
    authoritative).  The analytic branch point is k_eff = 0 when C_J < 2 C_d
    and k_eff/k = (C_J - 2 C_d)/(3 C_J) otherwise.

    Also reported: the companion ceiling (1/20)(w_m0/w_t')^5 on the inverse
    transmon quality factor for resolving the mechanical spectrum instead.
    """
    if min(omega_m0, omega_t_prime, C_J, C_d) <= 0:
        raise ValueError("all inputs must be strictly positive")
    res = minimize_scalar(
        lambda u: -coupling_shape_factor(u, C_J, C_d),
        bounds=(0.0, 1.0), method="bounded",
        options={"xatol": 1e-14},
    )
    # the maximum can sit on the u = 0 edge, which bounded search never
    # samples exactly
    u_opt = float(res.x)
    S_edge = float(coupling_shape_factor(0.0, C_J, C_d))
    S_opt = float(-res.fun)
    if S_edge >= S_opt:
        u_opt, S_opt = 0.0, S_edge
    branch = 0.0 if C_J < 2.0 * C_d else (C_J - 2.0 * C_d) / (3.0 * C_J)
    chi_bound = (hbar * omega_t_prime / 10.0) * (omega_m0 / omega_t_prime) ** 3 * S_opt
    q_bound = (1.0 / 20.0) * (omega_m0 / omega_t_prime) ** 5
    return MaxChiResult(chi_bound, S_opt, u_opt, branch, q_bound)


def min_mech_frequency(omega_t_prime: float, chi_target: float) -> float:
    """Smallest unbiased mechanical frequency compatible with a cross-Kerr
    target, from the theoretical optimum chi < (hbar w_t'/10)(w_m0/w_t')^3."""
    if chi_target <= 0 or omega_t_prime <= 0:
        raise ValueError("inputs must be strictly positive")
    return omega_t_prime * (10.0 * chi_target / (hbar * omega_t_prime)) ** (1.0 / 3.0)


@dataclass(frozen=True)
class JcLadder:
    """Eigen-ladder of a resonant qubit-oscillator pair, ground state at 0."""

    omega: float                 # rad/s
    g: float                     # rad/s
    levels_plus: np.ndarray      # n*omega + sqrt(n)*g, n = 1..n_max
    levels_minus: np.ndarray     # n*omega - sqrt(n)*g
    resolution_gap: float        # g*(2 - sqrt(2))


def jc_levels(omega: float, g: float, n_max: int) -> JcLadder:
    """Jaynes-Cummings eigenfrequencies n*omega +- sqrt(n)*g for n = 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    n = np.arange(1, n_max + 1, dtype=float)
    return JcLadder(
        omega=omega, g=g,
        levels_plus=n * omega + np.sqrt(n) * g,
        levels_minus=n * omega - np.sqrt(n) * g,
        resolution_gap=g * (2.0 - math.sqrt(2.0)),
    )


def jc_spectrum_peaks(omega: float, g: float, n_max: int = 2) -> np.ndarray:
    """Probe frequencies of the ladder transitions |n-1,+-> -> |n,+->, i.e.
    omega +- (sqrt(n) - sqrt(n-1)) g, sorted ascending."""
    ladder = jc_levels(omega, g, n_max)
    up = np.concatenate(([0.0], ladder.levels_plus))
    dn = np.concatenate(([0.0], ladder.levels_minus))
    return np.sort(np.concatenate((np.diff(up), np.diff(dn))))


@dataclass(frozen=True)
class ResonantModes:
    """Hybridized electromechanical modes of a resonant pair with g >> A/hbar."""

    omega_plus: float    # rad/s
    omega_minus: float   # rad/s
    A_pm: float          # J, anharmonicity of each mode (E_C/4)
    chi: float           # J, cross-Kerr between the modes (E_C/2)
    gamma_pm: float      # rad/s, dissipation of each mode


def resonant_normal_modes(omega: float, g: float, E_C: float,
                          gamma_t: float = 0.0, gamma_m: float = 0.0) -> ResonantModes:
    """Resonant strong-hybridization results: mode frequencies
    omega +- g - g^2/(2 omega), anharmonicities E_C/4, cross-Kerr E_C/2 and
    per-mode dissipation (gamma_t + gamma_m)/2.  First order in g/omega; a
    ratio above 0.2 is flagged."""
    if g / omega > 0.2:
        warnings.warn(f"g/omega = {g / omega:.2f} is outside the soft validity "
                      "bound of the first-order mode frequencies", stacklevel=2)
    shift = g**2 / (2.0 * omega)
    return ResonantModes(
        omega_plus=omega + g - shift,
        omega_minus=omega - g - shift,
        A_pm=E_C / 4.0,
        chi=E_C / 2.0,
        gamma_pm=0.5 * (gamma_t + gamma_m),
    )


@dataclass(frozen=True)
class CrossKerrLadder:
    """Phonon-dependent cross-Kerr shifts of the HF mode in the qubit-like
    (strong LF anharmonicity) three-body regime."""

    chi_plus: np.ndarray   # J, chi_LH cos^2(theta_n), n = 1..n_max
    chi_minus: np.ndarray  # J, chi_LH sin^2(theta_n)
    theta: np.ndarray      # mixing angles, rad
    discriminability: float  # J, |chi_{1,+} - chi_{2,+}|


def three_body_jc_crosskerr(g: float, Delta: float, chi_LH: float,
                            n_max: int = 2) -> CrossKerrLadder:
    """Cross-Kerr split over the hybridized LF-mechanics doublets.

    tan(2 theta_n) = -2 g sqrt(n)/Delta; the HF mode shifts by
    chi_LH cos^2(theta_n) against |n,+> and chi_LH sin^2(theta_n) against
    |n,->.  Delta = 0 gives theta = pi/4 exactly (equal split).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    n = np.arange(1, n_max + 1, dtype=float)
    theta = 0.5 * np.arctan2(-2.0 * g * np.sqrt(n), Delta)
    chi_plus = chi_LH * np.cos(theta) ** 2
    chi_minus = chi_LH * np.sin(theta) ** 2
    disc = abs(chi_plus[0] - chi_plus[1]) if n_max >= 2 else 0.0
    return CrossKerrLadder(chi_plus, chi_minus, theta, disc)


@dataclass(frozen=True)
class NormalModeSplit:
    """Hybridization of the LF and mechanical modes when the coupling
    dominates: mixing amplitudes, mode frequencies and the split cross-Kerr."""

    f: float         # LF amplitude in the electrical-like mode
    h: float         # mechanical admixture
    omega_1: float   # rad/s, lower hybridized mode
    Delta_1: float   # rad/s, splitting to the upper mode
    chi_L: float     # J, cross-Kerr to the electrical-like mode
    chi_m: float     # J, cross-Kerr to the mechanical-like mode


def hybridize(g: float, Delta: float, omega_tL: float, chi_LH: float) -> NormalModeSplit:
    """Split of the LF-HF cross-Kerr over the hybridized electromechanical
    modes, chi_L = chi_LH f(g/Delta)^2 and chi_m = chi_LH h(g/Delta)^2 with

        f(x) = (1 + sqrt(1 + 4x^2)) / sqrt(8x^2 + 2(1 + sqrt(1 + 4x^2)))
        h(x) = 2x / sqrt(8x^2 + 2(1 + sqrt(1 + 4x^2)))

    and mode frequencies omega_tL + (Delta/2)(1 -+ sqrt(1 + 4 g^2/Delta^2)).
    Delta = 0 is the symmetric limit f = h = 1/sqrt(2).
    """
    if Delta == 0.0:
        f = h = 1.0 / math.sqrt(2.0)
        omega_1 = omega_tL - abs(g)
        Delta_1 = 2.0 * abs(g)
    else:
        x = g / Delta
        root = math.sqrt(1.0 + 4.0 * x**2)
        denom = math.sqrt(8.0 * x**2 + 2.0 * (1.0 + root))
        f = (1.0 + root) / denom
        h = 2.0 * x / denom
        omega_1 = omega_tL + 0.5 * Delta * (1.0 - root)
        Delta_1 = Delta * root
    if abs(f**2 + h**2 - 1.0) > 1e-12:
        raise AssertionError("hybridization amplitudes must satisfy f^2 + h^2 = 1")
    return NormalModeSplit(f=f, h=h, omega_1=omega_1, Delta_1=Delta_1,
                           chi_L=chi_LH * f**2, chi_m=chi_LH * h**2)


def hf_effective_linewidth(gamma_tH: float, gamma_tL: float, n_th: float,
                           n_L_avg: float = 0.5) -> float:
    """Effective HF linewidth gamma_tH + 2 gamma_tL (<n_L> + (1 + 2<n_L>) n_th).

    With <n_L> = 1/2 and a hot bath this reduces to gamma_tH + 4 n_th gamma_tL.
    """
    if min(gamma_tH, gamma_tL, n_th) < 0 or n_L_avg < 0:
        raise ValueError("inputs must be nonnegative")
    return gamma_tH + 2.0 * gamma_tL * (n_L_avg + (1.0 + 2.0 * n_L_avg) * n_th)


def hf_peaks_qubit_jc(omega_tH: float, g: float, n_max: int = 2) -> np.ndarray:
    """HF-spectrum peak positions omega_tH +- g sqrt(n) when the strongly
    anharmonic LF mode hybridizes with the mechanics as a qubit."""
    n = np.arange(1, n_max + 1, dtype=float)
    return np.sort(np.concatenate((omega_tH - g * np.sqrt(n), omega_tH + g * np.sqrt(n))))


def hf_peaks_crosskerr_dominated(omega_tH: float, chi_LH: float, g: float,
                                 n_L_max: int = 1, n_m_max: int = 2) -> np.ndarray:
    """HF-spectrum peak positions when the cross-Kerr dominates the coupling:
    omega_tH - n_L (chi_LH/hbar - g) - n_m g and
    omega_tH - n_L (chi_LH/hbar + g) + n_m g, deduplicated and sorted."""
    chi_w = chi_LH / hbar
    peaks = set()
    for n_L in range(n_L_max + 1):
        for n_m in range(n_m_max + 1):
            peaks.add(round(omega_tH - n_L * (chi_w - g) - n_m * g, 12))
            peaks.add(round(omega_tH - n_L * (chi_w + g) + n_m * g, 12))
    return np.array(sorted(peaks))


def hf_peaks_hybridized(omega_tH: float, chi_L: float, chi_m: float,
                        n_L_max: int = 1, n_m_max: int = 2) -> np.ndarray:
    """HF-spectrum peak positions omega_tH - (n_L chi_L + n_m chi_m)/hbar for
    the hybridized electromechanical modes."""
    peaks = set()
    for n_L in range(n_L_max + 1):
        for n_m in range(n_m_max + 1):
            peaks.add(round(omega_tH - (n_L * chi_L + n_m * chi_m) / hbar, 12))
    return np.array(sorted(peaks))


@dataclass(frozen=True)
class MembraneSpec:
    """Candidate mechanical oscillator: label, unbiased frequency and either
    its capacitance directly or the plate geometry to compute it."""

    label: str
    omega_m0: float            # rad/s
    C_d: float | None = None   # F
    plate_area: float | None = None  # m^2
    gap: float | None = None   # m

    def capacitance(self) -> float:
        if self.C_d is not None:
            return self.C_d
        if self.plate_area is None or self.gap is None:
            raise ValueError(f"membrane {self.label!r} needs C_d or plate geometry")
        return epsilon_0 * self.plate_area / self.gap


@dataclass(frozen=True)
class RequirementRow:
    """Circuit values and quality-factor requirement for one membrane."""

    label: str
    C_d: float          # F
    C_t: float          # F
    C_J: float          # F
    L_J: float          # H
    E_J: float          # J
    I_c: float          # A
    g_over_omega: float
    n_th: float
    Q_required: float
    geometry_dominated: bool = False


def requirements_table(membranes, T: float = 0.020, r: float = 0.9,
                       margin: float = 10.0) -> list[RequirementRow]:
    """Quality factor needed for thermal strong coupling, per membrane.

    The electrical mode is placed on resonance at the membrane frequency with
    the largest anharmonicity still inside the transmon limit, which fixes
    C_t = 10 e^2/(hbar omega) and L_J = 1/(omega^2 C_t).  The coupling
    follows from the softening ratio r = omega_m^V0/omega_m^0 (default 0.9),
    and the required quality factor makes the coupling ``margin`` times the
    thermally broadened linewidth: Q = margin * 4 n_th * omega / g.
    """
    if not 0.0 < r < 1.0:
        raise ValueError("softening ratio r must lie in (0, 1)")
    if margin <= 0 or T <= 0:
        raise ValueError("margin and temperature must be positive")
    rows = []
    for mem in membranes:
        omega = mem.omega_m0
        C_d = mem.capacitance()
        C_t = 10.0 * e_charge**2 / (hbar * omega)
        geometry_dominated = C_d > C_t
        if geometry_dominated:
            # the membrane alone already exceeds the transmon-limit
            # capacitance; no shunt is added and the anharmonicity shrinks
            C_t = C_d
            C_J = 0.0
        else:
            C_J = C_t - C_d
        L_J = 1.0 / (omega**2 * C_t)
        Phi0 = hbar / (2.0 * e_charge)
        E_J = Phi0**2 / L_J
        I_c = E_J / Phi0
        r_sq = r * r
        g_over = 0.5 * math.sqrt((1.0 - r_sq) / (1.0 + (C_J / C_d) * r_sq))
        n_th = thermal_occupation(omega, T)
        Q = margin * 4.0 * n_th / g_over
        rows.append(RequirementRow(
            label=mem.label, C_d=C_d, C_t=C_t, C_J=C_J, L_J=L_J, E_J=E_J,
            I_c=I_c, g_over_omega=g_over, n_th=n_th, Q_required=Q,
            geometry_dominated=geometry_dominated,
        ))
    return rows
