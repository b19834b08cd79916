"""System Hamiltonians for the coupled electromechanical circuits.

Two flavors are built here:

* a two-body system, one weakly anharmonic electrical mode (transmon) of
  frequency omega_t' carrying the full un-normal-ordered quartic
  -(A/12)(a + a^dag)^4, charge-coupled to the mechanical mode through
  -hbar*g (a - a^dag)(c - c^dag);
* a three-body system, a high-frequency (HF) readout mode cross-Kerr coupled
  to a low-frequency (LF) mode which is itself charge-coupled to the
  mechanics.  Both electrical anharmonicities enter in the number-conserving
  form -A n(n-1), and the counter-rotating parts of the LF-mechanics coupling
  are kept in the matrix even when analyses drop them.

Hamiltonian matrices are in joules; mode frequencies, couplings and
dissipation rates are angular frequencies (rad/s); anharmonicities and
cross-Kerr strengths are energies (joules).  A weak probe drive and the
transformation to its rotating frame are applied by :func:`rotating_frame`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import e as e_charge, hbar

from .operators import (
    check_dims,
    destroy,
    embed,
    is_hermitian,
    momentum_like,
    number,
    position_like,
)

from .electromech import EquivalentCircuit

# A/(hbar*omega_t') above this is outside the weak-anharmonicity regime
TRANSMON_LIMIT = 1.0 / 20.0


@dataclass(frozen=True)
class ModeSpec:
    """One quantum mode as it enters a simulation."""

    omega: float              # angular frequency, rad/s
    N: int                    # Hilbert-space truncation
    anharmonicity: float = 0.0  # J, 0 for a harmonic mode
    gamma: float = 0.0        # dissipation rate, rad/s
    n_th: float = 0.0         # thermal occupancy of the bath

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"truncation N must be >= 2, got {self.N}")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.n_th < 0:
            raise ValueError("n_th must be >= 0")


@dataclass(frozen=True)
class DriveSpec:
    """Weak coherent probe -i*hbar*amplitude*(a e^{i w_d t} - a^dag e^{-i w_d t})
    on one mode.  The conventional amplitude is gamma*1e-3 of the driven mode,
    small enough not to populate it appreciably."""

    driven_mode: int
    omega_d: float      # rad/s
    amplitude: float    # rad/s

    def __post_init__(self):
        # amplitude 0 is allowed for diagnostics (undriven sweeps)
        if self.amplitude < 0:
            raise ValueError("drive amplitude must be >= 0")

    @classmethod
    def probe(cls, mode: ModeSpec, driven_mode: int, omega_d: float = 0.0) -> "DriveSpec":
        """Default probe at 1e-3 of the driven mode's linewidth."""
        return cls(driven_mode=driven_mode, omega_d=omega_d, amplitude=mode.gamma * 1e-3)

    def at(self, omega_d: float) -> "DriveSpec":
        return DriveSpec(self.driven_mode, omega_d, self.amplitude)


@dataclass(frozen=True)
class TwoBodyParams:
    """Quantized parameters of the transmon + biased-oscillator circuit."""

    omega_t_prime: float  # 1/sqrt(L_J C_t), rad/s
    omega_m_prime: float  # renormalized mechanical frequency, rad/s
    g: float              # electromechanical coupling, rad/s
    A: float              # charging energy e^2/2C_t, J
    C_t: float            # F
    C_J: float            # F
    C_d: float            # F
    L_J: float            # H
    decoupled: bool = False

    @property
    def omega_t(self) -> float:
        """First transition frequency of the transmon, omega_t' - A/hbar."""
        return self.omega_t_prime - self.A / hbar

    @property
    def Delta(self) -> float:
        return self.omega_t_prime - self.omega_m_prime

    @property
    def Sigma(self) -> float:
        return self.omega_t_prime + self.omega_m_prime

    @property
    def in_transmon_limit(self) -> bool:
        return self.A <= TRANSMON_LIMIT * hbar * self.omega_t_prime


@dataclass(frozen=True)
class TwoBodySystem:
    """Simulation-level two-body description: transmon and mechanical mode
    specs plus their coupling.  Mode order is (transmon, mech).

    ``transmon_form`` selects how the anharmonicity enters:

    * ``"quartic"``: the raw junction expansion -(A/12)(a + a^dag)^4.  This is
      the honest circuit-quantization form, but it is only meaningful at small
      truncation (the quartic is unbounded below) and its first transition
      sits at omega - A/hbar plus higher-order shifts.
    * ``"duffing"``: the number-conserving form -(A/2) a^dag a^dag a a, whose
      first transition is at omega exactly and successive transitions step
      down by A/hbar.  This is the form under which the tabulated normalized
      spectra reproduce the closed-form ladder predictions.

    ``coupling`` selects the charge coupling: ``"full"`` keeps the
    counter-rotating terms of -hbar g (a - a^dag)(c - c^dag); ``"rwa"`` keeps
    only the excitation-conserving part hbar g (a c^dag + a^dag c), which is
    the only form that stays exactly time-independent when both modes are
    rotated to the drive frame (and is stable at any g < omega).
    """

    transmon: ModeSpec
    mech: ModeSpec
    g: float  # rad/s
    transmon_form: str = "quartic"
    coupling: str = "full"

    def __post_init__(self):
        if self.transmon_form not in ("quartic", "duffing"):
            raise ValueError(f"unknown transmon_form {self.transmon_form!r}")
        if self.coupling not in ("full", "rwa"):
            raise ValueError(f"unknown coupling {self.coupling!r}")

    @property
    def dims(self) -> tuple[int, int]:
        return (self.transmon.N, self.mech.N)

    @property
    def modes(self) -> tuple[ModeSpec, ...]:
        return (self.transmon, self.mech)


@dataclass(frozen=True)
class ThreeBodyParams:
    """Three-body description: HF readout mode, LF electrical mode and the
    mechanical oscillator.  Mode order is (hf, lf, mech)."""

    hf: ModeSpec
    lf: ModeSpec
    mech: ModeSpec
    g: float        # LF-mechanics coupling, rad/s
    chi_LH: float   # LF-HF cross-Kerr, J

    def __post_init__(self):
        # For a single-junction circuit the cross-Kerr is tied to the two
        # anharmonicities; regime studies routinely break the relation, so
        # flag it instead of refusing to build.
        A_H, A_L = self.hf.anharmonicity, self.lf.anharmonicity
        if A_H > 0 and A_L > 0 and self.chi_LH > 0:
            expected = 2.0 * math.sqrt(A_H * A_L)
            if abs(self.chi_LH - expected) > 1e-6 * expected:
                warnings.warn(
                    f"chi_LH = {self.chi_LH:.6g} J is inconsistent with "
                    f"2*sqrt(A_H*A_L) = {expected:.6g} J",
                    stacklevel=2,
                )

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.hf.N, self.lf.N, self.mech.N)

    @property
    def modes(self) -> tuple[ModeSpec, ...]:
        return (self.hf, self.lf, self.mech)


def quantize_two_body(equiv: EquivalentCircuit, C_J: float, L_J: float) -> TwoBodyParams:
    """Quantize the equivalent circuit shunted by a junction (C_J, L_J).

    The transmon sees the total capacitance C_t = C_J + C_d; the mechanical
    frequency is renormalized by the capacitive loading,
    omega_m' = omega_m^V0 * sqrt((C_m + C_t)/C_t); and the coupling follows
    from the frequency-softening ratio r = omega_m^V0/omega_m^0:

        g = sqrt(omega_m' omega_t')/2 * sqrt((1 - r^2)/(1 + (C_J/C_d) r^2))

    A circuit built at V0 = 0 comes back with g = 0 and the decoupled flag.
    """
    if C_J <= 0 or L_J <= 0:
        raise ValueError("C_J and L_J must be strictly positive")
    C_t = C_J + equiv.C_d
    omega_t_prime = 1.0 / math.sqrt(L_J * C_t)
    A = e_charge**2 / (2.0 * C_t)
    omega_m_prime = equiv.omega_m_V0 * math.sqrt(1.0 + equiv.C_m / C_t)
    r_sq = (equiv.omega_m_V0 / equiv.omega_m_0) ** 2
    if equiv.decoupled:
        g = 0.0
    else:
        g = 0.5 * math.sqrt(omega_m_prime * omega_t_prime) * math.sqrt(
            (1.0 - r_sq) / (1.0 + (C_J / equiv.C_d) * r_sq)
        )
    return TwoBodyParams(
        omega_t_prime=omega_t_prime,
        omega_m_prime=omega_m_prime,
        g=g,
        A=A,
        C_t=C_t,
        C_J=C_J,
        C_d=equiv.C_d,
        L_J=L_J,
        decoupled=equiv.decoupled,
    )


def _check_hermitian(H, context: str):
    if not is_hermitian(H, tol=1e-12):
        raise AssertionError(f"{context} produced a non-Hermitian matrix")


def build_two_body_hamiltonian(system: TwoBodySystem, dims=None):
    """Two-body Hamiltonian (J), mode order (transmon, mech).

    In its default form ("quartic" transmon, "full" coupling) this is

        H = hbar w_t' a^dag a - (A/12)(a + a^dag)^4
          + hbar w_m' c^dag c - hbar g (a - a^dag)(c - c^dag)

    with the quartic applied exactly as written (not normal-ordered).  See
    :class:`TwoBodySystem` for the "duffing" / "rwa" variants used by the
    normalized spectrum reproductions.
    """
    dims = check_dims(dims if dims is not None else system.dims)
    if len(dims) != 2:
        raise ValueError("two-body system requires exactly 2 modes")
    N_t, N_m = dims
    t, m = system.transmon, system.mech

    if system.transmon_form == "quartic":
        x_t = position_like(N_t)
        quartic = np.linalg.matrix_power(x_t, 4)
        h_t = hbar * t.omega * number(N_t) - (t.anharmonicity / 12.0) * quartic
    else:
        ns = np.arange(N_t, dtype=float)
        h_t = np.diag(hbar * t.omega * ns - 0.5 * t.anharmonicity * ns * (ns - 1)).astype(complex)
    h_m = hbar * m.omega * number(N_m)

    H = embed(h_t, 0, dims)
    H = H + embed(h_m, 1, dims)
    if system.coupling == "full":
        H = H - hbar * system.g * (
            embed(momentum_like(N_t), 0, dims) @ embed(momentum_like(N_m), 1, dims)
        )
    else:
        a = embed(destroy(N_t), 0, dims)
        c = embed(destroy(N_m), 1, dims)
        H = H + hbar * system.g * (a @ c.conj().T + a.conj().T @ c)
    _check_hermitian(H, "build_two_body_hamiltonian")
    return H


def build_three_body_hamiltonian(params: ThreeBodyParams, dims=None):
    """Three-body Hamiltonian (J), mode order (hf, lf, mech):

        H = hbar w_H a^dag a - A_H a^dag a^dag a a
          + hbar w_L b^dag b - A_L b^dag b^dag b b + hbar w_m c^dag c
          - hbar g (b - b^dag)(c - c^dag) - chi_LH a^dag a b^dag b
    """
    dims = check_dims(dims if dims is not None else params.dims)
    if len(dims) != 3:
        raise ValueError("three-body system requires exactly 3 modes")
    N_H, N_L, N_m = dims
    hf, lf, mech = params.hf, params.lf, params.mech

    def anharmonic_ladder(mode: ModeSpec, n: int) -> np.ndarray:
        # hbar w n - A n(n-1), diagonal in the Fock basis
        ns = np.arange(n, dtype=float)
        return np.diag(hbar * mode.omega * ns - mode.anharmonicity * ns * (ns - 1)).astype(complex)

    H = embed(anharmonic_ladder(hf, N_H), 0, dims)
    H = H + embed(anharmonic_ladder(lf, N_L), 1, dims)
    H = H + embed(hbar * mech.omega * number(N_m), 2, dims)
    H = H - hbar * params.g * (embed(momentum_like(N_L), 1, dims) @ embed(momentum_like(N_m), 2, dims))
    H = H - params.chi_LH * (embed(number(N_H), 0, dims) @ embed(number(N_L), 1, dims))
    _check_hermitian(H, "build_three_body_hamiltonian")
    return H


def rotating_frame(H, drive: DriveSpec, dims, rotate_modes):
    """Time-independent Hamiltonian in the frame rotating at the drive.

    Returns H + H_dr(0) - hbar*omega_d * sum_{k in rotate_modes} n_k with
    H_dr(0) = -i*hbar*amplitude*(a - a^dag) on the driven mode.  For the
    two-body system both modes rotate, which is what keeps the beam-splitter
    part of the coupling stationary; the three-body frame rotates the HF mode
    only, under which its number-conserving Hamiltonian is exactly invariant.
    """
    dims = check_dims(dims)
    rotate_modes = sorted(set(int(k) for k in rotate_modes))
    if drive.driven_mode not in rotate_modes:
        raise ValueError(
            f"driven mode {drive.driven_mode} must be in rotate_modes {rotate_modes}"
        )
    for k in rotate_modes:
        if not 0 <= k < len(dims):
            raise ValueError(f"rotate mode index {k} out of range")

    out = H
    if drive.amplitude != 0.0:
        p = momentum_like(dims[drive.driven_mode])
        out = out + (-1j * hbar * drive.amplitude) * embed(p, drive.driven_mode, dims)
    if drive.omega_d != 0.0:
        for k in rotate_modes:
            out = out - hbar * drive.omega_d * embed(number(dims[k]), k, dims)
    return out
