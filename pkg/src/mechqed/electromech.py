"""Equivalent circuit of a voltage-biased parallel-plate mechanical oscillator.

A suspended plate of mass m on a spring k forms a capacitor
C_d(x) = eps0*A/(d - x) against a fixed electrode.  A DC bias V0 pulls the
plate to a static displacement x0 and, for small signals around that
equilibrium, the biased oscillator looks electrically like a capacitor C_d in
parallel with a series L_m-C_m branch resonating at the (softened) mechanical
frequency.  This module solves the static equilibrium, checks stability
against pull-in, and emits the equivalent-circuit element values.

SI units throughout: kg, N/m, m, F, H, V, rad/s, K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import epsilon_0, hbar, k as k_B
from scipy.optimize import brentq

# relative tolerance of the static-equilibrium root
_ROOT_RTOL = 1e-13


class PullInError(ValueError):
    """Bias voltage exceeds the pull-in instability of the plate."""

    def __init__(self, V0: float, pull_in: float):
        self.pull_in_voltage = pull_in
        super().__init__(
            f"|V0| = {abs(V0):.6g} V exceeds the pull-in voltage "
            f"{pull_in:.6g} V (effective spring constant would go negative)"
        )


@dataclass(frozen=True)
class MechanicalSpec:
    """Lumped single-mode plate-capacitor oscillator."""

    mass: float            # kg
    spring_constant: float  # N/m
    plate_area: float      # m^2
    gap: float             # m, unbiased plate separation

    def __post_init__(self):
        for name in ("mass", "spring_constant", "plate_area", "gap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def omega_0(self) -> float:
        """Unbiased angular frequency sqrt(k/m)."""
        return math.sqrt(self.spring_constant / self.mass)


@dataclass(frozen=True)
class EquivalentCircuit:
    """C_d in parallel with a series L_m-C_m branch, plus the mechanical data
    behind it.  ``decoupled`` marks the V0 = 0 case where the mechanical
    branch disappears (C_m = 0, L_m = inf)."""

    x0: float          # static displacement, m
    D: float           # rest gap d - x0, m
    C_d: float         # static capacitance, F
    k_eff: float       # effective spring constant, N/m
    C_m: float         # mechanical capacitance, F
    L_m: float         # mechanical inductance, H
    Z_m: float         # mechanical impedance, Ohm
    omega_m_V0: float  # biased angular frequency, rad/s
    omega_m_0: float   # unbiased angular frequency, rad/s
    decoupled: bool = False

    def admittance(self, omega: float) -> complex:
        """Admittance of the equivalent network at angular frequency omega."""
        y_cd = 1j * omega * self.C_d
        if self.decoupled:
            return y_cd
        branch = 1.0 / (1j * omega * self.C_m) + 1j * omega * self.L_m
        return y_cd + 1.0 / branch


def _force_balance(x: float, mech: MechanicalSpec, V0_sq: float) -> float:
    """Spring force minus electrostatic force at displacement x (zero at
    equilibrium).  Strictly increasing on the stable branch x < d/3."""
    return mech.spring_constant * x - 0.5 * V0_sq * epsilon_0 * mech.plate_area / (mech.gap - x) ** 2


def pull_in_voltage(mech: MechanicalSpec) -> float:
    """Largest bias voltage with a stable static equilibrium.

    Found by bisection on the existence of a stable root: the stable branch
    survives exactly while the force balance is still positive at x = d/3,
    which is also where k_eff crosses zero.
    """
    x_star = mech.gap / 3.0

    def margin(V0):
        return _force_balance(x_star, mech, V0 * V0)

    v_hi = 1.0
    while margin(v_hi) > 0:
        v_hi *= 2.0
        if v_hi > 1e12:  # absurd geometry guard
            raise RuntimeError("pull-in bracketing failed")
    return float(brentq(margin, 0.0, v_hi, rtol=1e-15, maxiter=200))


def static_equilibrium(mech: MechanicalSpec, V0: float) -> float:
    """Static displacement x0 under bias V0 (sign of V0 irrelevant).

    Returns the stable root of k*x0 = (V0^2/2) eps0 A / (d - x0)^2, which
    lies below d/3.  Raises :class:`PullInError` above pull-in.
    """
    if V0 == 0:
        return 0.0
    V0_sq = V0 * V0
    x_star = mech.gap / 3.0
    if _force_balance(x_star, mech, V0_sq) <= 0:
        raise PullInError(V0, pull_in_voltage(mech))
    x0 = brentq(
        _force_balance, 0.0, x_star, args=(mech, V0_sq),
        xtol=mech.gap * 1e-16, rtol=_ROOT_RTOL, maxiter=200,
    )
    return float(x0)


def equivalent_circuit(mech: MechanicalSpec, V0: float) -> EquivalentCircuit:
    """Equivalent-circuit element values for bias V0 (strictly below pull-in).

    V0 = 0 yields the decoupled variant with C_m = 0 and L_m = inf.
    """
    x0 = static_equilibrium(mech, V0)
    D = mech.gap - x0
    C_d = epsilon_0 * mech.plate_area / D
    V0_sq = V0 * V0
    k_eff = mech.spring_constant - V0_sq * epsilon_0 * mech.plate_area / D**3
    if k_eff <= 0:
        raise PullInError(V0, pull_in_voltage(mech))
    omega_m_V0 = math.sqrt(k_eff / mech.mass)
    omega_m_0 = mech.omega_0
    if V0 == 0:
        return EquivalentCircuit(
            x0=0.0, D=D, C_d=C_d, k_eff=k_eff,
            C_m=0.0, L_m=math.inf, Z_m=math.inf,
            omega_m_V0=omega_m_V0, omega_m_0=omega_m_0, decoupled=True,
        )
    beta = V0_sq * C_d**2 / D**2  # (V0 C_d / D)^2, the motional conversion factor
    C_m = beta / k_eff
    L_m = mech.mass / beta
    Z_m = math.sqrt(L_m / C_m)
    return EquivalentCircuit(
        x0=x0, D=D, C_d=C_d, k_eff=k_eff,
        C_m=C_m, L_m=L_m, Z_m=Z_m,
        omega_m_V0=omega_m_V0, omega_m_0=omega_m_0, decoupled=False,
    )


def electromechanical_admittance(mech: MechanicalSpec, V0: float, omega: float) -> complex:
    """Linearized small-signal admittance of the biased oscillator, computed
    directly from the coupled equations of motion (not via the network)."""
    x0 = static_equilibrium(mech, V0)
    D = mech.gap - x0
    C_d = epsilon_0 * mech.plate_area / D
    V0_sq = V0 * V0
    k_eff = mech.spring_constant - V0_sq * epsilon_0 * mech.plate_area / D**3
    motional = V0_sq * C_d**2 / D**2 / (k_eff - omega**2 * mech.mass)
    return 1j * omega * C_d + 1j * omega * motional


def thermal_occupation(omega: float, T: float) -> float:
    """Bose-Einstein occupation 1/(exp(hbar*omega/kB*T) - 1).

    T = 0 returns 0 exactly; omega must be positive.
    """
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T}")
    if T == 0:
        return 0.0
    return 1.0 / math.expm1(hbar * omega / (k_B * T))
