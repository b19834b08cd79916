"""Lindblad steady states and drive-frequency sweeps.

Each dissipative mode contributes the pair of collapse operators
sqrt(gamma (1 + n_th)) c and sqrt(gamma n_th) c^dag.  The Liouvillian acts on
the column-stacked density matrix,

    L(rho) = -(i/hbar) [H, rho]
             + sum_k C_k rho C_k^dag - (1/2) {C_k^dag C_k, rho},

and the steady state is obtained from a sparse direct solve of the linear
system in which one row of L is replaced by the unit-trace condition.  A
least-squares fallback covers sizes where the LU factorization becomes the
bottleneck.

Spectra are emulated by sweeping the probe frequency: for every grid point
the rotating-frame Hamiltonian is reassembled, the steady state solved, and
both quadratures of the driven mode recorded (homodyne conventions differ on
which one is plotted, so both are always emitted).  Sweep points are
independent and deterministic in grid order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.constants import hbar

from .model import DriveSpec, ModeSpec, ThreeBodyParams, TwoBodySystem, rotating_frame
from .operators import (
    check_dims,
    create,
    destroy,
    embed,
    expectation,
    momentum_like,
    number,
    position_like,
    total_dim,
)

# default ceiling on the total Hilbert dimension (superoperator memory guard)
MAX_TOTAL_DIM = 128

# total dimension above which the direct LU solve gives way to least squares
_DIRECT_SOLVE_MAX_DIM = 72

# steady-state residual acceptance, relative to ||L||_F
RESIDUAL_RTOL = 1e-10


class SteadyStateError(RuntimeError):
    """Steady-state solve failed or is not trustworthy."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        super().__init__(message)


@dataclass(frozen=True)
class LindbladSystem:
    """Rotating-frame Hamiltonian (J) plus collapse operators with the rates
    folded in (units sqrt(rad/s))."""

    H_rot: object
    collapse_ops: tuple
    dims: tuple[int, ...]


@dataclass
class SpectrumResult:
    """Steady-state quadratures of the driven mode over a drive-frequency grid."""

    omega_d: np.ndarray        # rad/s
    quadrature_re: np.ndarray  # <a + a^dag>
    quadrature_im: np.ndarray  # -i <a - a^dag>
    converged: np.ndarray = field(default=None)

    def __post_init__(self):
        self.omega_d = np.asarray(self.omega_d, dtype=float)
        self.quadrature_re = np.asarray(self.quadrature_re, dtype=float)
        self.quadrature_im = np.asarray(self.quadrature_im, dtype=float)
        if self.converged is None:
            self.converged = np.ones(self.omega_d.shape, dtype=bool)
        self.converged = np.asarray(self.converged, dtype=bool)
        n = len(self.omega_d)
        if not (len(self.quadrature_re) == len(self.quadrature_im) == len(self.converged) == n):
            raise ValueError("grid and value arrays must have equal length")

    @property
    def magnitude(self) -> np.ndarray:
        """|<a>| * 2, a convenient peak-detection signal."""
        return np.hypot(self.quadrature_re, self.quadrature_im)


def collapse_operators(mode: ModeSpec, mode_index: int, dims) -> list:
    """Thermal collapse pair for one mode, embedded in the full space.

    Rates gamma(1+n_th) down and gamma*n_th up; the raising operator is
    omitted at n_th = 0 and everything at gamma = 0.
    """
    dims = check_dims(dims)
    if mode.gamma < 0:
        raise ValueError("gamma must be >= 0")
    if mode.gamma == 0:
        return []
    n = dims[mode_index]
    ops = [np.sqrt(mode.gamma * (1.0 + mode.n_th)) * embed(destroy(n), mode_index, dims)]
    if mode.n_th > 0:
        ops.append(np.sqrt(mode.gamma * mode.n_th) * embed(create(n), mode_index, dims))
    return ops


def liouvillian(system: LindbladSystem, max_total_dim: int = MAX_TOTAL_DIM) -> sp.csr_matrix:
    """Sparse Liouvillian acting on the column-stacked density matrix."""
    dims = check_dims(system.dims)
    d = total_dim(dims)
    if d > max_total_dim:
        raise MemoryError(
            f"total dimension {d} exceeds the superoperator guard {max_total_dim}; "
            "raise max_total_dim explicitly if this size is intended"
        )
    H = sp.csr_matrix(system.H_rot)
    if H.shape != (d, d):
        raise ValueError(f"H has shape {H.shape}, expected {(d, d)}")
    eye = sp.identity(d, dtype=complex, format="csr")

    L = (-1j / hbar) * (sp.kron(eye, H, format="csr") - sp.kron(H.T, eye, format="csr"))
    for C in system.collapse_ops:
        C = sp.csr_matrix(C)
        if C.shape != (d, d):
            raise ValueError(f"collapse operator has shape {C.shape}, expected {(d, d)}")
        CdC = (C.conj().T @ C).tocsr()
        L = L + sp.kron(C.conj(), C, format="csr")
        L = L - 0.5 * (sp.kron(eye, CdC, format="csr") + sp.kron(CdC.T, eye, format="csr"))
    return L.tocsr()


def _trace_replaced_system(L: sp.csr_matrix, d: int):
    """Replace row 0 of L with the (scaled) unit-trace condition."""
    weight = np.mean(np.abs(L.data)) if L.nnz else 1.0
    L_lil = L.tolil(copy=True)
    L_lil[0, :] = 0.0
    for i in range(d):
        L_lil[0, i * d + i] = weight
    b = np.zeros(d * d, dtype=complex)
    b[0] = weight
    return L_lil.tocsc(), b


def steady_state(L: sp.spmatrix, method: str = "auto") -> np.ndarray:
    """Density matrix in the kernel of L, normalized and Hermitized.

    ``method`` is one of ``auto`` (direct below a size threshold, least
    squares above), ``direct`` or ``lsqr``.  Raises
    :class:`SteadyStateError` on a singular factorization or when the
    Lindbladian residual exceeds the acceptance threshold (a degenerate
    kernel shows up the same way).
    """
    L = sp.csr_matrix(L)
    n2 = L.shape[0]
    d = int(round(np.sqrt(n2)))
    if d * d != n2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"L must be square with a perfect-square size, got {L.shape}")

    if method == "auto":
        method = "direct" if d <= _DIRECT_SOLVE_MAX_DIM else "lsqr"

    A, b = _trace_replaced_system(L, d)
    if method == "direct":
        try:
            lu = spla.splu(A)
            x = lu.solve(b)
        except RuntimeError as err:  # singular factorization
            raise SteadyStateError(
                f"direct solve failed ({err}); the steady state may be non-unique"
            ) from err
    elif method == "lsqr":
        x, istop, itn, r1norm = spla.lsqr(A, b, atol=1e-14, btol=1e-14, iter_lim=20 * n2)[:4]
        if istop not in (1, 2):
            raise SteadyStateError(f"lsqr did not converge (istop={istop}, itn={itn})")
    else:
        raise ValueError(f"unknown method {method!r}")

    if not np.all(np.isfinite(x)):
        raise SteadyStateError("solution contains non-finite entries; L is singular "
                               "beyond the trace condition (degenerate kernel?)")

    norm_L = spla.norm(L)
    residual = float(np.linalg.norm(L @ x))
    scale = norm_L if norm_L > 0 else 1.0
    if residual > RESIDUAL_RTOL * scale * max(1.0, float(np.linalg.norm(x))):
        raise SteadyStateError(
            f"steady-state residual {residual:.3e} exceeds {RESIDUAL_RTOL:.1e} * ||L|| "
            f"= {RESIDUAL_RTOL * scale:.3e}; kernel may be degenerate",
            residual=residual,
        )

    rho = x.reshape((d, d), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return rho


def _system_pieces(system):
    """(H_lab, modes, dims, rotate_modes, default driven mode) per system type."""
    from .model import build_three_body_hamiltonian, build_two_body_hamiltonian

    if isinstance(system, TwoBodySystem):
        return (build_two_body_hamiltonian(system), system.modes, system.dims,
                (0, 1), 0)
    if isinstance(system, ThreeBodyParams):
        return (build_three_body_hamiltonian(system), system.modes, system.dims,
                (0,), 0)
    raise TypeError(f"unsupported system type {type(system).__name__}")


def all_collapse_operators(system) -> list:
    _, modes, dims, _, _ = _system_pieces(system)
    ops = []
    for k, mode in enumerate(modes):
        ops.extend(collapse_operators(mode, k, dims))
    return ops


def undriven_steady_state(system, max_total_dim: int = MAX_TOTAL_DIM) -> np.ndarray:
    """Lab-frame steady state with no probe applied."""
    H, _, dims, _, _ = _system_pieces(system)
    lb = LindbladSystem(H_rot=H, collapse_ops=tuple(all_collapse_operators(system)), dims=dims)
    return steady_state(liouvillian(lb, max_total_dim=max_total_dim))


def predict_transition_frequencies(system, driven_mode: int = 0,
                                   min_weight: float = 1e-3,
                                   max_total_dim: int = MAX_TOTAL_DIM) -> np.ndarray:
    """Transition frequencies (rad/s) the probe can reveal.

    Dense diagonalization of the undriven Hamiltonian; transitions i -> j are
    weighted by the thermal population of i times the probe matrix element
    |<j|(a - a^dag)|i>|^2, and those above ``min_weight`` of the strongest are
    returned sorted.  Serves as the oracle for sweep peak positions and for
    automatic grid construction.
    """
    H, _, dims, _, _ = _system_pieces(system)
    H = H.toarray() if sp.issparse(H) else np.asarray(H)
    evals, evecs = np.linalg.eigh(H)
    rho0 = undriven_steady_state(system, max_total_dim=max_total_dim)
    pops = np.real(np.einsum("ai,ab,bi->i", evecs.conj(), rho0, evecs))

    p_drive = embed(momentum_like(dims[driven_mode]), driven_mode, dims)
    p_drive = p_drive.toarray() if sp.issparse(p_drive) else p_drive
    elements = np.abs(evecs.conj().T @ p_drive @ evecs) ** 2

    freqs = (evals[None, :] - evals[:, None]) / hbar  # omega_ij = (E_j - E_i)/hbar
    weights = pops[:, None] * elements
    mask = (freqs > 0) & (weights > min_weight * weights.max())
    return np.sort(freqs[mask])


def auto_grid(system, drive: DriveSpec, points: int = 401, padding: float = 5.0) -> np.ndarray:
    """Peak-centered sweep grid with ``padding`` effective linewidths of margin."""
    _, modes, _, _, _ = _system_pieces(system)
    peaks = predict_transition_frequencies(system, driven_mode=drive.driven_mode)
    if peaks.size == 0:
        peaks = np.array([modes[drive.driven_mode].omega])
    width = max(m.gamma * (1.0 + 2.0 * m.n_th) for m in modes)
    if width <= 0:
        width = 1e-3 * float(np.ptp(peaks)) if peaks.size > 1 else 1e-6 * peaks[0]
    lo = peaks.min() - padding * width
    hi = peaks.max() + padding * width
    return np.linspace(lo, hi, points)


def spectrum_sweep(system, drive: DriveSpec | None = None, grid=None,
                   points: int = 401, max_total_dim: int = MAX_TOTAL_DIM,
                   method: str = "auto") -> SpectrumResult:
    """Drive-frequency sweep of the steady-state quadratures.

    ``system`` is a :class:`TwoBodySystem` or :class:`ThreeBodyParams`.
    ``drive`` defaults to the standard weak probe on the electrical mode
    (transmon or HF mode, index 0); its omega_d is overridden per grid point.
    ``grid`` defaults to the automatic peak-centered grid.  Failed points are
    flagged in ``converged`` and left as NaN; the sweep continues.
    """
    H_lab, modes, dims, rotate_modes, default_driven = _system_pieces(system)
    if drive is None:
        drive = DriveSpec.probe(modes[default_driven], default_driven)
    if grid is None:
        grid = auto_grid(system, drive, points=points)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("sweep grid must be nonempty")
    if np.any(np.diff(grid) < 0):
        raise ValueError("sweep grid must be sorted ascending")

    c_ops = tuple(all_collapse_operators(system))
    d = total_dim(dims)

    # L depends affinely on omega_d: precompute the drive-inclusive base at
    # omega_d = 0 and the rotating-frame shift +i[N_rot, rho].
    H_base = rotating_frame(H_lab, drive.at(0.0), dims, rotate_modes)
    L_base = liouvillian(
        LindbladSystem(H_rot=H_base, collapse_ops=c_ops, dims=dims),
        max_total_dim=max_total_dim,
    )
    # H -> H - hbar*omega_d*N_rot adds +i*omega_d*[N_rot, rho] to L
    N_rot = sum(embed(number(dims[k]), k, dims) for k in rotate_modes)
    N_rot = sp.csr_matrix(N_rot)
    eye = sp.identity(d, dtype=complex, format="csr")
    L_shift = 1j * (sp.kron(eye, N_rot, format="csr") - sp.kron(N_rot.T, eye, format="csr"))

    n = dims[drive.driven_mode]
    x_op = embed(position_like(n), drive.driven_mode, dims)
    p_op = embed(momentum_like(n), drive.driven_mode, dims)

    quad_re = np.full(grid.shape, np.nan)
    quad_im = np.full(grid.shape, np.nan)
    converged = np.zeros(grid.shape, dtype=bool)
    for i, omega_d in enumerate(grid):
        L = (L_base + omega_d * L_shift).tocsr()
        try:
            rho = steady_state(L, method=method)
        except SteadyStateError:
            continue
        quad_re[i] = np.real(expectation(rho, x_op))
        quad_im[i] = np.real(-1j * expectation(rho, p_op))
        converged[i] = True
    return SpectrumResult(grid, quad_re, quad_im, converged)
