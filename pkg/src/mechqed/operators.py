"""Truncated-Fock-space operator algebra.

Single-mode ladder operators live in a truncated space of dimension N and are
kept dense (they are always small).  Multimode operators are obtained with
:func:`embed`, which Kronecker-embeds a single-mode operator into the full
tensor-product space and switches to sparse storage once the total dimension
exceeds ``SPARSE_THRESHOLD`` (Liouvillians built on top of these matrices are
sparse-dominated, while small Hamiltonians are cheaper dense).

All matrices are complex double precision.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.sparse as sp

# total dimension above which embedded operators are stored sparse
SPARSE_THRESHOLD = 64

# a density matrix is accepted as positive when its eigenvalues satisfy
# eig >= -PSD_TOL * trace (iterative-solver residual floor)
PSD_TOL = 1e-10

TRACE_WARN_TOL = 1e-8


def check_dims(dims) -> tuple[int, ...]:
    """Validate a list of per-mode truncation sizes and return it as a tuple."""
    dims = tuple(int(n) for n in dims)
    if not dims:
        raise ValueError("dims must contain at least one mode")
    for n in dims:
        if n < 2:
            raise ValueError(f"every mode truncation must be >= 2, got {n}")
    return dims


def total_dim(dims) -> int:
    return int(np.prod(check_dims(dims)))


def destroy(n: int) -> np.ndarray:
    """Bosonic lowering operator on an n-dimensional truncated Fock space."""
    if n < 2:
        raise ValueError(f"truncation size must be >= 2, got {n}")
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)


def create(n: int) -> np.ndarray:
    """Bosonic raising operator, the adjoint of :func:`destroy`."""
    return destroy(n).conj().T


def number(n: int) -> np.ndarray:
    """Number operator diag(0, 1, ..., n-1)."""
    return np.diag(np.arange(n, dtype=float)).astype(complex)


def position_like(n: int) -> np.ndarray:
    """Quadrature combination a + a^dag (unnormalized)."""
    a = destroy(n)
    return a + a.conj().T


def momentum_like(n: int) -> np.ndarray:
    """Quadrature combination a - a^dag (anti-Hermitian, unnormalized)."""
    a = destroy(n)
    return a - a.conj().T


def embed(op, mode_index: int, dims):
    """Kronecker-embed a single-mode operator into the multimode space.

    Returns I (x) ... (x) op (x) ... (x) I with ``op`` acting on mode
    ``mode_index`` and identities elsewhere, in the mode order given by
    ``dims``.  Dense below ``SPARSE_THRESHOLD`` total dimension, CSR sparse
    above.
    """
    dims = check_dims(dims)
    if not 0 <= mode_index < len(dims):
        raise ValueError(f"mode_index {mode_index} out of range for {len(dims)} modes")
    op = np.asarray(op, dtype=complex) if not sp.issparse(op) else op
    if op.shape[0] != op.shape[1]:
        raise ValueError(f"operator must be square, got shape {op.shape}")
    if op.shape[0] != dims[mode_index]:
        raise ValueError(
            f"operator size {op.shape[0]} does not match dims[{mode_index}] = {dims[mode_index]}"
        )

    if total_dim(dims) > SPARSE_THRESHOLD:
        out = sp.identity(1, dtype=complex, format="csr")
        op = sp.csr_matrix(op)
        for k, n in enumerate(dims):
            factor = op if k == mode_index else sp.identity(n, dtype=complex, format="csr")
            out = sp.kron(out, factor, format="csr")
        return out

    out = np.eye(1, dtype=complex)
    op = op.toarray() if sp.issparse(op) else op
    for k, n in enumerate(dims):
        factor = op if k == mode_index else np.eye(n, dtype=complex)
        out = np.kron(out, factor)
    return out


def identity(dims):
    """Identity on the full tensor-product space (same storage rule as embed)."""
    d = total_dim(dims)
    if d > SPARSE_THRESHOLD:
        return sp.identity(d, dtype=complex, format="csr")
    return np.eye(d, dtype=complex)


def dense(op) -> np.ndarray:
    """Return a dense ndarray view/copy of a dense or sparse operator."""
    return op.toarray() if sp.issparse(op) else np.asarray(op)


def expectation(rho, op) -> complex:
    """Trace(rho . op) for a density matrix rho and operator op."""
    rho_d = dense(rho)
    if rho_d.shape[0] != rho_d.shape[1]:
        raise ValueError(f"rho must be square, got shape {rho_d.shape}")
    if op.shape != rho_d.shape:
        raise ValueError(f"dimension mismatch: rho {rho_d.shape}, op {op.shape}")
    tr = np.trace(rho_d)
    if abs(tr - 1.0) > TRACE_WARN_TOL:
        warnings.warn(f"rho has trace {tr:.3e}, expected 1", stacklevel=2)
    if sp.issparse(op):
        return complex((op @ rho_d).diagonal().sum())
    # trace(A B) = sum(A * B^T) without forming the product
    return complex(np.sum(rho_d * op.T))


def thermal_state(n_bar: float, n: int) -> np.ndarray:
    """Thermal (geometric) density matrix with mean occupation n_bar,
    renormalized on the truncated space."""
    if n_bar < 0:
        raise ValueError("n_bar must be >= 0")
    if n_bar == 0:
        rho = np.zeros((n, n), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    q = n_bar / (1.0 + n_bar)
    p = q ** np.arange(n)
    return np.diag(p / p.sum()).astype(complex)


def is_hermitian(op, tol: float = 1e-12) -> bool:
    op_d = dense(op)
    scale = max(np.abs(op_d).max(), 1.0)
    return bool(np.abs(op_d - op_d.conj().T).max() <= tol * scale)


def min_eigenvalue(rho) -> float:
    """Smallest eigenvalue of the Hermitian part of rho (PSD diagnostics)."""
    rho_d = dense(rho)
    herm = (rho_d + rho_d.conj().T) / 2
    return float(np.linalg.eigvalsh(herm)[0])
