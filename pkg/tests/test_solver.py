import numpy as np
import pytest
import scipy.sparse as sp
from scipy.constants import hbar

from mechqed.model import DriveSpec, ModeSpec, ThreeBodyParams, TwoBodySystem
from mechqed.operators import (
    dense,
    destroy,
    embed,
    expectation,
    min_eigenvalue,
    number,
    thermal_state,
)
from mechqed.solver import (
    LindbladSystem,
    SpectrumResult,
    SteadyStateError,
    auto_grid,
    collapse_operators,
    liouvillian,
    predict_transition_frequencies,
    spectrum_sweep,
    steady_state,
    undriven_steady_state,
)

# Tabulated two-body reference row: thermal transmon and mechanics on
# resonance, coupling far below the anharmonicity.
ROW_JC = TwoBodySystem(
    transmon=ModeSpec(omega=1.0, N=4, anharmonicity=0.05 * hbar, gamma=1e-4, n_th=1.2),
    mech=ModeSpec(omega=1.0, N=6, gamma=1e-7, n_th=1.2),
    g=0.005,
    transmon_form="duffing",
    coupling="rwa",
)


def single_mode_system(mode: ModeSpec) -> LindbladSystem:
    dims = (mode.N, 2)
    H = hbar * mode.omega * embed(number(mode.N), 0, dims)
    ops = collapse_operators(mode, 0, dims)
    return LindbladSystem(H_rot=H, collapse_ops=tuple(ops), dims=dims)


class TestCollapseOperators:
    def test_rates_fold_into_operators(self):
        mode = ModeSpec(omega=1.0, N=3, gamma=1e-7, n_th=1.2)
        down, up = collapse_operators(mode, 0, (3,))
        np.testing.assert_allclose(dense(down), np.sqrt(2.2e-7) * destroy(3), atol=1e-22)
        np.testing.assert_allclose(
            dense(up), np.sqrt(1.2e-7) * destroy(3).conj().T, atol=1e-22
        )

    def test_cold_bath_gives_single_operator(self):
        mode = ModeSpec(omega=1.0, N=3, gamma=1e-4, n_th=0.0)
        ops = collapse_operators(mode, 0, (3,))
        assert len(ops) == 1
        np.testing.assert_allclose(dense(ops[0]), np.sqrt(1e-4) * destroy(3), atol=1e-20)

    def test_lossless_mode_gives_none(self):
        assert collapse_operators(ModeSpec(omega=1.0, N=3), 0, (3,)) == []


class TestLiouvillian:
    def test_vacuum_stationary_under_pure_decay(self):
        dims = (4,)
        C = np.sqrt(0.1) * destroy(4)
        L = liouvillian(LindbladSystem(np.zeros((4, 4), complex), (C,), dims))
        vac = np.zeros((4, 4), complex)
        vac[0, 0] = 1.0
        assert np.abs(L @ vac.reshape(-1, order="F")).max() < 1e-15

    def test_thermal_state_stationary(self):
        # detailed balance holds level by level in the truncated space
        mode = ModeSpec(omega=0.0, N=7, gamma=1e-3, n_th=0.7)
        dims = (7,)
        ops = collapse_operators(mode, 0, dims)
        L = liouvillian(LindbladSystem(np.zeros((7, 7), complex), tuple(ops), dims))
        rho = thermal_state(0.7, 7)
        assert np.abs(L @ rho.reshape(-1, order="F")).max() < 1e-10

    def test_trace_preservation(self):
        sys = single_mode_system(ModeSpec(omega=1.0, N=5, gamma=1e-2, n_th=0.4))
        L = liouvillian(sys)
        d = 10
        vec_id = np.eye(d, dtype=complex).reshape(-1, order="F")
        # adjoint of L annihilates the identity
        scale = np.abs(L.data).max()
        assert np.abs(L.conj().T @ vec_id).max() < 1e-12 * scale

    def test_size_guard(self):
        mode = ModeSpec(omega=1.0, N=150, gamma=1e-3)
        dims = (150,)
        H = hbar * embed(number(150), 0, dims)
        sys = LindbladSystem(H, tuple(collapse_operators(mode, 0, dims)), dims)
        with pytest.raises(MemoryError):
            liouvillian(sys)
        # explicit override admits the size
        L = liouvillian(sys, max_total_dim=200)
        assert L.shape == (150**2, 150**2)


class TestSteadyState:
    def test_thermal_fixed_point_with_truncation_bound(self):
        # N = 20 serves as the converged oracle, N = 6 must sit within 2%
        n_th = 1.2
        values = {}
        for N in (6, 20):
            mode = ModeSpec(omega=1.0, N=N, gamma=1e-3, n_th=n_th)
            dims = (N,)
            H = hbar * embed(number(N), 0, dims)
            L = liouvillian(LindbladSystem(H, tuple(collapse_operators(mode, 0, dims)), dims))
            rho = steady_state(L)
            values[N] = expectation(rho, dense(embed(number(N), 0, dims))).real
        assert np.isclose(values[20], n_th, rtol=1e-4)
        assert abs(values[6] - n_th) / n_th < 0.02

    def test_driven_far_detuned_occupation(self):
        # linear response of a damped driven oscillator:
        # |<a>|^2 = amp^2 / (Delta^2 + gamma^2/4)
        Delta, gamma, amp = 0.05, 1e-3, 1e-4
        N = 8
        dims = (N,)
        H = hbar * (-Delta) * dense(embed(number(N), 0, dims))
        p = dense(embed(destroy(N) - destroy(N).conj().T, 0, dims))
        H = H + (-1j * hbar * amp) * p
        mode = ModeSpec(omega=1.0, N=N, gamma=gamma, n_th=0.0)
        L = liouvillian(LindbladSystem(H, tuple(collapse_operators(mode, 0, dims)), dims))
        rho = steady_state(L)
        n_val = expectation(rho, dense(embed(number(N), 0, dims))).real
        expected = amp**2 / (Delta**2 + gamma**2 / 4)
        assert np.isclose(n_val, expected, rtol=1e-3)
        assert expected < 1e-2

    def test_density_matrix_properties(self):
        rho = undriven_steady_state(ROW_JC)
        assert np.isclose(np.trace(rho).real, 1.0, atol=1e-12)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
        assert min_eigenvalue(rho) >= -1e-9

    def test_degenerate_kernel_detected(self):
        # no dissipation at all: every diagonal state is stationary
        dims = (3,)
        H = hbar * dense(embed(number(3), 0, dims))
        L = liouvillian(LindbladSystem(H, (), dims))
        with pytest.raises(SteadyStateError):
            steady_state(L)

    def test_direct_and_lsqr_agree(self):
        sys = single_mode_system(ModeSpec(omega=1.0, N=6, gamma=1e-3, n_th=0.8))
        L = liouvillian(sys)
        rho_direct = steady_state(L, method="direct")
        rho_lsqr = steady_state(L, method="lsqr")
        np.testing.assert_allclose(rho_direct, rho_lsqr, atol=1e-8)

    def test_rejects_bad_method(self):
        L = sp.identity(4, dtype=complex, format="csr")
        with pytest.raises(ValueError):
            steady_state(L, method="nonsense")


class TestSpectrumSweep:
    def test_zero_drive_gives_zero_quadratures(self):
        drive = DriveSpec(driven_mode=0, omega_d=0.0, amplitude=0.0)
        grid = np.linspace(0.99, 1.01, 5)
        res = spectrum_sweep(ROW_JC, drive=drive, grid=grid)
        assert res.converged.all()
        np.testing.assert_allclose(res.quadrature_re, 0.0, atol=1e-12)
        np.testing.assert_allclose(res.quadrature_im, 0.0, atol=1e-12)

    def test_peaks_match_eigenvalue_differences(self):
        # cross-module oracle: swept peaks sit on transition frequencies of
        # the undriven Hamiltonian to within a linewidth
        from scipy.signal import find_peaks

        g = ROW_JC.g
        grid = np.linspace(1 - 1.5 * g, 1 + 1.5 * g, 301)
        res = spectrum_sweep(ROW_JC, grid=grid)
        assert res.converged.all()
        sig = res.magnitude
        peaks, _ = find_peaks(sig, prominence=0.2 * sig.max())
        freqs = predict_transition_frequencies(ROW_JC, driven_mode=0, min_weight=5e-2)
        linewidth = 4 * ROW_JC.transmon.gamma * ROW_JC.transmon.n_th
        for pk in grid[peaks]:
            assert np.min(np.abs(freqs - pk)) < linewidth

    def test_grid_must_be_sorted_and_nonempty(self):
        with pytest.raises(ValueError):
            spectrum_sweep(ROW_JC, grid=[1.0, 0.9])
        with pytest.raises(ValueError):
            spectrum_sweep(ROW_JC, grid=[])

    def test_auto_grid_covers_predicted_peaks(self):
        drive = DriveSpec.probe(ROW_JC.transmon, 0)
        grid = auto_grid(ROW_JC, drive, points=51)
        assert len(grid) == 51
        freqs = predict_transition_frequencies(ROW_JC, driven_mode=0, min_weight=1e-2)
        assert grid[0] < freqs.min() and grid[-1] > freqs.max()

    def test_deterministic_output(self):
        grid = np.linspace(0.995, 1.005, 7)
        a = spectrum_sweep(ROW_JC, grid=grid)
        b = spectrum_sweep(ROW_JC, grid=grid)
        np.testing.assert_array_equal(a.quadrature_re, b.quadrature_re)
        np.testing.assert_array_equal(a.quadrature_im, b.quadrature_im)

    def test_truncation_doubling_changes_little(self):
        # doubling both truncations moves the quadratures by under 1%
        grid = np.array([1.0 - ROW_JC.g, 1.0 + ROW_JC.g])
        base = spectrum_sweep(ROW_JC, grid=grid)
        doubled_sys = TwoBodySystem(
            transmon=ModeSpec(omega=1.0, N=8, anharmonicity=0.05 * hbar,
                              gamma=1e-4, n_th=1.2),
            mech=ModeSpec(omega=1.0, N=12, gamma=1e-7, n_th=1.2),
            g=0.005, transmon_form="duffing", coupling="rwa",
        )
        doubled = spectrum_sweep(doubled_sys, grid=grid)
        ref = np.hypot(base.quadrature_re, base.quadrature_im)
        new = np.hypot(doubled.quadrature_re, doubled.quadrature_im)
        assert np.all(np.abs(new - ref) / ref < 0.01)

    def test_three_body_system_accepted(self):
        p = ThreeBodyParams(
            hf=ModeSpec(omega=50.0, N=3, anharmonicity=2.5 * hbar, gamma=1e-4),
            lf=ModeSpec(omega=1.0, N=3, anharmonicity=0.05 * hbar, gamma=1e-6, n_th=0.5),
            mech=ModeSpec(omega=1.0, N=3, gamma=1e-6, n_th=0.5),
            g=5e-3, chi_LH=5e-4 * hbar,
        )
        grid = np.linspace(49.997, 50.001, 5)
        with pytest.warns(UserWarning):
            res = spectrum_sweep(p, grid=grid)
        assert res.converged.all()
        assert np.all(np.isfinite(res.magnitude))

    def test_result_validates_lengths(self):
        with pytest.raises(ValueError):
            SpectrumResult(np.arange(3.0), np.arange(2.0), np.arange(3.0))
