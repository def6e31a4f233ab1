#!/usr/bin/env python
# -*- coding: utf-8 -*-
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultranorm.functions import HermiteGaussianFunction, default_family
from ultranorm.reports import Status
from ultranorm.stft import (GridError, NearOrthogonalError, PhaseSpaceGrid,
                            SampledSTFT, Translation, adjoint_bound_check,
                            adjoint_constant_bound, adjoint_vstar,
                            beurling_decay_check, decay_bound_check,
                            isometry_check, reconstruction_check,
                            reconstruction_error, stft_direct, stft_exact,
                            stft_grid, weak_reconstruction_check,
                            weighted_stft_sup, window_integrals,
                            window_pairing)
from ultranorm.sequences import fit_m2prime

__author__ = "ultranorm developers"
__license__ = "mit"


fine = PhaseSpaceGrid(8.0, 8.0, 256, 256)
plane = PhaseSpaceGrid(4.0, 2.0, 32, 32, 2)
t_points = np.linspace(-4, 4, 41)
mixed = HermiteGaussianFunction(
    [(1.0, 0.5, 1.0, np.pi / 2), (0.5j, -1.0, -0.5, 2 * np.pi)])
coordinates = st.floats(-3.0, 3.0)
window = HermiteGaussianFunction.gaussian()


def test_grid_guards():
    with pytest.raises(GridError):
        PhaseSpaceGrid(8.0, 12.0, 192, 192)
    with pytest.raises(GridError):
        PhaseSpaceGrid(8.0, 5.0, 192, 192)
    with pytest.raises(GridError):
        PhaseSpaceGrid(8.0, 6.0, 192, 192, 3)
    grid = PhaseSpaceGrid(8.0, 6.0, 192, 100)
    assert grid.fft_length == 100


def test_grid_geometry(phase):
    assert np.isclose(phase.dx, 1 / 12)
    assert phase.fft_length == 192
    assert np.isclose(phase.refined().dx, phase.dx / 2)
    assert np.isclose(phase.enlarged().dxi, phase.dxi)
    assert phase.x_nodes().shape == (192, 1)
    assert plane.xi_nodes().shape == (32 * 32, 2)


def test_direct_quadrature(gaussian):
    assert np.isclose(stft_direct(gaussian, gaussian, 0.0, 0.0), 2 ** -0.5,
                      rtol=1e-12)
    assert stft_direct(HermiteGaussianFunction.zero(), gaussian, 0.0,
                       0.0) == 0


@settings(max_examples=20, deadline=None)
@given(x=coordinates, xi=coordinates)
def test_direct_matches_closed_form(x, xi):
    exact = stft_exact(mixed, window, x, xi)[0]
    assert abs(stft_direct(mixed, window, x, xi) - exact) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(x=coordinates, xi=coordinates, u=coordinates, eta=coordinates)
def test_covariance(x, xi, u, eta):
    shifted = stft_exact(mixed.translate(u), window, x, xi)[0]
    expected = np.exp(-2j * np.pi * u * xi) * \
        stft_exact(mixed, window, x - u, xi)[0]
    assert abs(shifted - expected) <= 1e-9
    modulated = stft_exact(mixed.modulate(eta), window, x, xi)[0]
    assert abs(modulated - stft_exact(mixed, window, x, xi - eta)[0]) <= \
        1e-9


def test_grid_matches_direct_quadrature(gaussian):
    F = stft_grid(mixed, gaussian, fine)
    scale = np.abs(F.values).max()
    rng = np.random.default_rng(0)
    rows = rng.integers(0, fine.x_points, 50)
    cols = rng.integers(0, fine.xi_points, 50)
    for i, j in zip(rows, cols):
        direct = stft_direct(mixed, gaussian, fine.x_axis[i],
                             fine.xi_axis[j])
        assert abs(F.values[i, j] - direct) <= 1e-8 * scale
    assert F.tail_bound <= 1e-10


def test_grid_matches_closed_form_in_the_plane():
    g = HermiteGaussianFunction.gaussian(dim=2)
    f = HermiteGaussianFunction([(1.0, (0.5, -0.5), (0.0, 0.0), np.pi)], 2)
    F = stft_grid(f, g, plane)
    X, XI = plane.x_nodes(), plane.xi_nodes()
    # xi nodes near the origin, away from the aliased edge columns
    rows, cols = [590, 528, 656, 592], [528, 530, 592, 528]
    exact = stft_exact(f, g, X[rows], XI[cols])
    assert np.allclose(F.values[rows, cols], exact, atol=1e-9)


def test_modulation_moves_the_peak(gaussian, phase):
    F = stft_grid(gaussian.modulate(2.0), gaussian, phase)
    column = int(np.argmax(F.magnitude.max(axis=0)))
    assert np.isclose(phase.xi_axis[column], 2.0)


def test_linearity(gaussian, phase):
    f, g = default_family()[3], default_family()[6]
    combined = stft_grid(2.0 * f + 1j * g, gaussian, phase).values
    separate = 2.0 * stft_grid(f, gaussian, phase).values + \
        1j * stft_grid(g, gaussian, phase).values
    assert np.allclose(combined, separate, atol=1e-14)
    zero = stft_grid(HermiteGaussianFunction.zero(), gaussian, phase)
    assert not zero.values.any()


@pytest.mark.parametrize("f", default_family()[:5])
def test_isometry(gaussian, phase, f):
    record = isometry_check(f, gaussian, phase)
    assert record.status is Status.PASS
    assert abs(record.constants["ratio"] - 1) <= 1e-6


def test_isometry_sees_mass_on_the_edge(gaussian, phase):
    record = isometry_check(gaussian.translate(7.5), gaussian, phase)
    assert record.status is Status.INCONCLUSIVE


@pytest.mark.parametrize("f", [HermiteGaussianFunction.gaussian(), mixed])
def test_reconstruction(gaussian, phase, f):
    record = reconstruction_check(f, gaussian, gaussian, phase, t_points)
    assert record.status is Status.PASS


def test_reconstruction_with_scaled_window(gaussian, phase):
    plain, _ = reconstruction_error(mixed, gaussian, gaussian, phase,
                                    t_points)
    scaled, _ = reconstruction_error(mixed, gaussian, 2.0 * gaussian, phase,
                                     t_points)
    assert abs(plain - scaled) <= 1e-12
    nothing, _ = reconstruction_error(HermiteGaussianFunction.zero(),
                                      gaussian, gaussian, phase, t_points)
    assert nothing == 0.0


def test_reconstruction_improves_with_extent(gaussian):
    small = PhaseSpaceGrid(3.0, 3.0, 72, 72)
    t = np.linspace(-1, 1, 11)
    err_small, _ = reconstruction_error(gaussian, gaussian, gaussian, small,
                                        t)
    err_big, _ = reconstruction_error(gaussian, gaussian, gaussian,
                                      small.enlarged(), t)
    assert err_big <= max(err_small, 1e-12)


def test_near_orthogonal_windows(gaussian, phase):
    far = gaussian.modulate(10.0)
    with pytest.raises(NearOrthogonalError):
        window_pairing(far, gaussian)
    with pytest.raises(NearOrthogonalError):
        reconstruction_check(gaussian, gaussian, far, phase, t_points)


def test_weak_reconstruction(gaussian, phase):
    chi = HermiteGaussianFunction.gaussian(center=0.5)
    record = weak_reconstruction_check(mixed, gaussian, gaussian, chi, phase)
    assert record.status is Status.PASS


def test_adjoint_of_a_single_node(gaussian, phase):
    values = np.zeros((phase.x_points, phase.xi_points), dtype=complex)
    i, j = 100, 110
    values[i, j] = 1.0
    F = SampledSTFT(values, phase, repr(gaussian), 8.0, 0.0)
    t = np.linspace(-2, 2, 9)
    x, xi = phase.x_axis[i], phase.xi_axis[j]
    expected = phase.cell * np.exp(2j * np.pi * xi * t) * gaussian(t - x)
    rebuilt = adjoint_vstar(F, gaussian, t)
    assert np.allclose(rebuilt.values, expected)
    assert not rebuilt.edge_flag


def test_decay_bound(factorial, gaussian, phase):
    record = decay_bound_check(gaussian, gaussian, factorial, 1.0, None,
                               None, phase)
    assert record.status is Status.PASS
    assert np.isfinite(record.constants["C"])
    assert record.constants["drift"] <= 0.05
    assert record.constants["interior"]


def test_decay_bound_of_zero(factorial, gaussian, phase):
    record = decay_bound_check(HermiteGaussianFunction.zero(), gaussian,
                               factorial, 1.0, None, None, phase)
    assert record.status is Status.PASS
    assert record.constants["vacuous"]


def test_window_integrals_of_the_gaussian(factorial, gaussian):
    log_K = window_integrals(gaussian, Translation(factorial, 0.0), 2)
    assert log_K[(0,)] == pytest.approx(0.0, abs=1e-9)
    assert np.exp(log_K[(1,)]) == pytest.approx(2.0, rel=1e-3)
    assert set(log_K) == {(0,), (1,), (2,)}


def test_decay_constants_within_closed_form(factorial, gaussian, phase):
    record = decay_bound_check(gaussian, gaussian, factorial, 1.0, None,
                               None, phase,
                               translation=Translation(factorial, 1.0))
    assert record.status is Status.PASS
    assert record.constants["C"] <= record.constants["bound"]
    bounds = record.constants["moment_bounds"]
    for key, value in record.constants["moments"].items():
        assert value <= bounds[key]


def test_decay_fails_under_a_scaled_down_bound(factorial, gaussian, phase):
    record = decay_bound_check(gaussian, gaussian, factorial, 1.0, None,
                               None, phase,
                               translation=Translation(factorial, 1.0, 1e-6))
    assert record.status is Status.FAIL
    assert record.provenance[0].startswith("moment constants above")
    assert record.constants["translation_C"] == 1e-6


def test_adjoint_constant_bound_scales_with_C(factorial, gaussian):
    log_K = window_integrals(gaussian, Translation(factorial, 1.0), 20)
    witness = fit_m2prime(factorial, 100)
    one = adjoint_constant_bound(log_K, factorial, np.pi, witness, 1.0, 1)
    half = adjoint_constant_bound(log_K, factorial, np.pi, witness, 0.5, 1)
    assert half.value == pytest.approx(one.value / 2)
    assert not one.alpha_edge


def test_weighted_sup_ignores_noise(factorial, gaussian, phase):
    F = stft_grid(gaussian, gaussian, phase)
    sup = weighted_stft_sup(F, factorial, np.pi)
    assert np.isfinite(sup.value) and sup.interior
    assert sup.unresolved <= sup.value


def test_adjoint_bound(factorial, gaussian, phase):
    F = stft_grid(gaussian, gaussian, phase)
    F_refined = stft_grid(gaussian, gaussian, phase.refined())
    record = adjoint_bound_check(F, gaussian, factorial, 1.0, None, None,
                                 F_refined=F_refined)
    assert record.status is Status.PASS
    assert np.isclose(record.constants["H"], 2.0)
    assert np.isclose(record.constants["h_prime"], 1 / (16 * np.pi))


def test_adjoint_bound_of_zero(factorial, gaussian, phase):
    F = stft_grid(HermiteGaussianFunction.zero(), gaussian, phase)
    record = adjoint_bound_check(F, gaussian, factorial, 1.0, None, None)
    assert record.status is Status.PASS
    assert record.constants["ratio"] == 0.0


def test_adjoint_bound_needs_one_dimension(factorial):
    g = HermiteGaussianFunction.gaussian(dim=2)
    F = stft_grid(g, g, plane)
    with pytest.raises(ValueError):
        adjoint_bound_check(F, g, factorial, 1.0, None, None)


def test_beurling_decay(factorial, gaussian, phase):
    record = beurling_decay_check(gaussian, gaussian, factorial, factorial,
                                  [1, 2], phase)
    assert record.status is Status.PASS
    assert record.constants["sups"]["1"] <= record.constants["sups"]["2"]


def test_rows(gaussian):
    grid = PhaseSpaceGrid(2.0, 1.0, 8, 8)
    rows = list(stft_grid(gaussian, gaussian, grid).rows())
    assert len(rows) == 64
    assert len(rows[0]) == 4
