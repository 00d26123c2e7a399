import math

import mpmath
import numpy as np
import pytest

from catbitflip import liouville
from catbitflip.errors import ConfigError, DimensionMismatch, NotHermitian, PreconditionViolated
from catbitflip.fock import FockSpace, coherent_state, default_dim, ladder_ops
from catbitflip.liouville import (
    PerturbationSpec,
    biorthonormality_table,
    cat_basis,
    dissipator_superop,
    first_order_leakage_rate,
    hamiltonian_superop,
    invariant_coherent_element,
    l0_superop,
    leakage,
    leakage_report,
    perturbation_superop,
    project_parallel,
    project_perp,
    sandwich,
    second_order_leakage_curvature,
    sigma_plus_minus,
    unvec,
    vec,
)

rng = np.random.default_rng(7)


def random_density(dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def test_vec_convention():
    a, b, x = (rng.normal(size=(4, 4)) for _ in range(3))
    np.testing.assert_allclose(sandwich(a, b).apply(x), a @ x @ b, atol=1e-12)
    np.testing.assert_allclose(unvec(vec(x), 4), x)


def test_dissipator_preserves_trace_and_hermiticity():
    space = FockSpace(8)
    a, _ = ladder_ops(space)
    s = dissipator_superop(a @ a - 0.7 * np.eye(8), 0.3)
    rho = random_density(8)
    out = s.apply(rho)
    assert abs(np.trace(out)) < 1e-13
    np.testing.assert_allclose(out, out.conj().T, atol=1e-13)
    # Heisenberg picture is the dual of the Schroedinger picture
    x = rng.normal(size=(8, 8))
    assert np.sum(x.conj() * s.apply(rho)) == pytest.approx(np.sum(s.adjoint_apply(x).conj() * rho), abs=1e-12)


def test_l0_steady_states_are_cats():
    alpha = math.sqrt(2.0)
    space = FockSpace(default_dim(2.0))
    basis = cat_basis(space, alpha)
    l0 = l0_superop(space, alpha)
    for s in (1, -1):
        for sp in (1, -1):
            r = l0.apply(basis.right(s, sp))
            # only the cutoff rows see the missing levels of the truncated cat
            assert np.max(np.abs(r[:-2, :-2])) < 1e-12
            assert np.max(np.abs(r)) < 1e-6


@pytest.mark.parametrize("alpha2", [0.5, 2.0, 4.0])
def test_invariants_biorthonormal(alpha2):
    basis = cat_basis(FockSpace(default_dim(alpha2)), math.sqrt(alpha2))
    np.testing.assert_allclose(biorthonormality_table(basis), np.eye(4), atol=1e-10)
    np.testing.assert_allclose(basis.sigma["z"], 0.5 * (basis.sigma["+-"] + basis.sigma["-+"]))


def test_sigma_plus_minus_against_mpmath():
    mpmath.mp.dps = 30
    alpha = math.sqrt(1.3)
    a2 = mpmath.mpf(alpha) ** 2
    s = sigma_plus_minus(16, alpha)
    n0 = mpmath.sqrt(2 * a2 / mpmath.sinh(2 * a2))
    for n in range(4):
        for m in range(4):
            k = n - m
            ref = (n0 * (-1) ** k * mpmath.besseli(k, a2) / (2 * n + 1 - 2 * m)
                   * mpmath.sqrt(mpmath.factorial(2 * n + 1) * mpmath.factorial(2 * m))
                   / (mpmath.fac2(2 * n) * mpmath.fac2(2 * m)))
            assert s[2 * n + 1, 2 * m].real == pytest.approx(float(ref), rel=1e-12)
    assert np.all(s[0::2, :] == 0) and np.all(s[:, 1::2] == 0)


def test_sigma_kernels_agree():
    a2 = 3.0
    log_pref = 0.5 * math.log(4.0 * a2 / -math.expm1(-4.0 * a2))
    from catbitflip.special import bessel_ive_all

    with np.errstate(divide="ignore"):
        lb = np.log(bessel_ive_all(30, a2))
    np.testing.assert_allclose(liouville._sigma_pm_fill_nb(30, lb, log_pref), liouville._sigma_pm_fill_np(30, lb, log_pref), rtol=1e-13)


def test_invariant_coherent_element_matches_fock_sum():
    alpha = 1.0
    space = FockSpace(60)
    s = sigma_plus_minus(60, alpha)
    for chi, phi in [(1.0, 1.0), (0.4, -0.8)]:
        ref = coherent_state(space, chi, False).conj() @ s @ coherent_state(space, phi, False)
        assert invariant_coherent_element(alpha, chi, phi) == pytest.approx(ref, rel=1e-9)


def test_projections_and_leakage():
    alpha = math.sqrt(2.0)
    space = FockSpace(default_dim(2.0))
    basis = cat_basis(space, alpha)
    rho = random_density(space.dim)
    par = project_parallel(rho, basis)
    np.testing.assert_allclose(project_parallel(par, basis), par, atol=1e-10)
    np.testing.assert_allclose(par + project_perp(rho, basis), rho, atol=1e-14)
    rho0 = np.outer(basis.zero, basis.zero.conj())
    assert abs(leakage(rho0, basis)) < 1e-14
    with pytest.raises(PreconditionViolated):
        leakage(2 * rho0, basis)
    with pytest.raises(DimensionMismatch):
        leakage(np.eye(3), basis)


def test_leakage_orders():
    alpha = math.sqrt(2.0)
    basis = cat_basis(FockSpace(default_dim(2.0) + 10), alpha)
    rho0 = np.outer(basis.zero, basis.zero.conj())
    loss = PerturbationSpec("photon_loss", 0.01)
    assert abs(first_order_leakage_rate(loss, rho0, basis)) < 1e-12
    assert second_order_leakage_curvature(loss, rho0, basis) == pytest.approx(9.953e-5, rel=1e-3)
    gain = PerturbationSpec("photon_gain", 0.01)
    assert first_order_leakage_rate(gain, rho0, basis) == pytest.approx(0.01, rel=1e-9)
    with pytest.raises(PreconditionViolated):
        second_order_leakage_curvature(gain, rho0, basis)
    assert math.isnan(leakage_report(gain, rho0, basis).second_order_curvature)


def test_perturbation_specs():
    space = FockSpace(10)
    h = perturbation_superop(space, 1.0, PerturbationSpec("detuning", 0.2))
    assert np.max(np.abs(h.entries + h.entries.conj().T)) < 1e-14  # anti-Hermitian generator
    d = perturbation_superop(space, 1.0, PerturbationSpec("generic_dissipator", 1.0, m=2, n=1))
    assert d.dim == 10
    with pytest.raises(ConfigError):
        PerturbationSpec("photon_loss", -1.0)
    with pytest.raises(ConfigError):
        PerturbationSpec("generic_dissipator", 1.0, m=0, n=0)
    with pytest.raises(ConfigError):
        PerturbationSpec("teleport", 1.0)
    with pytest.raises(NotHermitian):
        hamiltonian_superop(np.triu(np.ones((3, 3))))
