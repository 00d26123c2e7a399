import math

import numpy as np
import pytest

from catbitflip.errors import NotParityCovariant
from catbitflip.fock import FockSpace, default_dim
from catbitflip.liouville import PerturbationSpec, cat_basis, l0_superop, trace_parallel
from catbitflip.rates import detuning_rate, photon_loss_rate, zgate_rate
from catbitflip.spectral import (
    bitflip_eigenvalue,
    evolve,
    fit_bitflip_decay,
    parity_sector_blocks,
    spectral_rate,
    total_generator,
)


def test_parity_blocks_cover_covariant_generator():
    space = FockSpace(12)
    gen = total_generator(space, 1.0, PerturbationSpec("photon_loss", 0.1))
    blocks = parity_sector_blocks(gen)
    assert len(blocks["even"][0]) + len(blocks["odd"][0]) == 144
    # round before sorting so conjugate pairs with equal real parts order the same way
    w_full = np.sort_complex(np.round(np.linalg.eigvals(gen.entries), 9))
    w_blocks = np.sort_complex(np.round(np.concatenate([np.linalg.eigvals(b) for _, b in blocks.values()]), 9))
    np.testing.assert_allclose(w_full, w_blocks, atol=1e-8)
    with pytest.raises(NotParityCovariant):
        parity_sector_blocks(total_generator(space, 1.0, PerturbationSpec("zgate", 0.1)))


@pytest.mark.parametrize("alpha2", [1.0, 2.0])
def test_spectral_photon_loss_matches_analytic(alpha2):
    alpha = math.sqrt(alpha2)
    res = spectral_rate(alpha, PerturbationSpec("photon_loss", 0.01))
    assert res.converged and res.sector == "odd"
    assert res.gamma == pytest.approx(photon_loss_rate(alpha, 0.01).gamma_bitflip, rel=0.01)


def test_spectral_zgate_uses_full_matrix():
    alpha = math.sqrt(2.0)
    res = spectral_rate(alpha, PerturbationSpec("zgate", 0.1), check=False)
    assert res.sector == "full"
    assert res.gamma == pytest.approx(zgate_rate(alpha, 0.1).gamma_bitflip, rel=0.02)


def test_spectral_detuning_picks_upper_member_of_pair():
    alpha = math.sqrt(2.0)
    res = spectral_rate(alpha, PerturbationSpec("detuning", 0.1), check=False)
    assert res.lambda_z.imag >= 0
    assert res.gamma == pytest.approx(detuning_rate(alpha, 0.1).gamma_bitflip, rel=0.02)


def test_evolution_preserves_trace_and_stays_in_cats_without_perturbation():
    alpha = math.sqrt(2.0)
    space = FockSpace(default_dim(2.0) + 10)
    basis = cat_basis(space, alpha)
    rho0 = np.outer(basis.zero, basis.zero.conj())
    traj = evolve(l0_superop(space, alpha), rho0, [0.0, 0.5, 1.0, 3.0])
    for r in traj:
        assert np.trace(r).real == pytest.approx(1.0, abs=1e-12)
        assert 1.0 - trace_parallel(r, basis).real < 1e-10
    with pytest.raises(ValueError):
        evolve(l0_superop(space, alpha), rho0, [1.0, 0.5])


def test_decay_fit_matches_eigenvalue():
    alpha = 1.0
    space = FockSpace(default_dim(1.0))
    basis = cat_basis(space, alpha)
    spec = PerturbationSpec("photon_loss", 0.05)
    gen = total_generator(space, alpha, spec)
    ref = bitflip_eigenvalue(gen, basis).gamma
    fitted = fit_bitflip_decay(gen, basis, horizon=5.0 + 1.0 / (2.0 * ref))
    assert fitted == pytest.approx(ref, rel=1e-4)
    assert fit_bitflip_decay(l0_superop(space, alpha), basis, horizon=50.0) == 0.0
