"""Numba vs numpy kernels, and where the time actually goes.

Times the loop kernels in both backends, then the dense LAPACK calls that
dominate a spectral rate.  Run: ``python benchmarks/bench_kernels.py``.
"""

import argparse
import math
import timeit

import numpy as np

from catbitflip import liouville, special
from catbitflip.fock import FockSpace, default_dim
from catbitflip.liouville import PerturbationSpec, cat_basis
from catbitflip.spectral import bitflip_eigenvalue, total_generator


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_kernels(alpha2, repeat):
    dim = default_dim(alpha2) + 10
    a2 = alpha2
    log_pref = 0.5 * math.log(4.0 * a2 / -math.expm1(-4.0 * a2))
    log_bessel = np.log(special._bessel_ive_all_np(dim, a2))
    cases = {
        "bessel_ive_all": (lambda: special._bessel_ive_all_nb(dim, a2), lambda: special._bessel_ive_all_np(dim, a2)),
        "sigma_pm_fill": (
            lambda: liouville._sigma_pm_fill_nb(dim, log_bessel, log_pref),
            lambda: liouville._sigma_pm_fill_np(dim, log_bessel, log_pref),
        ),
        "shi_chin_series": (lambda: special._shi_chin_series_nb(4 * a2), lambda: special._shi_chin_series_np(4 * a2)),
        "ein_series": (lambda: special._ein_pos_series_nb(4 * a2), lambda: special._ein_pos_series_np(4 * a2)),
    }
    rows = []
    for name, (nb, npy) in cases.items():
        nb()  # compile outside the timer
        assert np.allclose(nb(), npy(), rtol=1e-12, atol=0.0)
        rows.append((name, best(nb, repeat, 200), best(npy, repeat, 200)))
    return dim, rows


def bench_dense(alpha2, repeat):
    alpha = math.sqrt(alpha2)
    space = FockSpace(default_dim(alpha2))
    spec = PerturbationSpec("photon_loss", 0.01)
    basis = cat_basis(space, alpha)
    build = best(lambda: total_generator(space, alpha, spec), repeat, 1)
    gen = total_generator(space, alpha, spec)
    eig = best(lambda: bitflip_eigenvalue(gen, basis), repeat, 1)
    return space.dim, build, eig


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha2", type=float, default=4.0)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()

    dim, rows = bench_kernels(args.alpha2, args.repeat)
    print(f"loop kernels, alpha^2={args.alpha2:g}, dim={dim}")
    print(f"{'kernel':<18}{'numba [us]':>12}{'numpy [us]':>12}{'speedup':>10}")
    for name, t_nb, t_np in rows:
        print(f"{name:<18}{t_nb * 1e6:>12.2f}{t_np * 1e6:>12.2f}{t_np / t_nb:>10.2f}")

    dim, build, eig = bench_dense(args.alpha2, max(1, args.repeat // 2))
    print(f"\ndense path, photon loss spectral rate, dim={dim}")
    print(f"{'generator build':<18}{build * 1e3:>12.2f} ms")
    print(f"{'odd-block eig':<18}{eig * 1e3:>12.2f} ms")
    share = sum(t for _, t, _ in rows) / (build + eig)
    print(f"\nall numba kernels together are {share:.1e} of one dense rate evaluation")


if __name__ == "__main__":
    main()
