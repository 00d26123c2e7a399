"""Brute-force bit-flip rates from the truncated Lindbladian.

Two routes: dense eigendecomposition with the eigenvector picked by overlap with
the left invariant ``sigma_z``, and time evolution of ``|0c><0c|`` with a fit of
the cat-coherence decay.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import AmbiguousSelection, EigensolverFailure, NotParityCovariant, SignalTooSmall
from .fock import FockSpace, check_alpha, default_dim
from .liouville import cat_basis, l0_superop, perturbation_superop, vec

COVARIANCE_TOL = 1e-10
SLOW_WINDOW = 0.5  # only |Re lambda| <= 0.5 kappa2 are candidates
AMBIGUITY = 0.10
DEGENERATE_TOL = 1e-10
DRIFT_TOL = 1e-3
RELIABLE_FLOOR = 1e-12


def joint_parity_labels(dim):
    """``(i - j) mod 2`` for every column-stacked index ``i + j*dim``."""
    i = np.tile(np.arange(dim), dim)
    j = np.repeat(np.arange(dim), dim)
    return (i - j) % 2


def parity_sector_blocks(s):
    """Split a joint-parity covariant superoperator into its even and odd diagonal blocks.

    Returns ``{"even": (indices, block), "odd": (indices, block)}``.
    """
    lab = joint_parity_labels(s.dim)
    even = np.flatnonzero(lab == 0)
    odd = np.flatnonzero(lab == 1)
    scale = max(np.max(np.abs(s.entries)), 1.0)
    leak = max(np.max(np.abs(s.entries[np.ix_(even, odd)]), initial=0.0),
               np.max(np.abs(s.entries[np.ix_(odd, even)]), initial=0.0))
    if leak > COVARIANCE_TOL * scale:
        raise NotParityCovariant(f"generator couples joint-parity sectors (max entry {leak:.2e})")
    return {
        "even": (even, s.entries[np.ix_(even, even)]),
        "odd": (odd, s.entries[np.ix_(odd, odd)]),
    }


@dataclass(frozen=True)
class SpectralResult:
    lambda_z: complex
    overlap_score: float
    sector: str
    dim_used: int
    converged: bool

    @property
    def gamma(self):
        return -self.lambda_z.real / 2.0


def _eig(matrix):
    try:
        w, v = scipy.linalg.eig(matrix)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise EigensolverFailure("non-finite eigenvalues")
    return w, v


def bitflip_eigenvalue(l_total, basis, sector="auto"):
    """Eigenvalue of ``l_total`` whose right eigenvector best overlaps ``sigma_z``.

    ``sector`` is ``"auto"`` (odd joint-parity block when the generator allows it,
    otherwise the full matrix), ``"odd"`` or ``"full"``.
    """
    target = vec(basis.sigma["z"])
    if sector in ("auto", "odd"):
        try:
            idx, block = parity_sector_blocks(l_total)["odd"]
            used = "odd"
        except NotParityCovariant:
            if sector == "odd":
                raise
            idx, block, used = None, l_total.entries, "full"
    elif sector == "full":
        idx, block, used = None, l_total.entries, "full"
    else:
        raise ValueError(f"unknown sector {sector!r}")
    t = target if idx is None else target[idx]
    w, v = _eig(block)
    cand = np.flatnonzero(np.abs(w.real) <= SLOW_WINDOW)
    if cand.size == 0:
        raise EigensolverFailure("no eigenvalue in the slow window |Re lambda| <= 0.5")
    scores = np.abs(t.conj() @ v[:, cand]) / (np.linalg.norm(t) * np.linalg.norm(v[:, cand], axis=0))
    order = np.argsort(scores)[::-1]
    best = cand[order[0]]
    if order.size > 1:
        second = cand[order[1]]
        same = abs(w[best] - w[second]) <= DEGENERATE_TOL or abs(w[best] - np.conj(w[second])) <= DEGENERATE_TOL * max(1.0, abs(w[best]))
        if not same and scores[order[1]] >= (1.0 - AMBIGUITY) * scores[order[0]]:
            raise AmbiguousSelection(
                f"overlaps {scores[order[0]]:.3f} and {scores[order[1]]:.3f} for lambda={w[best]:.3e}, {w[second]:.3e}"
            )
        if same and w[second].imag > w[best].imag:
            # conjugate pair (detuning): report the member with Im >= 0
            best = second
    score = float(np.abs(t.conj() @ v[:, best]) / (np.linalg.norm(t) * np.linalg.norm(v[:, best])))
    return SpectralResult(complex(w[best]), score, used, l_total.dim, True)


def total_generator(space, alpha, spec, kappa2=1.0):
    l0 = l0_superop(space, alpha, kappa2)
    if spec is None:
        return l0
    return l0 + perturbation_superop(space, alpha, spec)


def spectral_rate(alpha, spec, kappa2=1.0, dim=None, check=True, escalations=2):
    """Spectral ``lambda_z`` at ``dim`` (default rule), checked against ``dim + 10``.

    If the pair drifts by more than the tolerance the pair is moved up by 10
    levels, at most ``escalations`` times; ``converged`` records the outcome.
    """
    alpha = check_alpha(alpha)
    dim = dim or default_dim(alpha * alpha)

    def at(d):
        space = FockSpace(d)
        return bitflip_eigenvalue(total_generator(space, alpha, spec, kappa2), cat_basis(space, alpha))

    res = at(dim)
    if not check:
        return res
    for _ in range(escalations + 1):
        ref = at(dim + 10)
        drift = abs(res.lambda_z.real - ref.lambda_z.real)
        tiny = max(abs(res.lambda_z.real), abs(ref.lambda_z.real)) < RELIABLE_FLOOR  # floor regime, flagged downstream
        ok = drift <= DRIFT_TOL * abs(ref.lambda_z.real) or tiny
        if ok:
            break
        dim, res = dim + 10, ref
    return SpectralResult(res.lambda_z, res.overlap_score, res.sector, dim, ok)


# ---------------------------------------------------------------- time evolution


def evolve(l_total, rho0, t_grid):
    """``rho(t) = exp(L t) rho0`` on ``t_grid``; one matrix exponential per distinct step."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0 or t_grid[0] < 0 or np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be a non-empty ascending array of times >= 0")
    dim = l_total.dim
    cache = {}
    v = vec(rho0)
    out = []
    t_prev = 0.0
    for t in t_grid:
        dt = t - t_prev
        if dt > 0:
            key = round(dt, 12)
            if key not in cache:
                try:
                    cache[key] = scipy.linalg.expm(l_total.entries * dt)
                except (np.linalg.LinAlgError, ValueError) as exc:
                    raise EigensolverFailure(str(exc)) from exc
            v = cache[key] @ v
        out.append(v.reshape((dim, dim), order="F").copy())
        t_prev = t
    return out


def fit_bitflip_decay(l_total, basis, horizon, n_points=120, t_start=5.0, floor=1e-14):
    """Fit ``Gamma = -slope/2`` to the decay of the cat coherence for ``rho(0) = |0c><0c|``.

    ``c(t) = Tr(sigma^{+-} rho(t))`` carries the z component and rotates into y
    under detuning, so its modulus is used rather than z itself.  A perturbed
    steady state may hold a constant part of ``c``; successive differences
    ``c(t + dt) - c(t)`` remove it and keep the ``e^{lambda t}`` factor.
    """
    if horizon <= t_start:
        raise ValueError(f"horizon must exceed the transient window t >= {t_start}")
    rho0 = np.outer(basis.zero, basis.zero.conj())
    t = np.linspace(t_start, horizon, n_points)
    traj = evolve(l_total, rho0, np.concatenate(([0.0], t)))[1:]
    sig = basis.sigma["+-"]
    coh = np.array([np.sum(sig.T * r) for r in traj])
    signal = np.abs(np.diff(coh))
    if np.max(signal) <= floor * max(1.0, np.max(np.abs(coh))):
        return 0.0  # nothing decays: the coherence is stationary
    if np.min(signal) < floor:
        raise SignalTooSmall("coherence fell below the numerical floor before the fit window closed")
    slope = np.polyfit(t[:-1], np.log(signal), 1)[0]
    return float(-slope / 2.0)
