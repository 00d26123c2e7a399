"""Truncated single-mode Fock space: ladder operators, coherent and cat states.

Kets are 1-d complex numpy arrays and operators are 2-d complex arrays in the
number basis |0>, ..., |dim-1>.  Parity labels are +1 (even) and -1 (odd).
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import DegenerateCat, TruncationError

MIN_ALPHA2 = 0.05
TAIL_TOL = 1e-12


@dataclass(frozen=True)
class FockSpace:
    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 4:
            raise ValueError(f"Fock dimension must be an integer >= 4, got {self.dim}")

    @property
    def n(self):
        return np.arange(self.dim)

    def parity_mask(self, parity):
        return (self.n % 2 == 0) if parity > 0 else (self.n % 2 == 1)


def default_dim(alpha2):
    """Cutoff rule ``max(20, ceil(a + 8 sqrt(a + 1) + 8), ceil(4a))`` for cat size ``a``.

    The last term keeps ``|alpha|^2 <= dim/4`` for large cats.
    """
    return max(20, int(math.ceil(alpha2 + 8.0 * math.sqrt(alpha2 + 1.0) + 8.0)), int(math.ceil(4.0 * alpha2)))


def check_alpha(alpha):
    alpha = float(alpha)
    if not alpha > 0:
        raise DegenerateCat(f"alpha must be positive, got {alpha}")
    if alpha * alpha < MIN_ALPHA2 * (1.0 - 1e-12):
        raise DegenerateCat(f"alpha^2 = {alpha * alpha:.3g} is below {MIN_ALPHA2}")
    return alpha


def ladder_ops(space):
    """Return ``(a, adag)`` with ``a|n> = sqrt(n)|n-1>``."""
    a = np.diag(np.sqrt(np.arange(1, space.dim, dtype=float)), 1).astype(complex)
    return a, a.conj().T.copy()


def number_op(space):
    return np.diag(space.n.astype(complex))


def parity_op(space):
    return np.diag(np.where(space.n % 2 == 0, 1.0, -1.0).astype(complex))


def tail_mass(space, beta2):
    """Poisson weight of a coherent state with mean photon number ``beta2`` beyond the cutoff."""
    return float(poisson.sf(space.dim - 1, beta2)) if beta2 > 0 else 0.0


def coherent_state(space, beta, normalized=True):
    """Coherent state amplitudes ``beta^n / sqrt(n!)``, times ``e^{-|beta|^2/2}`` if normalized.

    The unnormalized form is the analytic ket used by the inverse-Kerr closed
    forms, so ``<chi|phi> = exp(conj(chi) phi)``.
    """
    beta = complex(beta)
    beta2 = abs(beta) ** 2
    if beta2 > space.dim / 4:
        raise TruncationError(f"|beta|^2 = {beta2:.3g} exceeds dim/4 = {space.dim / 4:.3g}")
    if normalized and tail_mass(space, beta2) > TAIL_TOL:
        raise TruncationError(f"coherent tail mass {tail_mass(space, beta2):.2e} beyond dim={space.dim}")
    n = space.n
    if beta == 0:
        out = np.zeros(space.dim, dtype=complex)
        out[0] = 1.0
        return out
    log_mag = n * math.log(abs(beta)) - 0.5 * gammaln(n + 1.0)
    if normalized:
        log_mag -= 0.5 * beta2
    phase = np.exp(1j * n * np.angle(beta))
    return np.exp(log_mag) * phase


def coherent_derivative(space, beta):
    """``d/dbeta`` of the unnormalized coherent ket, i.e. ``adag |beta>`` exactly.

    Amplitudes are ``n beta^(n-1) / sqrt(n!)``.
    """
    beta = complex(beta)
    n = space.n
    out = np.zeros(space.dim, dtype=complex)
    if beta == 0:
        out[1] = 1.0
        return out
    k = n[1:]
    log_mag = (k - 1) * math.log(abs(beta)) + np.log(k) - 0.5 * gammaln(k + 1.0)
    out[1:] = np.exp(log_mag) * np.exp(1j * (k - 1) * np.angle(beta))
    return out


def cat_state(space, alpha, parity):
    """Even (``parity=+1``) or odd (``-1``) cat ``(|a> +- |-a>)/sqrt(2(1 +- e^{-2a^2}))``."""
    alpha = check_alpha(alpha)
    if parity not in (1, -1):
        raise ValueError("parity must be +1 or -1")
    coh = coherent_state(space, alpha)
    # |a> + |-a> keeps even Fock components doubled, |a> - |-a> keeps odd ones
    mask = space.parity_mask(parity)
    ket = np.where(mask, 2.0 * coh, 0.0).astype(complex)
    ket /= np.linalg.norm(ket)
    return ket


def computational_states(space, alpha):
    cplus = cat_state(space, alpha, 1)
    cminus = cat_state(space, alpha, -1)
    return (cplus + cminus) / math.sqrt(2.0), (cplus - cminus) / math.sqrt(2.0)


def bloch_operators(space, alpha):
    """Bloch-axis operators built from the cat pair, keyed ``"I"``, ``"x"``, ``"y"``, ``"z"``.

    ``x`` is the phase axis ``|C+><C+| - |C-><C-|`` and ``z`` the computational axis
    ``|0c><0c| - |1c><1c|``; ``y`` completes a right-handed set, ``[x, y] = 2i z``.
    """
    cp = cat_state(space, alpha, 1)
    cm = cat_state(space, alpha, -1)
    pp = np.outer(cp, cp.conj())
    mm = np.outer(cm, cm.conj())
    pm = np.outer(cp, cm.conj())
    mp = np.outer(cm, cp.conj())
    return {
        "I": pp + mm,
        "x": pp - mm,
        "y": 1j * pm - 1j * mp,
        "z": pm + mp,
    }
