"""Closed-form and eigensum bit-flip rates.

Conventions: every rate is in the same units as the strengths passed in (use
``kappa2 = 1`` for units of kappa2), ``Gamma = -Re(lambda_z)/2``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ConvergenceError, OverflowGuard, PreconditionViolated, UnsupportedOrder
from .fock import FockSpace, check_alpha, default_dim
from .kerr import MAX_ALPHA2, eigensystem, s1_s2_closed
from .liouville import (
    LEAK_ZERO_TOL,
    PerturbationSpec,
    cat_basis,
    first_order_leakage_rate,
    perturbation_operator,
    perturbation_superop,
    second_order_leakage_curvature,
)
from .special import chin, coth_minus_one, ein, shi


@dataclass(frozen=True)
class RateResult:
    lambda_first: complex
    lambda_second: complex
    gamma_first: float
    gamma_second: float
    gamma_bitflip: float
    asymptotic_gamma: float
    method_notes: str = ""


def _alpha_guarded(alpha):
    alpha = check_alpha(alpha)
    if alpha * alpha > MAX_ALPHA2:
        raise OverflowGuard(f"alpha^2 = {alpha * alpha} exceeds {MAX_ALPHA2}")
    return alpha


def _a_over_sinh2_sq(a2):
    # a2 / sinh^2(2 a2) without overflow
    return 4.0 * a2 * math.exp(-4.0 * a2) / math.expm1(-4.0 * a2) ** 2


def _result(lam1, lam2, asym, notes, gamma1=None):
    g1 = -lam1.real / 2.0 if gamma1 is None else gamma1
    g2 = -lam2.real / 2.0
    return RateResult(complex(lam1), complex(lam2), g1, g2, g1 + g2, asym, notes)


def photon_loss_rate(alpha, kappa1, kappa2=1.0):
    """Photon loss ``kappa1 D[a]``: first order inside the cat subspace plus second-order leakage path."""
    alpha = _alpha_guarded(alpha)
    if kappa1 < 0 or kappa2 <= 0:
        raise ValueError("need kappa1 >= 0 and kappa2 > 0")
    a2 = alpha * alpha
    cm = coth_minus_one(2.0 * a2)
    lam1 = -kappa1 * a2 * cm
    # Gamma2 = kappa1^2 a^2 [Shi(2a^2) - (coth 2a^2 - 1) Chin(4a^2)] / (2 kappa2 sinh^2 2a^2)
    gamma2 = kappa1 ** 2 / kappa2 * 0.5 * _a_over_sinh2_sq(a2) * (shi(2.0 * a2) - cm * chin(4.0 * a2))
    asym = kappa1 * a2 * math.exp(-4.0 * a2) + kappa1 ** 2 / (2.0 * kappa2) * math.exp(-2.0 * a2)
    return _result(lam1, -2.0 * gamma2, asym, "closed form; second order via Shi/Chin")


def zgate_first_order(alpha, eps_z):
    """Rotation eigenvalue ``lambda_{x+iy}`` (the other member of the pair is its negative)."""
    a2 = alpha * alpha
    return 2j * alpha * eps_z * (math.sqrt(math.tanh(a2)) + math.sqrt(1.0 / math.tanh(a2)))


def zgate_rate(alpha, eps_z, kappa2=1.0):
    """Z-gate drive ``-i eps_Z [a + adag, .]``."""
    alpha = _alpha_guarded(alpha)
    if eps_z < 0 or kappa2 <= 0:
        raise ValueError("need eps_z >= 0 and kappa2 > 0")
    a2 = alpha * alpha
    # 2 eps^2 [Shi(4a^2) - Chin(4a^2) - 2 Shi(2a^2)] / (kappa2 sinh^2 2a^2), with Shi - Chin = Ein
    lam2 = 2.0 * eps_z ** 2 / kappa2 * _a_over_sinh2_sq(a2) / a2 * (ein(4.0 * a2) - 2.0 * shi(2.0 * a2))
    asym = 2.0 * eps_z ** 2 * math.exp(-2.0 * a2) / (kappa2 * a2)
    return _result(zgate_first_order(alpha, eps_z), lam2, asym,
                   "lambda_first is the x+iy rotation eigenvalue; z gets no first-order decay", gamma1=0.0)


def detuning_rate(alpha, delta, kappa2=1.0):
    """Detuning ``-i Delta [adag a, .]``; Gamma uses ``-lambda_{+-}^(2)/2``."""
    alpha = _alpha_guarded(alpha)
    if not math.isfinite(delta) or kappa2 <= 0:
        raise ValueError("need finite delta and kappa2 > 0")
    a2 = alpha * alpha
    lam1 = 1j * delta * 2.0 * a2 / math.sinh(2.0 * a2)
    lam2 = 4.0 * delta ** 2 * s1_s2_closed(alpha).s1 / kappa2
    asym = 2.0 * delta ** 2 * math.exp(-2.0 * a2) / kappa2
    return _result(lam1, lam2, asym, "lambda refers to the +- coherence; first order is a pure rotation")


def rate_for_spec(alpha, spec, kappa2=1.0):
    if spec.kind == "photon_loss":
        return photon_loss_rate(alpha, spec.strength, kappa2)
    if spec.kind == "zgate":
        return zgate_rate(alpha, spec.strength, kappa2)
    if spec.kind == "detuning":
        return detuning_rate(alpha, spec.strength, kappa2)
    if spec.kind in ("photon_gain", "dephasing", "generic_dissipator"):
        m, n = {"photon_gain": (1, 0), "dephasing": (1, 1)}.get(spec.kind, (spec.m, spec.n))
        if m == 0:
            raise UnsupportedOrder("D[a^n] does not leak at first order; no closed form shipped")
        g = leaking_dissipator_rate(alpha, m, n, spec.strength, method="closed" if m <= 5 else "numeric")
        return RateResult(complex(-2.0 * g), 0j, g, 0.0, g, g, "first-order leaking dissipator (tabulated leading-exponential form)")
    raise UnsupportedOrder(f"no analytic rate for {spec.kind}")


# ---------------------------------------------------------------- leaking dissipators

_TABLE = {
    1: lambda a2, n: a2 ** n,
    2: lambda a2, n: 2.0 * a2 ** (n + 1),
    3: lambda a2, n: 3.0 * a2 ** n * (a2 ** 2 + 2.0),
    4: lambda a2, n: 2.0 * a2 ** (n + 1) * (2.0 * a2 ** 2 + 27.0),
    5: lambda a2, n: 5.0 * a2 ** n * (a2 ** 4 + 48.0 * a2 ** 2 + 24.0),
}


def leaking_dissipator_rate(alpha, m, n, kappa=1.0, method="closed", dim=None):
    """First-order bit-flip rate of ``kappa D[adag^m a^n]`` for leaking jumps (m >= 1).

    ``method="closed"`` uses the tabulated leading-exponential forms (m <= 5);
    ``method="numeric"`` evaluates ``-Tr(sigma_z L1 rho_z)/2`` exactly in a truncated space.
    """
    alpha = _alpha_guarded(alpha)
    if m < 1 or n < 0:
        raise ValueError("leaking dissipators need m >= 1 and n >= 0")
    a2 = alpha * alpha
    if method == "closed":
        if m > 5:
            raise UnsupportedOrder(f"closed form is tabulated for m <= 5, got m={m}")
        return kappa * _TABLE[m](a2, n) * math.exp(-2.0 * a2)
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")
    dim = dim or default_dim(a2) + 10 + 2 * m
    space = FockSpace(dim)
    basis = cat_basis(space, alpha)
    spec = PerturbationSpec("generic_dissipator", kappa, m=m, n=n)
    lam = np.sum(basis.sigma["z"].conj() * perturbation_superop(space, alpha, spec).apply(basis.rho["z"]))
    return float(-lam.real / 2.0)


# ---------------------------------------------------------------- classification

LEAKS_FIRST = "leaks_first_order"
LEAKS_SECOND = "leaks_second_order_only"
NON_LEAKING = "completely_non_leaking"


@dataclass(frozen=True)
class PerturbationClass:
    tag: str


def classify_perturbation(spec, basis, tol=LEAK_ZERO_TOL):
    """Order at which ``spec`` first moves population out of the cat subspace."""
    rhos = [np.outer(k, k.conj()) for k in (basis.zero, basis.one)]
    if not spec.is_hamiltonian:
        if max(abs(first_order_leakage_rate(spec, r, basis)) for r in rhos) > tol:
            return PerturbationClass(LEAKS_FIRST)
    curv = max(abs(second_order_leakage_curvature(spec, r, basis, tol)) for r in rhos)
    return PerturbationClass(LEAKS_SECOND if curv > tol else NON_LEAKING)


# ---------------------------------------------------------------- eigensum route


@dataclass(frozen=True)
class EigensumResult:
    lambda_second: complex
    contributions: dict  # parity -> per-level contributions, index 0 = l=1


def second_order_eigensum(spec, alpha, kappa2=1.0, eig=None, basis=None, target="z", tail_tol=1e-8):
    """``lambda^(2) = -Tr(sigma^dag L1 L0^{-1} P_perp L1 rho)`` through the Kerr eigensystem.

    Valid for perturbations that do not leak at first order: ``L1 rho`` then has
    only cat-bra or cat-ket components outside the cat block, and
    ``L0 (|psi_l><C|) = -(kappa2 mu_l / 2) |psi_l><C|``.  ``target`` selects the
    Bloch pair: ``"z"`` (sigma_z, rho_z) or ``"+-"`` (the coherence ``|C+><C-|``).
    """
    alpha = check_alpha(alpha)
    if eig is None or basis is None:
        space = FockSpace(default_dim(alpha * alpha) + 10)
        eig = eig or eigensystem(space, alpha)
        basis = basis or cat_basis(space, alpha)
    if eig.dim != basis.dim:
        raise PreconditionViolated("eigensystem and cat basis use different dimensions")
    space = FockSpace(eig.dim)
    l1 = perturbation_superop(space, alpha, spec)
    if target == "z":
        rho, sigma = basis.rho["z"], basis.sigma["z"]
    elif target == "+-":
        rho, sigma = basis.right(1, -1), basis.left(1, -1)
    else:
        raise ValueError(f"unknown target {target!r}")
    x = l1.apply(rho)
    pc = basis.right(1, 1) + basis.right(-1, -1)
    q = np.eye(space.dim) - pc
    if np.max(np.abs(q @ x @ q)) > 1e-9 * max(1.0, np.max(np.abs(x))):
        raise PreconditionViolated("perturbation leaks at first order; eigensum route does not apply")
    g = l1.adjoint_apply(sigma)
    contributions = {}
    total = 0j
    for p in (1, -1):
        psi = eig.psi[p][:, 1:]
        mu = eig.mu[p][1:]
        m1 = x @ pc @ g.conj().T
        m2 = g.conj().T @ pc @ x
        diag = np.sum(psi.conj() * ((m1 + m2) @ psi), axis=0)
        c = (2.0 / kappa2) * diag / mu
        contributions[p] = c
        total += c.sum()
    scale = max(abs(total), 1e-300)
    for p, c in contributions.items():
        tail = c[int(0.8 * len(c)):].sum()
        if abs(tail) > tail_tol * scale:
            raise ConvergenceError(f"last 20% of Kerr levels contribute {abs(tail) / scale:.2e} of the eigensum")
    return EigensumResult(complex(total), contributions)


def photon_loss_second_order_eigensum(alpha, kappa1, kappa2=1.0, eig=None, basis=None):
    """Second-order photon-loss ``lambda_z`` from the Kerr eigensum; compare with kappa1^2 (S1+S2)/kappa2."""
    spec = PerturbationSpec("photon_loss", kappa1)
    return second_order_eigensum(spec, alpha, kappa2, eig, basis).lambda_second.real
