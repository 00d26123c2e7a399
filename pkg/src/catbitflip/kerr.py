"""Kerr Hamiltonian H = (adag^2 - a^2_0)(a^2 - a^2_0), its pseudo-inverse and the S1/S2 kernels.

Three independent routes to the inverse Kerr Hamiltonian are provided:

* ``eigensystem`` + ``inverse_perp_apply``: parity-resolved dense diagonalization;
* ``inverse_kerr_element``: closed form in the unnormalized coherent basis,
  obtained by integrating the Dirichlet Green's function of
  ``(d^2/dchi^2 - alpha^2)`` against ``<t|P_perp|phi>/(t^2 - alpha^2)``;
* ``s1_s2(method="closed_form")``: Shi/Chin expressions for the two kernels.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import hyperdual as hd
from .errors import DomainError, EigensolverFailure, OverflowGuard
from .fock import FockSpace, check_alpha, coherent_derivative, coherent_state, default_dim, ladder_ops
from .special import chin, coth_minus_one, ein, shi

ZERO_MODE_TOL = 1e-8
MAX_ALPHA2 = 80.0
EXP_GUARD = 170.0


def kerr_hamiltonian(space, alpha):
    alpha = check_alpha(alpha)
    a, adag = ladder_ops(space)
    eye = np.eye(space.dim)
    return (adag @ adag - alpha ** 2 * eye) @ (a @ a - alpha ** 2 * eye)


@dataclass(frozen=True)
class KerrEigensystem:
    alpha: float
    dim: int
    mu: dict  # parity -> ascending eigenvalues
    psi: dict  # parity -> (dim, n_sigma) matrix of full-length eigenkets, column l

    def zero_mode(self, parity):
        return self.psi[parity][:, 0]

    def hinv_perp(self):
        """Dense ``H_perp^{-1} = sum_{l>0, sigma} |psi><psi| / mu``."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for p in (1, -1):
            vecs = self.psi[p][:, 1:]
            out += (vecs / self.mu[p][1:]) @ vecs.conj().T
        return out


def eigensystem(space, alpha):
    """Diagonalize the Kerr Hamiltonian separately on the even and odd Fock sectors."""
    alpha = check_alpha(alpha)
    h = kerr_hamiltonian(space, alpha)
    mu, psi = {}, {}
    for p in (1, -1):
        idx = np.flatnonzero(space.parity_mask(p))
        try:
            w, v = np.linalg.eigh(h[np.ix_(idx, idx)])
        except np.linalg.LinAlgError as exc:
            raise EigensolverFailure(f"Kerr eigensolver failed in parity {p:+d} sector") from exc
        if abs(w[0]) > ZERO_MODE_TOL or (len(w) > 1 and w[1] <= ZERO_MODE_TOL):
            raise EigensolverFailure(
                f"expected exactly one zero mode in parity {p:+d} sector, got mu0={w[0]:.3g}, mu1={w[1]:.3g}"
            )
        full = np.zeros((space.dim, len(w)), dtype=complex)
        full[idx, :] = v
        # fix the sign so that the zero mode has positive overlap with the cat state
        if full[:, 0].real @ coherent_state(space, alpha, normalized=False).real < 0:
            full[:, 0] *= -1
        mu[p], psi[p] = w, full
    return KerrEigensystem(alpha, space.dim, mu, psi)


def inverse_perp_apply(eig, v):
    """Apply ``H_perp^{-1}`` to a ket: drop the zero modes, divide the rest by ``mu``."""
    v = np.asarray(v, dtype=complex)
    out = np.zeros(eig.dim, dtype=complex)
    for p in (1, -1):
        vecs = eig.psi[p][:, 1:]
        out += vecs @ ((vecs.conj().T @ v) / eig.mu[p][1:])
    return out


def greens_function(alpha, chi, t):
    """Dirichlet Green's function of ``d^2/dchi^2 - alpha^2`` on ``[-alpha, alpha]``."""
    alpha = check_alpha(alpha)
    if not (-alpha <= chi <= alpha and -alpha <= t <= alpha):
        raise DomainError(f"(chi, t) = ({chi}, {t}) outside [-{alpha}, {alpha}]^2")
    a2 = alpha * alpha
    num = math.cosh(alpha * (t + chi)) - math.cosh(alpha * (abs(t - chi) - 2.0 * alpha))
    return num / (2.0 * alpha * math.sinh(2.0 * a2))


def _pole_integral(terms, c, t0, t1):
    # int_{t0}^{t1} sum_k cf_k e^{g_k t}/(t - c) dt for numerators vanishing at t = c:
    # the logarithms of int e^u/u du = ln|u| - Ein(-u) cancel between the terms
    total = 0.0
    for cf, g in terms:
        total = total + cf * hd.exp(g * c) * (hd.ein(-g * (t0 - c)) - hd.ein(-g * (t1 - c)))
    return total


def _inverse_kerr_generic(alpha, chi, phi):
    a2 = alpha * alpha
    ca, sa = math.cosh(a2), math.sinh(a2)
    # R(t) = <t|P_perp|phi> = e^{t phi} - cosh(at)cosh(a phi)/cosh(a^2) - sinh(at)sinh(a phi)/sinh(a^2)
    r_plus = -0.5 * (hd.cosh(alpha * phi) / ca + hd.sinh(alpha * phi) / sa)
    r_minus = -0.5 * (hd.cosh(alpha * phi) / ca - hd.sinh(alpha * phi) / sa)
    r_terms = [(1.0, phi), (r_plus, alpha), (r_minus, -alpha)]
    ep, em = 0.5 * math.exp(a2), 0.5 * math.exp(-a2)
    left = [(ep, alpha), (-em, -alpha)]  # sinh(alpha (t + alpha))
    right = [(ep, -alpha), (-em, alpha)]  # sinh(alpha (alpha - t))

    def piece(kernel, t0, t1):
        terms = [(rc * kc, rg + kg) for rc, rg in r_terms for kc, kg in kernel]
        return (_pole_integral(terms, alpha, t0, t1) - _pole_integral(terms, -alpha, t0, t1)) / (2.0 * alpha)

    j_left = piece(left, -alpha, chi)
    j_right = piece(right, chi, alpha)
    num = hd.sinh(alpha * (alpha - chi)) * j_left + hd.sinh(alpha * (chi + alpha)) * j_right
    return -num / (alpha * math.sinh(2.0 * a2))


def _guard_element(alpha, chi_bar, phi):
    for x in (chi_bar, phi):
        if abs(alpha * hd.value(x)) > EXP_GUARD or alpha * alpha > MAX_ALPHA2:
            raise OverflowGuard(f"alpha={alpha}, argument {hd.value(x)} outside the exponential guard")


def inverse_kerr_element(alpha, chi_bar, phi):
    """``<chi|H_perp^{-1}|phi>`` between unnormalized coherent states, real arguments.

    ``chi_bar`` and ``phi`` may be :class:`~catbitflip.hyperdual.HyperDual`
    numbers, in which case the derivatives propagate exactly.
    """
    alpha = check_alpha(alpha)
    _guard_element(alpha, chi_bar, phi)
    return _inverse_kerr_generic(alpha, chi_bar, phi)


def inverse_kerr_derivatives(alpha, chi_bar, phi):
    """Return ``(F, dF/dchi_bar, dF/dphi, d2F/dchi_bar dphi)`` of the inverse Kerr element.

    ``d/dchi_bar`` acting on ``<chi|`` is ``<chi|a`` and ``d/dphi`` on ``|phi>`` is
    ``adag|phi>``, so these are the matrix elements with ladder insertions.
    """
    f = inverse_kerr_element(alpha, hd.HyperDual(chi_bar, 1.0, 0.0), hd.HyperDual(phi, 0.0, 1.0))
    return f.v, f.dx, f.dy, f.dxy


def mixed_derivative_fd(alpha, chi_bar, phi, step=None):
    """Central-difference ``d2F/dchi_bar dphi`` with one Richardson extrapolation step."""
    alpha = check_alpha(alpha)
    h = step if step is not None else 1e-3 * max(1.0, alpha)

    def central(h):
        f = lambda x, y: _inverse_kerr_generic(alpha, chi_bar + x, phi + y)
        return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


@dataclass(frozen=True)
class S12Pair:
    s1: float
    s2: float
    method: str


def _check_alpha2(alpha):
    alpha = check_alpha(alpha)
    if alpha * alpha > MAX_ALPHA2:
        raise OverflowGuard(f"alpha^2 = {alpha * alpha} exceeds {MAX_ALPHA2}")
    return alpha


def _inv_sinh2_squared(a2):
    # a2 / sinh^2(2 a2) = 4 a2 e^{-4 a2} / (1 - e^{-4 a2})^2
    return 4.0 * a2 * math.exp(-4.0 * a2) / math.expm1(-4.0 * a2) ** 2


def s1_s2_closed(alpha):
    alpha = _check_alpha2(alpha)
    a2 = alpha * alpha
    pref = _inv_sinh2_squared(a2)
    cm = coth_minus_one(2.0 * a2)
    ch4 = chin(4.0 * a2)
    e4 = ein(4.0 * a2)
    s1 = pref * (e4 - cm * ch4 - shi(2.0 * a2))
    s2 = pref * (2.0 * cm * ch4 - e4)
    return S12Pair(s1, s2, "closed_form")


def _s_from_elements(alpha, e_zero, e_minus):
    # e_zero = <0|(a - alpha) H^-1 adag|alpha>, e_minus = <-alpha|a H^-1 adag|alpha> with
    # unnormalized coherent kets; the rate formula uses normalized ones (e^{-a^2/2} each)
    a2 = alpha * alpha
    inv = 1.0 / math.sinh(2.0 * a2)
    s1 = -a2 * inv * e_zero
    s2 = 2.0 * a2 * math.exp(-a2) * inv * e_minus
    return s1, s2


def s1_s2_eigensum(alpha, eig=None):
    alpha = _check_alpha2(alpha)
    if eig is None:
        eig = eigensystem(FockSpace(default_dim(alpha * alpha) + 10), alpha)
    space = FockSpace(eig.dim)
    u = inverse_perp_apply(eig, coherent_derivative(space, alpha))
    e_zero = (u[1] - alpha * u[0]).real
    e_minus = (coherent_derivative(space, -alpha).conj() @ u).real
    s1, s2 = _s_from_elements(alpha, e_zero, e_minus)
    return S12Pair(s1, s2, "eigensum")


def s1_s2_green_kernel(alpha):
    """S1, S2 from exact derivatives of the closed-form inverse Kerr element."""
    alpha = _check_alpha2(alpha)
    _, _, d_phi, d_mix = inverse_kerr_derivatives(alpha, 0.0, alpha)
    e_zero = d_mix - alpha * d_phi
    e_minus = inverse_kerr_derivatives(alpha, -alpha, alpha)[3]
    s1, s2 = _s_from_elements(alpha, e_zero, e_minus)
    return S12Pair(s1, s2, "green_kernel")


def s1_s2(alpha, method="closed_form"):
    """The second-order kernels S1 and S2 at cat amplitude ``alpha``.

    ``method`` is ``"closed_form"`` (Shi/Chin), ``"eigensum"`` (Kerr eigenstates)
    or ``"green_kernel"`` (derivatives of the closed-form inverse Kerr element).
    """
    if method == "closed_form":
        return s1_s2_closed(alpha)
    if method == "eigensum":
        return s1_s2_eigensum(alpha)
    if method == "green_kernel":
        return s1_s2_green_kernel(alpha)
    raise ValueError(f"unknown method {method!r}")
