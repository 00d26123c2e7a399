"""Superoperators on column-stacked density matrices, cat-subspace invariants and leakage.

``vec(X)[i + j*dim] = X[i, j]`` so that ``vec(A X B) = (B^T kron A) vec(X)``.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np
from scipy import integrate

from ._accel import njit, select
from .errors import (
    ConfigError,
    ConvergenceError,
    DimensionMismatch,
    NotHermitian,
    PreconditionViolated,
    QuadratureFailure,
)
from .fock import (
    FockSpace,
    bloch_operators,
    cat_state,
    check_alpha,
    computational_states,
    ladder_ops,
    number_op,
)
from .special import bessel_ive_all, log_double_factorial, log_factorial

HERM_TOL = 1e-12
STATE_TOL = 1e-10
LEAK_ZERO_TOL = 1e-9


# ---------------------------------------------------------------- superoperators


def vec(x):
    return np.asarray(x, dtype=complex).reshape(-1, order="F")


def unvec(v, dim):
    return np.asarray(v).reshape((dim, dim), order="F")


@dataclass(frozen=True, eq=False)
class Superoperator:
    entries: np.ndarray
    dim: int

    def __post_init__(self):
        if self.entries.shape != (self.dim ** 2, self.dim ** 2):
            raise DimensionMismatch(f"superoperator shape {self.entries.shape} does not match dim={self.dim}")

    def apply(self, rho):
        """Act on an operator (2-d) or on its vectorization (1-d)."""
        rho = np.asarray(rho)
        if rho.ndim == 2:
            if rho.shape != (self.dim, self.dim):
                raise DimensionMismatch(f"operator shape {rho.shape} vs dim={self.dim}")
            return unvec(self.entries @ vec(rho), self.dim)
        return self.entries @ rho

    def adjoint_apply(self, x):
        """Heisenberg-picture action: ``Tr(X^dag S(rho)) = Tr((S^dag X)^dag rho)``."""
        return unvec(self.entries.conj().T @ vec(x), self.dim)

    def __add__(self, other):
        _match(self, other)
        return Superoperator(self.entries + other.entries, self.dim)

    def __matmul__(self, other):
        _match(self, other)
        return Superoperator(self.entries @ other.entries, self.dim)

    def scaled(self, factor):
        return Superoperator(factor * self.entries, self.dim)


def _match(s1, s2):
    if s1.dim != s2.dim:
        raise DimensionMismatch(f"superoperator dims differ: {s1.dim} vs {s2.dim}")


def sandwich(a, b):
    """Superoperator of ``X -> A X B``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return Superoperator(np.kron(b.T, a), a.shape[0])


def zero_superop(dim):
    return Superoperator(np.zeros((dim * dim, dim * dim), dtype=complex), dim)


def _square(op, dim=None):
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or (dim is not None and op.shape[0] != dim):
        raise DimensionMismatch(f"expected a square {dim or ''} matrix, got shape {op.shape}")
    return op


def dissipator_superop(jump, rate=1.0):
    """``rate * D[L]`` with ``D[L] rho = L rho L^dag - {L^dag L, rho}/2``."""
    jump = _square(jump)
    dim = jump.shape[0]
    eye = np.eye(dim)
    ldl = jump.conj().T @ jump
    s = np.kron(jump.conj(), jump) - 0.5 * np.kron(eye, ldl) - 0.5 * np.kron(ldl.T, eye)
    return Superoperator(rate * s, dim)


def hamiltonian_superop(v, strength=1.0):
    """``rho -> -i strength [V, rho]`` for Hermitian ``V``."""
    v = _square(v)
    if np.max(np.abs(v - v.conj().T), initial=0.0) > HERM_TOL * max(1.0, np.max(np.abs(v))):
        raise NotHermitian("Hamiltonian perturbation must be Hermitian")
    eye = np.eye(v.shape[0])
    return Superoperator(-1j * strength * (np.kron(eye, v) - np.kron(v.T, eye)), v.shape[0])


def two_photon_jump(space, alpha):
    a, _ = ladder_ops(space)
    return a @ a - alpha ** 2 * np.eye(space.dim)


def l0_superop(space, alpha, kappa2=1.0):
    """Two-photon dissipation ``kappa2 D[a^2 - alpha^2]``."""
    alpha = check_alpha(alpha)
    return dissipator_superop(two_photon_jump(space, alpha), kappa2)


# ---------------------------------------------------------------- perturbations

KINDS = (
    "photon_loss",
    "photon_gain",
    "dephasing",
    "detuning",
    "zgate",
    "generic_dissipator",
    "generic_hamiltonian",
)
DISSIPATIVE = ("photon_loss", "photon_gain", "dephasing", "generic_dissipator")


@dataclass(frozen=True, eq=False)
class PerturbationSpec:
    """Declarative perturbation; strengths are in units of kappa2.

    ``strength`` is kappa1, kappa, kappa_phi, Delta, eps_Z or the generic
    coefficient according to ``kind``.  ``m``/``n`` select ``D[adag^m a^n]``
    and ``operator`` holds V for ``generic_hamiltonian``.
    """

    kind: str
    strength: float = 0.0
    m: int = 0
    n: int = 0
    operator: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown perturbation kind {self.kind!r}; expected one of {KINDS}")
        if not math.isfinite(self.strength):
            raise ConfigError("perturbation strength must be finite")
        if self.kind in DISSIPATIVE and self.strength < 0:
            raise ConfigError(f"{self.kind} strength must be >= 0")
        if self.kind == "zgate" and self.strength < 0:
            raise ConfigError("zgate amplitude eps_Z must be >= 0")
        if self.kind == "generic_dissipator":
            if int(self.m) != self.m or int(self.n) != self.n or self.m < 0 or self.n < 0:
                raise ConfigError("m and n must be non-negative integers")
            if self.m == 0 and self.n == 0:
                raise ConfigError("(m, n) = (0, 0) is the identity jump, not a perturbation")
        if self.kind == "generic_hamiltonian" and self.operator is None:
            raise ConfigError("generic_hamiltonian needs an operator V")

    @property
    def is_hamiltonian(self):
        return self.kind in ("detuning", "zgate", "generic_hamiltonian")

    def describe(self):
        out = {"kind": self.kind, "strength": self.strength}
        if self.kind == "generic_dissipator":
            out.update(m=int(self.m), n=int(self.n))
        return out


def perturbation_operator(space, spec):
    """Return the jump operator (dissipators) or the Hamiltonian V (Hamiltonian kinds)."""
    a, adag = ladder_ops(space)
    if spec.kind == "photon_loss":
        return a
    if spec.kind == "photon_gain":
        return adag
    if spec.kind == "dephasing":
        return number_op(space)
    if spec.kind == "generic_dissipator":
        return np.linalg.matrix_power(adag, int(spec.m)) @ np.linalg.matrix_power(a, int(spec.n))
    if spec.kind == "detuning":
        return number_op(space)
    if spec.kind == "zgate":
        return a + adag
    return _square(spec.operator, space.dim)


def perturbation_superop(space, alpha, spec):
    op = perturbation_operator(space, spec)
    if spec.is_hamiltonian:
        return hamiltonian_superop(op, spec.strength)
    return dissipator_superop(op, spec.strength)


# ---------------------------------------------------------------- invariants


@njit
def _sigma_pm_fill_nb(dim, log_bessel, log_pref):
    out = np.zeros((dim, dim))
    for row in range(1, dim, 2):
        n = (row - 1) // 2
        lr = 0.5 * math.lgamma(row + 1.0) - (n * math.log(2.0) + math.lgamma(n + 1.0))
        for col in range(0, dim, 2):
            m = col // 2
            k = abs(n - m)
            lc = 0.5 * math.lgamma(col + 1.0) - (m * math.log(2.0) + math.lgamma(m + 1.0))
            mag = math.exp(log_pref + log_bessel[k] + lr + lc) / (2 * n + 1 - 2 * m)
            out[row, col] = -mag if (n - m) % 2 else mag
    return out


def _sigma_pm_fill_np(dim, log_bessel, log_pref):
    rows = np.arange(1, dim, 2)
    cols = np.arange(0, dim, 2)
    n = (rows - 1) // 2
    m = cols // 2
    lr = np.array([0.5 * log_factorial(r) - log_double_factorial(2 * k) for r, k in zip(rows, n)])
    lc = np.array([0.5 * log_factorial(c) - log_double_factorial(2 * k) for c, k in zip(cols, m)])
    diff = n[:, None] - m[None, :]
    vals = np.exp(log_pref + log_bessel[np.abs(diff)] + lr[:, None] + lc[None, :])
    vals *= np.where(diff % 2, -1.0, 1.0) / (2 * diff + 1)
    out = np.zeros((dim, dim))
    out[np.ix_(rows, cols)] = vals
    return out


_sigma_pm_fill = select(_sigma_pm_fill_nb, _sigma_pm_fill_np)


def normalization_n0(alpha):
    a2 = alpha * alpha
    return math.sqrt(2.0 * a2 / math.sinh(2.0 * a2)) if a2 < 350 else 0.0


def sigma_plus_minus(dim, alpha):
    """Fock matrix of the invariant ``sigma^{+-}`` (odd rows, even columns), truncated at ``dim``.

    Entries ``<2n+1|s|2m> = N0 (-1)^{n-m} I_{n-m}(a^2) sqrt((2n+1)!(2m)!) / ((2n+1-2m)(2n)!!(2m)!!)``
    are assembled in log space: ``ln(N0 e^{a^2})`` is finite and ``e^{-a^2} I_k`` is scaled.
    """
    a2 = alpha * alpha
    log_pref = 0.5 * math.log(4.0 * a2 / -math.expm1(-4.0 * a2))
    with np.errstate(divide="ignore"):
        log_bessel = np.log(bessel_ive_all(dim, a2))
    return _sigma_pm_fill(dim, log_bessel, log_pref)


def invariants(space, alpha, check_convergence=True):
    """Left zero-modes of L0 as a dict keyed ``"++"``, ``"--"``, ``"+-"``, ``"-+"``, ``"z"``."""
    alpha = check_alpha(alpha)
    dim = space.dim
    even = np.diag((space.n % 2 == 0).astype(complex))
    spm = sigma_plus_minus(dim, alpha).astype(complex)
    if check_convergence:
        _check_invariant_tail(space, alpha, spm)
    return {
        "++": even,
        "--": np.eye(dim) - even,
        "+-": spm,
        "-+": spm.conj().T,
        "z": 0.5 * (spm + spm.conj().T),
    }


def _check_invariant_tail(space, alpha, spm, tol=1e-10):
    # every retained entry is a single closed-form term, so the truncation shows up
    # only through the pairing with the truncated cat states
    pairing = cat_state(space, alpha, -1).conj() @ spm @ cat_state(space, alpha, 1)
    if abs(pairing - 1.0) > tol:
        raise ConvergenceError(
            f"invariant pairing <C-|s+-|C+> = {pairing.real:.15g} deviates from 1 at dim={space.dim}"
        )


@dataclass(frozen=True, eq=False)
class CatBasis:
    alpha: float
    dim: int
    cplus: np.ndarray
    cminus: np.ndarray
    zero: np.ndarray
    one: np.ndarray
    rho: dict  # Bloch operators "I", "x", "y", "z"
    sigma: dict  # invariants "++", "--", "+-", "-+", "z"
    n0: float

    @property
    def cats(self):
        return {1: self.cplus, -1: self.cminus}

    def right(self, s, sp):
        """Right stationary operator ``|C^s><C^sp|``."""
        return np.outer(self.cats[s], self.cats[sp].conj())

    def left(self, s, sp):
        """Invariant dual to ``|C^s><C^sp|`` (``Tr(left^dag right) = 1``)."""
        key = {(1, 1): "++", (-1, -1): "--", (1, -1): "-+", (-1, 1): "+-"}[(s, sp)]
        return self.sigma[key]


def cat_basis(space, alpha, check_convergence=True):
    alpha = check_alpha(alpha)
    zero, one = computational_states(space, alpha)
    return CatBasis(
        alpha=alpha,
        dim=space.dim,
        cplus=cat_state(space, alpha, 1),
        cminus=cat_state(space, alpha, -1),
        zero=zero,
        one=one,
        rho=bloch_operators(space, alpha),
        sigma=invariants(space, alpha, check_convergence),
        n0=normalization_n0(alpha),
    )


def biorthonormality_table(basis):
    """4x4 matrix ``Tr(left(s1, s1')^dag |C^s2><C^s2'|)`` over the four cat pairs."""
    pairs = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    return np.array([[np.trace(basis.left(*p).conj().T @ basis.right(*q)) for q in pairs] for p in pairs])


def _i0_series(w, tol=1e-17):
    # I0(sqrt(w)) = sum_k (w/4)^k / (k!)^2, entire in w
    term = 1.0 + 0j
    total = term
    k = 0
    while True:
        k += 1
        term *= (w / 4.0) / (k * k)
        total += term
        if abs(term) <= tol * abs(total) and k > abs(w) ** 0.5:
            return total
        if k > 2000:
            raise QuadratureFailure("I0 series did not converge")


def invariant_coherent_element(alpha, chi_bar, phi):
    """``<chi|sigma^{+-}|phi>`` between unnormalized coherent states by quadrature over theta."""
    alpha = check_alpha(alpha)
    if abs(alpha * chi_bar) > 170 or abs(alpha * phi) > 170:
        raise QuadratureFailure("arguments outside the exponential guard")
    a2 = alpha * alpha
    n0 = normalization_n0(alpha)

    def integrand(theta):
        w = (a2 - phi ** 2 * np.exp(-2j * theta)) * (a2 - chi_bar ** 2 * np.exp(2j * theta))
        return np.exp(1j * theta) * _i0_series(w)

    with warnings.catch_warnings():
        # the imaginary part is often zero to roundoff, which quad reports as a failure to reach epsrel
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re, _ = integrate.quad(lambda t: integrand(t).real, 0.0, math.pi, epsabs=1e-12, epsrel=1e-12, limit=2000)
        im, _ = integrate.quad(lambda t: integrand(t).imag, 0.0, math.pi, epsabs=1e-12, epsrel=1e-12, limit=2000)
    if not (math.isfinite(re) and math.isfinite(im)):
        raise QuadratureFailure("non-finite quadrature result")
    return -0.5j * n0 * chi_bar * complex(re, im)


# ---------------------------------------------------------------- projections and leakage


def _check_operator(rho, basis):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (basis.dim, basis.dim):
        raise DimensionMismatch(f"operator shape {rho.shape} vs basis dim {basis.dim}")
    return rho


def parallel_coefficients(rho, basis):
    """``{(s, s'): Tr(left(s, s')^dag rho)}`` for the four cat pairs."""
    rho = _check_operator(rho, basis)
    return {(s, sp): np.sum(basis.left(s, sp).conj() * rho) for s in (1, -1) for sp in (1, -1)}


def project_parallel(rho, basis):
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for (s, sp), c in parallel_coefficients(rho, basis).items():
        out += c * basis.right(s, sp)
    return out


def project_perp(rho, basis):
    return _check_operator(rho, basis) - project_parallel(rho, basis)


def trace_parallel(x, basis):
    """``sum_s <C^s|X|C^s>``, the population of the cat subspace."""
    x = _check_operator(x, basis)
    return sum((c.conj() @ x @ c) for c in (basis.cplus, basis.cminus))


def validate_density_matrix(rho, tol=STATE_TOL):
    rho = np.asarray(rho, dtype=complex)
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise NotHermitian("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise PreconditionViolated(f"density matrix trace {np.trace(rho).real:.12g} != 1")
    if np.linalg.eigvalsh(rho)[0] < -tol:
        raise PreconditionViolated("density matrix is not positive semidefinite")
    return rho


def leakage(rho, basis):
    """Population outside the cat subspace, ``1 - sum_s <C^s|rho|C^s>``."""
    rho = validate_density_matrix(_check_operator(rho, basis))
    return float(1.0 - trace_parallel(rho, basis).real)


@dataclass(frozen=True)
class LeakageReport:
    l_value: float
    first_order_rate: float
    second_order_curvature: float


def _l1(spec, basis):
    return perturbation_superop(FockSpace(basis.dim), basis.alpha, spec)


def first_order_leakage_rate(spec, rho0, basis):
    """``dl/dt`` at t = 0, i.e. ``-Tr_par[L1 rho0]``."""
    return float(-trace_parallel(_l1(spec, basis).apply(rho0), basis).real)


def second_order_leakage_curvature(spec, rho0, basis, tol=LEAK_ZERO_TOL):
    """``d2l/dt2`` at t = 0 for first-order non-leaking perturbations, ``-Tr_par[L1^2 rho0]``."""
    l1 = _l1(spec, basis)
    first = -trace_parallel(l1.apply(rho0), basis).real
    if abs(first) > tol:
        raise PreconditionViolated(f"first-order leakage rate {first:.3e} is not zero")
    return float(-trace_parallel(l1.apply(l1.apply(rho0)), basis).real)


def leakage_report(spec, rho0, basis):
    first = first_order_leakage_rate(spec, rho0, basis)
    try:
        curv = second_order_leakage_curvature(spec, rho0, basis)
    except PreconditionViolated:
        curv = float("nan")
    return LeakageReport(leakage(rho0, basis), first, curv)
