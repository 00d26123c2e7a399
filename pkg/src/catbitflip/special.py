r"""Cancellation-stable scalar special functions.

Conventions
-----------
``shi(x)  = \int_0^x sinh(t)/t dt``
``chin(x) = \int_0^x (cosh t - 1)/t dt = Chi(x) - ln x - gamma`` (entire)
``ein(x)  = \int_0^x (1 - e^{-t})/t dt`` (entire, any real sign)

Arguments up to 30 in magnitude use convergent series with positive terms;
beyond that the exponential integral pair Ei/E1 is evaluated from its
asymptotic expansion truncated at the smallest term.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from ._accel import njit, select
from .errors import OverflowGuard

EULER_GAMMA = 0.57721566490153286061
SWITCH = 30.0
MAX_ARG = 700.0


@dataclass(frozen=True)
class SpecialValue:
    value: float
    method_tag: str  # "series" | "asymptotic" | "quadrature"


# ---------------------------------------------------------------- kernels


@njit
def _shi_chin_series_nb(x):
    shi = 0.0
    chin = 0.0
    term = 1.0
    k = 0
    while True:
        k += 1
        term *= x / k
        contrib = term / k
        if k % 2 == 1:
            shi += contrib
        else:
            chin += contrib
        if k > x and contrib <= 1e-18 * (shi + chin):
            break
        if term == 0.0:
            break
    return shi, chin


def _series_length(x):
    return int(x + 30.0 + 8.0 * math.sqrt(x + 1.0))


def _shi_chin_series_np(x):
    if x == 0.0:
        return 0.0, 0.0
    k = np.arange(1, _series_length(x) + 1, dtype=float)
    terms = np.exp(k * math.log(x) - gammaln(k + 1.0) - np.log(k))
    return float(terms[0::2].sum()), float(terms[1::2].sum())


@njit
def _ein_pos_series_nb(x):
    # Ein(x) = e^{-x} sum_{n>=1} H_n x^n / n!, all terms positive for x > 0
    total = 0.0
    term = 1.0
    harmonic = 0.0
    n = 0
    while True:
        n += 1
        term *= x / n
        harmonic += 1.0 / n
        contrib = term * harmonic
        total += contrib
        if n > x and contrib <= 1e-18 * total:
            break
        if term == 0.0:
            break
    return math.exp(-x) * total


def _ein_pos_series_np(x):
    if x == 0.0:
        return 0.0
    k = np.arange(1, _series_length(x) + 1, dtype=float)
    harmonic = np.cumsum(1.0 / k)
    terms = np.exp(k * math.log(x) - gammaln(k + 1.0) - x) * harmonic
    return float(terms.sum())


@njit
def _ein_neg_series_nb(y):
    # Ein(-y) = -sum_{k>=1} y^k / (k k!), y >= 0
    total = 0.0
    term = 1.0
    k = 0
    while True:
        k += 1
        term *= y / k
        contrib = term / k
        total += contrib
        if k > y and contrib <= 1e-18 * total:
            break
        if term == 0.0:
            break
    return -total


def _ein_neg_series_np(y):
    if y == 0.0:
        return 0.0
    k = np.arange(1, _series_length(y) + 1, dtype=float)
    terms = np.exp(k * math.log(y) - gammaln(k + 1.0) - np.log(k))
    return -float(terms.sum())


@njit
def _ei_e1_asymptotic_nb(x):
    # x e^{-x} Ei(x) ~ sum k!/x^k ; x e^{x} E1(x) ~ sum (-1)^k k!/x^k
    s_ei = 1.0
    s_e1 = 1.0
    term = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * k / x
        if nxt >= term:
            break
        term = nxt
        s_ei += term
        if k % 2 == 1:
            s_e1 -= term
        else:
            s_e1 += term
    return math.exp(x) / x * s_ei, math.exp(-x) / x * s_e1


def _ei_e1_asymptotic_np(x):
    k = np.arange(0, int(math.ceil(x)) + 1, dtype=float)
    k = k[k < x]  # successive ratios k/x < 1: keep terms down to the smallest one
    terms = np.exp(gammaln(k + 1.0) - k * math.log(x))
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    return (math.exp(x) / x * float(terms.sum()),
            math.exp(-x) / x * float((signs * terms).sum()))


_shi_chin_series = select(_shi_chin_series_nb, _shi_chin_series_np)
_ein_pos_series = select(_ein_pos_series_nb, _ein_pos_series_np)
_ein_neg_series = select(_ein_neg_series_nb, _ein_neg_series_np)
_ei_e1_asymptotic = select(_ei_e1_asymptotic_nb, _ei_e1_asymptotic_np)


# ---------------------------------------------------------------- public API


def _guard(x):
    if not math.isfinite(x) or abs(x) > MAX_ARG:
        raise OverflowGuard(f"argument {x!r} exceeds |x| <= {MAX_ARG}")


def _branch(x, branch):
    if branch is None:
        return "series" if abs(x) <= SWITCH else "asymptotic"
    if branch not in ("series", "asymptotic"):
        raise ValueError(f"unknown branch {branch!r}")
    return branch


def shi(x, branch=None):
    """Hyperbolic sine integral for ``0 <= x <= 700``."""
    x = float(x)
    _guard(x)
    if x < 0:
        raise ValueError("shi is implemented for x >= 0")
    if x == 0.0:
        return 0.0
    if _branch(x, branch) == "series":
        return _shi_chin_series(x)[0]
    ei, e1 = _ei_e1_asymptotic(x)
    return 0.5 * (ei + e1)


def chin(x, branch=None):
    """Entire hyperbolic cosine integral ``Chi(x) - ln x - gamma`` for ``0 <= x <= 700``."""
    x = float(x)
    _guard(x)
    if x < 0:
        raise ValueError("chin is implemented for x >= 0")
    if x == 0.0:
        return 0.0
    if _branch(x, branch) == "series":
        return _shi_chin_series(x)[1]
    ei, e1 = _ei_e1_asymptotic(x)
    return 0.5 * (ei - e1) - math.log(x) - EULER_GAMMA


def ein(x, branch=None):
    """Complementary exponential integral on the real line, ``|x| <= 700``."""
    x = float(x)
    _guard(x)
    if x == 0.0:
        return 0.0
    y = abs(x)
    if _branch(x, branch) == "series":
        return _ein_pos_series(x) if x > 0 else _ein_neg_series(y)
    ei, e1 = _ei_e1_asymptotic(y)
    if x > 0:
        return math.log(y) + EULER_GAMMA + e1
    return math.log(y) + EULER_GAMMA - ei


def ein_prime(x):
    """d/dx Ein(x) = (1 - e^{-x})/x."""
    x = float(x)
    if x == 0.0:
        return 1.0
    return -math.expm1(-x) / x


def ein_second(x):
    """d^2/dx^2 Ein(x) = (e^{-x}(1 + x) - 1)/x^2."""
    x = float(x)
    if abs(x) < 0.5:
        # sum_{k>=2} (-1)^{k+1} (k-1) x^{k-2} / k!
        return sum((-1) ** (k + 1) * (k - 1) * x ** (k - 2) / math.factorial(k)
                   for k in range(2, 26))
    return (math.exp(-x) * (1.0 + x) - 1.0) / (x * x)


def special_value(name, x, branch=None):
    """Evaluate ``shi``/``chin``/``ein`` and record which branch produced it."""
    funcs = {"shi": shi, "chin": chin, "ein": ein}
    if name not in funcs:
        raise ValueError(f"unknown special function {name!r}")
    tag = _branch(float(x), branch)
    return SpecialValue(funcs[name](x, branch=tag), tag)


def coth_minus_one(w):
    """``coth(w) - 1`` computed as ``2 / expm1(2w)``; no cancellation for large w."""
    w = float(w)
    if w <= 0:
        raise ValueError("coth_minus_one needs w > 0")
    if w > 354.0:
        return 2.0 * math.exp(-2.0 * w)
    return 2.0 / math.expm1(2.0 * w)


def log_factorial(n):
    n = int(n)
    if n < 0:
        raise ValueError("n must be non-negative")
    return math.lgamma(n + 1.0)


def log_double_factorial(n):
    """ln(n!!) with 0!! = 1!! = 1."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be non-negative")
    if n % 2 == 0:
        k = n // 2
        return k * math.log(2.0) + math.lgamma(k + 1.0)
    k = (n - 1) // 2
    return math.lgamma(n + 1.0) - k * math.log(2.0) - math.lgamma(k + 1.0)


# ---------------------------------------------------------------- Bessel


@njit
def _bessel_ive_all_nb(nmax, x):
    out = np.zeros(nmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    start = nmax + int(x) + 40 + int(8.0 * math.sqrt(nmax + x + 1.0))
    b_up = 0.0
    b = 1e-280
    norm = 0.0
    for k in range(start, 0, -1):
        if k <= nmax:
            out[k] = b
        norm += 2.0 * b
        b_down = (2.0 * k / x) * b + b_up
        b_up = b
        b = b_down
        if b > 1e250:
            b *= 1e-250
            b_up *= 1e-250
            norm *= 1e-250
            for j in range(k, nmax + 1):
                out[j] *= 1e-250
    out[0] = b
    norm += b
    for j in range(nmax + 1):
        out[j] /= norm
    return out


def _bessel_ive_all_np(nmax, x):
    out = np.zeros(nmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    start = nmax + int(x) + 40 + int(8.0 * math.sqrt(nmax + x + 1.0))
    # downward (Miller) recurrence; values kept as mantissa and a shared log scale
    b_up, b, norm = 0.0, 1e-280, 0.0
    for k in range(start, 0, -1):
        if k <= nmax:
            out[k] = b
        norm += 2.0 * b
        b_up, b = b, (2.0 * k / x) * b + b_up
        if b > 1e250:
            b *= 1e-250
            b_up *= 1e-250
            norm *= 1e-250
            out[k:] *= 1e-250
    out[0] = b
    norm += b
    return out / norm


bessel_ive_all = select(_bessel_ive_all_nb, _bessel_ive_all_np)
bessel_ive_all.__doc__ = "Array of e^{-x} I_k(x) for k = 0..nmax by normalized downward recurrence."


def _bessel_quadrature(order, x):
    # e^{-x} I_n(x) = (1/pi) int_0^pi exp(x (cos t - 1)) cos(n t) dt
    val, err = integrate.quad(
        lambda t: math.exp(x * (math.cos(t) - 1.0)) * math.cos(order * t),
        0.0, math.pi, epsabs=1e-14, epsrel=1e-12, limit=2000,
    )
    return val / math.pi


def bessel_i_scaled(order, x, method="recurrence"):
    """Exponentially scaled modified Bessel function ``e^{-x} I_order(x)``.

    ``method`` is ``"recurrence"`` (Miller's algorithm normalized by
    ``sum_k e^{-x} I_k(x) = 1``) or ``"quadrature"`` (adaptive integration of the
    angular integral representation).
    """
    order = abs(int(order))
    x = float(x)
    if order > 500:
        raise ValueError("|order| must be <= 500")
    if x < 0:
        raise ValueError("x must be non-negative")
    if method == "recurrence":
        return float(bessel_ive_all(order, x)[order])
    if method == "quadrature":
        return _bessel_quadrature(order, x)
    raise ValueError(f"unknown method {method!r}")
