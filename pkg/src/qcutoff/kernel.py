"""Dilated Chebyshev polynomials, the q-parametrization and scalar thresholds.

Two polynomial families drive everything:

* ``u_n(x) = U_n(x/2)``, with ``u_{n+1} = x u_n - u_{n-1}``, the characters of
  the free orthogonal quantum groups;
* ``v_n(x) = u_{2n}(sqrt(x))``, with ``v_{n+1} = (x - 2) v_n - v_{n-1}``, the
  characters of the free symmetric quantum groups and of the quantum
  automorphism groups of matrix algebras.

Large arguments are handled in the log domain through ``q(t)``, the root of
``q + 1/q = t`` lying in ``(0, 1]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

FREE_ORTHOGONAL = "free-orthogonal"
FREE_SYMMETRIC = "free-symmetric"
QUANTUM_AUTOMORPHISM = "quantum-automorphism"

KINDS = (FREE_ORTHOGONAL, FREE_SYMMETRIC, QUANTUM_AUTOMORPHISM)
KIND_ALIASES = {
    "oplus": FREE_ORTHOGONAL,
    "o+": FREE_ORTHOGONAL,
    "splus": FREE_SYMMETRIC,
    "s+": FREE_SYMMETRIC,
    "aut": QUANTUM_AUTOMORPHISM,
}
_MIN_SIZE = {FREE_ORTHOGONAL: 3, FREE_SYMMETRIC: 4, QUANTUM_AUTOMORPHISM: 2}

# ln(1e300): beyond this the plain recursion would overflow
_LOG_OVERFLOW = 690.7755278982137
_TIE = 1e-12
_LOG_FLOAT_MAX = 709.78


@dataclass(frozen=True)
class GroupFamily:
    """A quantum group family together with its size ``N``."""

    kind: str
    N: int

    def __post_init__(self):
        kind = KIND_ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if int(self.N) != self.N:
            raise ValueError("N must be an integer")
        object.__setattr__(self, "N", int(self.N))
        if self.N < _MIN_SIZE[kind]:
            raise ValueError(f"{kind} requires N >= {_MIN_SIZE[kind]}, got {self.N}")

    @property
    def carrier(self) -> int:
        """Value of the fundamental character at the identity (``d_1`` up to the v-shift)."""
        return self.N**2 if self.kind == QUANTUM_AUTOMORPHISM else self.N

    @property
    def poly(self) -> str:
        return "u" if self.kind == FREE_ORTHOGONAL else "v"

    @property
    def label(self) -> str:
        return {FREE_ORTHOGONAL: "oplus", FREE_SYMMETRIC: "splus", QUANTUM_AUTOMORPHISM: "aut"}[self.kind]


@dataclass(frozen=True)
class NumericContext:
    rtol: float = 1e-12
    atol: float = 1e-12
    max_terms: int = 4000
    quad_order: int = 64

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.max_terms < 8:
            raise ValueError("max_terms must be at least 8")
        if self.quad_order < 16:
            raise ValueError("quad_order must be at least 16")


DEFAULT_CONTEXT = NumericContext()


# -- q parametrization -------------------------------------------------------

def _sqrt_t2m4(t):
    # sqrt(t^2 - 4) factored to keep precision near t = 2
    return math.sqrt((t - 2.0) * (t + 2.0))


def q_param(t: float) -> float:
    """Root in (0, 1] of ``q + 1/q = t``, for ``t >= 2``."""
    if not t >= 2:
        raise ValueError(f"q(t) requires t >= 2, got {t}")
    if math.isinf(t):
        return 0.0
    return 2.0 / (t + _sqrt_t2m4(t))


def log_inv_q(t: float) -> float:
    """``ln(1/q(t)) = acosh(t/2)``, accurate near ``t = 2``."""
    if not t >= 2:
        raise ValueError(f"q(t) requires t >= 2, got {t}")
    s = 0.5 * (t - 2.0)
    return math.log1p(s + math.sqrt(s * (s + 2.0)))


# -- polynomial evaluation ---------------------------------------------------

def log_cheb_u(n: int, t: float) -> float:
    """``ln u_n(t)`` for ``t > 2`` from the closed form in ``q(t)``."""
    if not t > 2:
        raise ValueError(f"log_cheb_u requires t > 2, got {t}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    L = log_inv_q(t)
    return (n + 1) * L + math.log(-math.expm1(-(2 * n + 2) * L)) - math.log(_sqrt_t2m4(t))


def _recur(n, x, shift, first):
    a, b = 1.0, first
    if n == 0:
        return a
    y = x - shift
    for _ in range(n - 1):
        a, b = b, y * b - a
    return b


def cheb_u(n: int, x: float) -> float:
    """Dilated Chebyshev polynomial ``u_n(x) = U_n(x/2)``.

    The three-term recursion is used unless ``|x| > 2`` and the value would
    exceed 1e300, in which case the log-domain closed form is exponentiated
    (overflowing to a signed infinity).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    ax = abs(x)
    if ax > 2 and log_cheb_u(n, ax) > _LOG_OVERFLOW:
        return -math.inf if (x < 0 and n % 2) else math.inf
    return _recur(n, x, 0.0, x)


def cheb_v(n: int, x: float) -> float:
    """``v_n(x) = u_{2n}(sqrt x)`` through its real recursion (valid for all real x)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > 0:
        la, sg = log_abs_cheb("v", x, n)
        if la[n] > _LOG_OVERFLOW:
            return float(sg[n]) * math.inf
    return _recur(n, x, 2.0, x - 1.0)


def log_abs_cheb(poly: str, x: float, nmax: int):
    """Arrays ``(log|P_n(x)|, sign P_n(x))`` for ``n = 0..nmax``, ``P`` = u or v.

    Bounded arguments (``|x| <= 2`` for u, ``0 <= x <= 4`` for v) use the
    recursion, whose values stay below ``n + 1`` resp. ``2n + 1``; outside that
    range the closed forms in ``q`` are used, so nothing overflows.
    """
    n = np.arange(nmax + 1, dtype=float)
    if poly == "u":
        if abs(x) <= 2:
            vals = _recur_array(nmax, x, 0.0, x)
            return _log_sign(vals)
        L = log_inv_q(abs(x))
        la = (n + 1) * L + np.log(-np.expm1(-(2 * n + 2) * L)) - math.log(_sqrt_t2m4(abs(x)))
        sign = np.where((x < 0) & (n % 2 == 1), -1.0, 1.0)
        return la, sign
    if poly != "v":
        raise ValueError(f"unknown polynomial family {poly!r}")
    if 0 <= x <= 4:
        return _log_sign(_recur_array(nmax, x, 2.0, x - 1.0))
    if x > 4:
        s = math.sqrt(x)
        L = log_inv_q(s)
        la = (2 * n + 1) * L + np.log(-np.expm1(-(4 * n + 2) * L)) - math.log(_sqrt_t2m4(s))
        return la, np.ones_like(n)
    # x < 0: v_n(x) = (-1)^n (q^-n + q^(n+1)) / (1 + q) with q = q(2 - x)
    y = 2.0 - x
    L = log_inv_q(y)
    qy = q_param(y)
    la = n * L + np.log1p(np.exp(-(2 * n + 1) * L)) - math.log1p(qy)
    sign = np.where(n % 2 == 1, -1.0, 1.0)
    return la, sign


def _recur_array(nmax, x, shift, first):
    out = np.empty(nmax + 1)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = first
    y = x - shift
    for i in range(2, nmax + 1):
        out[i] = y * out[i - 1] - out[i - 2]
    return out


def _log_sign(vals):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(vals)), np.sign(vals)


def cheb_values(poly: str, x: float, nmax: int) -> np.ndarray:
    """Plain values ``P_n(x)``, ``n = 0..nmax`` (may contain infinities)."""
    la, sg = log_abs_cheb(poly, x, nmax)
    with np.errstate(over="ignore"):
        return sg * np.exp(la)


# -- dimensions ---------------------------------------------------------------

def dim(G: GroupFamily, n: int) -> float:
    """Dimension ``d_n`` of the n-th irreducible representation, rounded to an integer."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if G.poly == "u":
        val = cheb_u(n, G.N)
    else:
        val = cheb_v(n, G.carrier)
    return float(round(val)) if math.isfinite(val) else val


def log_dims(G: GroupFamily, nmax: int) -> np.ndarray:
    """``ln d_n`` for ``n = 0..nmax``."""
    return log_abs_cheb(G.poly, float(G.carrier), nmax)[0]


def norm_sup(poly: str, n):
    """Sup norm of ``P_n`` on the support of the spectral measure (n+1 or 2n+1)."""
    return n + 1 if poly == "u" else 2 * n + 1


# -- bounds and thresholds -----------------------------------------------------

def log_encadrement_bounds(n: int, t: float):
    """Logarithms of ``(t q^-(n-1), q^-n / (1 - q^2))``, the bracket around ``u_n(t)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not t >= 2:
        raise ValueError(f"encadrement requires t >= 2, got {t}")
    L = log_inv_q(t)
    lower = math.log(t) + (n - 1) * L
    if t == 2:
        return lower, math.inf
    return lower, n * L - math.log(-math.expm1(-2 * L))


def _exp_or_inf(x):
    return math.exp(x) if x < _LOG_FLOAT_MAX else math.inf


def encadrement_bounds(n: int, t: float):
    """``(t q^-(n-1), q^-n / (1 - q^2))`` bracketing ``u_n(t)`` for ``t >= 2``; inf past float range."""
    lo, hi = log_encadrement_bounds(n, t)
    return _exp_or_inf(lo), _exp_or_inf(hi)


def cap_C(tau: float) -> float:
    """Admissibility constant; walks of angle parameter tau need ``N >= tau + C(tau)``."""
    if not 0 < tau <= 4:
        raise ValueError(f"tau must lie in (0, 4], got {tau}")
    return 2.0 / (tau * math.sqrt(5.0)) * (2.0 + math.sqrt(2.0 + 9.0 * tau * tau))


def min_admissible_N(tau: float) -> int:
    return math.ceil(tau + cap_C(tau) - _TIE)


def effective_pair(G: GroupFamily, t: float):
    """Arguments at which the q-comparison is made: (t, N) or (sqrt t, sqrt carrier)."""
    if G.poly == "u":
        return abs(t), float(G.carrier)
    if t < 0:
        raise ValueError("v-family parameters must be nonnegative")
    return math.sqrt(t), math.sqrt(G.carrier)


def threshold_k0(G: GroupFamily, t: float):
    """Smallest k with ``q(t)^k > q(N)^(k-1)``: the first convolution power with a density.

    Returns 1 when the parameter sits inside the bulk (``q(t) = 1``) and
    ``math.inf`` for the counit.  Near-integer ties go up.
    """
    te, Ne = effective_pair(G, t)
    if te > Ne * (1 + 1e-15):
        raise ValueError(f"parameter {t} outside the character spectrum of {G.kind} N={G.N}")
    if te >= Ne:
        return math.inf
    return k0_from_pair(te, Ne)


def k0_from_pair(te: float, Ne: float) -> int:
    """Threshold for effective arguments ``2 < te < Ne`` (1 when ``te <= 2``)."""
    if te <= 2:
        return 1
    with mpmath.workdps(50):
        lqN = mpmath.log(_mp_q(Ne))
        x = -lqN / (mpmath.log(_mp_q(te)) - lqN)
        return int(mpmath.floor(x + _TIE)) + 1


def _mp_q(t):
    t = mpmath.mpf(t)
    return 2 / (t + mpmath.sqrt(t * t - 4))


def threshold_k1(N: int, tau: float) -> float:
    """Cut-off location ``N ln N / tau`` of the rotation walk."""
    if N < 3:
        raise ValueError("N must be at least 3")
    if not 0 < tau <= 4:
        raise ValueError(f"tau must lie in (0, 4], got {tau}")
    return N * math.log(N) / tau


def tau_from_theta(theta: float) -> float:
    """``2(1 - cos theta)``, written as ``4 sin^2(theta/2)`` to keep small angles accurate."""
    return 4.0 * math.sin(0.5 * theta) ** 2


def theta_from_tau(tau: float) -> float:
    if not 0 < tau <= 4:
        raise ValueError(f"tau must lie in (0, 4], got {tau}")
    return 2.0 * math.asin(min(1.0, math.sqrt(tau) / 2.0))
