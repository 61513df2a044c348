"""Central states on the three families and their convolution powers.

A central state is determined by one number ``phi(n)`` per irreducible
representation.  Every state handled here is a finite combination of
normalized characters, ``phi(n) = sum_i w_i P_n(t_i) / P_n(carrier)``, so it is
stored as a list of atoms ``(w_i, t_i)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernel import (
    DEFAULT_CONTEXT,
    FREE_ORTHOGONAL,
    FREE_SYMMETRIC,
    QUANTUM_AUTOMORPHISM,
    GroupFamily,
    NumericContext,
    cheb_u,
    cheb_v,
    dim,
    log_abs_cheb,
    log_inv_q,
    tau_from_theta,
)


@dataclass(frozen=True)
class PureCharacter:
    t: float


@dataclass(frozen=True)
class RotationAngle:
    """Rotation by ``theta`` in a random plane; the angle is reduced into (0, pi]."""

    theta: float

    def __post_init__(self):
        th = math.fmod(float(self.theta), 2 * math.pi)
        if th < 0:
            th += 2 * math.pi
        if th > math.pi:
            th = 2 * math.pi - th
        if th == 0:
            raise ValueError("rotation angle must not be a multiple of 2 pi")
        object.__setattr__(self, "theta", th)

    @property
    def tau(self) -> float:
        return tau_from_theta(self.theta)


@dataclass(frozen=True)
class AngleMixture:
    """Finite mixture of rotations, given as pairs ``(tau_i, w_i)``; weights are normalized."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((float(t), float(w)) for t, w in self.atoms)
        if not atoms:
            raise ValueError("empty mixture")
        for tau, w in atoms:
            if not 0 < tau <= 4:
                raise ValueError(f"mixture tau must lie in (0, 4], got {tau}")
            if not w > 0:
                raise ValueError("mixture weights must be positive")
        total = math.fsum(w for _, w in atoms)
        object.__setattr__(self, "atoms", tuple((t, w / total) for t, w in atoms))

    @property
    def eta(self) -> float:
        return math.fsum(t * w for t, w in self.atoms)

    @property
    def delta(self) -> float:
        return min(t for t, _ in self.atoms)


@dataclass(frozen=True)
class RandomTransposition:
    pass


@dataclass(frozen=True)
class Haar:
    pass


@dataclass(frozen=True)
class MomentPair:
    mean: float
    variance: float


@dataclass(frozen=True)
class CentralState:
    group: GroupFamily
    spec: object
    _atoms: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_atoms", _build_atoms(self.group, self.spec))

    def atoms(self):
        """Pairs ``(weight, argument)`` with ``phi(n) = sum w P_n(arg) / P_n(carrier)``."""
        return self._atoms

    @property
    def poly(self) -> str:
        return self.group.poly

    @property
    def carrier(self) -> float:
        return float(self.group.carrier)

    @property
    def is_counit(self) -> bool:
        return len(self._atoms) == 1 and self._atoms[0][1] == self.carrier

    @property
    def has_counit_part(self) -> bool:
        return any(t == self.carrier for _, t in self._atoms)


def _build_atoms(G, spec):
    N = G.N
    if isinstance(spec, Haar):
        return ()
    if isinstance(spec, PureCharacter):
        t = float(spec.t)
        lo = -G.carrier if G.kind == FREE_ORTHOGONAL else 0.0
        if not lo <= t <= G.carrier:
            raise ValueError(f"t={t} outside the character spectrum [{lo}, {G.carrier}]")
        return ((1.0, t),)
    if isinstance(spec, RotationAngle):
        if G.kind == FREE_ORTHOGONAL:
            return ((1.0, N - spec.tau),)
        if G.kind == QUANTUM_AUTOMORPHISM:
            # even-index restriction: u_2n(N - tau) / u_2n(N) = v_n((N - tau)^2) / v_n(N^2)
            return ((1.0, (N - spec.tau) ** 2),)
        raise ValueError("rotation states exist on free-orthogonal and quantum-automorphism groups only")
    if isinstance(spec, AngleMixture):
        if G.kind != FREE_ORTHOGONAL:
            raise ValueError("angle mixtures are defined on free-orthogonal groups only")
        return tuple((w, N - tau) for tau, w in spec.atoms)
    if isinstance(spec, RandomTransposition):
        if G.kind != FREE_SYMMETRIC:
            raise ValueError("random transpositions are defined on free-symmetric groups only")
        return ((N - 1) / N, float(N - 2)), (1.0 / N, float(N))
    raise TypeError(f"unsupported state specification {spec!r}")


def rotation_trace(N: int, theta: float) -> float:
    """Trace ``N - 2 + 2 cos(theta)`` of a plane rotation, i.e. ``N - tau``."""
    if N < 3:
        raise ValueError("N must be at least 3")
    return N - tau_from_theta(theta)


# -- character values ----------------------------------------------------------

def _poly_scalar(poly, n, x):
    return cheb_u(n, x) if poly == "u" else cheb_v(n, x)


def eval_irrep(s: CentralState, n: int) -> float:
    """``phi(n)`` for the n-th irreducible representation."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0
    if not s.atoms():
        return 0.0
    d = _poly_scalar(s.poly, n, s.carrier)
    if math.isfinite(d):
        vals = [w * _poly_scalar(s.poly, n, t) / d for w, t in s.atoms()]
        if all(math.isfinite(v) for v in vals):
            return math.fsum(vals)
    return float(phi_array(s, n)[n])


def log_phi_array(s: CentralState, nmax: int):
    """``(log|phi(n)|, sign phi(n))`` for ``n = 0..nmax`` without underflow."""
    n = nmax + 1
    if not s.atoms():
        la = np.full(n, -math.inf)
        la[0] = 0.0
        sg = np.zeros(n)
        sg[0] = 1.0
        return la, sg
    ld, _ = log_abs_cheb(s.poly, s.carrier, nmax)
    parts = [(w, log_abs_cheb(s.poly, t, nmax)) for w, t in s.atoms()]
    if len(parts) == 1:
        w, (la, sg) = parts[0]
        out, sign = la - ld + math.log(w), sg.copy()
    else:
        top = np.max(np.array([la for _, (la, _) in parts]), axis=0)
        top = np.where(np.isfinite(top), top, 0.0)
        acc = np.zeros(n)
        for w, (la, sg) in parts:
            acc += w * sg * np.exp(la - top)
        with np.errstate(divide="ignore"):
            out = top - ld + np.log(np.abs(acc))
        sign = np.sign(acc)
    out[0], sign[0] = 0.0, 1.0
    return out, sign


def phi_array(s: CentralState, nmax: int) -> np.ndarray:
    """``phi(n)`` for ``n = 0..nmax``."""
    la, sg = log_phi_array(s, nmax)
    return sg * np.exp(la)


def log_coeffs(s: CentralState, k: int, nmax: int):
    """``(log|c_n|, sign c_n)`` for the density coefficients ``c_n = d_n phi(n)^k``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    la, sg = log_phi_array(s, nmax)
    ld, _ = log_abs_cheb(s.poly, s.carrier, nmax)
    with np.errstate(invalid="ignore"):
        lc = ld + k * la
    lc = np.where(np.isneginf(la), -math.inf, lc)
    sign = sg**k
    return lc, sign


def conv_eval(s: CentralState, k: int, n: int) -> float:
    """``phi^{*k}(n) = phi(n)^k``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    p = eval_irrep(s, n)
    if p == 0:
        return 0.0
    sign = -1.0 if (p < 0 and k % 2) else 1.0
    return sign * math.exp(k * math.log(abs(p)))


def mean_var_chi1(s: CentralState, k: int, tol: float = 1e-12) -> MomentPair:
    """Mean and variance of the fundamental character under ``phi^{*k}``."""
    G = s.group
    d1, d2 = dim(G, 1), dim(G, 2)
    m1 = d1 * conv_eval(s, k, 1)
    second = 1.0 + d2 * conv_eval(s, k, 2)
    if G.poly == "v":
        second += m1
    var = second - m1 * m1
    if var < 0 and var > -tol * max(1.0, second, m1 * m1):
        var = 0.0
    return MomentPair(m1, var)


# -- majorants used to certify tails -------------------------------------------

def ratio_majorant(poly: str, t: float, carrier: float, n):
    """Upper bound ``B(n)`` for ``|P_n(t) / P_n(carrier)|`` and a step bound ``beta(n)``.

    ``beta(n) >= B(m+1)/B(m)`` for every ``m >= n``.  Both are returned as
    numpy arrays over ``n`` (``n >= 1``), ``B`` in the log domain.
    """
    n = np.asarray(n, dtype=float)
    if t == carrier:
        return np.zeros_like(n), np.ones_like(n)
    if poly == "u":
        C = carrier
        LC = log_inv_q(C)
        base = (n - 1) * (-LC) - math.log(C)
        at = abs(t)
        if at <= 2:
            return np.log(n + 1) + base, (n + 2) / (n + 1) * math.exp(-LC)
        Lt = log_inv_q(at)
        logB = n * Lt - math.log(-math.expm1(-2 * Lt)) + base
        return logB, np.full_like(n, math.exp(Lt - LC))
    S = math.sqrt(carrier)
    if S <= 2:
        return np.zeros_like(n), np.full_like(n, math.inf)
    LS = log_inv_q(S)
    base = (2 * n - 1) * (-LS) - math.log(S)
    if 0 <= t <= 4:
        return np.log(2 * n + 1) + base, (2 * n + 3) / (2 * n + 1) * math.exp(-2 * LS)
    if t < 0:
        return np.zeros_like(n), np.full_like(n, math.inf)
    Ls = log_inv_q(math.sqrt(t))
    logB = 2 * n * Ls - math.log(-math.expm1(-2 * Ls)) + base
    return logB, np.full_like(n, math.exp(2 * (Ls - LS)))


def phi_majorant(s: CentralState, n):
    """``(log sum_i |w_i| B_i(n), max_i beta_i(n))`` for the state's atoms."""
    n = np.asarray(n, dtype=float)
    logs, betas = [], []
    for w, t in s.atoms():
        lb, beta = ratio_majorant(s.poly, t, s.carrier, n)
        logs.append(lb + math.log(abs(w)))
        betas.append(beta)
    if not logs:
        return np.full_like(n, -math.inf), np.zeros_like(n)
    return np.logaddexp.reduce(np.array(logs), axis=0), np.max(np.array(betas), axis=0)


def l2_operator_distance(s: CentralState, k: int, ctx: NumericContext = DEFAULT_CONTEXT):
    """Norm of ``P_phi^k - P_h`` on L^2, i.e. ``sup_{n>=1} |phi(n)|^k``.

    Returns ``(value, argmax_n, certified)``; certification requires the
    majorant of ``|phi(n)|`` past the scan window to fall below the maximum
    found.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    m = ctx.max_terms
    phi = np.abs(phi_array(s, m))[1:]
    if phi.size == 0 or not s.atoms():
        return 0.0, 1, True
    i = int(np.argmax(phi))
    best = float(phi[i])
    certified = _certify_sup(s, m, best)
    return best**k, i + 1, certified


def _certify_sup(s, m, best):
    logB, beta = phi_majorant(s, np.array([m + 1.0]))
    # B is non-increasing from m+1 on when every step bound is <= 1
    if beta[0] > 1:
        return False
    return bool(math.exp(logB[0]) <= best * (1 + 1e-12))


def coeff_majorant(s: CentralState, k: int, n, weighted: bool = True):
    """Geometric majorant of the coefficient tail.

    Returns ``(log M(n), rho(n))`` with ``M(n) >= |c_n| * w_n`` and
    ``rho(n) >= M(m+1)/M(m)`` for all ``m >= n``; ``w_n`` is the sup norm of the
    character polynomial when ``weighted`` is set and 1 otherwise.  Hence
    ``sum_{j>=n} |c_j| w_j <= M(n) / (1 - rho(n))`` whenever ``rho(n) < 1``.
    """
    n = np.asarray(n, dtype=float)
    if not s.atoms():
        return np.full_like(n, -math.inf), np.zeros_like(n)
    logB, beta = phi_majorant(s, n)
    if s.poly == "u":
        LC = log_inv_q(s.carrier)
        logD = n * LC - math.log(-math.expm1(-2 * LC))
        gamma_d = math.exp(LC)
        logw, gamma_w = np.log(n + 1), (n + 2) / (n + 1)
    else:
        S = math.sqrt(s.carrier)
        if S <= 2:
            return np.zeros_like(n), np.full_like(n, math.inf)
        LS = log_inv_q(S)
        logD = 2 * n * LS - math.log(-math.expm1(-2 * LS))
        gamma_d = math.exp(2 * LS)
        logw, gamma_w = np.log(2 * n + 1), (2 * n + 3) / (2 * n + 1)
    if not weighted:
        logw, gamma_w = 0.0, 1.0
    with np.errstate(over="ignore"):
        rho = gamma_d * beta**k * gamma_w
    return logD + k * logB + logw, rho
