"""Closed-form bounds on the total variation distance and cut-off windows.

Every bound is returned as a :class:`BoundValue` carrying a status: ``valid``,
``vacuous`` (an upper bound >= 1 or a lower bound <= 0, value kept raw) or
``divergent`` (the convolution power has no density, value +inf).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .kernel import (
    DEFAULT_CONTEXT,
    FREE_ORTHOGONAL,
    FREE_SYMMETRIC,
    GroupFamily,
    NumericContext,
    cap_C,
    k0_from_pair,
    log_inv_q,
    q_param,
    tau_from_theta,
    threshold_k0,
    threshold_k1,
)
from .states import (
    AngleMixture,
    CentralState,
    PureCharacter,
    RandomTransposition,
    RotationAngle,
    Haar,
    coeff_majorant,
    l2_operator_distance,
    log_coeffs,
)

VALID, VACUOUS, DIVERGENT = "valid", "vacuous", "divergent"


@dataclass(frozen=True)
class BoundValue:
    value: float
    status: str
    formula: str
    condition: Optional[bool] = None

    @property
    def finite(self) -> bool:
        return self.status != DIVERGENT


def _upper(value, formula, condition=None):
    return BoundValue(value, VALID if value < 1 else VACUOUS, formula, condition)


def _lower(value, formula):
    return BoundValue(value, VALID if value > 0 else VACUOUS, formula)


def _divergent(formula):
    return BoundValue(math.inf, DIVERGENT, formula)


TRIVIAL_UPPER = BoundValue(math.inf, VACUOUS, "none")
TRIVIAL_LOWER = BoundValue(0.0, VACUOUS, "none")


# -- series bound ---------------------------------------------------------------

def dsh_upper(s: CentralState, k: int, ctx: NumericContext = DEFAULT_CONTEXT) -> BoundValue:
    """``1/2 sqrt(sum_{n>=1} d_n^2 phi(n)^{2k})`` with a certified geometric tail."""
    if k < 1:
        raise ValueError("k must be at least 1")
    label = "dsh-series"
    if not s.atoms():
        return BoundValue(0.0, VALID, label)
    m = ctx.max_terms
    lc, _ = log_coeffs(s, k, m)
    partial = np.logaddexp.accumulate(2 * lc[1:])  # index j -> sum over n = 1..j+1
    ns = np.arange(2, m + 2, dtype=float)  # first omitted index for each truncation
    logM, rho = coeff_majorant(s, k, ns, weighted=False)
    logM2, rho2 = 2 * logM, rho**2
    ok = rho2 < 1
    if not ok[-1]:
        return _divergent(label)
    with np.errstate(divide="ignore", invalid="ignore"):
        logtail = np.where(ok, logM2 - np.log1p(-np.where(ok, rho2, 0.0)), math.inf)
    good = np.nonzero(ok & (logtail <= math.log(ctx.rtol) + partial))[0]
    j = int(good[0]) if good.size else m - 1
    total = np.logaddexp(partial[j], logtail[j])
    return _upper(0.5 * math.exp(0.5 * total), label)


# -- pure states on free orthogonal groups ------------------------------------------

def small_t_upper(N: int, t: float, k: int) -> BoundValue:
    """Bound for ``|t| < 2``, ``k >= 2``; ``condition`` is the exponential-convergence test."""
    if not abs(t) < 2:
        raise ValueError(f"small-t bound requires |t| < 2, got {t}")
    if k < 2:
        raise ValueError("small-t bound requires k >= 2")
    qN = q_param(N)
    rate = 1.0 / (N * math.sqrt(1 - t * t / 4))
    value = N / (2 * math.sqrt(1 - qN * qN)) * rate**k
    cond = abs(t) < 2 * math.sqrt(1 - N**-2.0)
    return _upper(value, "small-t", cond)


def _log_prefactor(gap, scale):
    # ln(scale * a^K / sqrt(a^(2K) - b^J)) = ln(scale) - ln(1 - e^gap)/2 with gap = J ln b - 2K ln a
    return math.log(scale) - 0.5 * math.log(-math.expm1(gap))


def large_t_upper(N: int, t: float, k: int, ctx: NumericContext = DEFAULT_CONTEXT) -> BoundValue:
    """Bound for ``2 < t < N``; divergent before the boundedness threshold."""
    if not 2 < t < N:
        raise ValueError(f"large-t bound requires 2 < t < N, got t={t}, N={N}")
    k0 = threshold_k0(GroupFamily(FREE_ORTHOGONAL, N), t)
    if k < k0:
        return _divergent("large-t")
    Lt, LN = log_inv_q(t), log_inv_q(N)
    pref = _log_prefactor(-(2 * k0 - 2) * LN + 2 * k0 * Lt, N / 2)
    log_rate = -(math.log(N) - Lt + math.log(-math.expm1(-2 * Lt)))
    return _upper(math.exp(pref + k * log_rate), "large-t")


def char_lower(s: CentralState, k: int, ctx: NumericContext = DEFAULT_CONTEXT) -> BoundValue:
    """``max_n (1/2) d_n |phi(n)|^k / ||chi_n||``.

    Once a term reaches 1 it is vacuous and larger ``n`` cannot improve it, so
    the first such term is reported.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    label = "character"
    if not s.atoms():
        return BoundValue(0.0, VACUOUS, label)
    m = ctx.max_terms
    lc, _ = log_coeffs(s, k, m)
    n = np.arange(1, m + 1, dtype=float)
    norms = n + 1 if s.poly == "u" else 2 * n + 1
    terms = lc[1:] - np.log(2 * norms)
    over = np.nonzero(terms >= 0)[0]
    value = math.exp(terms[over[0]]) if over.size else math.exp(float(np.max(terms)))
    return BoundValue(value, VALID if 0 < value < 1 else VACUOUS, label)


# -- cut-off windows ------------------------------------------------------------------

def _tau(theta, tau):
    return tau_from_theta(theta) if tau is None else float(tau)


def kac_window_upper(N: int, theta: float, c: float, c0: float, tau: float = None) -> BoundValue:
    """Upper window of the rotation walk at ``k = k1 + cN``."""
    tau = _tau(theta, tau)
    if not N >= tau + cap_C(tau):
        raise ValueError(f"N={N} is below tau + C(tau) = {tau + cap_C(tau):.6g}")
    if not c0 > 0:
        raise ValueError("c0 must be positive")
    if c < c0:
        raise ValueError(f"c={c} is below c0={c0}")
    value = math.exp(-c * tau) / (2 * math.sqrt(-math.expm1(-2 * c0 * tau)))
    return _upper(value, "kac-upper")


def kac_window_lower(N: int, theta: float, c: float, tau: float = None) -> BoundValue:
    """Lower window ``1 - 200 exp(-2 c tau)`` at ``k = k1 - cN``."""
    tau = _tau(theta, tau)
    if N < 5:
        raise ValueError("lower window requires N >= 5")
    if not 0 < tau <= 4:
        raise ValueError(f"tau must lie in (0, 4], got {tau}")
    return _lower(1 - 200 * math.exp(-2 * c * tau), "kac-lower")


def _check_mixture(N, m: AngleMixture):
    if N < 3:
        raise ValueError("mixed rotations require N >= 3")
    need = max(tau + cap_C(tau) for tau, _ in m.atoms)
    if N < need:
        raise ValueError(f"N={N} is below max(tau + C(tau)) = {need:.6g}")


def mixed_upper(N: int, m: AngleMixture, c: float) -> BoundValue:
    """Two-term bound at ``k = N ln N / eta + cN``."""
    if not c > 0:
        raise ValueError("c must be positive")
    _check_mixture(N, m)
    eta = m.eta
    value = 3 ** 0.125 * math.exp(-eta * c / 32) + math.exp(-c * eta / 4) / (
        2 * math.sqrt(-math.expm1(-c * eta / 2))
    )
    return _upper(value, "mixed-upper")


def mixed_lower(N: int, m: AngleMixture, c: float) -> BoundValue:
    if N < 5:
        raise ValueError("lower window requires N >= 5")
    if not c > 0:
        raise ValueError("c must be positive")
    return _lower(1 - 500 * math.exp(-2 * m.eta * c), "mixed-lower")


# -- pure states on v-families ------------------------------------------------------

def v_small_upper(carrier: float, t: float, k: int, literal: bool = False) -> BoundValue:
    """Small-parameter bound for a v-family with the given carrier (N or N^2).

    The default rate is ``q(S) / (S sqrt(1 - t/4))`` with ``S = sqrt(carrier)``,
    valid for ``0 <= t < 4``.  ``literal=True`` gives the historical rate
    ``q(S) / (carrier sqrt(1 - t^2/4))``, which is not a valid bound in general.
    """
    if k < 2:
        raise ValueError("requires k >= 2")
    S = math.sqrt(carrier)
    if not S > 2:
        raise ValueError("requires carrier > 4")
    qS = q_param(S)
    pref = 0.5 * math.sqrt(carrier / (qS**2 * (1 - qS**4)))
    if literal:
        if not abs(t) < 2:
            raise ValueError(f"literal form requires |t| < 2, got {t}")
        rate = qS / (carrier * math.sqrt(1 - t * t / 4))
        cond = t < 2 * math.sqrt(1 - (qS / carrier) ** 2)
        return _upper(pref * rate**k, "v-small-t-literal", cond)
    if not 0 <= t < 4:
        raise ValueError(f"requires 0 <= t < 4, got {t}")
    rate = qS / (S * math.sqrt(1 - t / 4))
    cond = t < 4 * (1 - qS**2 / carrier)
    return _upper(pref * rate**k, "v-small-t", cond)


def s_small_upper(N: int, t: float, k: int, literal: bool = False) -> BoundValue:
    if N < 5:
        raise ValueError("requires N >= 5")
    return v_small_upper(float(N), t, k, literal)


def v_large_upper(carrier: float, t: float, k: int) -> BoundValue:
    """Large-parameter bound for a v-family (square-root threshold)."""
    if not 4 < t < carrier:
        raise ValueError(f"requires 4 < t < carrier, got t={t}")
    S = math.sqrt(carrier)
    k0 = k0_from_pair(math.sqrt(t), S)
    if k < k0:
        return _divergent("v-large-t")
    Ls, LS = log_inv_q(math.sqrt(t)), log_inv_q(S)
    pref = _log_prefactor(-(4 * k0 - 4) * LS + 4 * k0 * Ls, carrier / 2)
    log_rate = -LS - math.log(S) + 2 * Ls - math.log(-math.expm1(-2 * Ls))
    return _upper(math.exp(pref + k * log_rate), "v-large-t")


def s_large_upper(N: int, t: float, k: int, ctx: NumericContext = DEFAULT_CONTEXT) -> BoundValue:
    return v_large_upper(float(N), t, k)


def transposition_window(N: int, c: float, ctx: NumericContext = DEFAULT_CONTEXT):
    """``(upper, lower)`` for the pure transposition state ``t = N - 2`` on the free symmetric group."""
    if N < 16:
        raise ValueError("transposition window requires N >= 16")
    k = math.ceil(N * math.log(N) / 2 + c * N - 1e-12)
    upper = s_large_upper(N, N - 2, max(k, 1), ctx)
    lower = _lower(1 - 500 * math.exp(-4 * c), "transposition-lower")
    return upper, lower


@dataclass(frozen=True)
class L2Window:
    upper: float
    lower: float
    k_upper: int
    k_lower: int
    exact_upper: float
    exact_lower: float


def l2_window(N: int, c: float, ctx: NumericContext = DEFAULT_CONTEXT) -> L2Window:
    """Operator-norm window around ``N/2`` for the random transposition walk."""
    if N < 5:
        raise ValueError("the lower estimate requires N >= 5")
    if not 0 < c < 1:
        raise ValueError("c must lie in (0, 1)")
    s = CentralState(GroupFamily(FREE_SYMMETRIC, N), RandomTransposition())
    ku = math.ceil(N / 2 + c * N - 1e-12)
    kl = max(1, math.floor(N / 2 - c * N + 1e-12))
    return L2Window(
        upper=math.exp(-1 - 2 * c),
        lower=math.exp(2 * c - 2),
        k_upper=ku,
        k_lower=kl,
        exact_upper=l2_operator_distance(s, ku, ctx)[0],
        exact_lower=l2_operator_distance(s, kl, ctx)[0],
    )


def window_k(k1: float, c: float, N: int, side: str) -> int:
    """Step count at ``k1 +- cN``: rounded up for upper windows, down for lower ones."""
    if side == "upper":
        return math.ceil(k1 + c * N - 1e-12)
    return math.floor(k1 - c * N + 1e-12)


# -- profiles ------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileRow:
    k: int
    bounded: bool
    dsh_upper: BoundValue
    closed_upper: BoundValue
    char_lower: BoundValue
    window_lower: BoundValue
    exact: Optional[object] = None
    l2_norm: float = math.nan


@dataclass(frozen=True)
class CutoffProfile:
    state: CentralState
    rows: tuple = field(default_factory=tuple)


def state_k0(s: CentralState):
    """Boundedness threshold of a single-atom state; inf when a counit part is present."""
    atoms = s.atoms()
    if not atoms:
        return 1
    if s.has_counit_part:
        return math.inf
    if len(atoms) == 1:
        return threshold_k0(s.group, atoms[0][1])
    return max(threshold_k0(s.group, t) for _, t in atoms)


def closed_upper(s: CentralState, k: int, ctx: NumericContext = DEFAULT_CONTEXT) -> BoundValue:
    """The applicable closed-form upper bound for the state, or the trivial one."""
    G, spec = s.group, s.spec
    if isinstance(spec, Haar):
        return BoundValue(0.0, VALID, "haar")
    if isinstance(spec, RandomTransposition) or s.is_counit:
        return _divergent("no-density")
    if isinstance(spec, AngleMixture):
        eta = spec.eta
        c = (k - G.N * math.log(G.N) / eta) / G.N
        try:
            return mixed_upper(G.N, spec, c)
        except ValueError:
            return TRIVIAL_UPPER
    t = s.atoms()[0][1]
    try:
        if G.poly == "u":
            if abs(t) < 2:
                return small_t_upper(G.N, t, k) if k >= 2 else TRIVIAL_UPPER
            if 2 < abs(t) < G.N:
                return large_t_upper(G.N, abs(t), k, ctx)
            return TRIVIAL_UPPER
        C = float(G.carrier)
        if 0 <= t < 4 and C > 4:
            return v_small_upper(C, t, k) if k >= 2 else TRIVIAL_UPPER
        if 4 < t < C:
            return v_large_upper(C, t, k)
    except ValueError:
        pass
    return TRIVIAL_UPPER


def window_lower(s: CentralState, k: int) -> BoundValue:
    """Lower cut-off window evaluated at ``c = (k1 - k)/N`` when that is positive."""
    G, spec, N = s.group, s.spec, s.group.N
    if N < 5:
        return TRIVIAL_LOWER
    if G.kind == FREE_ORTHOGONAL and isinstance(spec, RotationAngle):
        tau = spec.tau
        c = (threshold_k1(N, tau) - k) / N
        return kac_window_lower(N, spec.theta, c, tau=tau) if c > 0 else TRIVIAL_LOWER
    if isinstance(spec, AngleMixture):
        c = (N * math.log(N) / spec.eta - k) / N
        return mixed_lower(N, spec, c) if c > 0 else TRIVIAL_LOWER
    if G.kind == FREE_SYMMETRIC and isinstance(spec, PureCharacter) and spec.t == N - 2:
        c = (N * math.log(N) / 2 - k) / N
        return _lower(1 - 500 * math.exp(-4 * c), "transposition-lower") if c > 0 else TRIVIAL_LOWER
    return TRIVIAL_LOWER


def profile_row(s: CentralState, k: int, ctx: NumericContext = DEFAULT_CONTEXT, with_exact: bool = True):
    from .oracle import exact_tv

    return ProfileRow(
        k=k,
        bounded=k >= state_k0(s),
        dsh_upper=dsh_upper(s, k, ctx),
        closed_upper=closed_upper(s, k, ctx),
        char_lower=char_lower(s, k, ctx),
        window_lower=window_lower(s, k),
        exact=exact_tv(s, k, ctx) if with_exact else None,
        l2_norm=l2_operator_distance(s, k, ctx)[0],
    )


def build_profile(s: CentralState, k_range, ctx: NumericContext = DEFAULT_CONTEXT,
                  with_exact: bool = True, threads: int = 1) -> CutoffProfile:
    """One row per distinct k, sorted; rows may be computed concurrently."""
    ks = sorted({int(k) for k in k_range})
    if not ks:
        raise ValueError("empty k range")
    if ks[0] < 1:
        raise ValueError("k must be at least 1")
    work = lambda k: profile_row(s, k, ctx, with_exact)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, ks))
    else:
        rows = [work(k) for k in ks]
    return CutoffProfile(s, tuple(rows))
