"""Exact total variation distance on the central algebra.

With ``x = 2 cos(theta)`` the fundamental character's spectral law becomes
``(2/pi) sin^2(theta) dtheta`` and ``u_n(x) = sin((n+1) theta) / sin(theta)``;
the v-families use the pushforward ``x -> x^2`` of the same law, under which
``v_n(x^2) = sin((2n+1) theta) / sin(theta)``.  The distance then reads

    TV = (1/pi) int_0^pi |sum_n c_n sin((n+1) theta)| sin(theta) dtheta          (u)
    TV = (2/pi) int_0^{pi/2} |sum_n c_n sin((2n+1) theta)| sin(theta) dtheta     (v)

with ``c_n = d_n phi(n)^k``.  The integrand is smooth between sign changes,
so those are located first and Gauss-Legendre panels are laid between them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kernel import DEFAULT_CONTEXT, GroupFamily, NumericContext
from .states import CentralState, coeff_majorant, log_coeffs
from .verify import CheckReport

SEMICIRCLE = "semicircle"
FREE_POISSON = "free-poisson"


@dataclass(frozen=True)
class SpectralMeasure:
    kind: str
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> float:
        return math.fsum(self.weights * f(self.nodes))

    def moment(self, j: int) -> float:
        return self.integrate(lambda x: x**j)


@dataclass(frozen=True)
class DensityExpansion:
    coeffs: np.ndarray
    tail_bound: float
    convergent: bool
    poly: str

    @property
    def terms(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class ExactTV:
    value: float
    error_bar: float
    status: str
    terms: int = 0
    segments: int = 0

    @property
    def divergent(self) -> bool:
        return self.status == "divergent"


def spectral_measure(G: GroupFamily, ctx: NumericContext = DEFAULT_CONTEXT) -> SpectralMeasure:
    """Gauss rule with ``quad_order`` nodes for the law of the fundamental character.

    Semicircle nodes are ``2 cos(j pi/(m+1))`` with weights
    ``(2/(m+1)) sin^2(j pi/(m+1))``; the free Poisson rule folds the
    ``2m``-node semicircle rule through ``y -> y^2``.
    """
    m = ctx.quad_order
    if G.poly == "u":
        th = np.arange(1, m + 1) * math.pi / (m + 1)
        return SpectralMeasure(SEMICIRCLE, 2 * np.cos(th), 2 / (m + 1) * np.sin(th) ** 2)
    th = np.arange(1, m + 1) * math.pi / (2 * m + 1)
    y = 2 * np.cos(th)
    return SpectralMeasure(FREE_POISSON, y * y, 4 / (2 * m + 1) * np.sin(th) ** 2)


def _poly_matrix(poly, x, max_n):
    out = np.empty((max_n + 1, x.size))
    out[0] = 1.0
    if max_n >= 1:
        out[1] = x if poly == "u" else x - 1
    shift = 0.0 if poly == "u" else 2.0
    for n in range(2, max_n + 1):
        out[n] = (x - shift) * out[n - 1] - out[n - 2]
    return out


def orthonormality_check(G: GroupFamily, max_n: int = 30, ctx: NumericContext = DEFAULT_CONTEXT,
                         tol: float = 1e-10) -> CheckReport:
    """Largest deviation of ``int P_m P_n dmu`` from ``delta_mn`` for ``m, n <= max_n``."""
    if 2 * max_n > 2 * ctx.quad_order - 1:
        raise ValueError(f"max_n={max_n} exceeds the exactness of a {ctx.quad_order}-node rule")
    mu = spectral_measure(G, ctx)
    P = _poly_matrix(G.poly, mu.nodes, max_n)
    gram = (P * mu.weights) @ P.T
    dev = np.abs(gram - np.eye(max_n + 1))
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    worst = float(dev[i, j])
    return CheckReport(
        name=f"orthonormality-{mu.kind}",
        grid={"max_n": max_n, "quad_order": ctx.quad_order},
        grid_size=(max_n + 1) ** 2,
        worst_margin=tol - worst,
        worst_point=(int(i), int(j)),
        detail={"max_deviation": worst},
    )


def density_coeffs(s: CentralState, k: int, ctx: NumericContext = DEFAULT_CONTEXT) -> DensityExpansion:
    """Coefficients ``c_n = d_n phi(n)^k`` with a certified bound on the neglected tail.

    The tail bound majorizes ``sum_{n>m} |c_n| sup|P_n|``; ``m`` grows until it
    is below a tenth of the absolute tolerance or reaches ``max_terms``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not s.atoms():
        return DensityExpansion(np.ones(1), 0.0, True, s.poly)
    M = ctx.max_terms
    lc, sg = log_coeffs(s, k, M)
    with np.errstate(over="ignore"):
        coeffs = sg * np.exp(lc)
    coeffs[0] = 1.0
    ns = np.arange(2, M + 2, dtype=float)
    logM, rho = coeff_majorant(s, k, ns, weighted=True)
    ok = rho < 1
    if not ok[-1]:
        return DensityExpansion(coeffs, math.inf, False, s.poly)
    with np.errstate(divide="ignore", invalid="ignore"):
        logtail = np.where(ok, logM - np.log1p(-np.where(ok, rho, 0.0)), math.inf)
    good = np.nonzero(logtail <= math.log(0.1 * ctx.atol))[0]
    m = int(good[0]) + 1 if good.size else M
    return DensityExpansion(coeffs[: m + 1].copy(), float(math.exp(logtail[m - 1])), True, s.poly)


@lru_cache(maxsize=8)
def _gauss(order):
    return np.polynomial.legendre.leggauss(order)


def _sine_series(c, a, theta):
    # sum_{n>=1} c_n sin((a n + 1) theta) by Horner in z = exp(i a theta)
    z = np.exp(1j * a * theta)
    acc = np.zeros(theta.shape, dtype=complex)
    for cn in c[:0:-1]:
        acc = acc * z + cn
    return np.imag(acc * np.exp(1j * (a + 1) * theta))


def _roots(c, a, lo, hi, samples, iters=44):
    th = np.linspace(lo, hi, samples)
    g = _sine_series(c, a, th)
    sg = np.sign(g)
    exact = th[1:-1][sg[1:-1] == 0]
    idx = np.nonzero(sg[:-1] * sg[1:] < 0)[0]
    left, right = th[idx], th[idx + 1]
    sleft = sg[idx]
    for _ in range(iters):
        mid = 0.5 * (left + right)
        same = np.sign(_sine_series(c, a, mid)) == sleft
        left = np.where(same, mid, left)
        right = np.where(same, right, mid)
    return np.sort(np.concatenate([exact, 0.5 * (left + right)]))


def exact_tv(s: CentralState, k: int, ctx: NumericContext = DEFAULT_CONTEXT) -> ExactTV:
    """Total variation distance between ``phi^{*k}`` and the Haar state, with an error bar."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not s.atoms():
        return ExactTV(0.0, 0.0, "ok")
    dens = density_coeffs(s, k, ctx)
    if not dens.convergent:
        return ExactTV(math.inf, math.inf, "divergent", dens.terms)
    c = dens.coeffs
    a = 1 if s.poly == "u" else 2
    n = np.arange(c.size)
    weighted = np.abs(c) * (a * n + 1)
    weighted[0] = 0.0
    # drop trailing terms that cannot matter, moving them into the tail
    suffix = np.cumsum(weighted[::-1])[::-1]
    keep = np.nonzero(suffix > 0.01 * ctx.atol)[0]
    m = int(keep[-1]) if keep.size else 0
    tail = dens.tail_bound + (float(suffix[m + 1]) if m + 1 < c.size else 0.0)
    c = c[: m + 1]
    if m == 0:
        return ExactTV(0.0, 0.5 * tail, "ok", 0, 0)

    lo, hi = 0.0, (math.pi if a == 1 else math.pi / 2)
    scale = 1 / math.pi if a == 1 else 2 / math.pi
    fmax = a * m + 1
    roots = _roots(c, a, lo, hi, max(513, 16 * fmax + 1))
    bps = np.concatenate([[lo], roots, [hi]])
    # split every root segment into panels of at most two wavelengths
    hmax = 4 * math.pi / fmax
    pieces = np.maximum(1, np.ceil(np.diff(bps) / hmax).astype(int))
    seg_id = np.repeat(np.arange(pieces.size), pieces)
    frac_start = np.concatenate([np.arange(p) / p for p in pieces])
    width = np.repeat(np.diff(bps) / pieces, pieces)
    start = bps[seg_id] + frac_start * np.repeat(np.diff(bps), pieces)

    def panel_integrals(order):
        x, w = _gauss(order)
        th = start[:, None] + 0.5 * width[:, None] * (x[None, :] + 1)
        vals = _sine_series(c, a, th.ravel()).reshape(th.shape) * np.sin(th)
        return 0.5 * width * (vals @ w)

    hi_rule = panel_integrals(ctx.quad_order)
    lo_rule = panel_integrals(ctx.quad_order // 2)
    seg_hi = np.bincount(seg_id, weights=hi_rule, minlength=pieces.size)
    seg_lo = np.bincount(seg_id, weights=lo_rule, minlength=pieces.size)
    value = scale * math.fsum(np.abs(seg_hi))
    quad_err = scale * math.fsum(np.abs(seg_hi - seg_lo))
    round_err = 64 * np.finfo(float).eps * math.fsum(weighted[: m + 1])
    err = float(quad_err + 0.5 * tail + round_err)
    status = "ok" if -err - 1e-12 <= value <= 1 + err + 1e-12 else "suspect"
    return ExactTV(float(value), err, status, m, int(pieces.size))
