"""Grid verification of the technical inequalities behind the cut-off bounds.

Each check evaluates a signed margin (>= 0 where the inequality holds) over a
deterministic grid and keeps the worst point.  Quantities are recomputed here
with mpmath at 50 digits, independently of the float kernel, except for the
long summations of the mixed-rotation lemma which use compensated float sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

MARGIN_TOL = 1e-12
DPS = 50


@dataclass
class CheckReport:
    name: str
    grid: dict
    grid_size: int
    worst_margin: float
    worst_point: tuple
    tolerance: float = MARGIN_TOL
    parts: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        own = self.worst_margin >= -self.tolerance
        return own and all(p.passed for p in self.parts)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "grid": self.grid,
            "grid_size": self.grid_size,
            "worst_margin": self.worst_margin,
            "worst_point": list(self.worst_point),
            "passed": self.passed,
            "detail": self.detail,
            "parts": [p.to_dict() for p in self.parts],
        }

    def line(self) -> str:
        return (f"{self.name:<28} grid={self.grid_size:<7d} worst_margin={self.worst_margin: .6e} "
                f"at {self.worst_point}  {'PASS' if self.passed else 'FAIL'}")


class _Worst:
    """Running minimum of margins with the point where it occurs."""

    def __init__(self):
        self.margin = math.inf
        self.point = ()
        self.count = 0

    def add(self, margin, point):
        self.count += 1
        m = float(margin)
        if m < self.margin:
            self.margin, self.point = m, tuple(_plain(p) for p in point)

    def report(self, name, grid, **kw):
        return CheckReport(name, grid, self.count, self.margin, self.point, **kw)


def _plain(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def _combine(name, grid, parts):
    worst = min(parts, key=lambda p: p.worst_margin)
    return CheckReport(name, grid, sum(p.grid_size for p in parts), worst.worst_margin,
                       worst.worst_point, parts=parts)


# -- grids -------------------------------------------------------------------------

def log_grid(lo, hi, points):
    return [float(x) for x in np.geomspace(lo, hi, points)]


def int_log_grid(lo, hi, points):
    return sorted({int(round(x)) for x in np.geomspace(lo, hi, points)} | {int(lo), int(hi)})


def tau_grid(points):
    return [4.0 * j / points for j in range(1, points + 1)]


# -- high-precision helpers ----------------------------------------------------------

def _q(t):
    t = mp.mpf(t)
    return 2 / (t + mp.sqrt(t * t - 4))


def _u_seq(n_max, x):
    x = mp.mpf(x)
    out = [mp.mpf(1), x]
    for _ in range(n_max - 1):
        out.append(x * out[-1] - out[-2])
    return out[: n_max + 1]


def _dps_for(n_max, t):
    # enough digits to resolve gaps of relative size q(t)^(2n+2) on values of size t^n
    if t <= 2:
        return DPS
    lq = math.log10((t + math.sqrt(t * t - 4)) / 2)
    return DPS + int(math.ceil((3 * n_max + 6) * lq))


def _C(tau):
    tau = mp.mpf(tau)
    return 2 / (tau * mp.sqrt(5)) * (2 + mp.sqrt(2 + 9 * tau**2))


# -- checks ---------------------------------------------------------------------------

def verify_encadrement(n_max: int = 200, t_min: float = 2.001, t_max: float = 50.0, points: int = 64):
    """``t q^-(n-1) <= u_n(t) <= q^-n / (1 - q^2)`` for ``1 <= n <= n_max``."""
    grid = {"n_max": n_max, "t": [t_min, t_max], "points": points}
    w = _Worst()
    for t in log_grid(t_min, t_max, points):
        with mp.workdps(_dps_for(n_max, t)):
            q = _q(t)
            u = _u_seq(n_max, t)
            for n in range(1, n_max + 1):
                lower = t * q ** (-(n - 1))
                upper = q ** (-n) / (1 - q * q)
                w.add(min(u[n] - lower, upper - u[n]), (n, t))
    return w.report("encadrement", grid)


def verify_various_bounds(N_min: int = 4, N_max: int = 200, points: int = 64):
    """Three elementary inequalities in ``q``, checked where ``N - tau > 2``."""
    grid = {"N": [N_min, N_max], "tau_points": points}
    ratio, qlow, logb = _Worst(), _Worst(), _Worst()
    with mp.workdps(DPS):
        for N in int_log_grid(N_min, N_max, points):
            qN = _q(N)
            qlow.add(qN - mp.mpf(1) / N, (N,))
            for tau in tau_grid(points):
                tau_mp = mp.mpf(tau)
                if N - tau > 2:
                    ratio.add((N - tau_mp) / N - qN / _q(N - tau_mp), (N, tau))
                if tau < N:
                    logb.add(-tau_mp - N * mp.log(1 - tau_mp / N), (N, tau))
    parts = [ratio.report("ratio-q", grid), qlow.report("q-above-1/N", grid), logb.report("log-bound", grid)]
    return _combine("various-bounds", grid, parts)


def verify_hard_lower(points: int = 64, N_max: int = 200):
    """``q(N-tau)(1 - q(N-tau)^2) >= e^(tau/N)/N`` for ``N >= tau + C(tau)``."""
    grid = {"tau_points": points, "N_max": N_max}
    w = _Worst()
    with mp.workdps(DPS):
        for tau in tau_grid(points):
            n_min = int(mp.ceil(tau + _C(tau)))
            if n_min > N_max:
                continue
            for N in int_log_grid(n_min, N_max, points):
                q = _q(N - mp.mpf(tau))
                w.add(q * (1 - q * q) - mp.exp(mp.mpf(tau) / N) / N, (tau, N))
    return w.report("hard-lower", grid)


def verify_three_functions(points: int = 64, span: float = 100.0):
    """``tau^2 / (2t(t+tau)^2) >= (16/5) / (t^3 (t^2-4))`` for ``t >= C(tau)``."""
    grid = {"tau_points": points, "t": "[C(tau), span*C(tau)]", "span": span}
    w = _Worst()
    with mp.workdps(DPS):
        for tau in tau_grid(points):
            c = float(_C(tau))
            tau_mp = mp.mpf(tau)
            for t in log_grid(c, span * c, points):
                t = mp.mpf(t)
                f = tau_mp**2 / (2 * t * (t + tau_mp) ** 2)
                g = mp.mpf(16) / 5 / (t**3 * (t * t - 4))
                w.add(f - g, (tau, float(t)))
    return w.report("three-functions", grid)


def _log_dims_float(N, n_max):
    # ln u_n(N) for n = 0..n_max from the closed form
    L = math.acosh(N / 2)
    n = np.arange(n_max + 1, dtype=float)
    return (n + 1) * L + np.log(-np.expm1(-(2 * n + 2) * L)) - 0.5 * math.log(N * N - 4)


def verify_mixed_lemma(points: int = 64, n_max: int = 50, N_max: int = 200,
                       lam_min: float = 0.05, lam_max: float = 20.0):
    """Per-atom estimate ``phi_{N-tau}(n)^{N ln N / tau} <= 1/d_n`` and the dimension sum bound."""
    grid = {"tau_points": points, "n_max": n_max, "N_max": N_max, "lambda": [lam_min, lam_max]}
    atom = _Worst()
    with mp.workdps(DPS):
        for tau in tau_grid(points):
            n_min = int(mp.ceil(tau + _C(tau)))
            if n_min > N_max:
                continue
            for N in int_log_grid(n_min, N_max, points):
                d = _u_seq(n_max, N)
                u = _u_seq(n_max, N - mp.mpf(tau))
                k = N * mp.log(N) / tau
                for n in range(1, n_max + 1):
                    # log form: -ln d_n - k ln phi(n)
                    atom.add(-mp.log(d[n]) - k * (mp.log(u[n]) - mp.log(d[n])), (N, tau, n))
    dsum = _Worst()
    for N in int_log_grid(3, N_max, points):
        qN = 2 / (N + math.sqrt(N * N - 4))
        for lam in log_grid(lam_min, lam_max, points):
            s = lam / math.log(N)
            r = qN**s
            # tail after m terms: e^-lam r^m / (1 - r) from d_n >= N q^-(n-1)
            m = int(min(20000, max(50, math.ceil((math.log(1e-30) + lam + math.log(1 - r)) / math.log(r)))))
            terms = np.exp(-s * _log_dims_float(N, m)[1:])
            total = math.fsum(terms) + math.exp(-lam) * r**m / (1 - r)
            rhs = math.exp(-lam / 2) / (-math.expm1(-lam / 2))
            dsum.add(rhs - total, (N, lam))
    parts = [atom.report("mixed-atom", grid), dsum.report("mixed-dimension-sum", grid)]
    return _combine("mixed-lemma", grid, parts)


def f14(t: float = 14.0) -> float:
    """``(t+1)(t - sqrt(t^2-4))``, evaluated at the spot value used for the transposition walk."""
    return (t + 1) * (t - math.sqrt(t * t - 4))


def verify_misc_identities(points: int = 64, n_max: int = 200, ratio_N: int = 10, ratio_n: int = 500):
    """Identity for ``q(1-q^2)``, bounds on ``a_n = u_{n+1}/u_n``, the transposition ratio scan and f(14).

    ``a-bounds-literal`` checks ``t - 1/t <= a_n <= t`` on ``t in [sqrt(2.01), 10]``;
    this lower bound does not hold (``a_2(t) = t - 1/t - 1/(t(t^2-1))``), so that
    part fails.  ``a-bounds`` checks the valid replacement ``1/q(t) <= a_n <= t``
    for ``t >= 2``.
    """
    grid = {"points": points, "n_max": n_max, "ratio_N": ratio_N, "ratio_n": ratio_n}
    ident, lit, cor, ratio = _Worst(), _Worst(), _Worst(), _Worst()
    with mp.workdps(DPS):
        for t in log_grid(2.001, 50.0, points):
            t = mp.mpf(t)
            q = _q(t)
            lhs, rhs = q * (1 - q * q), 2 * q - t * t * q + t
            ident.add(-abs(lhs - rhs) / max(abs(lhs), 1), (float(t),))
        for t in log_grid(math.sqrt(2.01), 10.0, points):
            u = _u_seq(n_max + 1, t)
            for n in range(1, n_max + 1):
                a = u[n + 1] / u[n]
                lit.add(min(a - (t - 1 / mp.mpf(t)), t - a), (n, t))
        for t in log_grid(2.0, 10.0, points):
            with mp.workdps(_dps_for(n_max + 1, t)):
                u = _u_seq(n_max + 1, t)
                inv_q = 1 / _q(t)
                for n in range(1, n_max + 1):
                    a = u[n + 1] / u[n]
                    cor.add(min(a - inv_q, t - a), (n, t))
        N = ratio_N
        v_lo = _u_seq(2 * ratio_n + 2, mp.sqrt(N - 2))
        v_hi = _u_seq(2 * ratio_n + 2, mp.sqrt(N))
        r = [v_lo[2 * n] / v_hi[2 * n] for n in range(ratio_n + 2)]
        for n in range(1, ratio_n + 1):
            ratio.add(r[n] - r[n + 1], (N, n))
    f = f14()
    spot = _Worst()
    spot.add(2.5 - f, (14.0,))
    parts = [
        ident.report("q-identity", grid),
        lit.report("a-bounds-literal", grid),
        cor.report("a-bounds", grid),
        ratio.report("transposition-ratio", grid),
        spot.report("f14", grid, detail={"f14": f}),
    ]
    rep = _combine("misc-identities", grid, parts)
    rep.detail["f14"] = f
    return rep


CHECKS = {
    "encadrement": verify_encadrement,
    "various_bounds": verify_various_bounds,
    "hard_lower": verify_hard_lower,
    "three_functions": verify_three_functions,
    "mixed_lemma": verify_mixed_lemma,
    "misc_identities": verify_misc_identities,
}


def run_all(only=None):
    names = list(CHECKS) if only is None else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")
    return [CHECKS[n]() for n in names]
