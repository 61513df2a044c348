"""Acceptance suite: each check prints one PASS/FAIL line at its stated tolerance.

Run under pytest (lines appear in the "acceptance" summary section) or
directly with ``python3 tests/test_acceptance.py``.
"""
import math

import mpmath as mp

from conftest import ACCEPTANCE_LINES, pure, rotation
from qcutoff.bounds import (
    char_lower,
    dsh_upper,
    kac_window_lower,
    kac_window_upper,
    large_t_upper,
    mixed_lower,
    mixed_upper,
    state_k0,
)
from qcutoff.kernel import GroupFamily, min_admissible_N, tau_from_theta, threshold_k0
from qcutoff.oracle import exact_tv, orthonormality_check
from qcutoff.states import AngleMixture, CentralState, RandomTransposition, l2_operator_distance, phi_array
from qcutoff.verify import f14, run_all

# pinned before the build by tests/oracles.py (mpmath, 50 digits)
K0_PINNED = {(10, 8): 11, (4, 3): 4}
KAC_LOWER_20 = 1 - 200 * math.exp(-8)  # 0.932907...
MIXED_LOWER_PINNED = 0.8322686860

PROFILE_STATES = [
    ("O+ N=8 rotation pi", lambda: rotation(8, math.pi)),
    ("O+ N=10 rotation pi", lambda: rotation(10, math.pi)),
    ("O+ N=10 rotation pi/2", lambda: rotation(10, math.pi / 2)),
    ("O+ N=10 pure t=6", lambda: pure(10, 6)),
    ("O+ N=10 pure t=8", lambda: pure(10, 8)),
    ("S+ N=10 pure t=8", lambda: pure(10, 8, "splus")),
    ("Aut N=4 rotation pi/2", lambda: rotation(4, math.pi / 2, "aut")),
]


def record(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_threshold_reproduction():
    got = {(N, t): threshold_k0(GroupFamily("oplus", N), t) for N, t in K0_PINNED}
    # independent ceiling evaluation at 60 digits
    with mp.workdps(60):
        q = lambda x: (x - mp.sqrt(mp.mpf(x) ** 2 - 4)) / 2
        indep = {(N, t): int(mp.floor(-mp.log(q(N)) / mp.log(q(t) / q(N)))) + 1 for N, t in K0_PINNED}
    ok = got == K0_PINNED == indep
    record("threshold k0", ok, f"k0(10,8)={got[(10, 8)]}, k0(4,3)={got[(4, 3)]} (pinned 11, 4)")


def test_admissibility_constants():
    a, b = min_admissible_N(4), min_admissible_N(2)
    record("admissibility N >= tau + C(tau)", (a, b) == (8, 6), f"tau=4 -> N>={a}, tau=2 -> N>={b}")


def test_kac_upper_window():
    u4 = kac_window_upper(8, math.pi, 1, 1).value
    u2 = kac_window_upper(6, math.pi / 2, 1, 1).value
    ok = abs(u4 - 0.0091593) <= 1e-6 and abs(u2 - 0.068297) <= 1e-5
    record("rotation-walk upper window", ok, f"tau=4: {u4:.7f} (0.0091593 +- 1e-6), tau=2: {u2:.6f} (0.068297 +- 1e-5)")


def test_kac_lower_window_vs_oracle():
    N = 20
    k = math.floor(N * math.log(N) / 4) - N
    if k < 1:
        record("rotation-walk lower window vs exact TV", False,
               f"k = floor(20 ln 20 / 4) - 20 = {k} is not a valid step count; nothing to evaluate")
        return
    s = rotation(N, math.pi)
    r = exact_tv(s, k)
    bound = kac_window_lower(N, math.pi, 1).value
    ok = not r.divergent and r.value >= bound - r.error_bar
    record("rotation-walk lower window vs exact TV", ok, f"k={k}, exact={r.value}, bound={bound:.6f}")


def test_sandwich():
    worst, where, count = math.inf, None, 0
    for N, theta in [(8, math.pi), (10, math.pi), (10, math.pi / 2)]:
        s = rotation(N, theta)
        t = N - tau_from_theta(theta)
        k0 = state_k0(s)
        for k in range(k0, k0 + 51):
            r = exact_tv(s, k)
            lo = char_lower(s, k).value
            up = min(dsh_upper(s, k).value, large_t_upper(N, t, k).value)
            margin = min(r.value - lo, up - r.value) + r.error_bar
            count += 1
            if margin < worst:
                worst, where = margin, (N, round(theta, 4), k)
    record("sandwich char_lower <= exact <= min(dsh, large-t)", worst >= 0,
           f"{count} points, worst margin {worst:.3e} at {where}")


def test_orthonormality():
    reps = [orthonormality_check(GroupFamily(kind, 10), max_n=30) for kind in ("oplus", "splus")]
    devs = [r.detail["max_deviation"] for r in reps]
    record("orthonormality up to degree 30", all(d <= 1e-10 for d in devs),
           f"semicircle {devs[0]:.2e}, free Poisson {devs[1]:.2e} (limit 1e-10)")


def test_lemma_harness():
    reports = run_all()
    failed = [r for r in reports if not (r.passed and r.worst_margin >= -1e-12)]
    bad_parts = [p.name for r in failed for p in r.parts if not p.passed]
    f = f14()
    ok = not failed and abs(f - 2.1539) <= 5e-5 and f < 2.5
    detail = f"f(14)={f:.4f}; " + (
        "all six checks PASS" if not failed else
        "failing: " + ", ".join(f"{r.name} (worst {r.worst_margin:.3e}; parts {bad_parts})" for r in failed))
    record("lemma harness", ok, detail)


def test_l2_cutoff():
    N = 10
    s = CentralState(GroupFamily("splus", N), RandomTransposition())
    worst = 0.0
    sup_at_one = True
    for k in range(1, 201):
        val, n, cert = l2_operator_distance(s, k)
        worst = max(worst, abs(val / (1 - 2 / N) ** k - 1))
        sup_at_one &= n == 1 and cert
    # phi(n) = ((N-1)/N) r_n + 1/N with r_n = v_n(N-2)/v_n(N); scan r_n itself
    scan = phi_array(pure(N, N - 2, "splus"), 500)[1:]
    monotone = bool((scan[1:] < scan[:-1]).all())
    ok = worst <= 1e-12 and sup_at_one and monotone
    record("L2 cut-off (1-2/N)^k", ok, f"max rel err {worst:.2e} for k<=200, sup at n=1: {sup_at_one}, "
                                      f"ratio scan to n=500 decreasing: {monotone}")


def test_divergence_detection():
    cases = [pure(10, 10), pure(8, 8, "splus")]
    bad = []
    for s in cases:
        for k in (1, 2, 5, 20):
            if dsh_upper(s, k).finite or not exact_tv(s, k).divergent:
                bad.append((s.group.label, "counit", k))
    checked = 0
    for _, make in PROFILE_STATES + [("S+ transposition", lambda: CentralState(GroupFamily("splus", 10), RandomTransposition()))]:
        s = make()
        k0 = state_k0(s)
        for k in range(1, int(min(k0, 12))):
            checked += 1
            if dsh_upper(s, k).finite or not exact_tv(s, k).divergent:
                bad.append((s.group.label, s.spec, k))
    record("divergence detection", not bad, f"counit x{len(cases)} and {checked} k<k0 cases; offenders: {bad or 'none'}")


def test_monotone_mixing():
    worst, where = math.inf, None
    for name, make in PROFILE_STATES:
        s = make()
        k0 = state_k0(s)
        prev = None
        for k in range(k0, k0 + 51):
            r = exact_tv(s, k)
            if prev is not None:
                margin = prev.value - r.value + prev.error_bar + r.error_bar
                if margin < worst:
                    worst, where = margin, (name, k)
            prev = r
    record("exact TV non-increasing in k", worst >= 0, f"{len(PROFILE_STATES)} profiles, worst margin {worst:.3e} at {where}")


def test_mixed_rotation_bounds():
    m = AngleMixture(((4.0, 1.0),))
    up = mixed_upper(10, m, 8).value
    lo = mixed_lower(10, m, 1).value
    ok = abs(up - 0.4222) <= 5e-4 and abs(lo - MIXED_LOWER_PINNED) <= 1e-6
    record("mixed-rotation bounds", ok, f"upper(eta=4,c=8)={up:.6f} (0.4222 +- 5e-4), "
                                       f"lower(eta=4,c=1)={lo:.10f} ({MIXED_LOWER_PINNED} +- 1e-6)")


if __name__ == "__main__":
    import sys

    fails = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                fails += 1
    sys.exit(1 if fails else 0)
