"""Acceptance checks.  Each test prints one ``ACCEPTANCE <k> PASS|FAIL`` line."""

import math
import time

import numpy as np
import pytest

import oracle
from bergshift.dynamics import (
    NO_SYM,
    YES_SYM,
    classify,
    ell2_shift_verdict,
    hypercyclicity_criterion,
    is_yes,
)
from bergshift.moments import (
    asymptotic_report,
    kernel_integral,
    kernel_regimes,
    log_moments,
    log_monomial_norms,
    moment_closed_standard,
)
from bergshift.simulator import ShiftOperator, gethner_shapiro_witness, periodic_vector
from bergshift.spaces import BergmanSpace, PolyVector, coeff_bound_ratio
from bergshift.weights import WeightFunction, WeightSequence, normality_check

ALPHAS = (-0.5, 0.0, 1.0, 2.5)
PS = (1.0, 2.0, 3.0)


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {k} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def S(spec, p=2.0):
    return BergmanSpace(spec, p)


def std(alpha, p=2.0):
    return S(f"standard:alpha={alpha:g}", p)


def rel_err(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.abs(b)))


def test_1_moment_oracle_agreement(report):
    t0 = time.perf_counter()
    ns = np.arange(201)
    worst = 0.0
    for alpha in ALPHAS:
        for p in PS:
            closed = moment_closed_standard(alpha, p, ns)
            quad = np.exp(log_moments(WeightFunction.standard(alpha), p, ns))
            brute = np.array([r.value for r in oracle.brute_moments("standard", p, ns, alpha=alpha)])
            worst = max(worst, rel_err(quad, closed), rel_err(brute, closed), rel_err(brute, quad))
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-9 and elapsed <= 30,
           f"max pairwise rel err {worst:.2e} (<= 1e-9), {elapsed:.1f} s (<= 30 s)")


def test_2_asymptotic_constants(report):
    worst_std = 0.0
    for alpha in ALPHAS:
        for p in PS:
            rep = asymptotic_report(std(alpha, p), 10_000)
            worst_std = max(worst_std, abs(rep.values[-1] / rep.limit - 1))
    bands = []
    for spec in ("log:a=2,b=1", "log:a=3,b=2", "log:a=0.5,b=0.25"):
        for p in PS:
            rep = asymptotic_report(S(spec, p), 10_000)
            bands.append(rep.band[1] / rep.band[0])
    for alpha in (0.5, 1.0, 2.0):
        for p in PS:
            rep = asymptotic_report(S(f"logbergman:alpha={alpha:g}", p), 10_000)
            bands.append(rep.band[1] / rep.band[0])
    ok = worst_std <= 0.01 and max(bands) <= 10
    report(2, ok, f"standard rel dev at n=1e4 {worst_std:.2e} (<= 0.01); "
                  f"max band ratio log/logBergman {max(bands):.3f} (<= 10)")


def test_3_coefficient_functional_inequality(report):
    rng = np.random.default_rng(2024)
    worst_ratio = 0.0
    worst_mono = 0.0
    for spec in ("standard:alpha=0", "standard:alpha=1.5", "log:a=2,b=1"):
        for p in PS:
            space = S(spec, p)
            for _ in range(100):
                d = int(rng.integers(0, 26))
                f = PolyVector(rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1))
                worst_ratio = max(worst_ratio, coeff_bound_ratio(space, f))
            for k in (0, 3, 12, 25):
                c = complex(rng.normal(), rng.normal())
                worst_mono = max(worst_mono, abs(coeff_bound_ratio(space, PolyVector.monomial(k, c)) - 1))
    ok = worst_ratio <= 1 + 1e-8 and worst_mono <= 1e-10
    report(3, ok, f"max ratio {worst_ratio:.12f} (<= 1+1e-8); monomial deviation {worst_mono:.1e} (<= 1e-10)")


def test_4_classifier_ground_truths(report):
    t0 = time.perf_counter()
    failures = []
    radial = [std(a, p) for a in ALPHAS for p in PS]
    radial += [S("log:a=2,b=1", p) for p in PS] + [S("logbergman:alpha=1", p) for p in PS]
    radial += [S("hardy")]
    # (a)
    for c in (2.0, -1.5, 3j):
        for space in radial:
            v = classify(space, WeightSequence.const(c), horizon=2000).verdicts["mixing"]
            if v != YES_SYM:
                failures.append(f"a:{space.weight.spec},p={space.p},c={c}:{v}")
    # (b)
    for alpha in ALPHAS:
        for p in PS:
            w = WeightSequence.powdecay((alpha + 1) / p)
            v = classify(std(alpha, p), w, horizon=2000).verdicts["hypercyclic"]
            if v != NO_SYM:
                failures.append(f"b:{alpha},{p}:{v}")
    # (c)
    normal = [std(a, p) for a in ALPHAS for p in PS]
    normal += [S(spec, p) for spec in ("log:a=2,b=1", "log:a=3,b=2", "log:a=0.5,b=0.25") for p in PS]
    for space in normal:
        if normality_check(space.weight).status != "pass":
            failures.append(f"c:not normal {space.weight.spec}")
    for space in normal + [S("logbergman:alpha=1", p) for p in PS]:
        v = classify(space, WeightSequence.const(1), horizon=2000).verdicts["mixing"]
        if v != YES_SYM:
            failures.append(f"c:{space.weight.spec},p={space.p}:{v}")
    # (d)
    v = classify(S("hardy"), WeightSequence.const(1)).verdicts["hypercyclic"]
    if v != NO_SYM:
        failures.append(f"d:{v}")
    # (e)
    grid = [(p, a) for p in (1.0, 1.5, 2.0, 3.0, 4.5) for a in ALPHAS]
    for p, a in grid:
        v = classify(std(a, p), WeightSequence.const(1), horizon=2000).verdicts["chaotic"]
        if v != (YES_SYM if p < 2 + a else NO_SYM):
            failures.append(f"e:{p},{a}:{v}")
    elapsed = time.perf_counter() - t0
    report(4, not failures and elapsed <= 60,
           f"{len(failures)} mismatches {failures[:3]}, {elapsed:.1f} s (<= 60 s)")


def test_5_kernel_trichotomy(report):
    lams = (0.9, 0.99, 0.999)
    regimes = {(2, 1): "bounded", (2, 0): "log", (4, 0): "power"}
    got = {k: kernel_regimes(*k, lambdas=lams).regime for k in regimes}
    series_err = max(
        abs(kernel_integral(lam, 2, 0) / oracle.series_kernel(lam, 2, 0).value - 1) for lam in lams)
    ok = got == regimes and series_err <= 1e-6
    report(5, ok, f"regimes {got}; p=2 alpha=0 rel err vs series {series_err:.1e} (<= 1e-6)")


ELL2_PAIRS = [
    ("standard:alpha=0", WeightSequence.const(1)),
    ("standard:alpha=0", WeightSequence.const(2)),
    ("standard:alpha=1", WeightSequence.powdecay(1.0)),
    ("standard:alpha=2.5", WeightSequence.ratio()),
    ("standard:alpha=-0.5", WeightSequence.powdecay(0.25)),
    ("log:a=2,b=1", WeightSequence.const(1)),
    ("log:a=2,b=1", WeightSequence.logpow(2, 1, 2)),
    ("log:a=3,b=2", WeightSequence.powdecay(-0.1)),
    ("logbergman:alpha=1", WeightSequence.powdecay(0.3)),
    ("logbergman:alpha=1", WeightSequence.const(1)),
]


def test_6_ell2_consistency(report):
    mismatches = []
    for spec, w in ELL2_PAIRS:
        space = S(spec)
        direct = hypercyclicity_criterion(space, w).verdict
        ell2, _ = ell2_shift_verdict(space, w)
        if is_yes(direct) != is_yes(ell2):
            mismatches.append((spec, w.spec, direct, ell2))
    report(6, not mismatches, f"{len(ELL2_PAIRS) - len(mismatches)}/{len(ELL2_PAIRS)} pairs agree {mismatches}")


MIXING_PAIRS = [
    (std(0.0), WeightSequence.const(1)),
    (std(1.0, 3.0), WeightSequence.const(1.5)),
    (S("log:a=2,b=1"), WeightSequence.const(1)),
    (S("logbergman:alpha=1"), WeightSequence.const(1)),
    (std(2.5, 3.0), WeightSequence.ratio()),
]


def test_7_simulation_exactness(report):
    worst_d2 = 0.0
    decreasing = True
    targets = [(PolyVector([1, 1]), PolyVector.monomial(2)), (PolyVector([0.5, -1j, 2]), PolyVector([1, 0, 0, 3]))]
    for space, w in MIXING_PAIRS:
        T = ShiftOperator(w, space)
        for p, q in targets:
            wits = [gethner_shapiro_witness(T, p, q, m) for m in (10, 50, 100, 500)]
            worst_d2 = max(worst_d2, *(x.dist2 for x in wits))
            decreasing &= bool(np.all(np.diff([x.log_dist1 for x in wits]) < 0))
    worst_res = 0.0
    for space in (std(1.0), std(0.0), S("log:a=2,b=1"), std(0.5, 3.0)):
        T = ShiftOperator(WeightSequence.const(1), space)
        for q, k in ((1, 0), (2, 1), (3, 1), (4, 3), (6, 5)):
            pv = periodic_vector(T, q, k, N=200)
            worst_res = max(worst_res, abs(pv.residual / pv.monomial_norm - 1))
    ok = worst_d2 <= 1e-12 and decreasing and worst_res <= 1e-12
    report(7, ok, f"max dist2 {worst_d2:.1e} (<= 1e-12); dist1 strictly decreasing: {decreasing}; "
                  f"periodic residual rel dev {worst_res:.1e} (<= 1e-12)")


def test_8_nonradial_closed_form(report):
    ns = np.arange(51)
    worst = 0.0
    for p in (1.0, 2.0):
        quad = np.exp(p * log_monomial_norms(WeightFunction.re_nonradial(), p, ns, nonradial_quadrature=True))
        exact = 2 / (p * ns + 2) - 4 / (math.pi * (p * ns + 3))
        worst = max(worst, rel_err(quad, exact))
    report(8, worst <= 1e-6, f"max rel err {worst:.1e} (<= 1e-6)")


def test_9_phase_invariance(report):
    rng = np.random.default_rng(99)
    spaces = [std(0.0), std(1.0, 3.0), std(-0.5, 1.0), S("log:a=2,b=1"), S("logbergman:alpha=1", 1.5),
              S("hardy"), S("re")]
    weights = [WeightSequence.const(2), WeightSequence.const(1), WeightSequence.powdecay(0.5),
               WeightSequence.powdecay(-0.2), WeightSequence.ratio(), WeightSequence.logpow(2, 1, 2),
               WeightSequence.custom(rng.uniform(0.5, 2.0, 2000))]
    h = 2000
    changed = []
    worst = 0.0
    for case in range(50):
        space = spaces[rng.integers(len(spaces))]
        w = weights[rng.integers(len(weights))]
        v = w.rephase(rng.uniform(-math.pi, math.pi, h))
        a, b = classify(space, w, h), classify(space, v, h)
        if a.verdicts != b.verdicts:
            changed.append((case, space.weight.spec, w.spec))
        for ca, cb in zip(a.criteria, b.criteria):
            x, y = np.asarray(ca.values), np.asarray(cb.values)
            fin = np.isfinite(x)
            if not np.array_equal(fin, np.isfinite(y)):
                changed.append((case, ca.name))
                continue
            diff = np.abs(x[fin] - y[fin]) / np.maximum(1.0, np.abs(x[fin]))
            worst = max(worst, float(diff.max(initial=0.0)))
    ok = not changed and worst <= 1e-14
    report(9, ok, f"50 cases, verdict changes {changed[:3]}, max value change {worst:.1e} (<= 1e-14)")
