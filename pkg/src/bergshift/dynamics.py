"""Boundedness, hypercyclicity, mixing, chaos and periodic-vector criteria for ``B_w``.

Every criterion is reduced to a real sequence (kept in log scale) and a
verdict.  Where both the weight products and the monomial norms have known
asymptotic expansions the verdict is decided symbolically from the leading
term; otherwise a finite-horizon trend test supplies evidence only.

Verdict vocabulary: ``yes-symbolic``, ``evidence-yes``, ``evidence-no``,
``no-symbolic``, ``inconclusive``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import _quad
from .errors import ParameterError, UnsupportedError
from .spaces import BergmanSpace, PolyVector, ell2_reduction, poly_norm
from .weights import WeightSequence

YES_SYM = "yes-symbolic"
EV_YES = "evidence-yes"
EV_NO = "evidence-no"
NO_SYM = "no-symbolic"
INCONCLUSIVE = "inconclusive"
VERDICTS = (YES_SYM, EV_YES, EV_NO, NO_SYM, INCONCLUSIVE)

TREND_THRESHOLD = 1e-3
DEFAULT_HORIZON = 10_000
DEFAULT_HORIZON_QUADRATURE = 100
PROFILE_MARGIN = 0.02

__all__ = [
    "YES_SYM", "EV_YES", "EV_NO", "NO_SYM", "INCONCLUSIVE", "VERDICTS",
    "Expansion", "CriterionSequence", "ClassificationReport", "ChaosResult",
    "MultiplierProfile", "NonradialResult", "A2ChaosResult",
    "product_expansion", "norm_expansion", "series_converges",
    "hypercyclicity_criterion", "mixing_criterion", "chaos_check",
    "periodic_check", "boundedness_check", "multiplier_growth_profile",
    "nonradial_hypercyclicity", "a2_chaos_nonradial", "classify",
    "ell2_shift_verdict", "is_yes", "is_no", "default_horizon",
]


def is_yes(v):
    return v in (YES_SYM, EV_YES)


def is_no(v):
    return v in (NO_SYM, EV_NO)


def _symbolic(v):
    return v in (YES_SYM, NO_SYM)


# -- asymptotic expansions ------------------------------------------------------

SCALES = ("nlogn", "nloglogn", "n", "logn", "loglogn")
_ZERO = 1e-12


@dataclass(frozen=True)
class Expansion:
    """``sum_k coeffs[k] * scale_k(n) + remainder`` over the ordered ``SCALES``.

    ``known`` counts how many leading scales are determined; when it equals
    ``len(SCALES)`` the remainder is bounded, otherwise it is only known to be
    smaller than the last determined scale.
    """

    coeffs: tuple = (0.0,) * len(SCALES)
    known: int = len(SCALES)

    @classmethod
    def of(cls, known=len(SCALES), **kw):
        return cls(tuple(float(kw.get(s, 0.0)) for s in SCALES), known)

    def __add__(self, other):
        k = min(self.known, other.known)
        c = tuple(a + b if i < k else 0.0 for i, (a, b) in enumerate(zip(self.coeffs, other.coeffs)))
        return Expansion(c, k)

    def __neg__(self):
        return Expansion(tuple(-a for a in self.coeffs), self.known)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, x):
        return Expansion(tuple(a * x for a in self.coeffs), self.known)

    __rmul__ = __mul__

    def limit(self):
        """``'+inf'``, ``'-inf'``, ``'finite'`` or ``None`` (undecided)."""
        for i in range(self.known):
            c = self.coeffs[i]
            if c > _ZERO:
                return "+inf"
            if c < -_ZERO:
                return "-inf"
        return "finite" if self.known == len(SCALES) else None

    def as_dict(self):
        return {s: self.coeffs[i] for i, s in enumerate(SCALES) if i < self.known}


def series_converges(e):
    """Whether ``sum_n exp(e(n))`` converges; ``None`` when undecided."""
    c = dict(zip(SCALES, e.coeffs))
    for i, s in enumerate(("nlogn", "nloglogn", "n")):
        if i >= e.known:
            return None
        if c[s] < -_ZERO:
            return True
        if c[s] > _ZERO:
            return False
    if e.known <= 3:
        return None
    if c["logn"] < -1 - _ZERO:
        return True
    if c["logn"] > -1 + _ZERO:
        return False
    if e.known <= 4:
        return None
    # exactly n^-1 (log n)^d: converges iff d < -1 (bounded remainder)
    return c["loglogn"] < -1 - _ZERO


def product_expansion(w):
    """Expansion of ``log|w_1 ... w_n|``; ``None`` for custom sequences."""
    if w.family == "const":
        return Expansion.of(n=math.log(abs(w.c)))
    if w.family == "powdecay":
        b = w.beta
        # -b log((n+1)!) by Stirling
        return Expansion.of(nlogn=-b, n=b, logn=-1.5 * b)
    if w.family == "ratio":
        return Expansion.of(logn=-1.0)
    if w.family == "logpow":
        e, d = (w.a + 1) / w.p, w.b / w.p
        if d == 0:
            return Expansion.of(nlogn=-e, n=e, logn=-1.5 * e)
        return Expansion.of(known=2, nlogn=-e, nloglogn=d)
    return None


def norm_expansion(phi, p):
    """Expansion of ``-log ||z^n||`` for the built-in weights."""
    fam = phi.family
    if fam == "standard":
        return Expansion.of(logn=(phi.alpha + 1) / p)
    if fam == "log":
        return Expansion.of(logn=(phi.a + 1) / p, loglogn=-phi.b / p)
    if fam == "logbergman":
        return Expansion.of(loglogn=phi.alpha / p)
    if fam == "hardy":
        return Expansion.of()
    # both non-radial weights have ||z^n||^p of order 1/n
    return Expansion.of(logn=1.0 / p)


def _functional_expansion(phi, p):
    """Expansion of ``log ||k_n||`` (norm of the n-th coefficient functional)."""
    if phi.family == "re":
        return Expansion.of(logn=3.0 / p)
    if phi.family == "herglotz":
        return Expansion.of(logn=2.0 / p)
    return norm_expansion(phi, p)


# -- sequences ------------------------------------------------------------------

@dataclass(frozen=True)
class CriterionSequence:
    """``c_n`` for ``n = 1..horizon`` together with its verdict."""

    name: str
    anchor: str
    n: np.ndarray
    values: np.ndarray
    symbolic_limit: str | None = None
    verdict: str = INCONCLUSIVE
    note: str = ""

    def head(self, k=5):
        return [float(v) for v in self.values[:k]]

    def tail(self, k=5):
        return [float(v) for v in self.values[-k:]]

    def to_dict(self, k=5):
        return {
            "name": self.name,
            "paper_anchor": self.anchor,
            "values_head": self.head(k),
            "values_tail": self.tail(k),
            "symbolic": self.symbolic_limit,
            "verdict": self.verdict,
        }


def default_horizon(space):
    return DEFAULT_HORIZON_QUADRATURE if space.weight.family == "herglotz" else DEFAULT_HORIZON


def _horizon(space, w, horizon):
    h = default_horizon(space) if horizon is None else int(horizon)
    if h < 10:
        raise ParameterError("horizon must be >= 10")
    if w.length is not None:
        if w.length < 10:
            raise ParameterError("custom weight sequence needs at least 10 terms")
        h = min(h, w.length)
    return h


def _quartiles(values):
    return np.array_split(np.asarray(values), 4)


def _tail_slope(n, values):
    q = len(values) - len(values) // 4
    x = np.log(np.asarray(n[q - 1:], dtype=float))
    y = np.asarray(values[q - 1:])
    if len(x) < 2 or np.ptp(x) == 0:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def _sup_evidence(n, values, thr=TREND_THRESHOLD):
    """Divergence evidence for ``sup c_n``: rising trend or fresh maxima late."""
    slope = _tail_slope(n, values)
    q = _quartiles(values)
    fresh = float(q[3].max()) > max(float(x.max()) for x in q[:3]) + thr
    return EV_YES if (slope > thr or fresh) else EV_NO


def _lim_evidence(n, values, thr=TREND_THRESHOLD):
    """Evidence for ``c_n -> +inf``: rising trend and increasing quartile minima."""
    slope = _tail_slope(n, values)
    q = _quartiles(values)
    mins = [float(x.min()) for x in q]
    return EV_YES if (slope > thr and mins[3] > mins[2] > mins[1]) else EV_NO


def _criterion_values(space, w, h):
    n = np.arange(1, h + 1)
    L = w.log_products(h)
    if space.weight.family == "hardy":
        return n, L
    return n, L - space.log_norms(h)[1:]


def _criterion_expansion(space, w, functional=False):
    pe = product_expansion(w)
    if pe is None:
        return None
    phi, p = space.weight, space.p
    if functional:
        return pe + _functional_expansion(phi, p)
    return pe + norm_expansion(phi, p)


HYPER_ANCHOR = "limsup |w_1...w_n| / ||z^n|| = inf"
MIXING_ANCHOR = "lim |w_1...w_n| / ||z^n|| = inf"


def hypercyclicity_criterion(space, w, horizon=None):
    """``c_n = log|w_1...w_n| - log||z^n||``; hypercyclic iff ``sup c_n = inf``.

    On radial spaces the characterisation is two-sided.  On non-radial
    spaces divergence is only sufficient, so a non-divergent sequence gives
    ``inconclusive`` (see :func:`nonradial_hypercyclicity` for the
    necessary side).
    """
    h = _horizon(space, w, horizon)
    n, c = _criterion_values(space, w, h)
    e = _criterion_expansion(space, w)
    lim = e.limit() if e is not None else None
    if lim == "+inf":
        verdict = YES_SYM
    elif lim in ("-inf", "finite"):
        verdict = NO_SYM
    else:
        verdict = _sup_evidence(n, c)
    if not space.radial and is_no(verdict):
        verdict = INCONCLUSIVE
    return CriterionSequence("hypercyclicity", HYPER_ANCHOR, n, c, lim, verdict)


def mixing_criterion(space, w, horizon=None):
    """Mixing iff ``c_n -> inf`` (same sequence as the hypercyclicity test)."""
    h = _horizon(space, w, horizon)
    n, c = _criterion_values(space, w, h)
    e = _criterion_expansion(space, w)
    lim = e.limit() if e is not None else None
    if lim == "+inf":
        verdict = YES_SYM
    elif lim in ("-inf", "finite"):
        verdict = NO_SYM
    else:
        verdict = _lim_evidence(n, c)
    if not space.radial and is_no(verdict):
        verdict = INCONCLUSIVE
    return CriterionSequence("mixing", MIXING_ANCHOR, n, c, lim, verdict)


# -- non-radial two-sided test --------------------------------------------------

@dataclass(frozen=True)
class NonradialResult:
    verdict: str
    gap: bool
    sufficient: CriterionSequence
    necessary: CriterionSequence


def _herglotz_log_functional(space, nmax, t_grid=None):
    """``log inf_R J(R) / (R^n (1-R)^(2/p))`` with ``J(R) = int |g(R e^{i theta})|^(-gamma/p) d theta``.

    The infimum is taken over a log-spaced grid in ``1 - R``, so the value is
    an upper bound of the true infimum (which is what the sufficient
    multiplier test can safely use).
    """
    phi, p = space.weight, space.p
    t = np.geomspace(1e-9, 0.99, 600) if t_grid is None else np.asarray(t_grid)
    logJ = np.empty(len(t))
    for i, ti in enumerate(t):
        th, wt = _quad.panel_rule(_quad.graded_edges(ti, np.pi / 4), 16)
        logJ[i] = math.log(float((phi.polar_value(ti, th) ** (-1.0 / p)) @ wt))
    logR = np.log1p(-t)
    base = logJ - (2.0 / p) * np.log(t)
    ns = np.arange(1, nmax + 1, dtype=float)
    out = np.empty(nmax)
    for lo in range(0, nmax, 2048):
        block = base[None, :] - ns[lo:lo + 2048, None] * logR[None, :]
        out[lo:lo + 2048] = block.min(axis=1)
    return out


def nonradial_hypercyclicity(space, w, horizon=None):
    """Sufficient and necessary sequences for the two non-radial weights.

    sufficient: ``sup |w_1...w_n| / ||z^n|| = inf``; necessary:
    ``sup |w_1...w_n| ||k_n|| = inf`` with ``||k_n||`` bounded by
    ``(n+1)^(3/p)`` for ``1 - |Re z|`` and by the infimum formula for
    ``|g|^gamma``.  The verdict is yes when the first diverges, no when the
    second stays bounded, and inconclusive (``gap=True``) in between.
    """
    phi, p = space.weight, space.p
    if phi.radial:
        raise UnsupportedError("nonradial_hypercyclicity is for non-radial weights")
    h = _horizon(space, w, horizon)
    n = np.arange(1, h + 1)
    L = w.log_products(h)
    suff_vals = L - space.log_norms(h)[1:]
    if phi.family == "re":
        nec_vals = L + (3.0 / p) * np.log(n + 1.0)
        nec_anchor = "sup |w_1...w_n| (n+1)^(3/p) = inf"
    else:
        nec_vals = L + _herglotz_log_functional(space, h)
        nec_anchor = "sup |w_1...w_n| inf_R J(R) R^-n (1-R)^(-2/p) = inf"
    es = _criterion_expansion(space, w)
    en = _criterion_expansion(space, w, functional=True)
    ls = es.limit() if es is not None else None
    ln = en.limit() if en is not None else None
    sv = YES_SYM if ls == "+inf" else (_sup_evidence(n, suff_vals) if ls is None else NO_SYM)
    nv = YES_SYM if ln == "+inf" else (_sup_evidence(n, nec_vals) if ln is None else NO_SYM)
    suff = CriterionSequence("nonradial-sufficient", "sup |w_1...w_n| / ||z^n|| = inf",
                             n, suff_vals, ls, sv)
    nec = CriterionSequence("nonradial-necessary", nec_anchor, n, nec_vals, ln, nv)
    if is_yes(sv):
        return NonradialResult(sv, False, suff, nec)
    if is_no(nv):
        return NonradialResult(nv, False, suff, nec)
    return NonradialResult(INCONCLUSIVE, True, suff, nec)


# -- chaos ----------------------------------------------------------------------

@dataclass(frozen=True)
class ChaosResult:
    verdict: str
    route: str
    necessary: CriterionSequence
    series: CriterionSequence | None = None
    note: str = ""


def chaos_check(space, w, horizon=None):
    """Chaos of ``B_w`` on ``A^p_alpha``.

    Necessary: ``inf |w_1...w_n| (n+1)^((alpha+1)/p) > 0``.  Sufficient (for
    ``1 < p < 2 + alpha``): ``sum 1 / (|w_1...w_n| n^((2+alpha-p)/p)) < inf``.
    Exact for unimodular constant weights: chaotic iff ``p < 2 + alpha``.
    """
    phi, p = space.weight, space.p
    if phi.family != "standard":
        raise UnsupportedError("chaos test is available for the standard weights only")
    alpha = phi.alpha
    h = _horizon(space, w, horizon)
    n = np.arange(1, h + 1)
    L = w.log_products(h)
    e_rate = (alpha + 1) / p
    nec_vals = L + e_rate * np.log(n + 1.0)
    pe = product_expansion(w)
    nec_exp = pe + Expansion.of(logn=e_rate) if pe is not None else None
    nec_lim = nec_exp.limit() if nec_exp is not None else None
    if nec_lim == "-inf":
        nec_v = NO_SYM
    elif nec_lim in ("+inf", "finite"):
        nec_v = YES_SYM
    else:
        # evidence of inf -> 0: a falling tail with new minima
        slope = _tail_slope(n, nec_vals)
        q = _quartiles(nec_vals)
        new_min = float(q[3].min()) < min(float(x.min()) for x in q[:3]) - TREND_THRESHOLD
        nec_v = EV_NO if (slope < -TREND_THRESHOLD and new_min) else EV_YES
    nec = CriterionSequence("chaos-necessary", "inf |w_1...w_n| (n+1)^((alpha+1)/p) > 0",
                            n, nec_vals, nec_lim, nec_v)

    if w.unimodular_constant:
        v = YES_SYM if p < 2 + alpha else NO_SYM
        return ChaosResult(v, "unimodular-constant", nec, note="chaotic iff p < 2 + alpha")
    if is_no(nec_v):
        return ChaosResult(nec_v, "necessary-condition", nec)
    if w.family == "const" and abs(w.c) > 1:
        return ChaosResult(YES_SYM, "geometric-eigenvectors", nec,
                           note="eigenvectors for all |lambda| < |c| span a dense set")
    if p == 1:
        return ChaosResult(INCONCLUSIVE, "series-refused", nec,
                           note="series test needs p > 1")
    if not p < 2 + alpha:
        return ChaosResult(INCONCLUSIVE, "series-not-applicable", nec,
                           note="series test needs p < 2 + alpha")
    kappa = (2 + alpha - p) / p
    terms = -L - kappa * np.log(n)
    partial = logsumexp_cumulative(terms)
    s_exp = (-pe + Expansion.of(logn=-kappa)) if pe is not None else None
    conv = series_converges(s_exp) if s_exp is not None else None
    if conv is None:
        slope = _tail_slope(n, terms)
        conv_ev = slope < -1.0 - PROFILE_MARGIN
        series_v = EV_YES if conv_ev else INCONCLUSIVE
        sym = None
    else:
        series_v = EV_YES if conv else INCONCLUSIVE
        sym = "finite" if conv else "+inf"
    series = CriterionSequence(
        "chaos-series", "sum 1/(|w_1...w_n| n^((2+alpha-p)/p)) < inf", n, partial, sym, series_v)
    note = "series converges" if series_v == EV_YES else "series does not settle"
    return ChaosResult(series_v, "series", nec, series, note)


def logsumexp_cumulative(logs):
    """``log sum_{k<=n} exp(logs[k])`` for every ``n``."""
    return np.logaddexp.accumulate(np.asarray(logs, dtype=float))


@dataclass(frozen=True)
class A2ChaosResult:
    verdict: str
    series_terms: np.ndarray
    series_divergent_terms: bool
    kernel_membership: dict | None
    boundedness: str
    note: str = ""


def _chaos_integral(space, n, eps):
    """``int_0^(1-eps) int r^(n+1) (1-r)^-1 |g|^(gamma/2) d theta dr`` (in ``s = -log(1-r)``)."""
    phi = space.weight
    S = -math.log(eps)
    edges = np.concatenate([np.geomspace(1e-6, 0.5, 12), np.arange(1.0, S, 0.5), [S]])
    edges = np.unique(np.concatenate([[0.0], edges]))
    s, ws = _quad.panel_rule(edges, 16)
    t = np.exp(-s)
    r = -np.expm1(-s)
    mass = np.empty(len(s))
    for i, ti in enumerate(t):
        th, wt = _quad.panel_rule(_quad.graded_edges(ti, np.pi / 4), 16)
        mass[i] = (phi.polar_value(ti, th) ** 0.5) @ wt
    return float(np.sum(ws * r ** (n + 1) * mass))


def _kernel_membership(space, lambdas=(1.0, 1j, -1.0, -1j), degrees=(8, 16, 32, 64)):
    """Norms of ``sum_{k<=N} (lambda z)^k`` as ``N`` grows; bounded means member."""
    out = {}
    for lam in lambdas:
        norms = []
        for N in degrees:
            f = PolyVector(np.asarray(lam, dtype=complex) ** np.arange(N + 1))
            norms.append(poly_norm(space, f))
        slope = float(np.polyfit(np.log(degrees[-2:]), np.log(norms[-2:]), 1)[0])
        out[f"{complex(lam).real:g}{complex(lam).imag:+g}i"] = {
            "degrees": list(degrees), "norms": norms, "loglog_slope": slope,
            "bounded": slope < 0.05,
        }
    return out


def a2_chaos_nonradial(space, w, horizon=None, eps_ladder=(1e-4, 1e-8, 1e-12)):
    """Series test for chaos on ``A^2`` with the ``|g|^gamma`` weight.

    Each term carries ``int r^(n+1) (1-r)^-1 |g|^(gamma/2)``, which is computed
    with the radial range cut at ``1 - eps``; a value growing linearly in
    ``log 1/eps`` marks the term as infinite and the series test as not
    applicable.  For ``w = 1`` the kernel-membership test is run as well.
    """
    phi = space.weight
    if phi.family != "herglotz" or space.p != 2:
        raise UnsupportedError("the A^2 series test is for the |g|^gamma weight with p = 2")
    h = _horizon(space, w, horizon)
    probe = [1, max(2, h // 2), h]
    vals = np.array([[_chaos_integral(space, k, e) for e in eps_ladder] for k in probe])
    x = -np.log(np.asarray(eps_ladder))
    growth = (vals[:, -1] - vals[:, -2]) / (x[-1] - x[-2])
    divergent = bool(np.all(growth > 1e-3 * np.abs(vals[:, -1])))
    bnd = boundedness_check(space, w, horizon=h)
    membership = None
    if w.unimodular_constant and w.c == 1:
        membership = _kernel_membership(space)
        if all(v["bounded"] for v in membership.values()):
            return A2ChaosResult(EV_YES, vals[:, -1], divergent, membership, bnd.verdict,
                                 "kernel functions are members")
    if divergent:
        return A2ChaosResult(INCONCLUSIVE, vals[:, -1], True, membership, bnd.verdict,
                             "series terms are infinite: the sufficient test does not apply")
    n = np.arange(1, h + 1)
    L = w.log_products(h)
    # finite terms: judge the tail of log(term) = -L_n + log I_n
    logI = np.log(vals[:, -1])
    slope = (-L[-1] + logI[-1] - (-L[probe[1] - 1] + logI[1])) / max(math.log(h / probe[1]), 1e-9)
    v = EV_YES if slope < -1 - PROFILE_MARGIN else INCONCLUSIVE
    return A2ChaosResult(v, vals[:, -1], False, membership, bnd.verdict, "")


# -- boundedness ----------------------------------------------------------------

@dataclass(frozen=True)
class MultiplierProfile:
    exponent: float | None
    verdict: str  # bounded-evidence | unbounded-evidence | inconclusive
    route: str
    r: np.ndarray
    log_profile: np.ndarray
    threshold: float
    note: str = ""


def _default_rgrid():
    return 1.0 - np.geomspace(0.5, 1e-3, 25)


def _log_power_series(a, r, cap=1 << 20, rel=1e-12):
    """``log sum_{n>=1} exp(a(n)) r^n`` for each ``r``; ``a`` is a callable on 1-D ``n``.

    The sum is extended until the remaining terms are provably below
    ``rel`` times the partial sum (geometric tail bound from the last ratio).
    Returns ``None`` for radii where the terms are still growing at ``cap``.
    """
    r = np.asarray(r, dtype=float)
    out = np.full(len(r), np.nan)
    N = 1024
    while True:
        n = np.arange(1, N + 1, dtype=float)
        an = a(N)
        done = True
        for i, ri in enumerate(r):
            if np.isfinite(out[i]):
                continue
            terms = an + n * math.log(ri)
            total = logsumexp(terms)
            last, prev = terms[-1], terms[-2]
            if last == -np.inf:
                out[i] = total
                continue
            ratio = last - prev
            if ratio < 0:
                tail = last + ratio - math.log(-math.expm1(ratio))
                if tail < total + math.log(rel):
                    out[i] = total
                    continue
            done = False
        if done:
            return out
        if N >= cap:
            out[~np.isfinite(out)] = np.inf
            return out
        N *= 4


def multiplier_growth_profile(space, w, rgrid=None, margin=PROFILE_MARGIN):
    """Growth exponent of the multiplier majorant and a boundedness verdict.

    Radial weights: ``log(phi(r)^(1/p) M(r))`` against ``log 1/(1-r)`` with
    ``M(r) = sum |w_n| I(n)^(-1/p) r^n``; bounded-evidence when the slope is
    below ``1/p - margin``.  ``1 - |Re z|`` uses ``sum |w_n| (n+1)^(3/p) r^n``
    and ``|g|^gamma`` the infimum-weighted series, both with the same
    threshold.  The slope is fitted over the upper half of the grid.
    """
    phi, p = space.weight, space.p
    if phi.family == "hardy":
        raise UnsupportedError("no multiplier test for the Hardy marker")
    r = _default_rgrid() if rgrid is None else np.asarray(rgrid, dtype=float)
    if np.any(r < 0.5 - 1e-12) or np.any(r > 0.999 + 1e-12):
        raise ParameterError("r-grid must lie in [0.5, 0.999]")
    cap = w.length if w.length is not None else 1 << 20
    thr = 1.0 / p - margin

    if phi.radial:
        route = "radial"

        def a(N):
            N2 = min(N, cap)
            logI = p * space.log_norms(N2)[1:] - math.log(2.0)
            out = w.log_abs_terms(N2) - logI / p
            return _pad(out, N)

        weight_term = phi.log_radial(1.0 - r) / p
    elif phi.family == "re":
        route = "re"

        def a(N):
            N2 = min(N, cap)
            n = np.arange(1, N2 + 1, dtype=float)
            return _pad(w.log_abs_terms(N2) + (3.0 / p) * np.log1p(n), N)

        weight_term = np.zeros(len(r))
    else:
        route = "herglotz"
        cache = {}

        def a(N):
            N2 = min(N, cap)
            if N2 not in cache:
                cache[N2] = _herglotz_log_functional(space, N2)
            return _pad(w.log_abs_terms(N2) + cache[N2], N)

        weight_term = np.zeros(len(r))

    logM = _log_power_series(a, r)
    if not np.all(np.isfinite(logM)):
        return MultiplierProfile(None, "unbounded-evidence", route, r, logM, thr,
                                 "series diverges on part of the grid")
    y = weight_term + logM
    x = -np.log1p(-r)
    upper = x >= np.median(x)
    slope = float(np.polyfit(x[upper], y[upper], 1)[0])
    verdict = "bounded-evidence" if slope < thr else "inconclusive"
    return MultiplierProfile(slope, verdict, route, r, y, thr)


def _pad(a, N):
    """Extend a finite (custom) sequence with ``-inf`` (zero terms) up to ``N``."""
    if len(a) >= N:
        return a[:N]
    return np.concatenate([a, np.full(N - len(a), -np.inf)])


@dataclass(frozen=True)
class BoundednessResult:
    verdict: str
    route: str
    detail: dict = field(default_factory=dict)


def boundedness_check(space, w, horizon=None):
    """Boundedness of ``B_w``.

    ``B`` itself is bounded on every space here, so constant weights are
    settled outright.  With ``p = 2`` and a radial weight the equivalent
    ``l^2`` weights decide (bounded iff ``sup|w_n| < inf`` for built-in
    sequences, trend evidence otherwise).  Elsewhere only the sufficient
    multiplier test is available: ``B_w = B M_w``.
    """
    phi, p = space.weight, space.p
    if w.family == "const":
        return BoundednessResult(YES_SYM, "constant", {"factor": abs(w.c)})
    if p == 2 and phi.radial:
        if w.builtin:
            lim = w.limit()
            v = YES_SYM if (lim is not None and math.isfinite(abs(lim))) else NO_SYM
            return BoundednessResult(v, "l2-weights", {"limit_abs": None if lim is None else abs(lim)})
        h = _horizon(space, w, horizon)
        red = ell2_reduction(space, w, h)
        v = EV_YES if red.verdict == "bounded-evidence" else EV_NO
        return BoundednessResult(v, "l2-weights", {"sup": red.sup, "tail_slope": red.tail_slope})
    if phi.family == "hardy":
        return BoundednessResult(INCONCLUSIVE, "none")
    prof = multiplier_growth_profile(space, w)
    detail = {"exponent": prof.exponent, "threshold": prof.threshold, "route": prof.route}
    if prof.verdict == "bounded-evidence":
        return BoundednessResult(EV_YES, "multiplier", detail)
    if w.family == "ratio":
        # n/(n+1) = 1 - 1/(n+1): constant part is bounded, test the remainder
        rest = WeightSequence.powdecay(1.0)
        prof2 = multiplier_growth_profile(space, rest)
        detail["split_exponent"] = prof2.exponent
        if prof2.verdict == "bounded-evidence":
            return BoundednessResult(EV_YES, "multiplier-split", detail)
    return BoundednessResult(INCONCLUSIVE, "multiplier", detail)


# -- periodic vectors -----------------------------------------------------------

@dataclass(frozen=True)
class PeriodicResult:
    verdict: str
    route: str
    note: str = ""


def periodic_check(space, w, horizon=None, necessary=None):
    """Whether non-zero periodic vectors can exist.

    A periodic vector splits into eigenvectors for roots of unity, whose
    coefficients are ``f(0) lambda^n / (w_1...w_n)``; the coefficient
    functional bound then forces ``|w_1...w_n| ||k_n||`` to stay bounded
    below, so a sequence tending to ``-inf`` rules them out.
    """
    phi, p = space.weight, space.p
    if w.family == "const" and abs(w.c) > 1:
        return PeriodicResult(YES_SYM, "geometric-eigenvectors",
                              "sum (lambda/c)^n z^n lies in the space for |lambda| = 1")
    if w.unimodular_constant and phi.family == "standard":
        v = YES_SYM if p < 2 + phi.alpha else NO_SYM
        return PeriodicResult(v, "kernel-membership", "f_lambda in the space iff p < 2 + alpha")
    if w.unimodular_constant and phi.family == "hardy":
        return PeriodicResult(NO_SYM, "kernel-membership", "1/(1 - lambda z) is not in H^p")
    e =_criterion_expansion(space, w, functional=True)
    if e is not None and e.limit() == "-inf":
        return PeriodicResult(NO_SYM, "coefficient-bound")
    if necessary is not None and necessary.symbolic_limit is None:
        q = _quartiles(necessary.values)
        if _tail_slope(necessary.n, necessary.values) < -TREND_THRESHOLD and \
                float(q[3].max()) < min(float(x.min()) for x in q[:3]):
            return PeriodicResult(EV_NO, "coefficient-bound")
    return PeriodicResult(INCONCLUSIVE, "none")


# -- classification -------------------------------------------------------------

@dataclass(frozen=True)
class ClassificationReport:
    space: str
    p: float
    weights: str
    horizon: int
    boundedness: str
    hypercyclic: str
    mixing: str
    chaotic: str
    periodic: str
    criteria: tuple = ()
    notes: tuple = ()

    @property
    def verdicts(self):
        return {
            "boundedness": self.boundedness,
            "hypercyclic": self.hypercyclic,
            "mixing": self.mixing,
            "chaotic": self.chaotic,
            "periodic": self.periodic,
        }

    def to_dict(self):
        return {
            "space": self.space,
            "p": self.p,
            "weights": self.weights,
            "horizon": self.horizon,
            "criteria": [c.to_dict() for c in self.criteria],
            "verdicts": self.verdicts,
            "notes": list(self.notes),
        }


def _resolve(a, b):
    """Merge two verdicts about the same property, preferring symbolic ones."""
    if a == b:
        return a
    if a == INCONCLUSIVE:
        return b
    if b == INCONCLUSIVE:
        return a
    if is_yes(a) == is_yes(b) and is_no(a) == is_no(b):
        return a if _symbolic(a) else b
    if _symbolic(a) and not _symbolic(b):
        return a
    if _symbolic(b) and not _symbolic(a):
        return b
    return INCONCLUSIVE


def close_verdicts(hyper, mixing, chaotic, periodic):
    """Enforce mixing => hypercyclic and chaotic => hypercyclic and periodic."""
    notes = []
    if is_yes(mixing) and not is_yes(hyper):
        new = _resolve(hyper, mixing)
        notes.append(f"closure: mixing {mixing} vs hypercyclic {hyper}")
        hyper = new
        if not is_yes(hyper):
            mixing = hyper if is_no(hyper) else INCONCLUSIVE
    if is_no(hyper) and not is_no(mixing):
        mixing = NO_SYM if hyper == NO_SYM else EV_NO
    if is_yes(chaotic):
        if is_no(hyper) or is_no(periodic):
            notes.append("closure: chaotic contradicted")
            chaotic = INCONCLUSIVE
        else:
            if not is_yes(hyper):
                hyper = chaotic
            if not is_yes(periodic):
                periodic = chaotic
    if (is_no(hyper) or is_no(periodic)) and not is_no(chaotic):
        chaotic = NO_SYM if NO_SYM in (hyper, periodic) else EV_NO
    return hyper, mixing, chaotic, periodic, notes


def classify(space, w, horizon=None):
    """Run every applicable criterion and assemble a consistent report."""
    if not isinstance(space, BergmanSpace):
        raise ParameterError("space must be a BergmanSpace")
    h = _horizon(space, w, horizon)
    criteria = []
    notes = []
    bnd = boundedness_check(space, w, h)
    if space.radial:
        hc = hypercyclicity_criterion(space, w, h)
        mc = mixing_criterion(space, w, h)
        criteria += [hc, mc]
        hyper, mixing = hc.verdict, mc.verdict
        necessary = hc
    else:
        nr = nonradial_hypercyclicity(space, w, h)
        mc = mixing_criterion(space, w, h)
        criteria += [nr.sufficient, nr.necessary, mc]
        hyper, mixing = nr.verdict, mc.verdict
        if nr.gap:
            notes.append("hypercyclicity lies between the sufficient and necessary conditions")
        necessary = nr.necessary

    per = periodic_check(space, w, h, necessary)
    phi = space.weight
    if phi.family == "standard":
        ch = chaos_check(space, w, h)
        criteria.append(ch.necessary)
        if ch.series is not None:
            criteria.append(ch.series)
        chaotic = ch.verdict
        if ch.note:
            notes.append(ch.note)
    elif w.family == "const" and abs(w.c) > 1:
        chaotic = YES_SYM  # hypercyclic with dense geometric eigenvectors
    elif phi.family == "herglotz" and space.p == 2:
        a2 = a2_chaos_nonradial(space, w, h)
        chaotic = a2.verdict
        if a2.note:
            notes.append(a2.note)
    else:
        chaotic = INCONCLUSIVE
    if is_yes(chaotic) and not is_yes(per.verdict):
        per = PeriodicResult(chaotic, "chaos")

    hyper, mixing, chaotic, periodic, cn = close_verdicts(hyper, mixing, chaotic, per.verdict)
    notes += cn
    if is_no(bnd.verdict):
        notes.append("B_w is unbounded; dynamical verdicts describe the formal criteria only")
    return ClassificationReport(
        space=phi.spec, p=space.p, weights=w.spec, horizon=h,
        boundedness=bnd.verdict, hypercyclic=hyper, mixing=mixing,
        chaotic=chaotic, periodic=periodic, criteria=tuple(criteria), notes=tuple(notes),
    )


def ell2_shift_verdict(space, w, horizon=None):
    """Hypercyclicity of the equivalent weighted shift on ``l^2``.

    The backward shift with weights ``lambda_n`` is hypercyclic iff
    ``sup_n lambda_1 ... lambda_n = inf``; this is evaluated from the
    ratio sequence alone (trend evidence, no expansions).
    """
    h = _horizon(space, w, horizon)
    red = ell2_reduction(space, w, h)
    logs = np.cumsum(np.log(red.lambdas))
    n = np.arange(1, h + 1)
    return _sup_evidence(n, logs), logs
