"""Constructive dynamics on polynomials: the shift, its right inverse,
transitivity witnesses, periodic vectors and orbit traces.

Products of weights are formed in log scale so that ``S^m`` can be applied
for large ``m`` without overflow; coefficient arrays are only materialised
when every entry is a finite double.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import norm_expansion, series_converges
from .errors import ParameterError
from .spaces import BergmanSpace, PolyVector, poly_norm
from .weights import WeightSequence

__all__ = [
    "ShiftOperator",
    "OrbitTrace",
    "Witness",
    "PeriodicVector",
    "apply_shift",
    "apply_right_inverse",
    "shift_power",
    "gethner_shapiro_witness",
    "periodic_vector",
    "orbit_trace",
]


@dataclass(frozen=True)
class ShiftOperator:
    w: WeightSequence
    space: BergmanSpace

    def __post_init__(self):
        if not self.w.for_dynamics:
            raise ParameterError("weight sequence must have non-zero terms")

    def terms(self, n):
        return self.w.terms(n)


def apply_shift(T, f):
    """``B_w f``: coefficient ``n`` becomes ``w_{n+1} c_{n+1}``."""
    c = f.coeffs
    if len(c) <= 1:
        return PolyVector.zero()
    return PolyVector(T.terms(len(c) - 1) * c[1:])


def apply_right_inverse(T, f):
    """``S f``: ``z^j`` goes to ``z^(j+1) / w_{j+1}``."""
    c = f.coeffs
    if len(c) == 0:
        return PolyVector.zero()
    return PolyVector(np.concatenate([[0.0], c / T.terms(len(c))]))


def shift_power(T, f, k):
    """``B_w^k f`` with the ``k``-fold weight products formed in one step."""
    c = f.coeffs
    if k < 0:
        raise ParameterError("power must be non-negative")
    if len(c) <= k:
        return PolyVector.zero()
    terms = T.terms(len(c) - 1)
    logs = np.concatenate([[0.0], np.cumsum(np.log(np.abs(terms)))])
    phases = np.concatenate([[0.0], np.cumsum(np.angle(terms))])
    j = np.arange(len(c) - k)
    factor = np.exp(logs[j + k] - logs[j] + 1j * (phases[j + k] - phases[j]))
    return PolyVector(factor * c[k:])


@dataclass(frozen=True)
class Witness:
    m: int
    x: PolyVector | None
    dist1: float
    dist2: float
    truncation: int
    log_dist1: float
    overflow: bool = False

    def to_dict(self):
        return {"m": self.m, "dist1": self.dist1, "dist2": self.dist2, "truncation": self.truncation}


def _log_norm_scaled(space, log_mod, phase):
    """``log ||sum exp(log_mod_j + i phase_j) z^j||`` without forming huge numbers."""
    finite = np.isfinite(log_mod)
    if not finite.any():
        return -math.inf
    top = float(np.max(log_mod[finite]))
    coeffs = np.exp(np.where(finite, log_mod - top, -np.inf) + 1j * phase)
    if space.p == 2 and space.radial:
        ln = space.log_norms(len(coeffs) - 1)
        a = np.abs(coeffs)
        nz = a > 0
        s = np.log(a[nz]) + ln[nz]
        mx = float(s.max())
        return top + mx + 0.5 * math.log(float(np.sum(np.exp(2.0 * (s - mx)))))
    return top + math.log(poly_norm(space, PolyVector(coeffs)))


def gethner_shapiro_witness(T, ptarget, qtarget, m):
    """``x = p + S^m q`` with ``||x - p||`` and ``||B^m x - q||``.

    ``B^m p = 0`` because ``m > deg p`` and ``B^m S^m q = q``, so ``dist2``
    vanishes up to rounding; ``dist1 = ||S^m q||`` is the quantity that must
    shrink as ``m`` grows for the mixing mechanism to work.
    """
    m = int(m)
    if not m > ptarget.degree:
        raise ParameterError("m must exceed deg(ptarget)")
    space = T.space
    q = qtarget.coeffs
    if len(q) == 0:
        return Witness(m, ptarget, 0.0, 0.0, max(0, len(ptarget.coeffs) - 1), -math.inf)
    top = len(q) - 1 + m
    terms = T.terms(top)
    logw = np.concatenate([[0.0], np.cumsum(np.log(np.abs(terms)))])
    argw = np.concatenate([[0.0], np.cumsum(np.angle(terms))])
    j = np.arange(len(q))
    with np.errstate(divide="ignore"):
        logq = np.log(np.abs(q))
    # coefficient j+m of S^m q is q_j / (w_{j+1} ... w_{j+m})
    log_mod = logq - (logw[j + m] - logw[j])
    phase = np.angle(q) - (argw[j + m] - argw[j])
    lead = np.full(m, -np.inf)
    log_mod_full = np.concatenate([lead, log_mod])
    phase_full = np.concatenate([np.zeros(m), phase])
    log_d1 = _log_norm_scaled(space, log_mod_full, phase_full)
    overflow = bool(np.nanmax(log_mod) > 700.0)
    x = None
    if not overflow:
        tail = np.concatenate([np.zeros(m, dtype=complex),
                               np.exp(np.where(np.isfinite(log_mod), log_mod, -np.inf) + 1j * phase)])
        pc = np.zeros(len(tail), dtype=complex)
        pc[: len(ptarget.coeffs)] = ptarget.coeffs
        x = PolyVector(pc + tail)
    # B^m x - q, coefficient j: (w_{j+1}...w_{j+m}) x_{j+m} - q_j, in log form
    back = np.exp(log_mod + (logw[j + m] - logw[j]) + 1j * (phase + (argw[j + m] - argw[j])))
    back = np.where(np.isfinite(log_mod), back, 0.0)
    resid = PolyVector(back - q)
    dist2 = 0.0 if resid.is_zero else poly_norm(space, resid)
    return Witness(m, x, math.exp(log_d1) if log_d1 < 700 else math.inf, dist2, top, log_d1, overflow)


@dataclass(frozen=True)
class PeriodicVector:
    f: PolyVector
    lam: complex
    period: int
    truncation: int
    residual: float
    monomial_norm: float
    partial_norms: np.ndarray
    converges: bool | None
    tail_bound: float | None


def periodic_vector(T, q, k=1, N=None):
    """Truncation ``sum_{n<=N} lambda^n z^n`` of the eigenvector for ``lambda = exp(2 pi i k / q)``.

    The coefficients come from a table of the ``q`` roots of unity indexed
    by ``k n mod q``, so ``B^q f - f`` is exactly supported on the top
    ``q`` coefficients.  The residual ``||B f - lambda f||`` is the norm of the
    single term ``lambda^(N+1) z^N``.
    """
    w = T.w
    if not w.unimodular_constant or w.c != 1:
        raise ParameterError("periodic vectors are built for w = 1")
    q = int(q)
    if q < 1:
        raise ParameterError("period must be >= 1")
    N = 1000 if N is None else int(N)
    if N < q:
        raise ParameterError("N must be >= the period")
    table = np.array([cmath.exp(2j * math.pi * j / q) for j in range(q)])
    for j in range(q):
        if (4 * j) % q == 0:
            table[j] = (1, 1j, -1, -1j)[4 * j // q]
    idx = (k * np.arange(N + 1)) % q
    f = PolyVector(table[idx])
    lam = table[k % q]
    space = T.space
    resid = apply_shift(T, f) - lam * f
    residual = poly_norm(space, resid)
    mono = space.monomial_norm(N)
    partial, conv, tail = _partial_norms(space, N)
    return PeriodicVector(f, complex(lam), q, N, residual, mono, partial, conv, tail)


def _partial_norms(space, N):
    """``(sum_{n<=M} ||z^n||^2)^(1/2)`` for ``M <= N`` (``p = 2`` radial), plus a convergence call."""
    if not (space.p == 2 and space.radial):
        return np.empty(0), None, None
    ln = space.log_norms(N)
    part = np.sqrt(np.cumsum(np.exp(2.0 * ln)))
    conv = series_converges(norm_expansion(space.weight, 2.0) * -2.0)
    tail = None
    if conv:
        # ||z^n||^2 decays at least like the fitted power over the last quarter
        n = np.arange(N - N // 4, N + 1)
        slope = float(np.polyfit(np.log(n), 2.0 * ln[n], 1)[0])
        if slope < -1:
            tail = float(math.exp(2.0 * ln[N]) * N / (-slope - 1))
    return part, conv, tail


@dataclass(frozen=True)
class OrbitTrace:
    k: np.ndarray
    norms: np.ndarray
    truncation: int
    overflow: bool = False

    def rows(self):
        return [(int(a), float(b)) for a, b in zip(self.k, self.norms)]


def orbit_trace(T, f, K, truncN=None):
    """``||B_w^k f||`` for ``k = 0..K``; exact zero once ``k > deg f``."""
    K = int(K)
    if K < 1:
        raise ParameterError("K must be >= 1")
    trunc = len(f.coeffs) - 1 if truncN is None else int(truncN)
    if trunc < len(f.coeffs) - 1:
        raise ParameterError("truncation degree below the degree of f")
    norms = []
    g = f
    overflow = False
    for k in range(K + 1):
        if k > 0:
            g = apply_shift(T, g)
        if g.is_zero:
            norms.append(0.0)
            continue
        if not np.all(np.isfinite(g.coeffs)):
            overflow = True
            break
        v = poly_norm(T.space, g)
        if not math.isfinite(v):
            overflow = True
            break
        norms.append(v)
    return OrbitTrace(np.arange(len(norms)), np.array(norms), trunc, overflow)
