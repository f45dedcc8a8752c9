"""Reference computations for the test suite.

Each oracle uses a different algorithm from the library code it checks and
touches only numpy and the ``math`` module.  Nothing here is imported by
the package itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OracleResult:
    value: float
    method: str
    errorEstimate: float


def _simpson(y, h):
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def _simpson_richardson(y, h):
    """Simpson on all points and on every other point; the difference / 15
    estimates the fine-grid error."""
    fine = _simpson(y, h)
    coarse = _simpson(y[::2], 2.0 * h)
    return fine, abs(fine - coarse) / 15.0


class _Grid:
    """Composite Simpson grid on ``[0, 1]`` with ``points`` nodes (made odd,
    and with an odd half-grid so Richardson can reuse the samples)."""

    def __init__(self, points=10**6):
        k = max(2, (points - 1) // 4)
        self.v = np.linspace(0.0, 1.0, 4 * k + 1)
        self.h = 1.0 / (4 * k)
        with np.errstate(divide="ignore"):
            self.logv = np.log(self.v)


_GRIDS = {}


def _grid(points):
    if points not in _GRIDS:
        _GRIDS[points] = _Grid(points)
    return _GRIDS[points]


def _substitution_power(alpha):
    # r = 1 - v^m turns (1 - r)^alpha dr into v^(m(alpha+1) - 1) dv; pick an
    # even m making that exponent a non-negative integer >= 3 when possible
    for m in range(2, 41, 2):
        e = m * (alpha + 1.0) - 1.0
        if e >= 3 and abs(e - round(e)) < 1e-12:
            return m
    return 8


def brute_moment(family, p, n, points=10**6, **params):
    """``int_0^1 r^(pn+1) phi(r) dr`` by composite Simpson with a Richardson estimate.

    ``standard`` and ``log`` use ``r = 1 - v^m``; ``logbergman`` uses
    ``y = log(e/(1-r))`` followed by ``y = 1/u^k`` to map the infinite range
    onto ``[0, 1]``.
    """
    res = brute_moments(family, p, [n], points, **params)
    return res[0]


def brute_moments(family, p, ns, points=10**6, **params):
    g = _grid(points)
    v, logv = g.v, g.logv
    out = []
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if family in ("standard", "log"):
            if family == "standard":
                alpha = params["alpha"]
                m = _substitution_power(alpha)
            else:
                a, b = params["a"], params["b"]
                m = _substitution_power(a)
            vm = v**m
            log_r = np.log1p(-vm)
            log_jac = math.log(m) + (m - 1) * logv
            log_t = m * logv  # log(1 - r)
            if family == "standard":
                log_phi = alpha * (log_t + np.log(2.0 - vm))
            else:
                log_phi = a * log_t + b * np.log(1.0 - log_t)
            base = log_phi + log_jac
            method = f"simpson r=1-v^{m}"
        elif family == "logbergman":
            alpha = params["alpha"]
            k = max(1, math.ceil(3.0 / alpha))
            # y = u^-k, dy = k u^-(k+1) du; y^-(1+alpha) dy = k u^(k alpha - 1) du
            u = v
            y = np.where(u > 0, u ** (-float(k)), np.inf)
            log_r = np.log1p(-np.exp(1.0 - y))  # r = 1 - exp(1 - y)
            base = math.log(k) + (k * alpha - 1.0) * logv
            method = f"simpson y=log(e/(1-r)), y=u^-{k}"
        else:
            raise ValueError(f"no brute oracle for {family}")
        for n in ns:
            ex = p * n + 1.0
            y_int = np.exp(ex * log_r + base)
            y_int = np.where(np.isfinite(y_int), y_int, 0.0)
            val, err = _simpson_richardson(y_int, g.h)
            out.append(OracleResult(float(val), method, float(err)))
    return out


def standard_moment_exact(alpha, p, n):
    """``int r^(pn+1) (1-r^2)^alpha dr = B((pn+2)/2, alpha+1) / 2`` via lgamma."""
    x = (p * n + 2.0) / 2.0
    return 0.5 * math.exp(math.lgamma(x) + math.lgamma(alpha + 1.0) - math.lgamma(x + alpha + 1.0))


def stirling_limit(alpha, p):
    return math.exp(math.lgamma(alpha + 1.0)) / 2.0 * (2.0 / p) ** (alpha + 1.0)


def series_kernel(lam, p, alpha, eps=1e-17):
    """``(1/pi) int_D |1 - lam z|^-p (1-|z|^2)^alpha dA`` as a power series.

    ``(1 - lam z)^(-p/2) = sum c_k z^k``, so the angular mean of the integrand is
    ``sum c_k^2 r^(2k)`` and each term integrates to ``c_k^2 B(k+1, alpha+1)``.
    """
    s = p / 2.0
    total = 0.0
    log_c = 0.0  # log c_k
    k = 0
    lam2 = lam * lam
    last = math.inf
    while True:
        log_beta = math.lgamma(k + 1.0) + math.lgamma(alpha + 1.0) - math.lgamma(k + alpha + 2.0)
        term = math.exp(2.0 * log_c + log_beta)
        total += term
        if k > 10 and term < eps * total and term <= last:
            # remaining terms decay at least geometrically with ratio ~ lam^2
            ratio = lam2 * ((k + s) / (k + 1.0)) ** 2
            tail = term * ratio / max(1e-300, 1.0 - ratio) if ratio < 1 else math.inf
            return OracleResult(total, "power series", tail)
        last = term
        log_c += math.log(lam) + math.log((k + s) / (k + 1.0))
        k += 1


def herglotz_moment_series(gamma, p, n, kmax=200000):
    """``||z^n||^p`` for ``|(1+z)/(1-z)|^gamma`` from the Taylor series of
    ``((1+z)/(1-z))^(gamma/2)``: ``2 sum |a_k|^2 / (pn + 2k + 2)``.

    ``|a_k|^2 ~ C k^(gamma-2)`` so the tail beyond ``kmax`` is summed from the
    fitted power law.
    """
    s = gamma / 2.0
    k = np.arange(kmax)
    # binomial coefficients of (1+z)^s and (1-z)^-s by recurrence
    b1 = np.empty(kmax)
    b2 = np.empty(kmax)
    b1[0] = b2[0] = 1.0
    j = np.arange(1, kmax)
    b1[1:] = np.cumprod((s - j + 1.0) / j)
    b2[1:] = np.cumprod((s + j - 1.0) / j)
    a = np.fft.irfft(np.fft.rfft(b1, 2 * kmax) * np.fft.rfft(b2, 2 * kmax), 2 * kmax)[:kmax]
    terms = a * a / (p * n + 2.0 * k + 2.0)
    head = 2.0 * float(terms.sum())
    # tail: a_k^2 ~ c k^(gamma-2), term ~ c k^(gamma-3) / 2
    kk = k[-1000:]
    c = float(np.mean(a[-1000:] ** 2 / kk ** (gamma - 2.0)))
    K = float(kmax)
    tail = 2.0 * c / 2.0 * K ** (gamma - 2.0) / (2.0 - gamma)
    return OracleResult(head + tail, "taylor series", abs(tail) * 0.01 + 1e-15)


def re_norm_closed(p, n):
    return 2.0 / (p * n + 2.0) - 4.0 / (math.pi * (p * n + 3.0))
