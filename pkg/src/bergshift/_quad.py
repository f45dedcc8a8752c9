"""Quadrature plumbing: panel Gauss-Legendre rules on the disc.

Radial integrals are taken in the variable ``s = -log(1 - r)``, which turns
every endpoint singularity at ``r = 1`` of the families here into an
exponentially (or, for log-Bergman, algebraically) decaying tail, and turns
``r^m`` into a smooth step located near ``s = log m``.  Angular integrals
use the periodic trapezoid rule when the integrand is smooth, and
Gauss-Legendre panels split at kinks or graded towards boundary
singularities otherwise.

Accuracy is checked by comparing a rule against its refinement; the
difference is the reported error estimate.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .errors import QuadratureError

GL_ORDER = 20
MAX_LEVELS = 4


@lru_cache(maxsize=32)
def _leggauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(edges, order=GL_ORDER):
    """Composite Gauss-Legendre nodes/weights over consecutive ``edges``."""
    edges = np.asarray(edges, dtype=float)
    x, w = _leggauss(order)
    a = edges[:-1, None]
    b = edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + b) * 0.5 + half * x[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


# -- radial rules ---------------------------------------------------------------

def _decay_rate(phi):
    """Exponential decay rate of ``phi(r) dr`` in ``s``; ``None`` if algebraic."""
    if phi is None:
        return 1.0
    if phi.family == "standard":
        return phi.alpha + 1.0
    if phi.family == "log":
        return phi.a + 1.0
    if phi.family == "logbergman":
        return None
    raise ValueError(phi.family)


def _radial_edges(phi, m_max, h):
    rate = _decay_rate(phi)
    s_mid = math.log(m_max + 2.0) + 8.0
    # geometric grading into s = 0 where (1 - e^-s)^m ~ s^m may be non-smooth
    head = [h * 2.0 ** (-j) for j in range(14, 0, -1)]
    edges = [0.0] + head + list(np.arange(h, s_mid + h, h))
    if rate is None:
        s_end = math.log(m_max + 2.0) + 40.0
        w_cap = 4.0
    else:
        extra = phi.b * math.log1p(s_mid + 1000.0) if (phi is not None and phi.family == "log") else 0.0
        s_end = s_mid + (40.0 + extra) / rate
        w_cap = 6.0 / rate
    width = h
    while edges[-1] < s_end:
        width = min(width * 1.5, w_cap)
        edges.append(edges[-1] + width)
    return np.asarray(edges)


class RadialRule:
    """Nodes for ``int_0^1 G(r) phi(r) dr`` with ``phi`` radial (or 1).

    Attributes ``s``, ``t`` (``1 - r``), ``r`` and ``logw`` (log of the weight
    including ``phi`` and ``dr/ds``).  For log-Bergman the mass beyond the
    last panel is returned in ``log_tail`` and attaches to ``r = 1``.
    """

    def __init__(self, phi, m_max, h=0.5, order=GL_ORDER):
        edges = _radial_edges(phi, m_max, h)
        s, w = panel_rule(edges, order)
        self.s = s
        self.t = np.exp(-s)
        self.r = -np.expm1(-s)
        with np.errstate(divide="ignore"):
            log_phi = 0.0 if phi is None else phi.log_radial_s(s)
        self.logw = np.log(w) - s + log_phi
        self.log_tail = None
        if phi is not None and phi.family == "logbergman":
            # int_{S}^inf (1+s)^-(1+alpha) ds, integrand ~ G(1) there
            self.log_tail = -phi.alpha * math.log1p(edges[-1]) - math.log(phi.alpha)

    @property
    def logr(self):
        return np.log1p(-self.t)


def log_moments(phi, ms, tol=1e-12, h=0.5):
    """``log int_0^1 r^m phi(r) dr`` for every ``m`` in ``ms`` (vectorised).

    Returns ``(logI, err)`` with ``err`` the largest difference in ``logI``
    between the final rule and its predecessor (a relative-error estimate).
    Raises :class:`QuadratureError` if the refinement budget is exhausted.
    """
    ms = np.atleast_1d(np.asarray(ms, dtype=float))
    m_max = float(ms.max())
    prev = None
    err = np.inf
    for _ in range(MAX_LEVELS):
        rule = RadialRule(phi, m_max, h=h)
        cur = _log_moment_sum(rule, ms)
        if prev is not None:
            err = float(np.max(np.abs(cur - prev)))
            if err <= tol:
                return cur, err
        prev = cur
        h *= 0.5
    raise QuadratureError(
        f"moment quadrature did not reach tol={tol:g} (estimate {err:.3g})",
        value=np.exp(prev), error=err,
    )


def _log_moment_sum(rule, ms, chunk=512):
    logr = rule.logr
    out = np.empty(len(ms))
    for lo in range(0, len(ms), chunk):
        block = ms[lo:lo + chunk, None] * logr[None, :] + rule.logw[None, :]
        if rule.log_tail is not None:
            block = np.concatenate([block, np.full((block.shape[0], 1), rule.log_tail)], axis=1)
        out[lo:lo + chunk] = logsumexp(block, axis=1)
    return out


# -- angular rules --------------------------------------------------------------

def trapezoid_mean(func, n0, tol, max_nodes=1 << 18):
    """Mean over ``[0, 2 pi)`` of a smooth periodic ``func(theta)``.

    ``func`` maps a 1-D array of angles to an array whose last axis runs over
    them.  Node doubling reuses previous samples; stops when successive
    means agree to ``tol`` (relative to the largest mean).
    """
    n = max(int(n0), 4)
    theta = 2.0 * np.pi * np.arange(n) / n
    total = func(theta).sum(axis=-1)
    mean = total / n
    while n < max_nodes:
        mid = theta + np.pi / n
        total = total + func(mid).sum(axis=-1)
        theta = np.sort(np.concatenate([theta, mid]))
        n *= 2
        new = total / n
        scale = max(float(np.max(np.abs(new))), 1e-300)
        diff = float(np.max(np.abs(new - mean)))
        mean = new
        if diff <= tol * scale:
            return mean, diff / scale
    raise QuadratureError("angular trapezoid rule did not converge", value=mean)


def kink_edges(max_width):
    """Angular panel edges on ``[-pi, pi]`` split at ``+-pi/2`` (kinks of ``|cos|``)."""
    quarters = [-np.pi, -0.5 * np.pi, 0.0, 0.5 * np.pi, np.pi]
    return _subdivide(quarters, max_width)


def graded_edges(t, max_width):
    """Angular edges on ``[-pi, pi]`` graded to width ``~t`` at ``0`` and ``+-pi``."""
    t = max(float(t), 1e-300)
    side = [0.0]
    x = t
    while x < 0.5 * np.pi:
        side.append(x)
        x *= 2.0
    half = side + [0.5 * np.pi] + [np.pi - v for v in reversed(side)]
    full = [-v for v in reversed(half[1:])] + half
    return _subdivide(full, max_width)


def _subdivide(edges, max_width):
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        k = max(1, int(math.ceil((b - a) / max_width)))
        out.extend(a + (b - a) * np.arange(1, k + 1) / k)
    return np.asarray(out)
