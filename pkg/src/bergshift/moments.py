"""Moment integrals, monomial norms, Gamma-ratio asymptotics and kernel integrals.

The radial moment of a weight is ``I(n) = int_0^1 r^(pn+1) phi(r) dr`` and the
monomial norm is ``||z^n|| = (2 I(n))^(1/p)`` under the normalised area
measure.  Non-radial weights use the 2-D analogue
``||z^n||^p = (1/pi) int int r^(pn+1) phi dr dtheta``.
Everything is carried as logarithms.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from . import _quad
from .errors import ParameterError, QuadratureError, UnsupportedError
from .weights import WeightFunction

__all__ = [
    "DEFAULT_TOL_RADIAL",
    "DEFAULT_TOL_NONRADIAL",
    "MomentTable",
    "AsymptoticReport",
    "KernelRegime",
    "moment_closed_standard",
    "log_moment_closed_standard",
    "moment_quadrature",
    "log_moments",
    "log_monomial_norms",
    "polar_log_moments",
    "monomial_norm",
    "re_closed_norm_p",
    "gamma_ratio_check",
    "kernel_integral",
    "kernel_regimes",
    "asymptotic_report",
    "stirling_constant",
]


def _env_tol(default):
    raw = os.environ.get("BSL_TOL")
    if not raw:
        return default
    try:
        val = float(raw)
    except ValueError:
        raise ParameterError(f"BSL_TOL is not a number: {raw!r}") from None
    return max(val, 1e-13)


DEFAULT_TOL_RADIAL = 1e-12
DEFAULT_TOL_NONRADIAL = 1e-8


def radial_tol(tol=None):
    return _env_tol(DEFAULT_TOL_RADIAL) if tol is None else tol


def nonradial_tol(tol=None):
    return _env_tol(DEFAULT_TOL_NONRADIAL) if tol is None else tol


# -- radial moments -------------------------------------------------------------

def log_moment_closed_standard(alpha, p, n):
    """``log I(n)`` for ``phi = (1-r^2)^alpha``: ``log(B(pn/2+1, alpha+1)/2)``."""
    if not alpha > -1:
        raise ParameterError(f"alpha must exceed -1, got {alpha}")
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    n = np.asarray(n, dtype=float)
    if np.any(n < 0):
        raise ParameterError("n must be non-negative")
    h = 0.5 * p * n
    return -math.log(2.0) + gammaln(h + 1.0) + gammaln(alpha + 1.0) - gammaln(h + alpha + 2.0)


def moment_closed_standard(alpha, p, n):
    """``int_0^1 r^(pn+1) (1-r^2)^alpha dr`` in closed form.

    >>> round(moment_closed_standard(0, 2, 3), 15)
    0.125
    """
    out = np.exp(log_moment_closed_standard(alpha, p, n))
    return float(out) if out.ndim == 0 else out


def log_moments(phi, p, ns, tol=None):
    """Vectorised ``log I(n)`` by quadrature for a radial density."""
    if not phi.radial or phi.family == "hardy":
        raise UnsupportedError(f"no radial moments for the {phi.family} weight")
    ns = np.atleast_1d(np.asarray(ns, dtype=float))
    logI, _ = _quad.log_moments(phi, p * ns + 1.0, tol=radial_tol(tol))
    return logI


def moment_quadrature(phi, p, n, tol=None):
    """``int_0^1 r^(pn+1) phi(r) dr`` by panel quadrature in ``s = -log(1-r)``.

    Raises :class:`QuadratureError` (with the achieved estimate) when the
    refinement budget runs out before ``tol``.
    """
    tol = radial_tol(tol)
    if tol < 1e-13:
        raise ParameterError("tolerance below 1e-13 is not attainable")
    if n < 0:
        raise ParameterError("n must be non-negative")
    return float(np.exp(log_moments(phi, p, [n], tol)[0]))


def re_closed_norm_p(p, n):
    """``||z^n||^p`` for ``phi = 1 - |Re z|``: ``2/(pn+2) - 4/(pi (pn+3))``."""
    n = np.asarray(n, dtype=float)
    return 2.0 / (p * n + 2.0) - 4.0 / (np.pi * (p * n + 3.0))


def _angular_masses(phi, rule, order):
    """``int_{-pi}^{pi} phi(r e^{i theta}) d theta`` at every radial node."""
    out = np.empty(len(rule.t))
    if phi.family == "re":
        edges = _quad.kink_edges(np.pi / 2)
        th, w = _quad.panel_rule(edges, order)
        vals = phi.polar_value(rule.t[:, None], th[None, :])
        return vals @ w
    for i, t in enumerate(rule.t):
        th, w = _quad.panel_rule(_quad.graded_edges(t, np.pi / 4), order)
        out[i] = phi.polar_value(t, th) @ w
    return out


def polar_log_moments(phi, p, ns, tol=None):
    """``log`` of ``(1/pi) int int r^(pn+1) phi(r e^{i theta}) dr d theta``.

    Tensor rule: radial panels in ``s`` times an angular Gauss-Legendre rule
    split at the kinks of ``1 - |Re z|`` or graded into the corner
    singularity of ``|(1+z)/(1-z)|^gamma``.  Refined until two levels agree.
    """
    if phi.radial:
        raise UnsupportedError("polar_log_moments is for non-radial weights")
    tol = nonradial_tol(tol)
    ns = np.atleast_1d(np.asarray(ns, dtype=float))
    ms = p * ns + 1.0
    h, order = 0.5, 12
    prev = None
    err = np.inf
    for _ in range(_quad.MAX_LEVELS):
        rule = _quad.RadialRule(None, float(ms.max()), h=h)
        mass = _angular_masses(phi, rule, order)
        logw = rule.logw + np.log(mass) - math.log(math.pi)
        cur = logsumexp(ms[:, None] * rule.logr[None, :] + logw[None, :], axis=1)
        if prev is not None:
            err = float(np.max(np.abs(cur - prev)))
            if err <= tol:
                return cur
        prev = cur
        h *= 0.5
        order = min(2 * order, 48)
    raise QuadratureError(
        f"2-D moment quadrature did not reach tol={tol:g} (estimate {err:.3g})",
        value=np.exp(prev), error=err,
    )


def log_monomial_norms(phi, p, ns, tol=None, nonradial_quadrature=False):
    """``log ||z^n||`` for each ``n`` in ``ns``."""
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    ns = np.atleast_1d(np.asarray(ns, dtype=float))
    if np.any(ns < 0):
        raise ParameterError("n must be non-negative")
    fam = phi.family
    if fam == "hardy":
        return np.zeros(len(ns))
    if fam == "standard":
        log_np = math.log(2.0) + log_moment_closed_standard(phi.alpha, p, ns)
    elif fam in ("log", "logbergman"):
        log_np = math.log(2.0) + log_moments(phi, p, ns, tol)
    elif fam == "re" and not nonradial_quadrature:
        log_np = np.log(re_closed_norm_p(p, ns))
    else:
        log_np = polar_log_moments(phi, p, ns, tol)
    return np.asarray(log_np, dtype=float) / p


def monomial_norm(space, n):
    """``||z^n||`` in ``space`` (anything with ``weight`` and ``p``).

    >>> from bergshift.spaces import BergmanSpace
    >>> round(monomial_norm(BergmanSpace(WeightFunction.standard(0), 2), 3), 15)
    0.5
    """
    if n < 0:
        raise ParameterError("n must be non-negative")
    return float(np.exp(log_monomial_norms(space.weight, space.p, [n])[0]))


@dataclass(frozen=True)
class MomentTable:
    """Write-once table of ``n, I(n), log I(n), ||z^n||`` for one space."""

    space_id: str
    p: float
    n: np.ndarray
    logI: np.ndarray
    method: str
    norm: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "norm", np.exp((math.log(2.0) + self.logI) / self.p))

    @property
    def I(self):  # noqa: E743 - matches the column name
        return np.exp(self.logI)

    @classmethod
    def build(cls, phi, p, nmax, tol=None):
        ns = np.arange(int(nmax) + 1)
        if phi.family == "standard":
            method = "closed-form"
            logI = log_moment_closed_standard(phi.alpha, p, ns)
        elif phi.family == "hardy":
            method = "closed-form"
            logI = np.full(len(ns), -math.log(2.0))
        elif phi.family == "re":
            method = "closed-form"
            logI = np.log(re_closed_norm_p(p, ns)) - math.log(2.0)
        elif phi.radial:
            method = "quadrature"
            logI = log_moments(phi, p, ns, tol)
        else:
            method = "quadrature"
            logI = polar_log_moments(phi, p, ns, tol) - math.log(2.0)
        return cls(phi.spec, float(p), ns, np.asarray(logI, dtype=float), method)

    def rows(self):
        for n, li, nm in zip(self.n, self.logI, self.norm):
            yield int(n), math.exp(li), float(li), float(nm), self.method

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "I", "logI", "norm", "method"])
        for n, i, li, nm, m in self.rows():
            w.writerow([n, f"{i:.12g}", f"{li:.12g}", f"{nm:.12g}", m])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, space_id="", p=2.0):
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows or set(rows[0]) != {"n", "I", "logI", "norm", "method"}:
            raise ParameterError("not a moment table: expected columns n,I,logI,norm,method")
        ns = np.array([int(r["n"]) for r in rows])
        logI = np.array([float(r["logI"]) for r in rows])
        return cls(space_id, float(p), ns, logI, rows[0]["method"])


# -- Gamma ratios ---------------------------------------------------------------

def gamma_ratio_check(t, x, nmax):
    """``Gamma(t+n)/Gamma(x+n) * n^(x-t)`` for ``n = 1..nmax``; tends to 1."""
    nmax = int(nmax)
    if nmax < 1:
        raise ParameterError("nmax must be >= 1")
    n = np.arange(1, nmax + 1, dtype=float)
    for arg in (t + n, x + n):
        if np.any(arg <= 0) and np.any(arg == np.round(arg)):
            raise ParameterError("Gamma pole in the requested range")
        if np.any(arg <= 0):
            raise ParameterError("t+n and x+n must stay positive")
    return np.exp(gammaln(t + n) - gammaln(x + n) + (x - t) * np.log(n))


def stirling_constant(alpha, p):
    """``lim I(n) (n+1)^(alpha+1) = Gamma(alpha+1)/2 * (2/p)^(alpha+1)``."""
    return math.exp(gammaln(alpha + 1.0)) / 2.0 * (2.0 / p) ** (alpha + 1.0)


@dataclass(frozen=True)
class AsymptoticReport:
    family: str
    n: np.ndarray
    values: np.ndarray
    verdict: str  # convergent | banded | fail
    limit: float | None = None
    band: tuple | None = None


def asymptotic_report(space, nmax, tol=None, band_ratio=10.0, rel=0.01):
    """Normalised moment sequence and its verdict for a radial family.

    standard: ``I(n) (n+1)^(alpha+1)``, expected to converge to the Stirling
    constant within ``rel``; log: ``I(n) (n+1)^(a+1) / log(n+1)^b`` and
    log-Bergman: ``I(n) log(n+1)^alpha``, expected to stay in a positive band
    with ``max/min <= band_ratio`` over ``n >= 100`` (or the last decade).
    """
    phi, p = space.weight, space.p
    nmax = int(nmax)
    if nmax < 10:
        raise ParameterError("nmax must be >= 10")
    ns = np.arange(1, nmax + 1)
    if phi.family == "standard":
        logI = log_moment_closed_standard(phi.alpha, p, ns)
        vals = np.exp(logI + (phi.alpha + 1) * np.log(ns + 1.0))
        lim = stirling_constant(phi.alpha, p)
        ok = abs(vals[-1] / lim - 1.0) <= rel
        return AsymptoticReport("standard", ns, vals, "convergent" if ok else "fail", limit=lim)
    if phi.family == "log":
        logI = log_moments(phi, p, ns, tol)
        vals = np.exp(logI + (phi.a + 1) * np.log(ns + 1.0) - phi.b * np.log(np.log(ns + 1.0)))
    elif phi.family == "logbergman":
        logI = log_moments(phi, p, ns, tol)
        vals = np.exp(logI + phi.alpha * np.log(np.log(ns + 1.0)))
    else:
        raise UnsupportedError(f"no known moment asymptotics for {phi.family}")
    lo = 100 if nmax >= 1000 else max(1, nmax // 10)
    window = vals[ns >= lo]
    c1, c2 = float(window.min()), float(window.max())
    ok = c1 > 0 and c2 / c1 <= band_ratio
    return AsymptoticReport(phi.family, ns, vals, "banded" if ok else "fail", band=(c1, c2))


# -- reproducing-kernel integral ------------------------------------------------

def _kernel_angular_mean(rho, p, tol):
    """Mean of ``|1 - rho e^{i theta}|^-p`` over the circle, per radius.

    Nodes are grouped by ``rho`` so the trapezoid refinement for radii next
    to 1 does not force the same node count on the interior.
    """
    out = np.empty(len(rho))
    order = np.argsort(rho)
    for chunk in np.array_split(order, max(1, len(order) // 32)):
        if len(chunk) == 0:
            continue
        rr = rho[chunk][:, None]

        def f(th, rr=rr):
            return (1.0 - 2.0 * rr * np.cos(th)[None, :] + rr * rr) ** (-0.5 * p)

        n0 = int(min(max(16, 8.0 / max(1.0 - float(rr.max()), 1e-6)), 1 << 16))
        out[chunk], _ = _quad.trapezoid_mean(f, n0, tol, max_nodes=1 << 18)
    return out


def kernel_integral(lam, p, alpha, tol=1e-9):
    """``(1/pi) int_D |1 - lam z|^-p (1-|z|^2)^alpha dx dy`` for ``0 < lam < 1``.

    Polar quadrature: trapezoid in angle (node doubling) times panel rule in
    ``s = -log(1-r)`` with the standard weight.  ``lam`` is taken real and
    positive (the integral is rotation invariant).
    """
    if not 0 < lam < 1:
        raise ParameterError("lambda must lie in (0, 1)")
    if not p > 1:
        raise ParameterError("kernel integral needs p > 1")
    if not alpha > -1:
        raise ParameterError("alpha must exceed -1")
    phi = WeightFunction.standard(alpha)
    m_hint = 4.0 / (1.0 - lam)
    prev = None
    h = 0.5
    err = np.inf
    for _ in range(_quad.MAX_LEVELS):
        rule = _quad.RadialRule(phi, m_hint, h=h)
        try:
            mean = _kernel_angular_mean(lam * rule.r, p, max(0.1 * tol, 1e-12))
        except QuadratureError as exc:
            raise QuadratureError(
                f"kernel integral failed near z = 1 at |lambda|={lam}, p={p}, alpha={alpha}: "
                f"angular rule exhausted {1 << 18} nodes (peak ~ (1-|lambda|)^-{p})",
                value=prev, error=err,
            ) from exc
        cur = 2.0 * float(np.sum(np.exp(rule.logw) * rule.r * mean))
        if prev is not None:
            err = abs(cur - prev) / abs(cur)
            if err <= tol:
                return cur
        prev = cur
        h *= 0.5
    raise QuadratureError(
        f"kernel integral did not converge at |lambda|={lam}, p={p} (estimate {err:.3g})",
        value=prev, error=err,
    )


@dataclass(frozen=True)
class KernelRegime:
    p: float
    alpha: float
    lambdas: tuple
    values: tuple
    regime: str  # bounded | log | power
    expected: str
    exponent: float | None
    normalized: tuple


def kernel_regimes(p, alpha, lambdas=(0.9, 0.99, 0.999), tol=1e-9):
    """Classify the growth of :func:`kernel_integral` as ``|lambda| -> 1``.

    With ``x = log 1/(1-|lambda|^2)``: ``power`` when ``log v`` grows with slope
    ``> 0.5`` in ``x`` (slope reported as the exponent), ``log`` when ``v``
    grows like ``x`` (log-log slope in ``[0.5, 1.5]``), ``bounded`` otherwise.
    """
    lams = tuple(sorted(float(l) for l in lambdas))
    if len(lams) < 2:
        raise ParameterError("need at least two lambda values")
    vals = np.array([kernel_integral(l, p, alpha, tol) for l in lams])
    x = -np.log1p(-np.square(lams))
    lv = np.log(vals)
    power_slope = float((lv[-1] - lv[-2]) / (x[-1] - x[-2]))
    loglog_slope = float((lv[-1] - lv[-2]) / (math.log(x[-1]) - math.log(x[-2])))
    if power_slope > 0.5:
        regime, exponent = "power", power_slope
    elif 0.5 <= loglog_slope <= 1.5:
        regime, exponent = "log", None
    else:
        regime, exponent = "bounded", None
    gap = 2.0 + alpha - p
    expected = "bounded" if gap > 0 else ("log" if gap == 0 else "power")
    if expected == "power":
        norm = vals * (1.0 - np.square(lams)) ** (p - 2.0 - alpha)
    elif expected == "log":
        norm = vals / x
    else:
        norm = vals
    return KernelRegime(float(p), float(alpha), lams, tuple(vals.tolist()), regime,
                        expected, exponent, tuple(norm.tolist()))
