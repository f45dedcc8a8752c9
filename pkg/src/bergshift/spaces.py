"""Weighted Bergman spaces as computational objects.

``BergmanSpace`` pairs a weight with an exponent ``p`` and caches monomial
norms; ``PolyVector`` holds Taylor coefficients of a polynomial.  Norms of
general polynomials are computed by polar quadrature, with the Parseval
identity as an independent check when ``p = 2`` and the weight is radial.
"""

from __future__ import annotations

import csv
import io
import json
import math
import threading
from dataclasses import dataclass

import numpy as np

from . import _quad
from .errors import ParameterError, QuadratureError, UnsupportedError
from .moments import (
    MomentTable,
    log_monomial_norms,
    nonradial_tol,
    _env_tol,
)
from .weights import WeightFunction, parse_weight_function

__all__ = [
    "BergmanSpace",
    "PolyVector",
    "Ell2Reduction",
    "poly_norm",
    "poly_norm_parseval",
    "coeff_bound_ratio",
    "point_eval_profile",
    "point_eval_stability",
    "polar_grid",
    "ell2_reduction",
    "dilate",
    "density_demo",
]


# |f|^p is exact on circles for even integer p; otherwise it has cusps at the
# zeros of f and the angular rule converges algebraically
DEFAULT_TOL_POLY_EVEN = 1e-10
DEFAULT_TOL_POLY = 1e-6


def poly_tol(p, tol=None):
    if tol is not None:
        return tol
    even = p == int(p) and int(p) % 2 == 0
    return _env_tol(DEFAULT_TOL_POLY_EVEN if even else DEFAULT_TOL_POLY)


class BergmanSpace:
    """``A^p_phi``: weight ``phi`` and exponent ``p >= 1``.

    Monomial log-norms are computed on demand and cached; the cache grows
    monotonically and extension is guarded by a lock, so one space can be
    shared between threads.
    """

    def __init__(self, weight, p):
        if isinstance(weight, str):
            weight = parse_weight_function(weight)
        if not isinstance(weight, WeightFunction):
            raise ParameterError("weight must be a WeightFunction or a spec string")
        p = float(p)
        if not p >= 1:
            raise ParameterError(f"p must be >= 1, got {p}")
        self.weight = weight
        self.p = p
        self._lock = threading.Lock()
        self._log_norms = np.empty(0)

    def __repr__(self):
        return f"BergmanSpace({self.weight.spec!r}, p={self.p:g})"

    def __eq__(self, other):
        return isinstance(other, BergmanSpace) and (self.weight, self.p) == (other.weight, other.p)

    def __hash__(self):
        return hash((self.weight, self.p))

    @property
    def spec(self):
        return self.weight.spec

    @property
    def radial(self):
        return self.weight.radial

    def log_norms(self, nmax):
        """``log ||z^n||`` for ``n = 0..nmax`` (a read-only view of the cache)."""
        nmax = int(nmax)
        if nmax < 0:
            raise ParameterError("nmax must be non-negative")
        with self._lock:
            have = len(self._log_norms)
            if have <= nmax:
                # grow geometrically so repeated small extensions stay cheap
                target = max(nmax + 1, 2 * have) if have else nmax + 1
                new = log_monomial_norms(self.weight, self.p, np.arange(have, target))
                if not np.all(np.isfinite(new)):
                    raise QuadratureError("non-finite monomial norm")
                grown = np.concatenate([self._log_norms, new])
                grown.setflags(write=False)
                self._log_norms = grown
            return self._log_norms[: nmax + 1]

    def monomial_norm(self, n):
        return float(math.exp(self.log_norms(n)[n]))

    def moment_table(self, nmax):
        return MomentTable.build(self.weight, self.p, nmax)


@dataclass(frozen=True, eq=False)
class PolyVector:
    """Polynomial ``c_0 + c_1 z + ... + c_N z^N`` stored with trailing zeros trimmed."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if c.ndim != 1:
            raise ParameterError("coefficients must be one-dimensional")
        if not np.all(np.isfinite(c)):
            raise ParameterError("coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if len(nz) else c[:0]
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(cls, k, c=1.0):
        if k < 0:
            raise ParameterError("monomial degree must be non-negative")
        out = np.zeros(k + 1, dtype=complex)
        out[k] = c
        return cls(out)

    @classmethod
    def zero(cls):
        return cls(np.zeros(0))

    @property
    def degree(self):
        """Largest index with a nonzero coefficient; ``-inf`` for the zero polynomial."""
        return len(self.coeffs) - 1 if len(self.coeffs) else -math.inf

    @property
    def is_zero(self):
        return len(self.coeffs) == 0

    def coeff(self, n):
        return complex(self.coeffs[n]) if 0 <= n < len(self.coeffs) else 0j

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out

    def _binary(self, other, op):
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: len(self.coeffs)] = self.coeffs
        b[: len(other.coeffs)] = other.coeffs
        return PolyVector(op(a, b))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, scalar):
        return PolyVector(self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, PolyVector) and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"PolyVector({self.coeffs.tolist()!r})"

    # -- file formats ----------------------------------------------------------
    def to_json(self):
        return json.dumps([[float(c.real), float(c.imag)] for c in self.coeffs])

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
            return cls(np.array([complex(re, im) for re, im in data], dtype=complex))
        except (ValueError, TypeError) as exc:
            raise ParameterError(f"not a polynomial JSON array of [re, im] pairs: {exc}") from None

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "re", "im"])
        for n, c in enumerate(self.coeffs):
            w.writerow([n, repr(float(c.real)), repr(float(c.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
        if rows and rows[0][0].strip() == "n":
            rows = rows[1:]
        try:
            entries = {int(r[0]): complex(float(r[1]), float(r[2]) if len(r) > 2 else 0.0) for r in rows}
        except (ValueError, IndexError) as exc:
            raise ParameterError(f"bad polynomial CSV row: {exc}") from None
        if any(k < 0 for k in entries):
            raise ParameterError("negative degree in polynomial CSV")
        out = np.zeros(max(entries) + 1 if entries else 0, dtype=complex)
        for k, v in entries.items():
            out[k] = v
        return cls(out)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        return cls.from_json(text) if text.lstrip().startswith("[") else cls.from_csv(text)


# -- norms ----------------------------------------------------------------------

def poly_norm_parseval(space, f):
    """``(sum |c_n|^2 ||z^n||^2)^(1/2)``; valid for ``p = 2`` and radial weights."""
    if space.p != 2 or not space.radial:
        raise UnsupportedError("the coefficient formula needs p = 2 and a radial weight")
    if f.is_zero:
        return 0.0
    ln = space.log_norms(f.degree)
    a = np.abs(f.coeffs)
    nz = a > 0
    return float(math.exp(0.5 * _logsumexp(2.0 * (np.log(a[nz]) + ln[nz]))))


def _logsumexp(x):
    m = float(np.max(x))
    return m + math.log(float(np.sum(np.exp(x - m))))


def _circle_power_means(f, r, n_theta, p, rows=64):
    """Mean over ``theta`` of ``|f(r e^{i theta})|^p`` for each ``r`` (FFT evaluation)."""
    c = f.coeffs
    k = np.arange(len(c))
    out = np.empty(len(r))
    for lo in range(0, len(r), rows):
        rr = r[lo:lo + rows, None]
        a = np.zeros((len(rr), n_theta), dtype=complex)
        a[:, : len(c)] = c[None, :] * rr ** k[None, :]
        vals = np.fft.ifft(a, axis=1) * n_theta
        out[lo:lo + rows] = np.mean(np.abs(vals) ** p, axis=1)
    return out


MAX_THETA = 1 << 17


def _adaptive_circle_means(f, r, p, weights, tol):
    """Circle means refined row by row until the weighted total settles.

    Circles passing close to a zero of ``f`` need many nodes when ``p`` is
    not an even integer (``|f|^p`` has a cusp there); the rest settle early.
    A row is done once its change, times its quadrature weight, is below
    ``tol`` times the total spread evenly over the rows.
    """
    deg = f.degree
    n = max(64, 1 << int(math.ceil(math.log2(8 * (deg + 1)))))
    if p == int(p) and int(p) % 2 == 0:
        return _circle_power_means(f, r, max(n, int(p) * deg + 2), p)
    mean = _circle_power_means(f, r, n, p)
    todo = np.arange(len(r))
    budget = tol * float(np.sum(weights * mean)) / len(r)
    while True:
        n *= 2
        if n > MAX_THETA:
            raise QuadratureError(
                f"angular rule for |f|^p did not settle within {MAX_THETA} nodes", value=mean
            )
        new = _circle_power_means(f, r[todo], n, p)
        settled = np.abs(new - mean[todo]) * weights[todo] <= budget
        mean[todo] = new
        todo = todo[~settled]
        if len(todo) == 0:
            return mean


def _radial_total(space, f, rule, tol):
    r = np.append(rule.r, 1.0)
    tail = 0.0 if rule.log_tail is None else math.exp(rule.log_tail)
    weights = 2.0 * np.append(np.exp(rule.logw) * rule.r, tail)
    mean = _adaptive_circle_means(f, r, space.p, weights, tol)
    return float(np.sum(weights * mean))


def _radial_quadrature_norm_p(space, f, tol):
    """``||f||^p`` for a radial weight: FFT trapezoid in angle, panels in ``s``.

    ``|f|^p`` is a trigonometric polynomial on each circle when ``p`` is an
    even integer, so a fixed node count is exact.  Otherwise circles are
    refined individually; circles through a zero of ``f`` converge only
    algebraically, which is why the default tolerance is looser there.
    """
    m = space.p * f.degree + 2.0
    h = 0.5
    cur = _radial_total(space, f, _quad.RadialRule(space.weight, m, h=h), 0.1 * tol)
    err = np.inf
    for _ in range(_quad.MAX_LEVELS):
        h *= 0.5
        rule = _quad.RadialRule(space.weight, m, h=h)
        nxt = _radial_total(space, f, rule, 0.1 * tol)
        err = abs(nxt - cur) / max(abs(nxt), 1e-300)
        cur = nxt
        if err <= tol:
            return cur
    raise QuadratureError(f"norm quadrature did not reach tol={tol:g}", value=cur, error=err)


def _polar_quadrature_norm_p(space, f, tol):
    phi, p = space.weight, space.p
    deg = f.degree
    prev = None
    err = np.inf
    h, order = 0.5, 12
    for _ in range(_quad.MAX_LEVELS):
        rule = _quad.RadialRule(None, p * deg + 2.0, h=h)
        inner = np.empty(len(rule.t))
        if phi.family == "re":
            th, wt = _quad.panel_rule(_quad.kink_edges(np.pi / 8), order)
            z = rule.r[:, None] * np.exp(1j * th)[None, :]
            vals = phi.polar_value(rule.t[:, None], th[None, :]) * np.abs(f(z)) ** p
            inner = vals @ wt
        else:
            for i, t in enumerate(rule.t):
                th, wt = _quad.panel_rule(_quad.graded_edges(t, np.pi / 8), order)
                z = rule.r[i] * np.exp(1j * th)
                inner[i] = (phi.polar_value(t, th) * np.abs(f(z)) ** p) @ wt
        cur = float(np.sum(np.exp(rule.logw) * rule.r * inner)) / math.pi
        if prev is not None:
            err = abs(cur - prev) / max(abs(cur), 1e-300)
            if err <= tol:
                return cur
        prev = cur
        h *= 0.5
        order = min(2 * order, 48)
    raise QuadratureError(f"2-D norm quadrature did not reach tol={tol:g}", value=prev, error=err)


def poly_norm(space, f, tol=None, check=1e-8):
    """``||f||`` in ``space`` by polar quadrature.

    For ``p = 2`` and a radial weight the Parseval value is computed as well;
    a relative disagreement above ``check`` raises :class:`QuadratureError`,
    otherwise the Parseval value is returned.

    >>> round(poly_norm(BergmanSpace(WeightFunction.standard(0), 2), PolyVector([1, 1])), 6)
    1.224745
    """
    if f.is_zero:
        return 0.0
    phi = space.weight
    if phi.family == "hardy":
        nz = np.flatnonzero(f.coeffs)
        if len(nz) != 1:
            raise UnsupportedError("Hardy-space norms are only provided for monomials")
        return float(abs(f.coeffs[nz[0]]))
    # the norm is homogeneous; normalising keeps |f|^p clear of under/overflow
    scale = float(np.max(np.abs(f.coeffs)))
    return scale * _poly_norm_unit(space, PolyVector(f.coeffs / scale), tol, check)


def _poly_norm_unit(space, f, tol, check):
    phi = space.weight
    if phi.radial:
        tol = poly_tol(space.p, tol)
        quad_p = _radial_quadrature_norm_p(space, f, tol)
        value = quad_p ** (1.0 / space.p)
        if space.p == 2:
            pars = poly_norm_parseval(space, f)
            if abs(value - pars) > check * pars:
                raise QuadratureError(
                    f"quadrature norm {value!r} disagrees with Parseval {pars!r}",
                    value=value, error=abs(value - pars) / pars,
                )
            return pars
        return value
    return _polar_quadrature_norm_p(space, f, nonradial_tol(tol)) ** (1.0 / space.p)


def coeff_bound_ratio(space, f, norm=None):
    """``max_n |c_n| ||z^n|| / ||f||``, at most 1 under the normalised area measure."""
    if f.is_zero:
        raise ParameterError("coefficient ratio is undefined for f = 0")
    if not space.radial:
        raise UnsupportedError("coefficient ratio is provided for radial weights")
    norm = poly_norm(space, f) if norm is None else norm
    ln = space.log_norms(f.degree)
    return float(np.max(np.abs(f.coeffs) * np.exp(ln))) / norm


# -- point evaluation -----------------------------------------------------------

def polar_grid(rmax, nr=64, nt=64):
    """Grid of points ``r e^{i theta}`` with ``r`` spaced in ``log(1-r)`` up to ``rmax``."""
    if not 0 < rmax <= 0.999:
        raise ParameterError("rmax must lie in (0, 0.999]")
    t = np.geomspace(1.0, 1.0 - rmax, nr)
    r = 1.0 - t
    th = 2.0 * np.pi * np.arange(nt) / nt
    return (r[:, None] * np.exp(1j * th)[None, :]).ravel()


def _point_weight(space, z):
    phi, p = space.weight, space.p
    rho = np.abs(z)
    t = 1.0 - rho
    if phi.family == "hardy":
        raise UnsupportedError("no point estimate for the Hardy marker")
    if phi.radial:
        return (1.0 - rho * rho) ** (2.0 / p) * np.exp(phi.log_radial(t) / p)
    theta = np.angle(z)
    return t ** (2.0 / p) * phi.polar_value(t, theta) ** (1.0 / p)


def point_eval_profile(space, f, grid, norm=None):
    """``max |f(z)| (1-|z|^2)^(2/p) phi(z)^(1/p) / ||f||`` over ``grid``.

    Non-radial weights use ``(1-|z|)^(2/p) phi(z)^(1/p)``.  Points with
    ``|z| > 0.999`` are refused.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=complex))
    if np.any(np.abs(grid) > 0.999 + 1e-15):
        raise ParameterError("evaluation grid must stay inside |z| <= 0.999")
    if f.is_zero:
        raise ParameterError("profile is undefined for f = 0")
    norm = poly_norm(space, f) if norm is None else norm
    return float(np.max(np.abs(f(grid)) * _point_weight(space, grid))) / norm


def point_eval_stability(space, f, rmaxes=(0.9, 0.99, 0.999), factor=2.0):
    """Profiles over grids reaching further toward the circle; stable if each is within ``factor`` of the first."""
    norm = poly_norm(space, f)
    vals = [point_eval_profile(space, f, polar_grid(r), norm=norm) for r in rmaxes]
    base = vals[0]
    stable = all(np.isfinite(v) and v <= factor * base for v in vals)
    return vals, stable


# -- l2 reduction ---------------------------------------------------------------

@dataclass(frozen=True)
class Ell2Reduction:
    lambdas: np.ndarray  # lambda_1..lambda_nmax
    sup: float
    tail_slope: float
    verdict: str  # bounded-evidence | unbounded-evidence


def ell2_reduction(space, w, nmax):
    """Weights ``lambda_n = |w_n| ||z^(n-1)|| / ||z^n||`` of the equivalent shift on ``l^2``.

    Bounded-evidence when the log of the sequence has no upward trend over
    the last quarter of the horizon.
    """
    if space.p != 2 or not space.radial:
        raise UnsupportedError("the l2 reduction needs p = 2 and a radial weight")
    nmax = int(nmax)
    if nmax < 4:
        raise ParameterError("nmax must be >= 4")
    ln = space.log_norms(nmax)
    loglam = w.log_abs_terms(nmax) + ln[:-1] - ln[1:]
    lam = np.exp(loglam)
    q = nmax - nmax // 4
    n = np.arange(q, nmax + 1, dtype=float)
    slope = float(np.polyfit(np.log(n), loglam[q - 1:], 1)[0])
    verdict = "bounded-evidence" if slope <= 1e-3 else "unbounded-evidence"
    return Ell2Reduction(lam, float(lam.max()), slope, verdict)


# -- dilation -------------------------------------------------------------------

def dilate(f, r):
    """``f_r(z) = f(rz)``."""
    if not 0 < r < 1:
        raise ParameterError("dilation radius must lie in (0, 1)")
    return PolyVector(f.coeffs * r ** np.arange(len(f.coeffs)))


def density_demo(space, f, rs):
    """``||f - f_r||`` along a ladder of radii."""
    return np.array([0.0 if f.is_zero else poly_norm(space, f - dilate(f, r)) for r in rs])
