"""Weight functions on the disc and shift-weight sequences.

Two kinds of weights appear throughout the package:

* a *weight function* ``phi`` on the unit disc, which defines the Bergman
  norm ``||f||^p = int |f|^p phi dA`` with ``dA = dx dy / pi``;
* a *weight sequence* ``w = (w_1, w_2, ...)`` defining the shift
  ``B_w(sum c_n z^n) = sum w_{n+1} c_{n+1} z^n``.

Both are immutable.  Partial products of a weight sequence are only ever
handled as ``log|w_1 ... w_n|`` so that horizons of ``10^4`` and beyond stay
representable.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ParameterError, UnsupportedError, ZeroWeightError

__all__ = [
    "WeightFunction",
    "WeightSequence",
    "NormalityResult",
    "parse_weight_function",
    "parse_weight_sequence",
    "normality_check",
    "log_product",
    "default_normality_grid",
]

RADIAL_FAMILIES = ("standard", "log", "logbergman", "hardy")
FAMILIES = RADIAL_FAMILIES + ("re", "herglotz")


@dataclass(frozen=True)
class WeightFunction:
    """A weight ``phi`` on the unit disc.

    ``family`` is one of ``standard`` (``(1-r^2)^alpha``), ``log``
    (``(1-r)^a log(e/(1-r))^b``), ``logbergman``
    (``(1-r)^-1 log(e/(1-r))^-(1+alpha)``), ``hardy`` (degenerate marker with
    unit monomial norms), ``re`` (``1 - |Re z|``) and ``herglotz``
    (``|(1+z)/(1-z)|^gamma``).

    The standard family carries no ``(1+alpha)`` normalisation; it cancels
    in every ratio the criteria use.
    """

    family: str
    alpha: float = 0.0
    a: float = 0.0
    b: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown weight family {self.family!r}")
        if self.family == "standard" and not self.alpha > -1:
            raise ParameterError(f"standard weight needs alpha > -1, got {self.alpha}")
        if self.family == "log" and not (self.a > self.b > 0):
            raise ParameterError(f"log weight needs a > b > 0, got a={self.a}, b={self.b}")
        if self.family == "logbergman" and not self.alpha > 0:
            raise ParameterError(f"log-Bergman weight needs alpha > 0, got {self.alpha}")
        if self.family == "herglotz" and not (0 < self.gamma < 1):
            raise ParameterError(f"herglotz weight needs 0 < gamma < 1, got {self.gamma}")

    # -- constructors -------------------------------------------------------
    @classmethod
    def standard(cls, alpha):
        return cls("standard", alpha=float(alpha))

    @classmethod
    def log(cls, a, b):
        return cls("log", a=float(a), b=float(b))

    @classmethod
    def logbergman(cls, alpha):
        return cls("logbergman", alpha=float(alpha))

    @classmethod
    def hardy(cls):
        return cls("hardy")

    @classmethod
    def re_nonradial(cls):
        return cls("re")

    @classmethod
    def herglotz(cls, gamma):
        return cls("herglotz", gamma=float(gamma))

    # -- metadata -----------------------------------------------------------
    @property
    def radial(self):
        return self.family in RADIAL_FAMILIES

    @property
    def integrable(self):
        # The log-Bergman weight has total mass 1/alpha (substitute
        # x = log(e/(1-r))), so every family here is integrable.
        return self.family != "hardy"

    @property
    def normal_candidate(self):
        return self.family in ("standard", "log")

    @property
    def spec(self):
        """Canonical mini-language string, inverse of :func:`parse_weight_function`."""
        if self.family == "standard":
            return f"standard:alpha={self.alpha:g}"
        if self.family == "log":
            return f"log:a={self.a:g},b={self.b:g}"
        if self.family == "logbergman":
            return f"logbergman:alpha={self.alpha:g}"
        if self.family == "herglotz":
            return f"herglotz:gamma={self.gamma:g}"
        return self.family

    # -- evaluation ---------------------------------------------------------
    def log_radial(self, t):
        """``log phi`` at ``r = 1 - t`` for a radial family.

        Working with ``t = 1 - r`` keeps full relative precision next to the
        boundary, where every criterion lives.
        """
        t = np.asarray(t, dtype=float)
        if self.family == "standard":
            return self.alpha * (np.log(t) + np.log(2.0 - t))
        if self.family == "log":
            return self.a * np.log(t) + self.b * np.log(1.0 - np.log(t))
        if self.family == "logbergman":
            return -np.log(t) - (1.0 + self.alpha) * np.log(1.0 - np.log(t))
        raise UnsupportedError(f"{self.family} weight has no radial profile")

    def log_radial_s(self, s):
        """``log phi`` at ``r = 1 - exp(-s)``; exact in ``s`` even where
        ``exp(-s)`` underflows."""
        s = np.asarray(s, dtype=float)
        if self.family == "standard":
            return self.alpha * (-s + np.log1p(-np.expm1(-s)))
        if self.family == "log":
            return -self.a * s + self.b * np.log1p(s)
        if self.family == "logbergman":
            return s - (1.0 + self.alpha) * np.log1p(s)
        raise UnsupportedError(f"{self.family} weight has no radial profile")

    def radial_value(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(self.log_radial(1.0 - r))

    def polar_value(self, t, theta):
        """``phi(r e^{i theta})`` with ``r = 1 - t``; broadcasts."""
        t = np.asarray(t, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if self.radial:
            if self.family == "hardy":
                raise UnsupportedError("the Hardy marker has no density")
            return np.exp(self.log_radial(t)) * np.ones_like(theta)
        r = 1.0 - t
        if self.family == "re":
            # 1 - r|cos| = t + r (1 - |cos|), no cancellation near the boundary
            return t + r * (1.0 - np.abs(np.cos(theta)))
        # herglotz: |1+z|^2 / |1-z|^2 with |1-z|^2 = t^2 + 2r(1 - cos)
        one_minus = t * t + 4.0 * r * np.sin(0.5 * theta) ** 2
        one_plus = t * t + 4.0 * r * np.cos(0.5 * theta) ** 2
        return (one_plus / one_minus) ** (0.5 * self.gamma)


@dataclass(frozen=True)
class WeightSequence:
    """Shift weights ``w_1, w_2, ...`` (index starts at 1).

    Built-in families are ``const`` (``w_n = c``), ``powdecay``
    (``(n+1)^-beta``), ``ratio`` (``n/(n+1)``), ``logpow``
    (``log(n+1)^(b/p) / (n+1)^((a+1)/p)``) and ``custom`` (finite list).

    ``phases`` optionally multiplies term ``n`` by ``exp(i phases[n-1])``
    (terms beyond the array keep phase 0).  Moduli are always evaluated from
    the family formula, so rephasing never changes a criterion value.
    """

    family: str
    c: complex = 1.0
    beta: float = 0.0
    a: float = 0.0
    b: float = 0.0
    p: float = 1.0
    values: tuple = ()
    phases: tuple = field(default=(), compare=False)
    for_dynamics: bool = True

    def __post_init__(self):
        if self.family not in ("const", "powdecay", "ratio", "logpow", "custom"):
            raise ParameterError(f"unknown sequence family {self.family!r}")
        if self.family == "logpow" and not self.p > 0:
            raise ParameterError("logpow needs p > 0")
        if self.family == "custom":
            if not self.values:
                raise ParameterError("custom weight sequence is empty")
            object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
        if self.for_dynamics:
            if self.family == "const" and self.c == 0:
                raise ZeroWeightError(1)
            if self.family == "custom":
                for i, v in enumerate(self.values, start=1):
                    if v == 0:
                        raise ZeroWeightError(i)

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c):
        return cls("const", c=complex(c))

    @classmethod
    def powdecay(cls, beta):
        return cls("powdecay", beta=float(beta))

    @classmethod
    def ratio(cls):
        return cls("ratio")

    @classmethod
    def logpow(cls, a, b, p):
        return cls("logpow", a=float(a), b=float(b), p=float(p))

    @classmethod
    def custom(cls, values, for_dynamics=True):
        return cls("custom", values=tuple(values), for_dynamics=for_dynamics)

    def rephase(self, phases):
        """Same moduli, term ``n`` multiplied by ``exp(i phases[n-1])``."""
        return replace(self, phases=tuple(float(x) for x in phases))

    # -- metadata -----------------------------------------------------------
    @property
    def length(self):
        """Number of available terms (``None`` for the infinite families)."""
        return len(self.values) if self.family == "custom" else None

    @property
    def builtin(self):
        return self.family != "custom"

    @property
    def unimodular_constant(self):
        return self.family == "const" and abs(abs(self.c) - 1.0) == 0.0

    @property
    def spec(self):
        if self.family == "const":
            c = self.c
            return f"const:{c.real:g}" if c.imag == 0 else f"const:{c:g}"
        if self.family == "powdecay":
            return f"powdecay:beta={self.beta:g}"
        if self.family == "logpow":
            return f"logpow:a={self.a:g},b={self.b:g},p={self.p:g}"
        if self.family == "ratio":
            return "ratio"
        return f"custom[{len(self.values)}]"

    def limit(self):
        """``lim w_n`` for the built-in families, ``None`` when unknown."""
        if self.family == "const":
            return self.c
        if self.family == "ratio":
            return 1.0
        if self.family == "powdecay":
            return 1.0 if self.beta == 0 else (0.0 if self.beta > 0 else math.inf)
        if self.family == "logpow":
            e = self.a + 1
            if e == 0:
                return 1.0 if self.b == 0 else (math.inf if self.b > 0 else 0.0)
            return 0.0 if e > 0 else math.inf
        return None

    def _check_n(self, n):
        n = int(n)
        if n < 0:
            raise ParameterError("number of terms must be non-negative")
        if self.length is not None and n > self.length:
            raise ParameterError(
                f"custom weight sequence has {self.length} terms, {n} requested"
            )
        return n

    # -- evaluation ---------------------------------------------------------
    def log_abs_terms(self, n):
        """``log|w_k|`` for ``k = 1..n``."""
        n = self._check_n(n)
        k = np.arange(1, n + 1, dtype=float)
        if self.family == "const":
            out = np.full(n, math.log(abs(self.c)) if self.c != 0 else -np.inf)
        elif self.family == "powdecay":
            out = -self.beta * np.log1p(k)
        elif self.family == "ratio":
            out = -np.log1p(1.0 / k)
        elif self.family == "logpow":
            out = (self.b / self.p) * np.log(np.log1p(k)) - ((self.a + 1) / self.p) * np.log1p(k)
        else:
            with np.errstate(divide="ignore"):
                out = np.log(np.abs(np.asarray(self.values[:n], dtype=complex)))
        return out

    def abs_terms(self, n):
        return np.exp(self.log_abs_terms(n))

    def terms(self, n):
        """Complex terms ``w_1..w_n``."""
        n = self._check_n(n)
        if self.family == "custom":
            out = np.asarray(self.values[:n], dtype=complex)
        else:
            out = self.abs_terms(n).astype(complex)
            if self.family == "const":
                out = out * (self.c / abs(self.c) if self.c != 0 else 1.0)
        if self.phases:
            ph = np.zeros(n)
            m = min(n, len(self.phases))
            ph[:m] = self.phases[:m]
            out = out * np.exp(1j * ph)
        return out

    def log_products(self, n):
        """Cumulative ``log|w_1 ... w_k|`` for ``k = 1..n``.

        Neumaier-compensated running sum, so the error stays at a few ulps of
        the running total even after ``10^5`` terms.  Exact ``k log|c|`` for the
        constant family.
        """
        n = self._check_n(n)
        if self.family == "const":
            if self.for_dynamics and self.c == 0:
                raise ZeroWeightError(1)
            return np.arange(1, n + 1, dtype=float) * math.log(abs(self.c))
        terms = self.log_abs_terms(n)
        if self.for_dynamics and n and np.isneginf(terms).any():
            raise ZeroWeightError(int(np.argmax(np.isneginf(terms))) + 1)
        out = np.empty(n)
        s = 0.0
        comp = 0.0
        for i, x in enumerate(terms.tolist()):
            t = s + x
            if abs(s) >= abs(x):
                comp += (s - t) + x
            else:
                comp += (x - t) + s
            s = t
            out[i] = s + comp
        return out


def log_product(w, n):
    """``sum_{k<=n} log|w_k|`` with compensated summation.

    >>> round(log_product(WeightSequence.const(2), 10), 6)
    6.931472
    """
    n = int(n)
    if n < 1:
        raise ParameterError("log_product needs n >= 1")
    if w.family == "const":
        if w.c == 0:
            raise ZeroWeightError(1)
        return n * math.log(abs(w.c))
    terms = w.log_abs_terms(n)
    bad = np.isneginf(terms)
    if bad.any():
        raise ZeroWeightError(int(np.argmax(bad)) + 1)
    return math.fsum(terms.tolist())


# -- mini-language --------------------------------------------------------------

def _kv(body, allowed):
    out = {}
    if not body:
        return out
    for part in body.split(","):
        if "=" not in part:
            raise ParameterError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        k = k.strip().lower()
        if k not in allowed:
            raise ParameterError(f"unexpected parameter {k!r}; allowed: {', '.join(allowed)}")
        try:
            out[k] = float(v)
        except ValueError:
            raise ParameterError(f"parameter {k} is not a number: {v!r}") from None
    missing = [k for k in allowed if k not in out]
    if missing:
        raise ParameterError(f"missing parameter(s): {', '.join(missing)}")
    return out


def parse_weight_function(spec):
    """Parse ``standard:alpha=1.5``, ``log:a=2,b=1``, ``logbergman:alpha=1``,
    ``hardy``, ``re`` or ``herglotz:gamma=0.5``."""
    name, _, body = spec.strip().partition(":")
    name = name.lower()
    if name == "standard":
        return WeightFunction.standard(**_kv(body, ("alpha",)))
    if name == "log":
        return WeightFunction.log(**_kv(body, ("a", "b")))
    if name == "logbergman":
        return WeightFunction.logbergman(**_kv(body, ("alpha",)))
    if name in ("herglotz",):
        return WeightFunction.herglotz(**_kv(body, ("gamma",)))
    if name in ("hardy", "re") and not body:
        return WeightFunction(name)
    raise ParameterError(f"cannot parse weight spec {spec!r}")


def read_complex_csv(path):
    """One complex number per line as ``re,im`` (``im`` optional)."""
    vals = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            row = [x.strip() for x in row if x.strip()]
            if not row or row[0].startswith("#"):
                continue
            try:
                re_ = float(row[0])
                im = float(row[1]) if len(row) > 1 else 0.0
            except ValueError:
                raise ParameterError(f"bad complex row {row!r} in {path}") from None
            vals.append(complex(re_, im))
    return vals


def parse_weight_sequence(spec, base_dir=None):
    """Parse ``const:2``, ``powdecay:beta=0.5``, ``ratio``,
    ``logpow:a=2,b=1,p=2`` or ``custom:@file.csv``."""
    name, _, body = spec.strip().partition(":")
    name = name.lower()
    if name == "const":
        try:
            return WeightSequence.const(complex(body.replace(" ", "")))
        except ValueError:
            raise ParameterError(f"const needs a number, got {body!r}") from None
    if name in ("powdecay", "powdec"):
        return WeightSequence.powdecay(**_kv(body, ("beta",)))
    if name == "ratio" and not body:
        return WeightSequence.ratio()
    if name == "logpow":
        return WeightSequence.logpow(**_kv(body, ("a", "b", "p")))
    if name == "custom":
        if not body.startswith("@"):
            raise ParameterError("custom sequences are given as custom:@file.csv")
        path = Path(body[1:])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return WeightSequence.custom(read_complex_csv(path))
    raise ParameterError(f"cannot parse sequence spec {spec!r}")


# -- normality ------------------------------------------------------------------

@dataclass(frozen=True)
class NormalityResult:
    status: str  # "pass" | "fail" | "inconclusive"
    eps: float | None = None
    k: float | None = None
    r0: float | None = None


def default_normality_grid(points=200):
    """Radii ``1 - 10^-x`` for ``x`` in ``[1, 12]``, accumulating at 1."""
    return 1.0 - np.logspace(-1, -12, points)


EPS_LATTICE = (-0.95,) + tuple(round(-0.9 + 0.2 * j, 10) for j in range(25))
K_LATTICE = tuple(0.5 * j for j in range(1, 9))


def ratio_trend(phi, power, grid, slope_tol=0.01):
    """Monotone trend of ``phi(r) / (1-r)^power`` over the tail of ``grid``.

    Returns ``-1`` (decreasing to 0), ``+1`` (increasing to infinity) or 0,
    together with the radius from which the monotone run starts.  The tail is
    the last half of the grid; the limit is read from the log-log slope over
    the last tenth.
    """
    t = 1.0 - np.asarray(grid, dtype=float)
    logt = np.log(t)
    vals = phi.log_radial(t) - power * logt
    half = len(vals) // 2
    tail = vals[half:]
    d = np.diff(tail)
    last = max(3, len(vals) // 10)
    slope = np.polyfit(-logt[-last:], vals[-last:], 1)[0]
    if np.all(d < 0) and slope <= -slope_tol:
        return -1, float(grid[half])
    if np.all(d > 0) and slope >= slope_tol:
        return 1, float(grid[half])
    return 0, None


def normality_check(phi, grid=None):
    """Search ``(eps, k)``, ``k > eps > -1``, for which ``phi/(1-r)^eps``
    decreases to 0 and ``phi/(1-r)^k`` increases to infinity on the grid tail.

    Reports evidence only: ``inconclusive`` when no lattice pair passes,
    never a proof of non-normality.
    """
    if not phi.radial or phi.family == "hardy":
        raise UnsupportedError(f"normality is defined for radial densities, not {phi.family}")
    grid = default_normality_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 10 or np.any((grid <= 0) | (grid >= 1)):
        raise ParameterError("grid must hold at least 10 radii in (0, 1)")
    grid = np.sort(grid)
    for k in K_LATTICE:
        up, r_up = ratio_trend(phi, k, grid)
        if up != 1:
            continue
        for eps in sorted(EPS_LATTICE, reverse=True):
            if not (-1 < eps < k):
                continue
            down, r_down = ratio_trend(phi, eps, grid)
            if down == -1:
                return NormalityResult("pass", eps, k, max(r_up, r_down))
    return NormalityResult("inconclusive")
