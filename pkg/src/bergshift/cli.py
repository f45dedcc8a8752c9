"""``bergshift`` command line: norms, classify, asymptotics, simulate, kernel.

Exit codes: 0 success, 2 parse or parameter error, 3 numeric failure,
4 unsupported combination.  ``BSL_TOL`` overrides default quadrature
tolerances; ``--tol`` overrides it per command where a tolerance applies.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from . import io as bio
from .dynamics import classify
from .errors import ParameterError, QuadratureError, UnsupportedError
from .moments import MomentTable, asymptotic_report, gamma_ratio_check, kernel_regimes
from .simulator import ShiftOperator, gethner_shapiro_witness, orbit_trace, periodic_vector
from .spaces import BergmanSpace, PolyVector
from .weights import WeightFunction, parse_weight_sequence

EXIT_PARSE = 2
EXIT_NUMERIC = 3
EXIT_UNSUPPORTED = 4


class _Group(click.Group):
    """Maps library exceptions onto the documented exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except BrokenPipeError:
            sys.stderr.close()
            raise click.exceptions.Exit(0) from None
        except UnsupportedError as exc:
            click.echo(f"error: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_UNSUPPORTED) from None
        except (QuadratureError, OverflowError, FloatingPointError, ZeroDivisionError) as exc:
            click.echo(f"error: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_NUMERIC) from None
        except (ParameterError, ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_PARSE) from None


def _emit(text, out):
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _space(spec, p):
    return BergmanSpace(spec, p)


def _poly(arg):
    """Polynomial from a file (JSON or CSV) or an inline JSON array."""
    if arg.lstrip().startswith("["):
        return PolyVector.from_json(arg)
    return PolyVector.load(arg)


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParameterError(f"expected comma-separated numbers, got {text!r}") from None


space_opt = click.option("--space", "space_spec", required=True, help="weight spec, e.g. standard:alpha=1")
p_opt = click.option("--p", "p", type=float, default=2.0, show_default=True, help="exponent p >= 1")
weights_opt = click.option("--weights", "weights_spec", required=True, help="sequence spec, e.g. const:2")
out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None, help="output file (default stdout)")
tol_opt = click.option("--tol", type=float, default=None, help="quadrature tolerance")


@click.group(cls=_Group)
@click.version_option(version=__version__, prog_name="bergshift")
def cli():
    """Weighted backward shifts on weighted Bergman spaces."""


# -- norms ------------------------------------------------------------------------

def norms_document(table):
    return {
        "space": table.space_id,
        "p": table.p,
        "rows": [{"n": n, "I": i, "logI": li, "norm": nm, "method": m} for n, i, li, nm, m in table.rows()],
    }


def norms_csv(table):
    rows = list(table.rows())
    return bio.write_csv(["n", "I", "logI", "norm", "method"], rows, {"space": table.space_id, "p": table.p})


def read_norms(text):
    """Read a norms table written by ``norms`` in either format; schema-checked."""
    if text.lstrip().startswith("{"):
        return bio.validate_norms(bio.loads_json(text))
    meta, header, rows = bio.read_csv(text)
    if header != ["n", "I", "logI", "norm", "method"]:
        raise ParameterError("norms CSV must have columns n,I,logI,norm,method")
    doc = {
        "space": meta.get("space", ""),
        "p": float(meta.get("p", "nan")),
        "rows": [{"n": int(r[0]), "I": float(r[1]), "logI": float(r[2]), "norm": float(r[3]), "method": r[4]}
                 for r in rows],
    }
    return bio.validate_norms(doc)


@cli.command()
@space_opt
@p_opt
@click.option("--n-max", "nmax", type=click.IntRange(min=0), default=10, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@tol_opt
@out_opt
def norms(space_spec, p, nmax, fmt, tol, out):
    """Moment and monomial-norm table for n = 0..n-max."""
    space = _space(space_spec, p)
    table = MomentTable.build(space.weight, space.p, nmax, tol)
    if not np.all(np.isfinite(table.logI)):
        raise QuadratureError("non-finite moment in table")
    if fmt == "json":
        doc = bio.validate_norms(norms_document(table))
        _emit(bio.dumps_json(doc), out)
    else:
        _emit(norms_csv(table), out)


# -- classify ---------------------------------------------------------------------

@cli.command(name="classify")
@space_opt
@weights_opt
@p_opt
@click.option("--horizon", type=click.IntRange(min=10), default=None, help="default depends on the space")
@out_opt
def classify_cmd(space_spec, weights_spec, p, horizon, out):
    """ClassificationReport as JSON."""
    space = _space(space_spec, p)
    w = parse_weight_sequence(weights_spec)
    report = classify(space, w, horizon)
    doc = report.to_dict()
    doc["weights"] = weights_spec
    bio.validate_report(doc)
    _emit(bio.dumps_json(doc), out)


# -- asymptotics ------------------------------------------------------------------

@cli.command()
@click.option("--check", type=click.Choice(["standard", "log", "logbergman", "gamma-ratio"]), required=True)
@click.option("--alpha", type=float, default=0.0, show_default=True)
@click.option("--a", "a", type=float, default=0.0, show_default=True)
@click.option("--b", "b", type=float, default=0.0, show_default=True)
@click.option("--t", "t", type=float, default=2.0, show_default=True)
@click.option("--x", "x", type=float, default=1.0, show_default=True)
@p_opt
@click.option("--n-max", "nmax", type=click.IntRange(min=10), default=1000, show_default=True)
@tol_opt
@out_opt
def asymptotics(check, alpha, a, b, t, x, p, nmax, tol, out):
    """Normalised moment sequence with a convergent / banded verdict."""
    if check == "gamma-ratio":
        vals = gamma_ratio_check(t, x, nmax)
        ns = np.arange(1, nmax + 1)
        ok = abs(vals[-1] - 1.0) <= 0.01
        meta = {"check": check, "t": t, "x": x, "verdict": "convergent" if ok else "fail", "limit": 1.0}
    else:
        if check == "standard":
            phi = WeightFunction.standard(alpha)
        elif check == "log":
            phi = WeightFunction.log(a, b)
        else:
            phi = WeightFunction.logbergman(alpha)
        rep = asymptotic_report(BergmanSpace(phi, p), nmax, tol)
        ns, vals = rep.n, rep.values
        meta = {"check": check, "space": phi.spec, "p": p, "verdict": rep.verdict}
        if rep.limit is not None:
            meta["limit"] = rep.limit
        if rep.band is not None:
            meta["band_min"], meta["band_max"] = rep.band
    _emit(bio.write_csv(["n", "value"], zip(ns.tolist(), vals.tolist()), meta), out)


# -- simulate ---------------------------------------------------------------------

@cli.group()
def simulate():
    """Witnesses, orbit traces and periodic vectors on truncated polynomials."""


@simulate.command()
@space_opt
@weights_opt
@p_opt
@click.option("--ptarget", required=True, help="polynomial file or inline JSON [[re,im],...]")
@click.option("--qtarget", required=True, help="polynomial file or inline JSON [[re,im],...]")
@click.option("--m", "ms", type=click.IntRange(min=1), multiple=True, required=True)
@out_opt
def gs(space_spec, weights_spec, p, ptarget, qtarget, ms, out):
    """Transitivity witness x = p + S^m q; JSON {m, dist1, dist2, truncation}."""
    T = ShiftOperator(parse_weight_sequence(weights_spec), _space(space_spec, p))
    pt, qt = _poly(ptarget), _poly(qtarget)
    docs = []
    log_d1 = []
    for m in ms:
        wit = gethner_shapiro_witness(T, pt, qt, m)
        doc = bio.validate_witness(wit.to_dict())
        docs.append(doc)
        log_d1.append(wit.log_dist1)
    if len(docs) == 1:
        _emit(bio.dumps_json(docs[0]), out)
        return
    order = np.argsort(ms, kind="stable")
    shrinking = bool(np.all(np.diff(np.asarray(log_d1)[order]) < 0))
    _emit(bio.dumps_json({"witnesses": docs, "dist1_decreasing": shrinking}), out)


@simulate.command()
@space_opt
@weights_opt
@p_opt
@click.option("--f", "f", required=True, help="polynomial file or inline JSON [[re,im],...]")
@click.option("--K", "K", type=click.IntRange(min=1), required=True)
@click.option("--trunc", type=click.IntRange(min=0), default=None)
@out_opt
def orbit(space_spec, weights_spec, p, f, K, trunc, out):
    """Trace of ||B_w^k f|| for k = 0..K as CSV (k, norm)."""
    T = ShiftOperator(parse_weight_sequence(weights_spec), _space(space_spec, p))
    tr = orbit_trace(T, _poly(f), K, trunc)
    meta = {"truncation": tr.truncation, "overflow": tr.overflow}
    _emit(bio.write_csv(["k", "norm"], tr.rows(), meta), out)


@simulate.command()
@space_opt
@p_opt
@click.option("--q", type=click.IntRange(min=1), required=True, help="period")
@click.option("--k", type=int, default=1, show_default=True, help="lambda = exp(2 pi i k / q)")
@click.option("--n", "N", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--weights", "weights_spec", default="const:1", show_default=True)
@out_opt
def periodic(space_spec, p, q, k, N, weights_spec, out):
    """Truncated eigenvector sum lambda^n z^n; CSV of partial norms."""
    w = parse_weight_sequence(weights_spec)
    if not (w.unimodular_constant and w.c == 1):
        raise UnsupportedError("periodic vectors are only built for w = 1")
    pv = periodic_vector(ShiftOperator(w, _space(space_spec, p)), q, k, N)
    meta = {
        "period": pv.period,
        "lambda_re": pv.lam.real,
        "lambda_im": pv.lam.imag,
        "truncation": pv.truncation,
        "residual": pv.residual,
        "monomial_norm": pv.monomial_norm,
        "converges": "unknown" if pv.converges is None else pv.converges,
    }
    if pv.tail_bound is not None:
        meta["tail_bound"] = pv.tail_bound
    rows = zip(range(len(pv.partial_norms)), pv.partial_norms.tolist())
    _emit(bio.write_csv(["M", "partial_norm"], rows, meta), out)


# -- kernel -----------------------------------------------------------------------

@cli.command()
@p_opt
@click.option("--alpha", type=float, default=0.0, show_default=True)
@click.option("--lambdas", default="0.9,0.99,0.999", show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True)
@out_opt
def kernel(p, alpha, lambdas, tol, out):
    """Growth regime of the kernel integral as |lambda| -> 1."""
    if not p >= 1:
        raise ParameterError("p must be >= 1")
    if not alpha > -1:
        raise ParameterError("alpha must exceed -1")
    reg = kernel_regimes(p, alpha, _float_list(lambdas), tol)
    meta = {"p": reg.p, "alpha": reg.alpha, "regime": reg.regime, "expected": reg.expected}
    if reg.exponent is not None:
        meta["exponent"] = reg.exponent
    rows = zip(reg.lambdas, reg.values, reg.normalized)
    _emit(bio.write_csv(["lambda", "value", "normalized"], rows, meta), out)


def main(argv=None):
    return cli.main(args=argv, prog_name="bergshift")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
