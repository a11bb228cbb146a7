"""Command-line front-end: fit, evaluate, sample, compare, and export.

Exit codes: 0 on success, 1 on input or usage errors, 2 when a fit fails
to converge.  Reports are JSON documents whose floats round-trip exactly;
tables are tab-separated with 15 significant digits.  Every command is
deterministic given input bytes, flags, and seed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .data import load_dataset
from .distributions import (
    EKG1Params,
    EKG2Params,
    KappaGenParams,
    NetWealthMixtureParams,
    WeibullParams,
    ekg1_cdf,
    ekg1_pdf,
    ekg1_quantile,
    ekg1_sample,
    ekg2_cdf,
    ekg2_pdf,
    ekg2_quantile,
    ekg2_sample,
    kgen_cdf,
    kgen_ccdf,
    kgen_pdf,
    kgen_quantile,
    kgen_sample,
    mixture_cdf,
    mixture_pdf,
    mixture_sample,
)
from .errors import KappagenError
from .fitting import FitConfig, FitResult, fit_mle
from . import inequality as ineq

_EXIT_OK = 0
_EXIT_INPUT = 1
_EXIT_NOCONV = 2

PARAM_MODELS = ("kappagen", "weibull", "ekg1", "ekg2", "mixture")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; the exit-code
    contract reserves 2 for non-convergence, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _fmt(x):
    return f"{x:.15g}"


def _params_to_dict(model, params):
    if model in ("kappagen", "kappagen_normalized"):
        return {"alpha": params.alpha, "beta": params.beta, "kappa": params.kappa}
    if model == "weibull":
        return {"shape": params.shape, "scale": params.scale}
    if model == "ekg1":
        return {"a": params.a, "b": params.b, "q": params.q, "r": params.r}
    if model == "ekg2":
        return {"a": params.a, "b": params.b, "p": params.p, "q": params.q}
    if model == "mixture":
        return {
            "weibull_shape": params.negative_branch.shape,
            "weibull_scale": params.negative_branch.scale,
            "theta1": params.theta1,
            "theta2": params.theta2,
            "theta3": params.theta3,
            "alpha": params.positive_branch.alpha,
            "beta": params.positive_branch.beta,
            "kappa": params.positive_branch.kappa,
        }
    raise KappagenError(f"unknown model {model!r}")


def _add_param_flags(parser):
    parser.add_argument("--alpha", type=float, help="shape of the base model")
    parser.add_argument("--beta", type=float, help="scale of the base model")
    parser.add_argument("--kappa", type=float, help="tail deformation in [0, 1)")
    parser.add_argument("--shape", type=float, help="Weibull shape")
    parser.add_argument("--scale", type=float, help="Weibull scale")
    parser.add_argument("--a", type=float)
    parser.add_argument("--b", type=float)
    parser.add_argument("--p", type=float)
    parser.add_argument("--q", type=float)
    parser.add_argument("--r", type=float)
    parser.add_argument("--theta1", type=float)
    parser.add_argument("--theta2", type=float)


def _require(args, names, model):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"model {model!r} needs flags: {', '.join('--' + n for n in missing)}")


def _params_from_args(args):
    model = args.model
    if model == "kappagen":
        _require(args, ("alpha", "beta", "kappa"), model)
        return KappaGenParams(args.alpha, args.beta, args.kappa)
    if model == "weibull":
        _require(args, ("shape", "scale"), model)
        return WeibullParams(args.shape, args.scale)
    if model == "ekg1":
        _require(args, ("a", "b", "q", "r"), model)
        return EKG1Params(args.a, args.b, args.q, args.r)
    if model == "ekg2":
        _require(args, ("a", "b", "p", "q"), model)
        return EKG2Params(args.a, args.b, args.p, args.q)
    if model == "mixture":
        _require(args, ("shape", "scale", "theta1", "theta2", "alpha", "beta", "kappa"), model)
        theta3 = 1.0 - args.theta1 - args.theta2
        return NetWealthMixtureParams(
            negative_branch=WeibullParams(args.shape, args.scale),
            theta1=args.theta1, theta2=args.theta2, theta3=theta3,
            positive_branch=KappaGenParams(args.alpha, args.beta, args.kappa))
    raise UsageError(f"unsupported model {model!r}")


def _pdf_for(model):
    return {
        "kappagen": kgen_pdf,
        "weibull": lambda x, p: kgen_pdf(x, KappaGenParams(p.shape, p.scale, 0.0)),
        "ekg1": ekg1_pdf,
        "ekg2": ekg2_pdf,
        "mixture": lambda x, p: mixture_pdf(x, p)[0],
    }[model]


def _cdf_for(model):
    return {
        "kappagen": kgen_cdf,
        "weibull": lambda x, p: kgen_cdf(x, KappaGenParams(p.shape, p.scale, 0.0)),
        "ekg1": ekg1_cdf,
        "ekg2": ekg2_cdf,
        "mixture": mixture_cdf,
    }[model]


def _quantile_for(model):
    return {
        "kappagen": kgen_quantile,
        "weibull": lambda u, p: kgen_quantile(u, KappaGenParams(p.shape, p.scale, 0.0)),
        "ekg1": ekg1_quantile,
        "ekg2": ekg2_quantile,
    }[model]


def _sampler_for(model):
    return {
        "kappagen": kgen_sample,
        "weibull": lambda n, p, seed: kgen_sample(n, KappaGenParams(p.shape, p.scale, 0.0), seed),
        "ekg1": ekg1_sample,
        "ekg2": ekg2_sample,
        "mixture": mixture_sample,
    }[model]


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _report_json(report):
    return json.dumps(report, indent=2) + "\n"


def _float_list(raw):
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {raw!r}")


def _fit_report(args, result: FitResult, input_path):
    report = {
        "model": result.model,
        "params": _params_to_dict(result.model, result.params),
        "loglik": result.loglik,
        "converged": result.converged,
        "iterations": result.iterations,
        "score_norm": result.score_norm,
        "gof": {"loglik": result.gof.loglik, "lrsse": result.gof.lrsse,
                "aeg": result.gof.aeg},
        "provenance": {"input": input_path, "seed": args.seed,
                       "tool_version": __version__},
    }
    if result.scale is not None:
        report["scale"] = result.scale
    if result.flags:
        report["flags"] = list(result.flags)
    return report


# ---------------------------------------------------------------------------
# subcommands


def _cmd_fit(args):
    sample = load_dataset(args.input, no_header=args.no_header)
    config = FitConfig(model=args.model, max_iter=args.max_iter,
                       multistart=args.multistart, seed=args.seed)
    result = fit_mle(sample, config)
    report = _fit_report(args, result, args.input)
    _write_text(args.output, _report_json(report))
    return _EXIT_OK if result.converged else _EXIT_NOCONV


def _cmd_eval(args):
    params = _params_from_args(args)
    funcs = [f.strip() for f in args.funcs.split(",") if f.strip()]
    rows = []
    if args.x is not None:
        xs = _float_list(args.x)
        header = ["x"] + funcs
        for x in xs:
            row = [x]
            for f in funcs:
                if f == "pdf":
                    row.append(_pdf_for(args.model)(x, params))
                elif f == "cdf":
                    row.append(_cdf_for(args.model)(x, params))
                elif f == "ccdf":
                    if args.model == "kappagen":
                        row.append(kgen_ccdf(x, params))
                    else:
                        row.append(1.0 - _cdf_for(args.model)(x, params))
                else:
                    raise UsageError(f"with --x, funcs must be pdf/cdf/ccdf, got {f!r}")
            rows.append(row)
    elif args.u is not None:
        us = _float_list(args.u)
        if funcs != ["quantile"]:
            raise UsageError("with --u, the only supported func is 'quantile'")
        if args.model == "mixture":
            raise UsageError("quantile evaluation is not supported for the mixture")
        header = ["u", "quantile"]
        qf = _quantile_for(args.model)
        for u in us:
            rows.append([u, qf(u, params)])
    else:
        raise UsageError("eval needs either --x or --u")
    lines = ["\t".join(header)]
    lines += ["\t".join(_fmt(v) for v in row) for row in rows]
    _write_text(args.output, "\n".join(lines) + "\n")
    return _EXIT_OK


def _cmd_inequality(args):
    thetas = _float_list(args.theta) if args.theta else []
    report = {"model": args.model, "provenance": {"seed": args.seed,
                                                  "tool_version": __version__}}
    if args.input is not None:
        if args.model not in ("kappagen", "kappagen_normalized", "weibull"):
            raise UsageError(
                "inequality reporting from data supports kappagen, "
                "kappagen_normalized, and weibull models")
        sample = load_dataset(args.input, no_header=args.no_header)
        report["provenance"]["input"] = args.input
        report["empirical"] = {"gini": ineq.empirical_gini(sample)}
        exit_code = _EXIT_OK
        try:
            config = FitConfig(model=args.model, max_iter=args.max_iter,
                               multistart=args.multistart, seed=args.seed)
            result = fit_mle(sample, config)
        except KappagenError as exc:
            report["fit_error"] = str(exc)
        else:
            params = result.params
            if args.model == "weibull":
                params = KappaGenParams(params.shape, params.scale, 0.0)
            fitted = ineq.kgen_inequality_report(params, thetas)
            report["fitted"] = _params_to_dict(args.model, result.params)
            report["converged"] = result.converged
            report["inequality"] = {
                "gini": fitted.gini, "mld": fitted.mld, "theil": fitted.theil,
                "ge": [{"theta": t, "value": v} for t, v in fitted.ge_values],
            }
            if not result.converged:
                exit_code = _EXIT_NOCONV
    else:
        if args.model == "weibull":
            base = _params_from_args(args)
            params = KappaGenParams(base.shape, base.scale, 0.0)
        elif args.model == "kappagen":
            params = _params_from_args(args)
        else:
            raise UsageError("parameter-based inequality supports kappagen and weibull")
        rep = ineq.kgen_inequality_report(params, thetas)
        report["params"] = _params_to_dict("kappagen", params)
        report["inequality"] = {
            "gini": rep.gini, "mld": rep.mld, "theil": rep.theil,
            "ge": [{"theta": t, "value": v} for t, v in rep.ge_values],
        }
        exit_code = _EXIT_OK
    _write_text(args.output, _report_json(report))
    return exit_code


def _cmd_sample(args):
    params = _params_from_args(args)
    if args.n < 1:
        raise UsageError(f"sample size must be at least 1, got {args.n}")
    draws = _sampler_for(args.model)(args.n, params, args.seed)
    text = "\n".join(f"{v:.17g}" for v in np.asarray(draws)) + "\n"
    _write_text(args.output, text)
    return _EXIT_OK


def _cmd_compare(args):
    sample = load_dataset(args.input, no_header=args.no_header)
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    if len(models) < 2:
        raise UsageError("compare needs at least 2 models")
    rows = []
    for model in models:
        entry = {"model": model}
        try:
            config = FitConfig(model=model, max_iter=args.max_iter,
                               multistart=args.multistart, seed=args.seed)
            result = fit_mle(sample, config)
            entry.update(loglik=result.gof.loglik, lrsse=result.gof.lrsse,
                         aeg=result.gof.aeg, converged=result.converged,
                         params=_params_to_dict(model, result.params))
        except KappagenError as exc:
            entry.update(error=str(exc))
        rows.append(entry)

    def ranks(key, reverse):
        scored = [(i, r[key]) for i, r in enumerate(rows) if key in r]
        scored.sort(key=lambda t: t[1], reverse=reverse)
        out = {}
        for rank, (i, _) in enumerate(scored, start=1):
            out[i] = rank
        return out

    rank_ll = ranks("loglik", reverse=True)
    rank_lrsse = ranks("lrsse", reverse=False)
    rank_aeg = ranks("aeg", reverse=False)
    for i, row in enumerate(rows):
        if "error" not in row:
            row["rank_loglik"] = rank_ll[i]
            row["rank_lrsse"] = rank_lrsse[i]
            row["rank_aeg"] = rank_aeg[i]

    header = ["model", "loglik", "lrsse", "aeg", "rank_loglik", "rank_lrsse",
              "rank_aeg", "status"]
    lines = ["\t".join(header)]
    for row in rows:
        if "error" in row:
            lines.append("\t".join([row["model"], "nan", "nan", "nan", "-", "-", "-",
                                    "error: " + row["error"]]))
        else:
            lines.append("\t".join([
                row["model"], _fmt(row["loglik"]), _fmt(row["lrsse"]), _fmt(row["aeg"]),
                str(row["rank_loglik"]), str(row["rank_lrsse"]), str(row["rank_aeg"]),
                "ok" if row["converged"] else "not-converged"]))
    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    if args.output:
        report = {"input": args.input, "seed": args.seed,
                  "tool_version": __version__, "results": rows}
        _write_text(args.output, _report_json(report))
    return _EXIT_OK


def _cmd_plotdata(args):
    if args.input is not None:
        sample = load_dataset(args.input, no_header=args.no_header)
        if args.kind == "lorenz":
            curve = ineq.empirical_lorenz(sample)
            pairs = curve.points
        elif args.kind == "ccdf-loglog":
            order = np.argsort(sample.values, kind="stable")
            v = sample.values[order]
            w = sample.weights[order]
            ccdf = 1.0 - (np.cumsum(w) - 0.5 * w) / w.sum()
            keep = (v > 0.0) & (ccdf > 0.0)
            pairs = np.column_stack([np.log10(v[keep]), np.log10(ccdf[keep])])
        else:
            raise UsageError("pdf plot data needs model parameters, not a file")
    else:
        params = _params_from_args(args)
        if args.kind == "pdf":
            if args.model == "mixture":
                raise UsageError("pdf plot data for the mixture is not supported")
            qf = _quantile_for(args.model)
            grid = np.linspace(0.005, 0.995, args.points)
            xs = np.asarray(qf(grid, params), dtype=float)
            ys = np.asarray(_pdf_for(args.model)(xs, params), dtype=float)
            pairs = np.column_stack([xs, ys])
        elif args.kind == "ccdf-loglog":
            if args.model == "mixture":
                raise UsageError("ccdf plot data for the mixture is not supported")
            qf = _quantile_for(args.model)
            grid = np.linspace(0.005, 0.9995, args.points)
            xs = np.asarray(qf(grid, params), dtype=float)
            cdf = _cdf_for(args.model)
            cc = 1.0 - np.asarray(cdf(xs, params), dtype=float)
            keep = (xs > 0.0) & (cc > 0.0)
            pairs = np.column_stack([np.log10(xs[keep]), np.log10(cc[keep])])
        elif args.kind == "lorenz":
            grid = np.linspace(0.0, 1.0, args.points)
            if args.model in ("kappagen", "weibull"):
                base = params if args.model == "kappagen" else KappaGenParams(
                    params.shape, params.scale, 0.0)
                ys = np.asarray(ineq.kgen_lorenz(grid, base), dtype=float)
            elif args.model == "ekg2":
                ys = np.asarray(ineq.ekg2_lorenz(grid, params), dtype=float)
            elif args.model == "mixture":
                ys = np.asarray(ineq.mixture_lorenz(grid, params), dtype=float)
            else:
                qf = _quantile_for(args.model)
                mean = ineq.quantile_mean(lambda t: qf(t, params))
                ys = np.array([ineq.quantile_lorenz(float(u), lambda t: qf(t, params), mean)
                               for u in grid])
            pairs = np.column_stack([grid, ys])
        else:
            raise UsageError(f"unknown plot kind {args.kind!r}")
    lines = ["\t".join(_fmt(v) for v in row) for row in pairs]
    _write_text(args.output, "\n".join(lines) + "\n")
    return _EXIT_OK


# ---------------------------------------------------------------------------
# parser wiring


def _build_parser():
    parser = _Parser(prog="kappagen",
                     description="Deformed-exponential income/wealth distribution toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common_fit_flags(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--max-iter", type=int, default=500)
        sp.add_argument("--multistart", type=int, default=5)
        sp.add_argument("--no-header", action="store_true",
                        help="treat every line as data, never as a header")
        sp.add_argument("--output", "-o", default=None, help="output path (default stdout)")

    sp = sub.add_parser("fit", help="fit a model to a dataset")
    sp.add_argument("input")
    sp.add_argument("--model", default="kappagen",
                    choices=("kappagen", "weibull", "ekg1", "ekg2", "mixture",
                             "kappagen_normalized"))
    common_fit_flags(sp)
    sp.set_defaults(func=_cmd_fit)

    sp = sub.add_parser("eval", help="tabulate pdf/cdf/ccdf or quantiles")
    sp.add_argument("--model", default="kappagen", choices=PARAM_MODELS)
    _add_param_flags(sp)
    sp.add_argument("--x", help="comma-separated evaluation points")
    sp.add_argument("--u", help="comma-separated probabilities for quantiles")
    sp.add_argument("--funcs", default="pdf,cdf",
                    help="comma list of pdf,cdf,ccdf (or quantile with --u)")
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("inequality", help="inequality indices from parameters or data")
    sp.add_argument("--input", default=None)
    sp.add_argument("--model", default="kappagen",
                    choices=("kappagen", "weibull", "kappagen_normalized"))
    _add_param_flags(sp)
    sp.add_argument("--theta", default=None,
                    help="comma-separated generalized-entropy orders")
    common_fit_flags(sp)
    sp.set_defaults(func=_cmd_inequality)

    sp = sub.add_parser("sample", help="draw seed-deterministic samples")
    sp.add_argument("--model", default="kappagen", choices=PARAM_MODELS)
    _add_param_flags(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("compare", help="fit several models and rank them")
    sp.add_argument("input")
    sp.add_argument("--models", required=True,
                    help="comma list with at least two model tags")
    common_fit_flags(sp)
    sp.set_defaults(func=_cmd_compare)

    sp = sub.add_parser("plotdata", help="two-column tables for plotting")
    sp.add_argument("--input", default=None)
    sp.add_argument("--model", default="kappagen", choices=PARAM_MODELS)
    _add_param_flags(sp)
    sp.add_argument("--kind", required=True, choices=("ccdf-loglog", "lorenz", "pdf"))
    sp.add_argument("--points", type=int, default=200)
    sp.add_argument("--no-header", action="store_true")
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=_cmd_plotdata)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_INPUT
    except KappagenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
